#pragma once

// Exhaustive oracles on small tori.
//
// enumerate_crsf walks all 2^(nm) quenched maps through the census engine and
// accumulates E[2^N]. exact_mnlp_partition independently enumerates the
// 3^(nm) absent/East/North vertex labellings, keeps the ones that form
// vertex-disjoint monotone cycles and sums 2^-(edges). The two share only the
// torus geometry, so their agreement is a genuine check.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "crsf/bigint.hpp"
#include "crsf/census.hpp"
#include "crsf/dyadic.hpp"
#include "crsf/sampler.hpp"
#include "crsf/torus.hpp"

namespace crsf {

inline constexpr std::uint64_t kDefaultCrsfCap = 24;
inline constexpr std::uint64_t kDefaultMnlpCap = 16;

// Key of the joint distribution of (N, shared class).
using CensusOutcome = std::pair<std::uint64_t, HomologyClass>;

struct ExactReport {
  TorusDims dims{1, 1};
  BigInt field_count = 0;
  BigInt sum_two_pow_N = 0;
  DyadicRational expectation_two_pow_N;
  std::optional<DyadicRational> z_mnlp;
  std::map<CensusOutcome, std::uint64_t> census_distribution;
};

namespace detail {

inline void check_cap(const TorusDims& dims, std::uint64_t cap, const char* what) {
  const std::uint64_t nm = dims.vertex_count();
  if (nm > cap) {
    throw CapExceeded(std::string(what) + " on " + std::to_string(dims.n()) + "x" +
                      std::to_string(dims.m()) + " needs cap >= " + std::to_string(nm) +
                      " (current cap " + std::to_string(cap) + ")");
  }
  if (nm > 62) {
    throw CapExceeded(std::string(what) + " supports at most 62 vertices");
  }
}

struct CrsfPartial {
  BigInt sum_two_pow_N = 0;
  std::map<CensusOutcome, std::uint64_t> distribution;
};

inline CrsfPartial enumerate_range(const TorusDims& dims, std::uint64_t first,
                                   std::uint64_t last) {
  CrsfPartial out;
  const index_t count = dims.vertex_count();
  std::vector<Direction> dirs(count);
  CensusWorkspace<std::uint32_t> ws;
  for (std::uint64_t pattern = first; pattern < last; ++pattern) {
    for (index_t v = 0; v < count; ++v) {
      dirs[v] = ((pattern >> v) & 1U) == 0 ? Direction::East : Direction::North;
    }
    const CycleCensus census = find_cycles(std::span<const Direction>(dirs), dims, ws);
    const std::uint64_t cycles = census.total_cycles();
    out.sum_two_pow_N += pow2(cycles);
    ++out.distribution[{cycles, census.shared_class()}];
  }
  return out;
}

}  // namespace detail

// Census distribution and E[2^N] over every field of the torus.
inline ExactReport enumerate_crsf(const TorusDims& dims, std::uint64_t cap = kDefaultCrsfCap,
                                  unsigned workers = 1) {
  detail::check_cap(dims, cap, "CRSF enumeration");
  const std::uint64_t nm = dims.vertex_count();
  const std::uint64_t total = std::uint64_t{1} << nm;
  workers = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::uint64_t>(total, 256))));

  std::vector<detail::CrsfPartial> partials(workers);
  if (workers == 1) {
    partials[0] = detail::enumerate_range(dims, 0, total);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t lo = total * w / workers;
      const std::uint64_t hi = total * (w + 1) / workers;
      pool.emplace_back([&, w, lo, hi] { partials[w] = detail::enumerate_range(dims, lo, hi); });
    }
    for (auto& t : pool) t.join();
  }

  ExactReport report;
  report.dims = dims;
  report.field_count = pow2(nm);
  for (auto& part : partials) {
    report.sum_two_pow_N += part.sum_two_pow_N;
    for (const auto& [key, c] : part.distribution) report.census_distribution[key] += c;
  }
  report.expectation_two_pow_N = DyadicRational(report.sum_two_pow_N, nm);
  return report;
}

// Z = sum over vertex-disjoint monotone cycle configurations C of 2^-|C|.
inline DyadicRational exact_mnlp_partition(const TorusDims& dims,
                                           std::uint64_t cap = kDefaultMnlpCap) {
  detail::check_cap(dims, cap, "MNLP enumeration");
  const index_t count = dims.vertex_count();

  // target[v][s-1] for s in {East, North}
  std::vector<std::array<index_t, 2>> target(count);
  for (index_t v = 0; v < count; ++v) {
    target[v][0] = step(dims, VertexId{v}, Direction::East).index;
    target[v][1] = step(dims, VertexId{v}, Direction::North).index;
  }

  // Ternary odometer: 0 absent, 1 East edge, 2 North edge.
  std::vector<std::uint8_t> state(count, 0);
  std::vector<std::uint8_t> indegree(count, 0);
  std::vector<std::uint64_t> by_edges(count + 1, 0);
  while (true) {
    std::fill(indegree.begin(), indegree.end(), std::uint8_t{0});
    bool valid = true;
    index_t edges = 0;
    for (index_t v = 0; v < count && valid; ++v) {
      if (state[v] == 0) continue;
      ++edges;
      const index_t t = target[v][state[v] - 1];
      if (state[t] == 0 || ++indegree[t] > 1) valid = false;
    }
    // Every present vertex emits one edge into a present vertex with in-degree
    // at most one; edge and vertex counts agree, so every in-degree is one.
    if (valid) ++by_edges[edges];

    index_t i = 0;
    while (i < count && state[i] == 2) state[i++] = 0;
    if (i == count) break;
    ++state[i];
  }

  DyadicRational z;
  for (index_t k = 0; k <= count; ++k) {
    if (by_edges[k] != 0) z += DyadicRational(BigInt(by_edges[k]), k);
  }
  return z;
}

struct IdentityCheck {
  bool equal = false;                 // E[2^N] == Z_MNLP
  bool oriented_count_matches = false;  // sum 2^N == 2^(nm) * Z_MNLP
  DyadicRational expectation_two_pow_N;
  DyadicRational z_mnlp;
  BigInt sum_two_pow_N = 0;
};

inline IdentityCheck verify_identity(const TorusDims& dims, std::uint64_t cap = kDefaultMnlpCap) {
  const ExactReport report = enumerate_crsf(dims, cap);
  IdentityCheck out;
  out.expectation_two_pow_N = report.expectation_two_pow_N;
  out.z_mnlp = exact_mnlp_partition(dims, cap);
  out.sum_two_pow_N = report.sum_two_pow_N;
  out.equal = out.expectation_two_pow_N == out.z_mnlp;
  const DyadicRational oriented = out.z_mnlp.scaled_by_pow2(static_cast<std::int64_t>(dims.vertex_count()));
  out.oriented_count_matches = oriented == DyadicRational(report.sum_two_pow_N);
  return out;
}

inline nlohmann::ordered_json dyadic_json(const DyadicRational& r) {
  nlohmann::ordered_json j;
  j["numerator"] = r.numerator().str();
  j["log2_denominator"] = r.log2_denominator();
  return j;
}

inline nlohmann::ordered_json exact_report_json(const ExactReport& report) {
  nlohmann::ordered_json j;
  j["n"] = report.dims.n();
  j["m"] = report.dims.m();
  j["field_count"] = report.field_count.str();
  j["sum_two_pow_N"] = report.sum_two_pow_N.str();
  j["expectation_two_pow_N"] = dyadic_json(report.expectation_two_pow_N);
  if (report.z_mnlp) {
    j["z_mnlp"] = dyadic_json(*report.z_mnlp);
    j["identity_holds"] = *report.z_mnlp == report.expectation_two_pow_N;
  }
  auto dist = nlohmann::ordered_json::array();
  for (const auto& [key, c] : report.census_distribution) {
    nlohmann::ordered_json row;
    row["N"] = key.first;
    row["p"] = key.second.p();
    row["q"] = key.second.q();
    row["fields"] = c;
    dist.push_back(std::move(row));
  }
  j["census_distribution"] = std::move(dist);
  return j;
}

}  // namespace crsf
