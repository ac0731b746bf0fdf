#pragma once

// Monte Carlo harness: runs independent censuses keyed by (seed, trial),
// reduces them with exact integer accumulators and renders rows.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "crsf/bigint.hpp"
#include "crsf/census.hpp"
#include "crsf/errors.hpp"
#include "crsf/rational.hpp"
#include "crsf/sampler.hpp"
#include "crsf/torus.hpp"

namespace crsf {

// How trial t becomes a field: hashed from (seed, t), or the bit pattern t.
enum class FieldSource { Hashed, ExhaustiveBits };

// Runs trials [0, trials) split into contiguous blocks, one per worker; each
// block folds into its own Acc and the blocks are merged in block order.
// Acc needs add(const CycleCensus&, SampleKey) and merge(const Acc&). For a
// commutative Acc the result does not depend on `workers`.
template <typename Acc>
Acc run_trials(const TorusDims& dims, std::uint64_t seed, std::uint64_t trials,
               unsigned workers, const Acc& prototype,
               FieldSource source = FieldSource::Hashed) {
  if (trials == 0) throw ConfigError("trials must be at least 1");
  if (source == FieldSource::ExhaustiveBits) {
    if (dims.vertex_count() > 62 || trials > (std::uint64_t{1} << dims.vertex_count())) {
      throw ConfigError("exhaustive bit patterns need trials <= 2^(nm) and nm <= 62");
    }
  }
  workers = static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(workers, trials)));

  auto run_block = [&](std::uint64_t lo, std::uint64_t hi, Acc& acc, auto& ws) {
    std::vector<Direction> dirs;
    const index_t count = dims.vertex_count();
    for (std::uint64_t t = lo; t < hi; ++t) {
      const SampleKey key{seed, t};
      if (source == FieldSource::Hashed) {
        sample_directions(dims, key, dirs);
      } else {
        dirs.resize(count);
        for (index_t v = 0; v < count; ++v) {
          dirs[v] = ((t >> v) & 1U) == 0 ? Direction::East : Direction::North;
        }
      }
      acc.add(find_cycles(std::span<const Direction>(dirs), dims, ws), key);
    }
  };
  auto block = [&](std::uint64_t lo, std::uint64_t hi, Acc& acc) {
    if (dims.vertex_count() < std::numeric_limits<std::uint32_t>::max()) {
      CensusWorkspace<std::uint32_t> ws;
      run_block(lo, hi, acc, ws);
    } else {
      CensusWorkspace<std::uint64_t> ws;
      run_block(lo, hi, acc, ws);
    }
  };

  std::vector<Acc> parts(workers, prototype);
  if (workers == 1) {
    block(0, trials, parts[0]);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t lo = trials * w / workers;
      const std::uint64_t hi = trials * (w + 1) / workers;
      pool.emplace_back([&, w, lo, hi] { block(lo, hi, parts[w]); });
    }
    for (auto& th : pool) th.join();
  }
  Acc total = prototype;
  for (const Acc& p : parts) total.merge(p);
  return total;
}

// Exact per-sweep-point sums.
struct ScanAccumulator {
  std::uint64_t trials = 0;
  std::uint64_t sum_N = 0;
  BigInt sum_N_sq = 0;
  BigInt sum_two_pow_N = 0;
  BigInt sum_four_pow_N = 0;
  BigInt total_length = 0;
  std::uint64_t max_length = 0;
  std::uint64_t min_N = std::numeric_limits<std::uint64_t>::max();
  std::map<HomologyClass, std::uint64_t> cycles_by_class;
  std::map<HomologyClass, std::uint64_t> samples_by_class;

  void add(const CycleCensus& census, SampleKey) {
    const std::uint64_t n_cycles = census.total_cycles();
    if (n_cycles < 1) throw StructuralError("field without a periodic orbit");
    const HomologyClass h = census.shared_class();
    ++trials;
    sum_N += n_cycles;
    sum_N_sq += BigInt(n_cycles) * n_cycles;
    sum_two_pow_N += pow2(n_cycles);
    sum_four_pow_N += pow2(2 * n_cycles);
    min_N = std::min(min_N, n_cycles);
    for (const Cycle& c : census.cycles()) {
      total_length += c.length;
      max_length = std::max(max_length, c.length);
    }
    cycles_by_class[h] += n_cycles;
    ++samples_by_class[h];
  }

  void merge(const ScanAccumulator& o) {
    trials += o.trials;
    sum_N += o.sum_N;
    sum_N_sq += o.sum_N_sq;
    sum_two_pow_N += o.sum_two_pow_N;
    sum_four_pow_N += o.sum_four_pow_N;
    total_length += o.total_length;
    max_length = std::max(max_length, o.max_length);
    min_N = std::min(min_N, o.min_N);
    for (const auto& [h, c] : o.cycles_by_class) cycles_by_class[h] += c;
    for (const auto& [h, c] : o.samples_by_class) samples_by_class[h] += c;
  }
};

struct ScanRow {
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  std::uint64_t seed = 0;
  ScanAccumulator acc;
  std::optional<double> c_value;  // scan_C only
  std::optional<HomologyClass> target_class;
  std::optional<FormulaValue> prediction;

  std::uint64_t trials() const noexcept { return acc.trials; }

  double mean_N() const { return static_cast<double>(acc.sum_N) / static_cast<double>(acc.trials); }

  // Sample standard deviation (n - 1 denominator); 0 for a single trial.
  double sd_N() const { return sample_sd(BigInt(acc.sum_N), acc.sum_N_sq); }

  std::string mean_two_pow_N_text() const {
    return format_ratio(acc.sum_two_pow_N, BigInt(acc.trials), 6);
  }

  double mean_two_pow_N() const {
    return static_cast<double>(acc.sum_two_pow_N) / static_cast<double>(acc.trials);
  }

  // Normal-approximation 95% half-width for E[2^N]. 2^N is heavy-tailed near
  // the spikes, so treat this as indicative only.
  double ci95_two_pow_N() const {
    if (acc.trials < 2) return 0.0;
    return 1.96 * sample_sd(acc.sum_two_pow_N, acc.sum_four_pow_N) /
           std::sqrt(static_cast<double>(acc.trials));
  }

  // Mean count of cycles of `h` per sample.
  double mean_count_of(const HomologyClass& h) const {
    const auto it = acc.cycles_by_class.find(h);
    const std::uint64_t c = it == acc.cycles_by_class.end() ? 0 : it->second;
    return static_cast<double>(c) / static_cast<double>(acc.trials);
  }

  double fraction_of_samples(const HomologyClass& h) const {
    const auto it = acc.samples_by_class.find(h);
    const std::uint64_t c = it == acc.samples_by_class.end() ? 0 : it->second;
    return static_cast<double>(c) / static_cast<double>(acc.trials);
  }

  std::string classes_text() const {
    std::string out;
    for (const auto& [h, c] : acc.cycles_by_class) {
      if (!out.empty()) out += ';';
      out += std::to_string(h.p()) + ":" + std::to_string(h.q()) + ":" + std::to_string(c);
    }
    return out;
  }

  std::string mean_length_text() const {
    return format_ratio(acc.total_length, BigInt(acc.sum_N), 6);
  }

 private:
  double sample_sd(const BigInt& sum, const BigInt& sum_sq) const {
    const std::uint64_t t = acc.trials;
    if (t < 2) return 0.0;
    // (t * sum_sq - sum^2) / (t (t - 1)), exact up to the final division
    const BigInt num = BigInt(t) * sum_sq - sum * sum;
    const BigInt den = BigInt(t) * BigInt(t - 1);
    const double var = boost::multiprecision::cpp_rational(num, den).convert_to<double>();
    return var > 0 ? std::sqrt(var) : 0.0;
  }
};

inline constexpr const char* kCsvHeader =
    "n,m,trials,seed,mean_N,sd_N,classes,mean_len,max_len,mean_2powN,ci95_2powN";
inline constexpr const char* kScanCExtraHeader = ",C,mean_Npq,predicted_Npq";

inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline std::string csv_line(const ScanRow& r) {
  std::ostringstream os;
  os << r.n << ',' << r.m << ',' << r.trials() << ',' << r.seed << ','
     << format_ratio(BigInt(r.acc.sum_N), BigInt(r.acc.trials), 6) << ',' << fixed6(r.sd_N())
     << ',' << r.classes_text() << ',' << r.mean_length_text() << ',' << r.acc.max_length << ','
     << r.mean_two_pow_N_text() << ',' << fixed6(r.ci95_two_pow_N());
  if (r.c_value) {
    os << ',' << fixed6(*r.c_value) << ',' << fixed6(r.mean_count_of(*r.target_class)) << ','
       << (r.prediction ? fixed6(r.prediction->value) : std::string());
  }
  return os.str();
}

inline std::string jsonl_line(const ScanRow& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["m"] = r.m;
  j["trials"] = r.trials();
  j["seed"] = r.seed;
  j["sum_N"] = r.acc.sum_N;
  j["mean_N"] = format_ratio(BigInt(r.acc.sum_N), BigInt(r.acc.trials), 6);
  j["sd_N"] = fixed6(r.sd_N());
  auto classes = nlohmann::ordered_json::array();
  for (const auto& [h, c] : r.acc.cycles_by_class) classes.push_back({h.p(), h.q(), c});
  j["classes"] = std::move(classes);
  j["mean_len"] = r.mean_length_text();
  j["max_len"] = r.acc.max_length;
  j["sum_2powN"] = r.acc.sum_two_pow_N.str();
  j["mean_2powN"] = r.mean_two_pow_N_text();
  j["ci95_2powN"] = fixed6(r.ci95_two_pow_N());
  if (r.c_value) {
    j["C"] = *r.c_value;
    j["mean_Npq"] = fixed6(r.mean_count_of(*r.target_class));
    j["predicted_Npq"] = r.prediction ? nlohmann::ordered_json(r.prediction->value)
                                      : nlohmann::ordered_json(nullptr);
  }
  return j.dump();
}

enum class ScanMode { Sample, ScanM, ScanC };
enum class OutputFormat { Csv, Jsonl };

struct ScanConfig {
  ScanMode mode = ScanMode::Sample;
  std::uint64_t n = 0;
  std::uint64_t m = 0;  // Sample
  std::uint64_t m_from = 0, m_to = 0, m_step = 1;  // ScanM
  std::uint64_t p = 1, q = 1;  // ScanC
  std::vector<double> c_list;  // ScanC
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  bool exhaustive_bits = false;
  std::string output_path;  // empty: no file
  OutputFormat format = OutputFormat::Csv;
  std::string jsonl_census_path;  // Sample: one census record per trial
};

// Height of the scan_C torus: floor((p/q) n + C sqrt(n ln n)).
inline std::uint64_t scan_c_height(std::uint64_t n, std::uint64_t p, std::uint64_t q, double c) {
  const double nd = static_cast<double>(n);
  const double m = static_cast<double>(p) * nd / static_cast<double>(q) +
                   c * std::sqrt(nd * std::log(nd));
  if (!(m >= 1)) throw ConfigError("scan_C height below 1 for C=" + std::to_string(c));
  return static_cast<std::uint64_t>(std::floor(m));
}

inline void validate(const ScanConfig& c) {
  if (c.trials == 0) throw ConfigError("trials must be at least 1");
  if (c.n == 0) throw ConfigError("n must be at least 1");
  if (c.workers == 0) throw ConfigError("workers must be at least 1");
  switch (c.mode) {
    case ScanMode::Sample:
      if (c.m == 0) throw ConfigError("m must be at least 1");
      break;
    case ScanMode::ScanM:
      if (c.m_from == 0 || c.m_to < c.m_from || c.m_step == 0) {
        throw ConfigError("scan-m needs 1 <= m-from <= m-to and step >= 1");
      }
      break;
    case ScanMode::ScanC:
      if (c.c_list.empty()) throw ConfigError("scan-c needs a non-empty C list");
      if (c.p == 0 || c.q == 0 || std::gcd(c.p, c.q) != 1) {
        throw ConfigError("scan-c needs coprime p, q >= 1");
      }
      break;
  }
  if (c.exhaustive_bits && c.mode != ScanMode::Sample) {
    throw ConfigError("exhaustive bit patterns are only available in sample mode");
  }
}

// Census JSON-lines collector; keeps records keyed by trial so output order
// is independent of the worker split.
struct CensusLineCollector {
  ScanAccumulator acc;
  std::map<std::uint64_t, std::string> lines;

  void add(const CycleCensus& census, SampleKey key) {
    acc.add(census, key);
    lines.emplace(key.trial, census_json_line(census, key));
  }
  void merge(const CensusLineCollector& o) {
    acc.merge(o.acc);
    lines.insert(o.lines.begin(), o.lines.end());
  }
};

inline std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open output file", path);
  return os;
}

inline void write_rows(std::ostream& os, const std::vector<ScanRow>& rows, OutputFormat fmt) {
  if (fmt == OutputFormat::Csv) {
    const bool scan_c = !rows.empty() && rows.front().c_value.has_value();
    os << kCsvHeader << (scan_c ? kScanCExtraHeader : "") << '\n';
    for (const ScanRow& r : rows) os << csv_line(r) << '\n';
  } else {
    for (const ScanRow& r : rows) os << jsonl_line(r) << '\n';
  }
}

inline std::vector<ScanRow> run_scan(const ScanConfig& config) {
  validate(config);
  const FieldSource source =
      config.exhaustive_bits ? FieldSource::ExhaustiveBits : FieldSource::Hashed;
  std::vector<ScanRow> rows;

  auto point = [&](std::uint64_t m) {
    ScanRow row;
    row.n = config.n;
    row.m = m;
    row.seed = config.seed;
    const TorusDims dims(config.n, m);
    if (!config.jsonl_census_path.empty()) {
      const auto out = run_trials(dims, config.seed, config.trials, config.workers,
                                  CensusLineCollector{}, source);
      std::ofstream os = open_output(config.jsonl_census_path);
      for (const auto& [t, line] : out.lines) os << line << '\n';
      if (!os) throw IoError("write failed", config.jsonl_census_path);
      row.acc = out.acc;
    } else {
      row.acc = run_trials(dims, config.seed, config.trials, config.workers,
                           ScanAccumulator{}, source);
    }
    return row;
  };

  switch (config.mode) {
    case ScanMode::Sample:
      rows.push_back(point(config.m));
      break;
    case ScanMode::ScanM:
      for (std::uint64_t m = config.m_from; m <= config.m_to; m += config.m_step) {
        rows.push_back(point(m));
      }
      break;
    case ScanMode::ScanC: {
      const HomologyClass target(config.p, config.q);
      for (double c : config.c_list) {
        ScanRow row = point(scan_c_height(config.n, config.p, config.q, c));
        row.c_value = c;
        row.target_class = target;
        row.prediction = expected_cycles_formula(static_cast<double>(config.n), std::abs(c),
                                                 config.p, config.q);
        rows.push_back(std::move(row));
      }
      break;
    }
  }

  if (!config.output_path.empty()) {
    std::ofstream os = open_output(config.output_path);
    write_rows(os, rows, config.format);
    os.flush();
    if (!os) throw IoError("write failed", config.output_path);
  }
  return rows;
}

// Convenience wrapper around run_scan in ScanC mode.
inline std::vector<ScanRow> scan_C(std::uint64_t n, std::uint64_t p, std::uint64_t q,
                                   std::vector<double> c_list, std::uint64_t trials,
                                   std::uint64_t seed, unsigned workers = 1) {
  ScanConfig cfg;
  cfg.mode = ScanMode::ScanC;
  cfg.n = n;
  cfg.p = p;
  cfg.q = q;
  cfg.c_list = std::move(c_list);
  cfg.trials = trials;
  cfg.seed = seed;
  cfg.workers = workers;
  return run_scan(cfg);
}

}  // namespace crsf
