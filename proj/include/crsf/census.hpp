#pragma once

// Orbit structure of a quenched map: every periodic cycle with its length and
// winding numbers. Tree components hanging off the cycles are not recorded.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "crsf/bigint.hpp"
#include "crsf/sampler.hpp"
#include "crsf/torus.hpp"

namespace crsf {

struct Cycle {
  VertexId anchor;  // smallest vertex index on the cycle
  std::uint64_t length = 0;
  std::uint64_t h_steps = 0;
  std::uint64_t v_steps = 0;
  HomologyClass homology{1, 0};
};

class CycleCensus {
 public:
  CycleCensus(TorusDims dims, std::vector<Cycle> cycles)
      : dims_(dims), cycles_(std::move(cycles)) {
    std::sort(cycles_.begin(), cycles_.end(),
              [](const Cycle& a, const Cycle& b) { return a.anchor < b.anchor; });
    for (const Cycle& c : cycles_) ++class_counts_[c.homology];
  }

  const TorusDims& dims() const noexcept { return dims_; }
  std::span<const Cycle> cycles() const noexcept { return cycles_; }
  std::uint64_t total_cycles() const noexcept { return cycles_.size(); }
  const std::map<HomologyClass, std::uint64_t>& class_counts() const noexcept {
    return class_counts_;
  }

  // The common class of all cycles. Disjoint closed orbits on the torus
  // always share one, so a second entry is a census bug.
  HomologyClass shared_class() const {
    if (class_counts_.size() != 1) {
      throw StructuralError("census holds " + std::to_string(class_counts_.size()) +
                            " homology classes, expected exactly one");
    }
    return class_counts_.begin()->first;
  }

  std::uint64_t count_of(const HomologyClass& h) const {
    const auto it = class_counts_.find(h);
    return it == class_counts_.end() ? 0 : it->second;
  }

 private:
  TorusDims dims_;
  std::vector<Cycle> cycles_;
  std::map<HomologyClass, std::uint64_t> class_counts_;
};

// Reusable marking buffer for find_cycles. Marks are walk ids; a vertex is
// unvisited for the current field iff its mark is below `base_`, so the
// buffer only needs clearing when the id space is about to wrap.
template <typename Mark = std::uint32_t>
class CensusWorkspace {
 public:
  static_assert(std::is_unsigned_v<Mark>);

  std::size_t aux_bytes() const noexcept { return marks_.capacity() * sizeof(Mark); }

  template <typename F>
  friend CycleCensus find_cycles(std::span<const Direction>, const TorusDims&,
                                 CensusWorkspace<F>&);

 private:
  // Returns the id floor for a new field of `count` vertices.
  Mark begin_field(std::size_t count) {
    if (count >= std::numeric_limits<Mark>::max()) {
      throw DomainError("torus too large for this workspace's mark width");
    }
    if (marks_.size() != count) {
      marks_.assign(count, 0);
      next_ = 1;
    } else if (std::numeric_limits<Mark>::max() - next_ <= static_cast<Mark>(count)) {
      std::fill(marks_.begin(), marks_.end(), Mark{0});
      next_ = 1;
    }
    return next_;
  }

  std::vector<Mark> marks_;
  Mark next_ = 1;
};

// Iterative pointer chase over the functional graph. Each vertex is written
// once on its first visit and read at most twice more (the hit test and, for
// cycle vertices, the measuring lap).
template <typename Mark>
CycleCensus find_cycles(std::span<const Direction> dirs, const TorusDims& dims,
                        CensusWorkspace<Mark>& ws) {
  const index_t n = dims.n();
  const index_t count = dims.vertex_count();
  if (dirs.size() != count) {
    throw DomainError("direction count does not match torus size");
  }
  const Mark base = ws.begin_field(count);
  Mark id = base;
  Mark* marks = ws.marks_.data();
  const Direction* d = dirs.data();
  std::vector<Cycle> cycles;

  for (index_t start = 0, start_x = 0; start < count;
       ++start, start_x = (start_x + 1 == n) ? 0 : start_x + 1) {
    if (marks[start] >= base) continue;
    index_t v = start;
    index_t x = start_x;
    while (marks[v] < base) {
      marks[v] = id;
      if (d[v] == Direction::East) {
        if (++x == n) {
          x = 0;
          v = v + 1 - n;
        } else {
          ++v;
        }
      } else {
        v += n;
        if (v >= count) v -= count;
      }
    }
    if (marks[v] == id) {
      // v lies on a newly closed cycle; walk it once to measure.
      Cycle c;
      index_t anchor = v;
      const index_t entry = v;
      do {
        if (d[v] == Direction::East) {
          ++c.h_steps;
          if (++x == n) {
            x = 0;
            v = v + 1 - n;
          } else {
            ++v;
          }
        } else {
          ++c.v_steps;
          v += n;
          if (v >= count) v -= count;
        }
        anchor = std::min(anchor, v);
      } while (v != entry);
      c.anchor = VertexId{anchor};
      c.length = c.h_steps + c.v_steps;
      c.homology = make_homology(dims, c.h_steps, c.v_steps);
      cycles.push_back(c);
    }
    ++id;
  }
  ws.next_ = id;
  return CycleCensus(dims, std::move(cycles));
}

inline CycleCensus find_cycles(const StepField& field) {
  const index_t count = field.dims().vertex_count();
  if (count < std::numeric_limits<std::uint32_t>::max()) {
    CensusWorkspace<std::uint32_t> ws;
    return find_cycles(field.directions(), field.dims(), ws);
  }
  CensusWorkspace<std::uint64_t> ws;
  return find_cycles(field.directions(), field.dims(), ws);
}

struct SummaryRecord {
  std::uint64_t total_cycles = 0;
  HomologyClass shared_class{1, 0};
  std::uint64_t min_length = 0;
  std::uint64_t max_length = 0;
  std::uint64_t total_length = 0;
  std::string mean_length;  // total_length / total_cycles, six decimals
};

inline SummaryRecord census_summary(const CycleCensus& census) {
  if (census.total_cycles() == 0) {
    throw StructuralError("census without cycles");
  }
  SummaryRecord r;
  r.total_cycles = census.total_cycles();
  r.shared_class = census.shared_class();
  r.min_length = std::numeric_limits<std::uint64_t>::max();
  for (const Cycle& c : census.cycles()) {
    r.min_length = std::min(r.min_length, c.length);
    r.max_length = std::max(r.max_length, c.length);
    r.total_length += c.length;
  }
  r.mean_length = format_ratio(BigInt(r.total_length), BigInt(r.total_cycles), 6);
  return r;
}

// One JSON-lines record; key order is fixed for byte-identical output.
inline std::string census_json_line(const CycleCensus& census, SampleKey key) {
  nlohmann::ordered_json j;
  const HomologyClass h = census.shared_class();
  j["n"] = census.dims().n();
  j["m"] = census.dims().m();
  j["seed"] = key.seed;
  j["trial"] = key.trial;
  j["N"] = census.total_cycles();
  j["p"] = h.p();
  j["q"] = h.q();
  auto lengths = nlohmann::ordered_json::array();
  for (const Cycle& c : census.cycles()) lengths.push_back(c.length);
  j["lengths"] = std::move(lengths);
  return j.dump();
}

}  // namespace crsf
