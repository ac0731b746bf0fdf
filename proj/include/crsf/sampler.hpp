#pragma once

// Seeded quenched random walk fields and the CRSF1 text format.

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "crsf/errors.hpp"
#include "crsf/torus.hpp"

namespace crsf {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 output finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct SampleKey {
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
};

// Per-field hash key; each vertex then mixes its own index into it, so a
// vertex's direction depends only on (seed, trial, index).
constexpr std::uint64_t field_key(SampleKey key) noexcept {
  return mix64(mix64(key.seed ^ kGolden) ^ key.trial);
}

constexpr Direction vertex_direction(std::uint64_t fkey, index_t index) noexcept {
  return (mix64(fkey ^ static_cast<std::uint64_t>(index)) & 1U) == 0 ? Direction::East
                                                                     : Direction::North;
}

// The quenched map: one direction per vertex, row-major.
class StepField {
 public:
  StepField(TorusDims dims, std::vector<Direction> directions)
      : dims_(dims), directions_(std::move(directions)) {
    if (directions_.size() != dims_.vertex_count()) {
      throw DomainError("field has " + std::to_string(directions_.size()) +
                        " directions, torus needs " +
                        std::to_string(dims_.vertex_count()));
    }
  }

  const TorusDims& dims() const noexcept { return dims_; }
  std::span<const Direction> directions() const noexcept { return directions_; }
  Direction at(VertexId v) const {
    check_vertex(dims_, v);
    return directions_[v.index];
  }

  VertexId phi(VertexId v) const { return step(dims_, v, at(v)); }

  friend bool operator==(const StepField&, const StepField&) = default;

 private:
  TorusDims dims_;
  std::vector<Direction> directions_;
};

// Fills an existing buffer; lets Monte Carlo loops reuse one allocation.
inline void sample_directions(const TorusDims& dims, SampleKey key,
                              std::vector<Direction>& out) {
  const index_t count = dims.vertex_count();
  out.resize(count);
  const std::uint64_t fkey = field_key(key);
  for (index_t v = 0; v < count; ++v) {
    out[v] = vertex_direction(fkey, v);
  }
}

inline StepField sample_field(const TorusDims& dims, SampleKey key) {
  std::vector<Direction> dirs;
  sample_directions(dims, key, dirs);
  return StepField(dims, std::move(dirs));
}

// bits[v] == 0 means East.
inline StepField field_from_bits(const TorusDims& dims, std::span<const std::uint8_t> bits) {
  if (bits.size() != dims.vertex_count()) {
    throw DomainError("bit pattern has " + std::to_string(bits.size()) +
                      " entries, torus needs " + std::to_string(dims.vertex_count()));
  }
  std::vector<Direction> dirs(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    dirs[i] = bits[i] == 0 ? Direction::East : Direction::North;
  }
  return StepField(dims, std::move(dirs));
}

// Bit v of `pattern` gives vertex v; used by exhaustive enumeration (nm <= 64).
inline StepField field_from_pattern(const TorusDims& dims, std::uint64_t pattern) {
  const index_t count = dims.vertex_count();
  if (count > 64) {
    throw DomainError("integer bit patterns cover at most 64 vertices");
  }
  std::vector<Direction> dirs(count);
  for (index_t v = 0; v < count; ++v) {
    dirs[v] = ((pattern >> v) & 1U) == 0 ? Direction::East : Direction::North;
  }
  return StepField(dims, std::move(dirs));
}

// CRSF1 format: "CRSF1 n m" then m rows of n characters from {E,N}; line y is row y.
inline void write_field(std::ostream& os, const StepField& field) {
  const index_t n = field.dims().n();
  const index_t m = field.dims().m();
  os << "CRSF1 " << n << ' ' << m << '\n';
  std::string row(n, 'E');
  for (index_t y = 0; y < m; ++y) {
    for (index_t x = 0; x < n; ++x) {
      row[x] = direction_char(field.directions()[y * n + x]);
    }
    os << row << '\n';
  }
}

inline StepField read_field(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) {
    throw DomainError("field file is empty");
  }
  std::istringstream hs(header);
  std::string magic;
  long long n = 0;
  long long m = 0;
  std::string trailing;
  if (!(hs >> magic >> n >> m) || magic != "CRSF1" || (hs >> trailing)) {
    throw DomainError("bad field header '" + header + "', expected 'CRSF1 n m'");
  }
  if (n <= 0 || m <= 0) {
    throw DomainError("field header has non-positive dimensions");
  }
  const TorusDims dims(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(m));
  std::vector<Direction> dirs;
  dirs.reserve(dims.vertex_count());
  std::string line;
  for (index_t y = 0; y < dims.m(); ++y) {
    if (!std::getline(is, line)) {
      throw DomainError("field file ends after " + std::to_string(y) + " of " +
                        std::to_string(dims.m()) + " rows");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.size() != dims.n()) {
      throw DomainError("row " + std::to_string(y) + " has " + std::to_string(line.size()) +
                        " cells, expected " + std::to_string(dims.n()));
    }
    for (char c : line) {
      if (c == 'E') {
        dirs.push_back(Direction::East);
      } else if (c == 'N') {
        dirs.push_back(Direction::North);
      } else {
        throw DomainError(std::string("invalid cell '") + c + "' in row " + std::to_string(y));
      }
    }
  }
  while (std::getline(is, line)) {
    if (!line.empty() && line != "\r") {
      throw DomainError("field file has more than " + std::to_string(dims.m()) + " rows");
    }
  }
  return StepField(dims, std::move(dirs));
}

}  // namespace crsf
