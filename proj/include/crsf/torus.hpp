#pragma once

// Geometry of the discrete torus Z/nZ x Z/mZ with East/North unit steps.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "crsf/errors.hpp"

namespace crsf {

using index_t = std::size_t;

// Horizontal period n and vertical period m.
class TorusDims {
 public:
  TorusDims(std::uint64_t n, std::uint64_t m) : n_(n), m_(m) {
    if (n == 0 || m == 0) {
      throw DomainError("torus dimensions must be positive, got n=" +
                        std::to_string(n) + " m=" + std::to_string(m));
    }
    if (n > std::numeric_limits<index_t>::max() / m) {
      throw DomainError("vertex count n*m overflows the index type");
    }
  }

  index_t n() const noexcept { return static_cast<index_t>(n_); }
  index_t m() const noexcept { return static_cast<index_t>(m_); }
  index_t vertex_count() const noexcept { return n() * m(); }

  friend bool operator==(const TorusDims&, const TorusDims&) = default;

 private:
  std::uint64_t n_;
  std::uint64_t m_;
};

// Row-major vertex handle: index = y * n + x.
struct VertexId {
  index_t index = 0;

  friend auto operator<=>(const VertexId&, const VertexId&) = default;
};

// Encoding is normative for field files and bit patterns.
enum class Direction : std::uint8_t { East = 0, North = 1 };

inline char direction_char(Direction d) noexcept {
  return d == Direction::East ? 'E' : 'N';
}

// Winding numbers of a closed orbit: p crossings of a vertical line,
// q crossings of a horizontal line. Always coprime with gcd(k, 0) = k.
class HomologyClass {
 public:
  HomologyClass(std::uint64_t p, std::uint64_t q) : p_(p), q_(q) {
    if (p == 0 && q == 0) {
      throw DomainError("homology class (0,0) is not a closed orbit");
    }
    if (std::gcd(p, q) != 1) {
      throw DomainError("homology class (" + std::to_string(p) + "," +
                        std::to_string(q) + ") is not primitive");
    }
  }

  std::uint64_t p() const noexcept { return p_; }
  std::uint64_t q() const noexcept { return q_; }

  // Edge count of any cycle of this class on the given torus.
  std::uint64_t cycle_length(const TorusDims& dims) const noexcept {
    return dims.n() * p_ + dims.m() * q_;
  }

  std::string to_string() const {
    return "(" + std::to_string(p_) + "," + std::to_string(q_) + ")";
  }

  friend auto operator<=>(const HomologyClass&, const HomologyClass&) = default;

 private:
  std::uint64_t p_;
  std::uint64_t q_;
};

inline VertexId vertex_index(const TorusDims& dims, std::int64_t x, std::int64_t y) {
  if (x < 0 || y < 0 || static_cast<std::uint64_t>(x) >= dims.n() ||
      static_cast<std::uint64_t>(y) >= dims.m()) {
    throw DomainError("coordinate (" + std::to_string(x) + "," + std::to_string(y) +
                      ") outside torus " + std::to_string(dims.n()) + "x" +
                      std::to_string(dims.m()));
  }
  return VertexId{static_cast<index_t>(y) * dims.n() + static_cast<index_t>(x)};
}

inline void check_vertex(const TorusDims& dims, VertexId v) {
  if (v.index >= dims.vertex_count()) {
    throw DomainError("vertex index " + std::to_string(v.index) + " out of range");
  }
}

// (x, y) of a vertex.
inline std::pair<index_t, index_t> coords(const TorusDims& dims, VertexId v) {
  check_vertex(dims, v);
  return {v.index % dims.n(), v.index / dims.n()};
}

// Unchecked successor; the census hot loop relies on this being branch-light.
inline index_t step_unchecked(index_t n, index_t count, index_t v, Direction d) noexcept {
  if (d == Direction::East) {
    const index_t x = v % n;
    return x + 1 == n ? v + 1 - n : v + 1;
  }
  const index_t w = v + n;
  return w >= count ? w - count : w;
}

inline VertexId step(const TorusDims& dims, VertexId v, Direction d) {
  check_vertex(dims, v);
  return VertexId{step_unchecked(dims.n(), dims.vertex_count(), v.index, d)};
}

// Converts East/North step totals of a closed orbit into its homology class.
// Every cycle has exactly n*p East and m*q North steps, so a remainder means
// the caller counted wrong.
inline HomologyClass make_homology(const TorusDims& dims, std::uint64_t h_steps,
                                   std::uint64_t v_steps) {
  if (h_steps == 0 && v_steps == 0) {
    throw DomainError("a closed orbit has at least one step");
  }
  if (h_steps % dims.n() != 0 || v_steps % dims.m() != 0) {
    throw StructuralError("step counts (" + std::to_string(h_steps) + "," +
                          std::to_string(v_steps) + ") are not multiples of (" +
                          std::to_string(dims.n()) + "," + std::to_string(dims.m()) +
                          ")");
  }
  const std::uint64_t p = h_steps / dims.n();
  const std::uint64_t q = v_steps / dims.m();
  if (std::gcd(p, q) != 1) {
    throw StructuralError("winding numbers " + std::to_string(p) + "," +
                          std::to_string(q) + " are not coprime");
  }
  return HomologyClass(p, q);
}

}  // namespace crsf
