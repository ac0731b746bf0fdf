#pragma once

// Continued fractions of the aspect ratio m/n and the closed-form regime
// predictions built on them.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "crsf/errors.hpp"
#include "crsf/torus.hpp"

namespace crsf {

struct ContinuedFraction {
  std::vector<std::uint64_t> coefficients;  // a_0; a_1, ..., a_l

  std::size_t last_index() const noexcept { return coefficients.size() - 1; }

  // Folds the coefficients back into a fraction; always in lowest terms.
  std::pair<std::uint64_t, std::uint64_t> evaluate() const {
    std::uint64_t num = 1;
    std::uint64_t den = 0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
      const std::uint64_t next = *it * num + den;
      den = num;
      num = next;
    }
    return {num, den};
  }
};

inline ContinuedFraction continued_fraction(std::uint64_t m, std::uint64_t n) {
  if (m == 0 || n == 0) throw DomainError("continued_fraction needs m, n >= 1");
  ContinuedFraction cf;
  while (n != 0) {
    cf.coefficients.push_back(m / n);
    const std::uint64_t r = m % n;
    m = n;
    n = r;
  }
  return cf;
}

struct Convergent {
  std::uint64_t p = 0;
  std::uint64_t q = 0;
};

struct ConvergentTable {
  std::vector<std::uint64_t> coefficients;
  std::vector<Convergent> entries;
  std::optional<std::size_t> j0;
  bool saturated = false;  // every q_j is within the cutoff
};

inline ConvergentTable convergents(const ContinuedFraction& cf) {
  ConvergentTable t;
  t.coefficients = cf.coefficients;
  // seeds (p_-2, q_-2) = (0, 1), (p_-1, q_-1) = (1, 0)
  std::uint64_t p2 = 0, q2 = 1, p1 = 1, q1 = 0;
  for (std::uint64_t a : cf.coefficients) {
    const std::uint64_t p = a * p1 + p2;
    const std::uint64_t q = a * q1 + q2;
    t.entries.push_back({p, q});
    p2 = p1;
    q2 = q1;
    p1 = p;
    q1 = q;
  }
  return t;
}

namespace detail {
// q^3 <= n without overflow.
inline bool cube_at_most(std::uint64_t q, std::uint64_t n) {
  const auto c = static_cast<unsigned __int128>(q) * q * q;
  return c <= n;
}
}  // namespace detail

struct J0Selection {
  std::size_t index = 0;
  bool saturated = false;
};

// Largest j with q_j^3 <= n. q_0 = 1, so some index always qualifies.
inline J0Selection select_j0(std::uint64_t n, const ConvergentTable& table) {
  if (table.entries.empty()) throw DomainError("select_j0 on an empty convergent table");
  J0Selection sel;
  for (std::size_t j = 0; j < table.entries.size(); ++j) {
    if (detail::cube_at_most(table.entries[j].q, n)) sel.index = j;
  }
  sel.saturated = sel.index + 1 == table.entries.size();
  return sel;
}

inline ConvergentTable convergents_with_j0(std::uint64_t m, std::uint64_t n) {
  ConvergentTable t = convergents(continued_fraction(m, n));
  const J0Selection sel = select_j0(n, t);
  t.j0 = sel.index;
  t.saturated = sel.saturated;
  return t;
}

// |n p_j - m q_j| against n/(2 q_{j+1}) and n/q_{j+1}, in exact integers.
struct ApproximationCheck {
  std::uint64_t gap = 0;  // |n p_j - m q_j|
  bool lower_strict = false;  // 2 q_{j+1} gap > n
  bool upper_strict = false;  // q_{j+1} gap < n
  bool upper_equal = false;   // q_{j+1} gap == n
};

inline ApproximationCheck check_approximation(std::uint64_t n, std::uint64_t m,
                                              const ConvergentTable& t, std::size_t j) {
  if (j + 1 >= t.entries.size()) throw DomainError("approximation bound needs j < l");
  const auto np = static_cast<__int128>(n) * t.entries[j].p;
  const auto mq = static_cast<__int128>(m) * t.entries[j].q;
  const __int128 diff = np > mq ? np - mq : mq - np;
  const auto next_q = static_cast<__int128>(t.entries[j + 1].q);
  ApproximationCheck c;
  c.gap = static_cast<std::uint64_t>(diff);
  c.lower_strict = 2 * next_q * diff > static_cast<__int128>(n);
  c.upper_strict = next_q * diff < static_cast<__int128>(n);
  c.upper_equal = next_q * diff == static_cast<__int128>(n);
  return c;
}

struct FormulaValue {
  double value = 0.0;
  bool extrapolated = false;  // C outside [0, sqrt(2p))
};

// Leading-order E[N_(p,q)] in the valley m = (p/q) n + C sqrt(n ln n):
// sqrt(p) / (2 q sqrt(pi)) * n^(1/2 - C^2/(4p)).
inline FormulaValue expected_cycles_formula(double n, double c, std::uint64_t p,
                                            std::uint64_t q) {
  if (n < 1) throw DomainError("expected_cycles_formula needs n >= 1");
  if (p == 0 || q == 0 || std::gcd(p, q) != 1) {
    throw DomainError("expected_cycles_formula needs coprime p, q >= 1");
  }
  if (!(c >= 0)) throw DomainError("expected_cycles_formula needs C >= 0");
  const double pd = static_cast<double>(p);
  const double prefactor = std::sqrt(pd) / (2.0 * static_cast<double>(q) * std::sqrt(std::numbers::pi));
  FormulaValue out;
  out.value = prefactor * std::pow(n, 0.5 - c * c / (4.0 * pd));
  out.extrapolated = c >= std::sqrt(2.0 * pd);
  return out;
}

enum class Regime { PrimarySpike, Valley, SecondarySpike, Irrational };

inline const char* regime_name(Regime r) noexcept {
  switch (r) {
    case Regime::PrimarySpike: return "PrimarySpike";
    case Regime::Valley: return "Valley";
    case Regime::SecondarySpike: return "SecondarySpike";
    case Regime::Irrational: return "Irrational";
  }
  return "?";
}

struct RegimePrediction {
  Regime regime = Regime::Irrational;
  std::optional<HomologyClass> base_class;
  std::optional<double> deviation_rho;  // m = (p/q) n + rho sqrt(n)
  std::optional<double> deviation_C;    // m = (p/q) n + C sqrt(n ln n)
  HomologyClass predicted_class{1, 1};
  std::optional<double> predicted_count;
  std::uint64_t predicted_length = 0;
  // Irrational only: j0 and the lower bound n q_{j0+1} / (a_{j0+1} + 1) on
  // the length of a cycle of the j0 class.
  std::optional<std::size_t> j0;
  std::optional<double> length_lower_bound;
};

struct RegimeOptions {
  std::uint64_t q_max = 12;
  double c_spike = 1.5;
};

// Round m q / n to the nearest integer, ties toward the smaller value.
inline std::uint64_t nearest_numerator(std::uint64_t n, std::uint64_t m, std::uint64_t q) {
  const auto twice = 2 * static_cast<unsigned __int128>(m) * q;
  if (twice <= n) return 0;
  return static_cast<std::uint64_t>((twice - n + 2 * static_cast<unsigned __int128>(n) - 1) /
                                    (2 * static_cast<unsigned __int128>(n)));
}

inline RegimePrediction predict_regime(std::uint64_t n, std::uint64_t m,
                                       RegimeOptions opts = {}) {
  if (n < 1) throw DomainError("predict_regime needs n >= 1");
  if (m < n) throw DomainError("predict_regime needs n <= m; transpose the torus first");
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const double sqrt_n = std::sqrt(nd);
  const double log_scale = std::sqrt(nd * std::log(nd));
  const ConvergentTable table = convergents(continued_fraction(m, n));

  for (std::uint64_t q = 1; q <= opts.q_max; ++q) {
    const std::uint64_t p = nearest_numerator(n, m, q);
    if (p == 0 || std::gcd(p, q) != 1) continue;
    const HomologyClass base(p, q);
    const double delta = md - static_cast<double>(p) * nd / static_cast<double>(q);
    const double two_p = std::sqrt(2.0 * static_cast<double>(p));
    RegimePrediction r;
    r.base_class = base;
    if (std::abs(delta) <= opts.c_spike * sqrt_n) {
      r.regime = Regime::PrimarySpike;
      r.deviation_rho = delta / sqrt_n;
      r.predicted_class = base;
      r.predicted_length = base.cycle_length(TorusDims(n, m));
      return r;
    }
    if (log_scale <= 0) continue;
    const double c = delta / log_scale;
    if (std::abs(c) < two_p) {
      r.regime = Regime::Valley;
      r.deviation_C = c;
      r.predicted_class = base;
      r.predicted_count = expected_cycles_formula(nd, std::abs(c), p, q).value;
      r.predicted_length = base.cycle_length(TorusDims(n, m));
      return r;
    }
    if (std::abs(c) <= 3.0 * two_p) {
      // One long cycle winding about sqrt(n) times: report the last
      // convergent with q_j <= sqrt(n) as its class.
      r.regime = Regime::SecondarySpike;
      r.deviation_C = c;
      std::size_t pick = 0;
      for (std::size_t j = 0; j < table.entries.size(); ++j) {
        if (static_cast<unsigned __int128>(table.entries[j].q) * table.entries[j].q <= n) pick = j;
      }
      r.predicted_class = HomologyClass(table.entries[pick].p, table.entries[pick].q);
      r.predicted_length = r.predicted_class.cycle_length(TorusDims(n, m));
      return r;
    }
  }

  RegimePrediction r;
  r.regime = Regime::Irrational;
  const J0Selection sel = select_j0(n, table);
  const Convergent& c0 = table.entries[sel.index];
  r.j0 = sel.index;
  r.predicted_class = HomologyClass(c0.p, c0.q);
  r.predicted_length = r.predicted_class.cycle_length(TorusDims(n, m));
  if (!sel.saturated) {
    const std::uint64_t next_a = table.coefficients[sel.index + 1];
    const std::uint64_t next_q = table.entries[sel.index + 1].q;
    r.length_lower_bound = nd * static_cast<double>(next_q) / static_cast<double>(next_a + 1);
  }
  return r;
}

inline nlohmann::ordered_json cf_json(std::uint64_t n, std::uint64_t m) {
  const ConvergentTable t = convergents_with_j0(m, n);
  nlohmann::ordered_json j;
  j["n"] = n;
  j["m"] = m;
  j["coefficients"] = t.coefficients;
  auto conv = nlohmann::ordered_json::array();
  for (const Convergent& c : t.entries) conv.push_back({c.p, c.q});
  j["convergents"] = std::move(conv);
  j["j0"] = *t.j0;
  j["j0_class"] = {t.entries[*t.j0].p, t.entries[*t.j0].q};
  j["saturated"] = t.saturated;
  return j;
}

inline nlohmann::ordered_json regime_json(const RegimePrediction& r) {
  auto opt = [](const auto& o) -> nlohmann::ordered_json {
    if (o) return *o;
    return nullptr;
  };
  auto cls = [](const HomologyClass& h) { return nlohmann::ordered_json{h.p(), h.q()}; };
  nlohmann::ordered_json j;
  j["regime"] = regime_name(r.regime);
  j["base_class"] = r.base_class ? cls(*r.base_class) : nlohmann::ordered_json(nullptr);
  j["deviation_rho"] = opt(r.deviation_rho);
  j["deviation_C"] = opt(r.deviation_C);
  j["predicted_class"] = cls(r.predicted_class);
  j["predicted_count"] = opt(r.predicted_count);
  j["predicted_length"] = r.predicted_length;
  j["j0"] = opt(r.j0);
  j["length_lower_bound"] = opt(r.length_lower_bound);
  return j;
}

}  // namespace crsf
