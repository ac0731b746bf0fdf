// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Monte Carlo seeds are fixed, so every number printed here is reproducible.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "crsf/crsf.hpp"
#include "naive_oracle.hpp"

namespace {

using namespace crsf;
using Clock = std::chrono::steady_clock;

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Tracks the N >= 1 / E[2^N] >= 2 checks across every run in this binary.
struct FloorLedger {
  std::uint64_t exact_tori = 0;
  std::uint64_t mc_rows = 0;
  std::uint64_t samples = 0;
  bool ok = true;
  std::string first_violation;

  void exact(const TorusDims& d, const DyadicRational& e) {
    ++exact_tori;
    if (e < DyadicRational(BigInt(2))) flag("exact E[2^N] < 2 on T(" + dims_text(d) + ")");
  }
  void mc(const ScanRow& r) {
    ++mc_rows;
    samples += r.trials();
    if (r.acc.min_N < 1) flag("sample with N = 0 at n=" + std::to_string(r.n));
    if (r.mean_two_pow_N() + r.ci95_two_pow_N() < 2.0) {
      flag("MC E[2^N] below 2 beyond CI at n=" + std::to_string(r.n) + " m=" + std::to_string(r.m));
    }
  }
  void flag(const std::string& what) {
    if (ok) first_violation = what;
    ok = false;
  }
  static std::string dims_text(const TorusDims& d) {
    return std::to_string(d.n()) + "," + std::to_string(d.m());
  }
};

FloorLedger floor_ledger;

ScanRow sample_row(std::uint64_t n, std::uint64_t m, std::uint64_t trials, std::uint64_t seed) {
  ScanConfig cfg;
  cfg.n = n;
  cfg.m = m;
  cfg.trials = trials;
  cfg.seed = seed;
  cfg.workers = workers();
  ScanRow row = run_scan(cfg).front();
  floor_ledger.mc(row);
  return row;
}

void criterion_identity() {
  const auto t0 = Clock::now();
  int tori = 0;
  bool ok = true;
  std::string bad;
  for (std::uint64_t n = 1; n <= 12; ++n) {
    for (std::uint64_t m = 1; n * m <= 12; ++m) {
      const TorusDims dims(n, m);
      const IdentityCheck c = verify_identity(dims, 12);
      floor_ledger.exact(dims, c.expectation_two_pow_N);
      ++tori;
      if (!c.equal || !c.oriented_count_matches) {
        ok = false;
        bad += " T(" + FloorLedger::dims_text(dims) + ")";
      }
    }
  }
  const bool anchor11 = verify_identity(TorusDims(1, 1)).z_mnlp == DyadicRational(BigInt(2));
  const bool anchor21 = verify_identity(TorusDims(2, 1)).z_mnlp == DyadicRational(BigInt(5), 1);
  const double secs = seconds_since(t0);
  ok = ok && anchor11 && anchor21 && tori == 35 && secs < 120.0;
  report(1, ok,
         "E[2^N] == Z_MNLP and sum 2^N == 2^(nm) Z_MNLP on " + std::to_string(tori) +
             " tori with nm <= 12" + (bad.empty() ? "" : "; mismatches:" + bad) +
             "; T(1,1)=2 " + (anchor11 ? "ok" : "wrong") + ", T(2,1)=5/2 " +
             (anchor21 ? "ok" : "wrong") + fmt("; %.1f s (limit 120 s)", secs));
}

void criterion_primary_spike() {
  const std::vector<std::uint64_t> sizes{64, 144, 256, 400};
  std::vector<double> lx, ly;
  std::string detail;
  bool class_ok = true;
  for (std::uint64_t n : sizes) {
    const ScanRow r = sample_row(n, n, 2000, 3000 + n);
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(r.mean_N()));
    const double frac = r.fraction_of_samples(HomologyClass(1, 1));
    if (n >= 256 && frac < 0.95) class_ok = false;
    detail += " n=" + std::to_string(n) + fmt(": mean N %.3f", r.mean_N()) +
              fmt(", (1,1) share %.4f;", frac);
  }
  const double k = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  const bool slope_ok = slope >= 0.40 && slope <= 0.60;
  report(3, slope_ok && class_ok,
         fmt("log-log slope %.4f (want [0.40, 0.60]);", slope) + detail +
             " want (1,1) share >= 0.95 for n >= 256");
}

void criterion_valley() {
  const std::vector<double> cs{0.6, 1.0, 1.4};
  const auto rows = scan_C(1024, 1, 1, cs, 10000, 4000, workers());
  bool decreasing = true, within = true;
  std::string detail;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    floor_ledger.mc(rows[i]);
    const double measured = rows[i].mean_count_of(HomologyClass(1, 1));
    const double predicted = rows[i].prediction->value;
    if (i > 0 && !(measured < rows[i - 1].mean_count_of(HomologyClass(1, 1)))) decreasing = false;
    const double ratio = measured / predicted;
    if (!(ratio >= 1.0 / 3.0 && ratio <= 3.0)) within = false;
    detail += fmt(" C=%.1f", cs[i]) + " m=" + std::to_string(rows[i].m) +
              fmt(": mean N11 %.4f", measured) + fmt(" vs formula %.4f", predicted) +
              fmt(" (ratio %.3f);", ratio);
  }
  report(4, decreasing && within,
         std::string("n=1024, 10^4 trials per C;") + detail + " strictly decreasing " +
             (decreasing ? "yes" : "no") + ", all within factor 3 " + (within ? "yes" : "no"));
}

// Counts trials with exactly one cycle of length >= threshold.
struct LongSingleCycle {
  double threshold = 0;
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
  std::uint64_t min_N = std::numeric_limits<std::uint64_t>::max();
  std::map<HomologyClass, std::uint64_t> classes;

  void add(const CycleCensus& c, SampleKey) {
    ++trials;
    min_N = std::min(min_N, c.total_cycles());
    ++classes[c.shared_class()];
    if (c.total_cycles() == 1 && static_cast<double>(c.cycles()[0].length) >= threshold) ++hits;
  }
  void merge(const LongSingleCycle& o) {
    trials += o.trials;
    hits += o.hits;
    min_N = std::min(min_N, o.min_N);
    for (const auto& [h, v] : o.classes) classes[h] += v;
  }
};

std::string histogram(const std::map<HomologyClass, std::uint64_t>& h) {
  std::vector<std::pair<std::uint64_t, HomologyClass>> byc;
  for (const auto& [k, v] : h) byc.emplace_back(v, k);
  std::sort(byc.begin(), byc.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::string out;
  for (const auto& [v, k] : byc) {
    if (!out.empty()) out += ' ';
    out += k.to_string() + "x" + std::to_string(v);
  }
  return out;
}

void criterion_secondary_spike() {
  const std::uint64_t n = 1024, m = 1192;
  const double c = 2.0;
  const double nd = static_cast<double>(n);
  LongSingleCycle proto;
  proto.threshold = std::pow(nd, 1.5) / (3.0 * c * std::sqrt(std::log(nd)));
  const auto r = run_trials(TorusDims(n, m), 5000, 400, workers(), proto);
  if (r.min_N < 1) floor_ledger.flag("sample with N = 0 at n=1024 m=1192");
  floor_ledger.samples += r.trials;
  const double frac = static_cast<double>(r.hits) / static_cast<double>(r.trials);
  report(5, frac >= 0.75,
         "n=1024 m=1192, 400 trials: " + fmt("%.4f", frac) +
             fmt(" have exactly one cycle of length >= %.2f (want >= 0.75); classes ", proto.threshold) +
             histogram(r.classes));
}

void criterion_rational() {
  const ScanRow big = sample_row(512, 1047, 2000, 6000);
  const ScanRow small = sample_row(128, 267, 2000, 6001);
  const double share = big.fraction_of_samples(HomologyClass(2, 1));
  const double ratio = big.mean_N() / small.mean_N();
  const bool ok = share >= 0.95 && ratio >= 1.6 && ratio <= 2.4;
  report(6, ok,
         fmt("n=512 m=1047: (2,1) share %.4f (want >= 0.95)", share) +
             fmt(", mean N %.3f", big.mean_N()) + fmt("; n=128 m=267: mean N %.3f", small.mean_N()) +
             fmt("; ratio %.3f (want [1.6, 2.4])", ratio));
}

struct LengthWindow {
  double lo = 0, hi = 0;
  std::uint64_t trials = 0, inside = 0;
  std::uint64_t min_N = std::numeric_limits<std::uint64_t>::max();
  std::map<HomologyClass, std::uint64_t> classes;

  void add(const CycleCensus& c, SampleKey) {
    ++trials;
    min_N = std::min(min_N, c.total_cycles());
    const HomologyClass h = c.shared_class();
    ++classes[h];
    const double len = static_cast<double>(h.cycle_length(c.dims()));
    if (len >= lo && len <= hi) ++inside;
  }
  void merge(const LengthWindow& o) {
    trials += o.trials;
    inside += o.inside;
    min_N = std::min(min_N, o.min_N);
    for (const auto& [h, v] : o.classes) classes[h] += v;
  }
};

void criterion_irrational() {
  const std::uint64_t n = 1000, m = 1618;
  const double n43 = std::pow(static_cast<double>(n), 4.0 / 3.0);
  LengthWindow proto;
  proto.lo = n43 / 30.0;
  proto.hi = 30.0 * n43;
  const auto r = run_trials(TorusDims(n, m), 7000, 200, workers(), proto);
  if (r.min_N < 1) floor_ledger.flag("sample with N = 0 at n=1000 m=1618");
  floor_ledger.samples += r.trials;
  const ConvergentTable table = convergents_with_j0(m, n);
  const Convergent& conv = table.entries[*table.j0];
  const double frac = static_cast<double>(r.inside) / static_cast<double>(r.trials);
  report(7, frac >= 0.70,
         fmt("n=1000 m=1618, 200 trials: %.4f", frac) +
             fmt(" have cycle length in [%.2f, ", proto.lo) + fmt("%.0f] (want >= 0.70)", proto.hi) +
             "; convergent class (" + std::to_string(conv.p) + "," + std::to_string(conv.q) +
             "); observed " + histogram(r.classes));
}

void criterion_oracle_equivalence() {
  const auto t0 = Clock::now();
  std::uint64_t fields = 0, mismatches = 0;
  for (std::uint64_t n = 1; n <= 12; ++n) {
    for (std::uint64_t m = 1; n * m <= 12; ++m) {
      const TorusDims dims(n, m);
      for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << (n * m)); ++pattern) {
        const StepField f = field_from_pattern(dims, pattern);
        const CycleCensus c = find_cycles(f);
        const auto naive = testing::naive_cycles(f);
        ++fields;
        bool same = c.total_cycles() == naive.size();
        for (std::size_t i = 0; same && i < naive.size(); ++i) {
          const Cycle& cy = c.cycles()[i];
          same = cy.anchor.index == naive[i].anchor && cy.h_steps == naive[i].east &&
                 cy.v_steps == naive[i].north;
        }
        if (!same) ++mismatches;
      }
    }
  }
  report(8, mismatches == 0,
         std::to_string(fields) + " fields on all tori with nm <= 12, " +
             std::to_string(mismatches) + " mismatches against the naive oracle" +
             fmt(" (%.1f s)", seconds_since(t0)));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void criterion_determinism_and_speed() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path();
  ScanConfig cfg;
  cfg.mode = ScanMode::ScanM;
  cfg.n = 64;
  cfg.m_from = 60;
  cfg.m_to = 70;
  cfg.m_step = 2;
  cfg.trials = 500;
  cfg.seed = 9000;
  cfg.workers = 1;
  cfg.output_path = (dir / "crsf_acceptance_a.csv").string();
  for (const ScanRow& r : run_scan(cfg)) floor_ledger.mc(r);
  const std::string a = slurp(cfg.output_path);
  run_scan(cfg);
  const std::string b = slurp(cfg.output_path);
  cfg.workers = 4;
  cfg.output_path = (dir / "crsf_acceptance_c.csv").string();
  run_scan(cfg);
  const std::string c = slurp(cfg.output_path);
  const bool identical = !a.empty() && a == b && a == c;

  const TorusDims dims(2000, 2000);
  const StepField f = sample_field(dims, {9001, 0});
  CensusWorkspace<std::uint32_t> ws;
  double best = 1e9;
  std::uint64_t cycles = 0;
  for (int rep = 0; rep < 3; ++rep) {
    const auto t0 = Clock::now();
    cycles = find_cycles(f.directions(), dims, ws).total_cycles();
    best = std::min(best, seconds_since(t0));
  }
  const double bytes = static_cast<double>(ws.aux_bytes()) / static_cast<double>(dims.vertex_count());
  report(9, identical && best < 1.0 && bytes < 8.0,
         std::string("CSV byte-identical across reruns and worker counts: ") +
             (identical ? "yes" : "no") + fmt("; T(2000,2000) census %.3f s", best) +
             fmt(" (limit 1 s), %.1f aux bytes/vertex (limit 8)", bytes) + ", N=" +
             std::to_string(cycles));
}

}  // namespace

int main() {
  std::printf("acceptance run with %u worker thread(s)\n", workers());
  std::fflush(stdout);
  criterion_identity();
  criterion_oracle_equivalence();
  criterion_determinism_and_speed();
  criterion_primary_spike();
  criterion_rational();
  criterion_secondary_spike();
  criterion_irrational();
  criterion_valley();
  report(2, floor_ledger.ok,
         std::to_string(floor_ledger.exact_tori) + " exact tori with E[2^N] >= 2, " +
             std::to_string(floor_ledger.samples) + " Monte Carlo samples all with N >= 1 across " +
             std::to_string(floor_ledger.mc_rows) + " rows" +
             (floor_ledger.ok ? "" : "; violation: " + floor_ledger.first_violation));
  std::printf("%s: %d criterion failure(s)\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
