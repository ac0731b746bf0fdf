// crsf-lab: command-line front end for the quenched random walk laboratory.
//
// Exit codes: 0 success, 2 configuration error, 3 cap or guard refusal,
// 4 I/O error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "crsf/crsf.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitCap = 3;
constexpr int kExitIo = 4;

std::vector<double> parse_c_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw crsf::ConfigError("bad value '" + item + "' in --c-list");
    out.push_back(v);
  }
  if (out.empty()) throw crsf::ConfigError("--c-list is empty");
  return out;
}

crsf::OutputFormat parse_format(const std::string& f) {
  if (f == "csv") return crsf::OutputFormat::Csv;
  if (f == "jsonl") return crsf::OutputFormat::Jsonl;
  throw crsf::ConfigError("unknown format '" + f + "'");
}

void emit_rows(const crsf::ScanConfig& cfg, const std::vector<crsf::ScanRow>& rows) {
  if (cfg.output_path.empty()) crsf::write_rows(std::cout, rows, cfg.format);
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return 0;
  } catch (const crsf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const crsf::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const crsf::CapExceeded& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return kExitCap;
  } catch (const crsf::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quenched random walk / cycle-rooted spanning forest laboratory"};
  app.require_subcommand(1);

  crsf::ScanConfig cfg;
  std::string format = "csv";

  // sample
  auto* sample = app.add_subcommand("sample", "Monte Carlo censuses on one torus");
  sample->add_option("--n", cfg.n, "horizontal period")->required();
  sample->add_option("--m", cfg.m, "vertical period")->required();
  sample->add_option("--seed", cfg.seed, "64-bit seed")->required();
  sample->add_option("--trials", cfg.trials, "number of fields")->required();
  sample->add_option("--jsonl", cfg.jsonl_census_path, "write one census record per trial");
  sample->add_flag("--exhaustive-bits", cfg.exhaustive_bits,
                   "use trial t's bit pattern as the field instead of hashing");

  // scan-m
  auto* scan_m = app.add_subcommand("scan-m", "sweep the vertical period");
  scan_m->add_option("--n", cfg.n)->required();
  scan_m->add_option("--m-from", cfg.m_from)->required();
  scan_m->add_option("--m-to", cfg.m_to)->required();
  scan_m->add_option("--step", cfg.m_step);
  scan_m->add_option("--trials", cfg.trials)->required();
  scan_m->add_option("--seed", cfg.seed)->required();

  // scan-c
  std::string c_list;
  auto* scan_c = app.add_subcommand("scan-c", "sweep C in m = (p/q) n + C sqrt(n ln n)");
  scan_c->add_option("--n", cfg.n)->required();
  scan_c->add_option("--p", cfg.p)->required();
  scan_c->add_option("--q", cfg.q)->required();
  scan_c->add_option("--c-list", c_list, "comma-separated C values")->required();
  scan_c->add_option("--trials", cfg.trials)->required();
  scan_c->add_option("--seed", cfg.seed)->required();

  for (auto* sub : {sample, scan_m, scan_c}) {
    sub->add_option("--out", cfg.output_path, "output file (default stdout)");
    sub->add_option("--format", format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
    sub->add_option("--workers", cfg.workers, "worker threads");
  }

  // exact
  std::uint64_t en = 0, em = 0, cap = crsf::kDefaultCrsfCap, mnlp_cap = crsf::kDefaultMnlpCap;
  auto* exact = app.add_subcommand("exact", "exhaustive enumeration on a small torus");
  exact->add_option("--n", en)->required();
  exact->add_option("--m", em)->required();
  exact->add_option("--cap", cap, "largest nm for the 2^(nm) field enumeration");
  exact->add_option("--mnlp-cap", mnlp_cap, "largest nm for the 3^(nm) loop enumeration");

  // cf / predict
  std::uint64_t rn = 0, rm = 0;
  crsf::RegimeOptions ropts;
  auto* cf = app.add_subcommand("cf", "continued fraction of m/n with the j0 cutoff");
  cf->add_option("--n", rn)->required();
  cf->add_option("--m", rm)->required();
  auto* predict = app.add_subcommand("predict", "classify the aspect-ratio regime");
  predict->add_option("--n", rn)->required();
  predict->add_option("--m", rm)->required();
  predict->add_option("--q-max", ropts.q_max);
  predict->add_option("--c-spike", ropts.c_spike);

  // field / render
  std::uint64_t fn = 0, fm = 0, trial = 0, fseed = 0;
  std::string field_path, out_path;
  auto* field = app.add_subcommand("field", "write a sampled field in CRSF1 format");
  field->add_option("--n", fn)->required();
  field->add_option("--m", fm)->required();
  field->add_option("--seed", fseed)->required();
  field->add_option("--trial", trial);
  field->add_option("--out", out_path)->required();

  auto* render = app.add_subcommand("render", "draw the cycles of a field as SVG");
  render->add_option("--field", field_path, "CRSF1 field file")->required();
  render->add_option("--out", out_path, "SVG output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (*sample || *scan_m || *scan_c) {
    return guarded([&] {
      cfg.format = parse_format(format);
      if (*sample) cfg.mode = crsf::ScanMode::Sample;
      if (*scan_m) cfg.mode = crsf::ScanMode::ScanM;
      if (*scan_c) {
        cfg.mode = crsf::ScanMode::ScanC;
        cfg.c_list = parse_c_list(c_list);
      }
      emit_rows(cfg, crsf::run_scan(cfg));
    });
  }

  if (*exact) {
    return guarded([&] {
      const crsf::TorusDims dims(en, em);
      crsf::ExactReport report = crsf::enumerate_crsf(dims, cap);
      if (dims.vertex_count() <= mnlp_cap) {
        report.z_mnlp = crsf::exact_mnlp_partition(dims, mnlp_cap);
      }
      std::cout << crsf::exact_report_json(report).dump(2) << '\n';
    });
  }

  if (*cf) {
    return guarded([&] {
      if (rn == 0 || rm == 0) throw crsf::ConfigError("n and m must be positive");
      std::cout << crsf::cf_json(rn, rm).dump(2) << '\n';
    });
  }

  if (*predict) {
    return guarded([&] {
      if (rn == 0 || rm == 0) throw crsf::ConfigError("n and m must be positive");
      // The classifier wants n <= m; transposing swaps the winding numbers.
      const bool transposed = rn > rm;
      crsf::RegimePrediction r =
          transposed ? crsf::predict_regime(rm, rn, ropts) : crsf::predict_regime(rn, rm, ropts);
      auto j = crsf::regime_json(r);
      if (transposed) {
        for (const char* key : {"base_class", "predicted_class"}) {
          if (!j[key].is_null()) std::swap(j[key][0], j[key][1]);
        }
      }
      nlohmann::ordered_json out;
      out["n"] = rn;
      out["m"] = rm;
      out["transposed"] = transposed;
      out.update(j);
      std::cout << out.dump(2) << '\n';
    });
  }

  if (*field) {
    return guarded([&] {
      const crsf::StepField f = crsf::sample_field(crsf::TorusDims(fn, fm), {fseed, trial});
      std::ofstream os = crsf::open_output(out_path);
      crsf::write_field(os, f);
      if (!os) throw crsf::IoError("write failed", out_path);
    });
  }

  if (*render) {
    return guarded([&] {
      std::ifstream is(field_path, std::ios::binary);
      if (!is) throw crsf::IoError("cannot open field file", field_path);
      const crsf::StepField f = crsf::read_field(is);
      const crsf::CycleCensus census = crsf::find_cycles(f);
      std::ofstream os = crsf::open_output(out_path);
      crsf::render_svg(f, census, os);
      if (!os) throw crsf::IoError("write failed", out_path);
    });
  }
  return 0;
}
