// semipos: mountain-pass solver and a-sweep driver for the radial problem
//
//   semipos solve --config run.ini [--out dir] [--sweep | --single-a A] [--check-hypotheses]
//
// Output directory: --out, else $SEMIPOS_OUT_DIR, else [output] dir.
// Exit status: 0 ok, 1 a check failed or a row did not converge, 2 bad input.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "semipos/config.hpp"
#include "semipos/error.hpp"
#include "semipos/quadrature.hpp"
#include "semipos/sweep.hpp"

using namespace semipos;

namespace {

nlohmann::json report_json(const CheckReport& r) {
  return {{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}};
}

nlohmann::json report_json(const G2Report& r) {
  return {{"delta", r.delta}, {"alpha", r.alpha}, {"c_g", r.c_g},
          {"limit", r.limit}, {"passed", r.passed}, {"detail", r.detail}};
}

bool check_hypotheses(const Config& config, const std::string& out_dir) {
  const NonlinearitySpec spec = make_nonlinearity(config);
  const WeightSpec weight = make_weight(config);
  const std::vector<double> samples = default_samples();
  bool ok = true;
  nlohmann::json j;

  for (const CheckReport& r : {check_f1(spec, samples), check_f2(spec, samples),
                               check_f3(spec, samples), check_f4(spec, samples)}) {
    std::printf("%-4s %s  %s\n", r.name.c_str(), r.passed ? "ok  " : "FAIL", r.detail.c_str());
    ok = ok && r.passed;
    j[r.name] = report_json(r);
  }

  const G1Report g1 = check_g1(weight);
  std::printf("g1   %s  |g|_1 = %.6g, |g|_inf = %.6g\n", g1.passed ? "ok  " : "FAIL", g1.norms.l1,
              g1.norms.linf);
  for (const auto& w : g1.warnings) std::printf("     warning: %s\n", w.c_str());
  ok = ok && g1.passed;
  j["g1"] = {{"passed", g1.passed}, {"l1", g1.norms.l1}, {"linf", g1.norms.linf},
             {"warnings", g1.warnings}};

  std::vector<G2Report> g2 = {check_g2(weight, 1.0, default_g2_samples()),
                              check_g2(weight, critical_exponent(config.dim), default_g2_samples())};
  if (config.weight.g2a) {
    g2.push_back(check_g2(weight, 1.0, quad::logspace(1e-3, 1e3, 31), true));
  }
  j["g2"] = nlohmann::json::array();
  for (const G2Report& r : g2) {
    std::printf("g2   %s  delta = %.6g, C_g = %.6g\n", r.passed ? "ok  " : "FAIL", r.delta, r.c_g);
    ok = ok && r.passed;
    j["g2"].push_back(report_json(r));
  }

  std::filesystem::create_directories(out_dir);
  std::ofstream(std::filesystem::path(out_dir) / "hypotheses.json") << j.dump(2) << '\n';
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mountain-pass solver for radial biharmonic semipositone problems"};
  app.require_subcommand(1);
  CLI::App* solve = app.add_subcommand("solve", "solve one a, or sweep a down to 0");

  std::string config_path;
  std::string out_dir;
  bool sweep = false;
  double single_a = 0.0;
  bool check = false;
  solve->add_option("--config", config_path, "INI config file")->required()->check(CLI::ExistingFile);
  solve->add_option("--out", out_dir, "output directory");
  auto* sweep_flag = solve->add_flag("--sweep", sweep, "run the a-sweep (default)");
  auto* single = solve->add_option("--single-a", single_a, "solve for one a >= 0 plus the a = 0 limit")
                     ->check(CLI::NonNegativeNumber);
  sweep_flag->excludes(single);
  solve->add_flag("--check-hypotheses", check, "check (f1)-(f4), (g1), (g2) before solving");

  CLI11_PARSE(app, argc, argv);

  Config config;
  try {
    config = parse_config(config_path);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }
  if (out_dir.empty()) {
    const char* env = std::getenv("SEMIPOS_OUT_DIR");
    out_dir = env && *env ? env : config.output_dir;
  }

  int status = 0;
  try {
    if (check) {
      if (!check_hypotheses(config, out_dir)) status = 1;
      if (!sweep && single->count() == 0) return status;
    }
    if (single->count() > 0) {
      config.sweep.a_list.clear();
      if (single_a > 0.0) config.sweep.a_list.push_back(single_a);
      config.sweep.count = 0;
    }
    const SweepReport report =
        run_sweep(config, [](const std::string& msg) { std::fprintf(stderr, "%s\n", msg.c_str()); });
    emit(report, out_dir);
    const auto& s = report.summary;
    std::printf("rows %zu, converged %zu\n", s.rows, s.converged_rows);
    if (s.a2_window) std::printf("a2 window %.6g\n", *s.a2_window);
    if (s.a3_estimate) std::printf("a3 estimate %.6g\n", *s.a3_estimate);
    if (s.beta1) std::printf("beta1 %.6g\n", *s.beta1);
    std::printf("wrote %s\n", out_dir.c_str());
    if (s.converged_rows != s.rows) status = 1;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return status;
}
