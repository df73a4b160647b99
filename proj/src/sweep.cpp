#include "semipos/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "semipos/error.hpp"
#include "semipos/riesz.hpp"

namespace semipos {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

SweepRow failed_row(double a, const std::string& why) {
  SweepRow row;
  row.a = a;
  row.level = row.norm_h2 = row.sup_ext = row.sup_norm = row.min_value = kNaN;
  row.neg_mass = row.decay_fit = row.decay_pred = row.residual = row.rel_residual = kNaN;
  row.identity_gap = kNaN;
  row.status = "failed: " + why;
  return row;
}

SweepRow fill_row(const Model& model, const NonlinearitySpec& spec, const MPSolution& sol) {
  const ShiftedNonlinearity shifted(spec, sol.a);
  const RadialField& u = sol.u.u;
  const RadialGrid& grid = model.grid();
  SweepRow row;
  row.a = sol.a;
  row.level = sol.level;
  row.norm_h2 = sol.norm_h2;
  row.residual = sol.residual;
  row.rel_residual = sol.rel_residual;
  row.converged = sol.converged;
  row.iterations = sol.iterations;
  row.status = sol.status;
  row.sup_norm = u.max_abs();
  row.min_value = u.min();
  RadialField neg(grid);
  RadialField source(grid);
  for (int i = 0; i < grid.size(); ++i) {
    if (grid.r(i) >= 1.0) row.sup_ext = std::max(row.sup_ext, std::abs(u[i]));
    neg[i] = std::max(-u[i], 0.0);
  }
  for (int j : model.support()) source[j] = model.g()[j] * shifted.fa(u[j]);
  row.neg_mass = integrate(neg);
  const DecayEstimate dec = decay_constant(u, source, model.constants());
  row.decay_fit = dec.fitted;
  row.decay_pred = dec.predicted;
  const double full = 0.5 * norm_sq(sol.u) - n_a(model, shifted, u);
  row.identity_gap = std::abs(sol.level - full);
  return row;
}

nlohmann::json opt(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

std::optional<double> read_opt(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<double> sweep_a_values(const Config& config, double a1) {
  std::vector<double> out;
  if (!config.sweep.a_list.empty()) {
    for (double a : config.sweep.a_list) {
      if (a > 0.0) out.push_back(a);
    }
  } else {
    double a = 0.5 * a1;
    for (int k = 0; k < config.sweep.count; ++k) {
      out.push_back(a);
      a *= config.sweep.ratio;
    }
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

SweepReport run_sweep(const Config& config, const std::function<void(const std::string&)>& log) {
  validate(config);
  const auto say = [&](const std::string& msg) {
    if (log) log(msg);
  };
  SweepReport report;
  report.config = config;

  const NonlinearitySpec spec = make_nonlinearity(config);
  const RadialGrid grid = make_grid(config.dim, config.grid.n, config.grid.r_max);
  say("assembling kernels");
  const Model model(grid, make_weight(config), config.kernel_cache_dir);
  for (double r : grid.nodes()) report.radii.push_back(r);

  const GeometryConstants geometry =
      estimate_geometry(model, spec, config.nonlinearity.eps, config.sweep.seed);
  report.geometry = geometry;
  say("geometry: B_g = " + fmt(geometry.b_g) + ", rho = " + fmt(geometry.rho) +
      ", beta = " + fmt(geometry.beta) + ", a1 = " + fmt(geometry.a1));

  std::vector<double> avals = sweep_a_values(config, geometry.a1);
  avals.push_back(0.0);

  std::optional<Potential> warm;
  for (double a : avals) {
    try {
      const MPSolution sol =
          mp_solve(model, ShiftedNonlinearity(spec, a), geometry, config.mp,
                   config.sweep.warm_start ? warm : std::nullopt);
      report.rows.push_back(fill_row(model, spec, sol));
      report.profiles.emplace_back(sol.u.u.values().begin(), sol.u.u.values().end());
      if (sol.converged) warm = sol.u;
      say("a = " + fmt(a) + ": " + sol.status + ", level " + fmt(sol.level) + ", residual " +
          fmt(sol.rel_residual));
    } catch (const std::exception& e) {
      report.rows.push_back(failed_row(a, e.what()));
      report.profiles.emplace_back(static_cast<std::size_t>(grid.size()), kNaN);
      say("a = " + fmt(a) + ": failed: " + e.what());
    }
  }

  const std::vector<double>& limit = report.profiles.back();
  if (report.rows.back().converged) {
    for (std::size_t k = 0; k < report.rows.size(); ++k) {
      double dist = 0.0;
      for (int i = 0; i < grid.size(); ++i) {
        if (grid.r(i) >= 1.0) dist = std::max(dist, std::abs(report.profiles[k][i] - limit[i]));
      }
      report.rows[k].limit_sup_distance = dist;
    }
  }
  report.summary = summarize(report.rows, report.geometry);
  return report;
}

SweepSummary summarize(const std::vector<SweepRow>& rows,
                       const std::optional<GeometryConstants>& geometry) {
  SweepSummary s;
  if (geometry) {
    s.a1 = geometry->a1;
    s.beta = geometry->beta;
    s.rho = geometry->rho;
  }
  s.rows = rows.size();
  const SweepRow* positone = nullptr;
  std::vector<const SweepRow*> ascending;
  for (const SweepRow& r : rows) {
    if (r.converged) {
      ++s.converged_rows;
      s.beta1 = s.beta1 ? std::min(*s.beta1, r.sup_norm) : r.sup_norm;
    }
    if (r.a == 0.0) {
      positone = &r;
    } else {
      ascending.push_back(&r);
    }
  }
  std::sort(ascending.begin(), ascending.end(),
            [](const SweepRow* x, const SweepRow* y) { return x->a < y->a; });
  if (!positone || !positone->converged) return s;

  const double n0 = positone->norm_h2;
  for (const SweepRow* r : ascending) {
    if (!r->converged || std::abs(r->norm_h2 - n0) > kNormBand * n0) break;
    s.a2_window = r->a;
  }
  if (!s.a2_window) return s;
  for (const SweepRow* r : ascending) {
    if (!r->converged || r->a > *s.a2_window) break;
    if (r->min_value < -kPositivityTol * r->sup_norm) break;
    s.a3_estimate = r->a;
  }
  return s;
}

nlohmann::json to_json(const SweepSummary& s) {
  return {{"a1", opt(s.a1)},
          {"beta", opt(s.beta)},
          {"rho", opt(s.rho)},
          {"a2_window", opt(s.a2_window)},
          {"a3_estimate", opt(s.a3_estimate)},
          {"beta1", opt(s.beta1)},
          {"rows", s.rows},
          {"converged_rows", s.converged_rows}};
}

SweepSummary summary_from_json(const nlohmann::json& j) {
  SweepSummary s;
  s.a1 = read_opt(j, "a1");
  s.beta = read_opt(j, "beta");
  s.rho = read_opt(j, "rho");
  s.a2_window = read_opt(j, "a2_window");
  s.a3_estimate = read_opt(j, "a3_estimate");
  s.beta1 = read_opt(j, "beta1");
  s.rows = j.value("rows", std::size_t{0});
  s.converged_rows = j.value("converged_rows", std::size_t{0});
  return s;
}

nlohmann::json to_json(const GeometryConstants& g) {
  return {{"b_g", g.b_g},         {"eps", g.eps},         {"eps_cap", g.eps_cap},
          {"c_env", g.c_env},     {"e_gamma", g.e_gamma}, {"c_gamma", g.c_gamma},
          {"c_lin", g.c_lin},     {"gamma", g.gamma},     {"rho1", g.rho1},
          {"rho", g.rho},         {"beta", g.beta},       {"a1", g.a1},
          {"a_admissible", g.a_admissible}};
}

void emit(const SweepReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "profiles", ec);
  if (ec) throw std::runtime_error("emit: cannot create " + dir + ": " + ec.message());

  const auto open = [](const fs::path& p) {
    std::ofstream out(p, std::ios::trunc);
    if (!out) throw std::runtime_error("emit: cannot write " + p.string());
    return out;
  };

  {
    std::ofstream csv = open(fs::path(dir) / "sweep.csv");
    csv << kCsvHeader << '\n';
    for (const SweepRow& r : report.rows) {
      csv << fmt(r.a) << ',' << fmt(r.level) << ',' << fmt(r.norm_h2) << ',' << fmt(r.sup_ext)
          << ',' << fmt(r.min_value) << ',' << fmt(r.neg_mass) << ',' << fmt(r.decay_fit) << ','
          << fmt(r.decay_pred) << ',' << fmt(r.residual) << ',' << (r.converged ? "true" : "false")
          << '\n';
    }
  }

  nlohmann::json rows = nlohmann::json::array();
  nlohmann::json profiles = nlohmann::json::array();
  for (std::size_t k = 0; k < report.rows.size(); ++k) {
    const SweepRow& r = report.rows[k];
    rows.push_back({{"a", r.a},
                    {"level", num(r.level)},
                    {"norm_h2", num(r.norm_h2)},
                    {"sup_ext", num(r.sup_ext)},
                    {"sup_norm", num(r.sup_norm)},
                    {"min_value", num(r.min_value)},
                    {"neg_mass", num(r.neg_mass)},
                    {"decay_fit", num(r.decay_fit)},
                    {"decay_pred", num(r.decay_pred)},
                    {"residual", num(r.residual)},
                    {"rel_residual", num(r.rel_residual)},
                    {"converged", r.converged},
                    {"iterations", r.iterations},
                    {"limit_sup_distance", opt(r.limit_sup_distance)},
                    {"identity_gap", num(r.identity_gap)},
                    {"status", r.status}});
    char name[32];
    std::snprintf(name, sizeof name, "u_%02zu.csv", k);
    std::ofstream out = open(fs::path(dir) / "profiles" / name);
    out << "r,u\n";
    for (std::size_t i = 0; i < report.radii.size() && i < report.profiles[k].size(); ++i) {
      out << fmt(report.radii[i]) << ',' << fmt(report.profiles[k][i]) << '\n';
    }
    profiles.push_back({{"a", r.a}, {"file", std::string("profiles/") + name}});
  }

  nlohmann::json j;
  j["summary"] = to_json(report.summary);
  j["geometry"] = report.geometry ? to_json(*report.geometry) : nlohmann::json(nullptr);
  j["rows"] = rows;
  j["profiles"] = profiles;
  j["config"] = to_json(report.config);
  std::ofstream out = open(fs::path(dir) / "summary.json");
  out << j.dump(2) << '\n';
}

}  // namespace semipos
