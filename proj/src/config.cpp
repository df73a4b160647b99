#include "semipos/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "semipos/error.hpp"

namespace semipos {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"grid", {"n", "r_max"}},
      {"nonlinearity", {"family", "gamma", "c_f", "r_mono", "coef", "power", "eps"}},
      {"weight", {"family", "d", "r_in", "r_out", "table", "g2a"}},
      {"mp", {"path_nodes", "tol_res", "max_iter", "bump", "newton_polish", "stagnation_window"}},
      {"sweep", {"a_list", "count", "ratio", "warm_start", "seed"}},
      {"kernel", {"cache_dir"}},
      {"output", {"dir"}},
  };
  return s;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

double to_double(const std::string& key, const std::string& raw) {
  std::istringstream is(raw);
  double v = 0.0;
  if (!(is >> v) || !(is >> std::ws).eof() || !std::isfinite(v)) {
    throw ConfigError(key, "expected a finite number, got '" + raw + "'");
  }
  return v;
}

long long to_int(const std::string& key, const std::string& raw) {
  std::istringstream is(raw);
  long long v = 0;
  if (!(is >> v) || !(is >> std::ws).eof()) {
    throw ConfigError(key, "expected an integer, got '" + raw + "'");
  }
  return v;
}

bool to_bool(const std::string& key, std::string raw) {
  std::transform(raw.begin(), raw.end(), raw.begin(), [](unsigned char c) { return std::tolower(c); });
  if (raw == "true" || raw == "1" || raw == "yes" || raw == "on") return true;
  if (raw == "false" || raw == "0" || raw == "no" || raw == "off") return false;
  throw ConfigError(key, "expected a boolean, got '" + raw + "'");
}

std::vector<double> to_list(const std::string& key, std::string raw) {
  std::replace(raw.begin(), raw.end(), ',', ' ');
  std::istringstream is(raw);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) out.push_back(to_double(key, tok));
  return out;
}

Config from_tree(const pt::ptree& tree) {
  Config c;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      const std::string raw = trim(node.data());
      if (name != "dim") throw ConfigError(name, "unknown key");
      c.dim = static_cast<int>(to_int("dim", raw));
      continue;
    }
    const auto sec = schema().find(name);
    if (sec == schema().end()) throw ConfigError(name, "unknown section");
    for (const auto& [key, leaf] : node) {
      const std::string path = name + "." + key;
      if (!sec->second.count(key)) throw ConfigError(path, "unknown key");
      const std::string raw = trim(leaf.data());
      if (name == "grid") {
        if (key == "n") c.grid.n = static_cast<int>(to_int(path, raw));
        if (key == "r_max") c.grid.r_max = to_double(path, raw);
      } else if (name == "nonlinearity") {
        auto& nl = c.nonlinearity;
        if (key == "family") nl.family = raw;
        if (key == "gamma") nl.gamma = to_double(path, raw);
        if (key == "c_f") nl.c_f = to_double(path, raw);
        if (key == "r_mono") nl.r_mono = to_double(path, raw);
        if (key == "coef") nl.coef = to_double(path, raw);
        if (key == "power") nl.power = to_double(path, raw);
        if (key == "eps") nl.eps = to_double(path, raw);
      } else if (name == "weight") {
        auto& w = c.weight;
        if (key == "family") w.family = raw;
        if (key == "d") w.d = to_double(path, raw);
        if (key == "r_in") w.r_in = to_double(path, raw);
        if (key == "r_out") w.r_out = to_double(path, raw);
        if (key == "table") w.table = raw;
        if (key == "g2a") w.g2a = to_bool(path, raw);
      } else if (name == "mp") {
        auto& mp = c.mp;
        if (key == "path_nodes") mp.path_nodes = static_cast<int>(to_int(path, raw));
        if (key == "tol_res") mp.tol_res = to_double(path, raw);
        if (key == "max_iter") mp.max_iter = static_cast<int>(to_int(path, raw));
        if (key == "newton_polish") mp.newton_polish = to_bool(path, raw);
        if (key == "stagnation_window") mp.stagnation_window = static_cast<int>(to_int(path, raw));
        if (key == "bump") {
          try {
            mp.bump = parse_bump_kind(raw);
          } catch (const InvalidArgument& e) {
            throw ConfigError(path, e.what());
          }
        }
      } else if (name == "sweep") {
        auto& s = c.sweep;
        if (key == "a_list") s.a_list = to_list(path, raw);
        if (key == "count") s.count = static_cast<int>(to_int(path, raw));
        if (key == "ratio") s.ratio = to_double(path, raw);
        if (key == "warm_start") s.warm_start = to_bool(path, raw);
        if (key == "seed") {
          const long long v = to_int(path, raw);
          if (v < 0) throw ConfigError(path, "seed must be >= 0");
          s.seed = static_cast<std::uint64_t>(v);
        }
      } else if (name == "kernel") {
        c.kernel_cache_dir = raw;
      } else if (name == "output") {
        c.output_dir = raw;
      }
    }
  }
  validate(c);
  return c;
}

Config parse_stream(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("", std::string("malformed config: ") + e.what());
  }
  return from_tree(tree);
}

}  // namespace

void validate(const Config& c) {
  if (c.dim < 5) throw ConfigError("dim", "the problem requires N >= 5, got " + std::to_string(c.dim));
  if (c.grid.n < 16) throw ConfigError("grid.n", "need at least 16 nodes");
  if (!(c.grid.r_max > 0.0)) throw ConfigError("grid.r_max", "must be positive");

  const auto& nl = c.nonlinearity;
  const double crit = critical_exponent(c.dim);
  if (!(nl.gamma > 2.0 && nl.gamma < crit)) {
    std::ostringstream os;
    os << "gamma must lie in (2, 2N/(N-4)) = (2, " << crit << "), got " << nl.gamma;
    throw ConfigError("nonlinearity.gamma", os.str());
  }
  if (nl.family != "paper_example" && nl.family != "power" && nl.family != "log_power") {
    throw ConfigError("nonlinearity.family", "expected paper_example | power | log_power");
  }
  if (!(nl.c_f > 0.0)) throw ConfigError("nonlinearity.c_f", "must be positive");
  if (!(nl.r_mono > 0.0)) throw ConfigError("nonlinearity.r_mono", "must be positive");
  if (!(nl.coef > 0.0)) throw ConfigError("nonlinearity.coef", "must be positive");
  if (!(nl.power >= 1.0)) throw ConfigError("nonlinearity.power", "must be >= 1");
  if (nl.eps && !(*nl.eps > 0.0)) throw ConfigError("nonlinearity.eps", "must be positive");

  const auto& w = c.weight;
  if (w.family == "paper_example") {
    if (!(w.d > 0.0)) throw ConfigError("weight.d", "must be positive");
    if (!(w.r_in >= 0.5 && w.r_in < w.r_out && w.r_out <= 1.0)) {
      throw ConfigError("weight.r_in", "radii must satisfy 1/2 <= r_in < r_out <= 1");
    }
  } else if (w.family == "custom_table") {
    if (w.table.empty()) throw ConfigError("weight.table", "custom_table needs a table file");
  } else {
    throw ConfigError("weight.family", "expected paper_example | custom_table");
  }

  if (c.mp.path_nodes < 9) throw ConfigError("mp.path_nodes", "need at least 9 nodes");
  if (!(c.mp.tol_res > 0.0)) throw ConfigError("mp.tol_res", "must be positive");
  if (c.mp.max_iter < 1) throw ConfigError("mp.max_iter", "must be >= 1");
  if (c.mp.stagnation_window < 1) throw ConfigError("mp.stagnation_window", "must be >= 1");

  const auto& s = c.sweep;
  for (std::size_t i = 0; i < s.a_list.size(); ++i) {
    if (!(s.a_list[i] >= 0.0)) throw ConfigError("sweep.a_list", "values must be >= 0");
    if (i > 0 && !(s.a_list[i] < s.a_list[i - 1])) {
      throw ConfigError("sweep.a_list", "values must be strictly decreasing");
    }
  }
  if (s.count < 0) throw ConfigError("sweep.count", "must be >= 0");
  if (!(s.ratio > 0.0 && s.ratio < 1.0)) throw ConfigError("sweep.ratio", "must lie in (0, 1)");
}

Config parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path);
  return parse_stream(in);
}

Config parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_stream(in);
}

nlohmann::json to_json(const Config& c) {
  nlohmann::json j;
  j["dim"] = c.dim;
  j["grid"] = {{"n", c.grid.n}, {"r_max", c.grid.r_max}};
  const auto& nl = c.nonlinearity;
  j["nonlinearity"] = {{"family", nl.family}, {"gamma", nl.gamma}, {"c_f", nl.c_f},
                       {"r_mono", nl.r_mono}, {"coef", nl.coef},   {"power", nl.power}};
  j["nonlinearity"]["eps"] = nl.eps ? nlohmann::json(*nl.eps) : nlohmann::json(nullptr);
  const auto& w = c.weight;
  j["weight"] = {{"family", w.family}, {"d", w.d},         {"r_in", w.r_in},
                 {"r_out", w.r_out},   {"table", w.table}, {"g2a", w.g2a}};
  j["mp"] = {{"path_nodes", c.mp.path_nodes},
             {"tol_res", c.mp.tol_res},
             {"max_iter", c.mp.max_iter},
             {"bump", to_string(c.mp.bump)},
             {"newton_polish", c.mp.newton_polish},
             {"stagnation_window", c.mp.stagnation_window}};
  j["sweep"] = {{"a_list", c.sweep.a_list},
                {"count", c.sweep.count},
                {"ratio", c.sweep.ratio},
                {"warm_start", c.sweep.warm_start},
                {"seed", c.sweep.seed}};
  j["kernel"] = {{"cache_dir", c.kernel_cache_dir}};
  j["output"] = {{"dir", c.output_dir}};
  return j;
}

NonlinearitySpec make_nonlinearity(const Config& c) {
  const auto& nl = c.nonlinearity;
  if (nl.family == "paper_example") {
    return NonlinearitySpec::paper_example(c.dim, nl.gamma, nl.c_f, nl.r_mono);
  }
  if (nl.family == "power") {
    return NonlinearitySpec::power(c.dim, nl.coef, nl.power, nl.gamma, nl.c_f, nl.r_mono);
  }
  return NonlinearitySpec::log_power(c.dim, nl.coef, nl.power, nl.gamma, nl.c_f, nl.r_mono);
}

WeightSpec make_weight(const Config& c) {
  const auto& w = c.weight;
  if (w.family == "paper_example") return WeightSpec::example(c.dim, w.d, w.r_in, w.r_out);
  return WeightSpec::from_table_file(c.dim, w.table);
}

}  // namespace semipos
