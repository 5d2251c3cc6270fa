#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "errors.hpp"
#include "harness.hpp"

namespace hydrolimit {

namespace pt = boost::property_tree;

SimConfig default_config() { return SimConfig{}; }

void SimConfig::validate() const {
  std::vector<std::string> v;
  auto need = [&](bool ok, const std::string& msg) {
    if (!ok) v.push_back(msg);
  };
  need(phys.A > 0.0, "physics.A must satisfy A > 0");
  need(phys.gamma > 1.0, "physics.gamma must satisfy \xce\xb3 > 1 (gamma > 1)");
  need(phys.mu > 0.0, "physics.mu must satisfy mu > 0");
  need(phys.mu + phys.lambda > 0.0, "physics.lambda must satisfy mu + lambda > 0");
  need(phys.eps > 0.0 && phys.eps <= 1.0, "physics.eps must satisfy 0 < eps <= 1");
  need(nx >= 8 && nx % 2 == 0, "grid.nx must be even and >= 8");
  need(length > 0.0 && std::isfinite(length), "grid.length must be positive");
  need(n_hermite >= 3, "velocity.modes must be >= 3");
  need(dv >= 1 && dv <= 3, "velocity.dim must be 1, 2 or 3");
  need(dt >= 0.0, "time.dt must be >= 0 (0 selects the CFL limit)");
  need(cfl > 0.0 && cfl <= 1.0, "time.cfl must lie in (0, 1]");
  need(t_final > 0.0, "time.t_final must be positive");
  need(report_every >= 1, "time.report_every must be >= 1");
  for (int m : {initial.m0_mode, initial.u0_mode, initial.h0_mode}) {
    need(m >= 0 && m < nx / 2, "initial.*_mode must lie in [0, nx/2)");
  }
  need(std::abs(initial.h0_amp) < 1.0, "initial.h0_amp must satisfy |h0_amp| < 1 (positive density)");
  need(initial.remainder_amp >= 0.0, "initial.remainder_amp must be >= 0");
  need(diag.order_x >= 0 && diag.order_x <= 6, "diagnostics.order_x must lie in [0, 6]");
  need(diag.order_v >= 0 && diag.order_v <= 4, "diagnostics.order_v must lie in [0, 4]");
  bool weights_ok = diag.K1 > 0.0 && diag.cbar > 0.0;
  for (auto* arr : {&diag.K1_alpha, &diag.K2_alpha, &diag.K3_alpha, &diag.lambda}) {
    for (double w : *arr) weights_ok = weights_ok && w > 0.0;
  }
  need(weights_ok, "diagnostics weights must all be positive");
  for (double e : sweep) need(e > 0.0 && e <= 1.0, fmt::format("sweep.eps value {} outside (0, 1]", e));
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    if (!(sweep[i] < sweep[i - 1])) {
      v.push_back("sweep.eps values must be strictly decreasing");
      break;
    }
  }
  if (!v.empty()) throw ValidationError(std::move(v));
}

namespace {

double parse_number(const std::string& key, const std::string& raw, std::vector<std::string>& errors) {
  std::string s = boost::algorithm::trim_copy(raw);
  double factor = 1.0;
  if (boost::algorithm::iends_with(s, "pi")) {
    factor = std::numbers::pi;
    s = boost::algorithm::trim_copy(s.substr(0, s.size() - 2));
    if (s.empty()) return factor;
    if (!s.empty() && s.back() == '*') s.pop_back();
  }
  try {
    std::size_t pos = 0;
    const double x = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return x * factor;
  } catch (const std::exception&) {
    errors.push_back(fmt::format("{}: '{}' is not a number", key, raw));
    return 0.0;
  }
}

int parse_int(const std::string& key, const std::string& raw, std::vector<std::string>& errors) {
  const double x = parse_number(key, raw, errors);
  if (x != std::floor(x)) {
    errors.push_back(fmt::format("{}: '{}' is not an integer", key, raw));
    return 0;
  }
  return static_cast<int>(x);
}

bool parse_bool(const std::string& key, const std::string& raw, std::vector<std::string>& errors) {
  const auto s = boost::algorithm::to_lower_copy(boost::algorithm::trim_copy(raw));
  if (s == "true" || s == "on" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "off" || s == "no" || s == "0") return false;
  errors.push_back(fmt::format("{}: '{}' is not a boolean", key, raw));
  return false;
}

std::vector<double> parse_list(const std::string& key, const std::string& raw, std::vector<std::string>& errors) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, raw, boost::algorithm::is_any_of(", "), boost::algorithm::token_compress_on);
  std::vector<double> out;
  for (const auto& p : parts) {
    if (boost::algorithm::trim_copy(p).empty()) continue;
    out.push_back(parse_number(key, p, errors));
  }
  return out;
}

void parse_weights(const std::string& key, const std::string& raw, std::array<double, 6>& dst, std::size_t count,
                   std::vector<std::string>& errors) {
  const auto vals = parse_list(key, raw, errors);
  if (vals.size() == 1) {
    for (std::size_t i = 0; i < count; ++i) dst[i] = vals[0];
  } else if (vals.size() == count) {
    for (std::size_t i = 0; i < count; ++i) dst[i] = vals[i];
  } else {
    errors.push_back(fmt::format("{}: expected 1 or {} values, got {}", key, count, vals.size()));
  }
}

using Setter = std::function<void(SimConfig&, const std::string& key, const std::string& raw,
                                  std::vector<std::string>& errors)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto num = [](double SimConfig::*member) {
      return Setter([member](SimConfig& c, const std::string& k, const std::string& r, auto& e) {
        c.*member = parse_number(k, r, e);
      });
    };
    auto phys = [](double PhysParams::*member) {
      return Setter([member](SimConfig& c, const std::string& k, const std::string& r, auto& e) {
        c.phys.*member = parse_number(k, r, e);
      });
    };
    auto init_num = [](double InitialData::*member) {
      return Setter([member](SimConfig& c, const std::string& k, const std::string& r, auto& e) {
        c.initial.*member = parse_number(k, r, e);
      });
    };
    auto init_int = [](int InitialData::*member) {
      return Setter([member](SimConfig& c, const std::string& k, const std::string& r, auto& e) {
        c.initial.*member = parse_int(k, r, e);
      });
    };
    auto integer = [](int SimConfig::*member) {
      return Setter([member](SimConfig& c, const std::string& k, const std::string& r, auto& e) {
        c.*member = parse_int(k, r, e);
      });
    };
    t["physics.eps"] = phys(&PhysParams::eps);
    t["physics.gamma"] = phys(&PhysParams::gamma);
    t["physics.A"] = phys(&PhysParams::A);
    t["physics.mu"] = phys(&PhysParams::mu);
    t["physics.lambda"] = phys(&PhysParams::lambda);
    t["grid.nx"] = integer(&SimConfig::nx);
    t["grid.length"] = num(&SimConfig::length);
    t["velocity.modes"] = integer(&SimConfig::n_hermite);
    t["velocity.dim"] = integer(&SimConfig::dv);
    t["time.dt"] = num(&SimConfig::dt);
    t["time.cfl"] = num(&SimConfig::cfl);
    t["time.t_final"] = num(&SimConfig::t_final);
    t["time.report_every"] = integer(&SimConfig::report_every);
    t["initial.m0_amp"] = init_num(&InitialData::m0_amp);
    t["initial.m0_mode"] = init_int(&InitialData::m0_mode);
    t["initial.u0_amp"] = init_num(&InitialData::u0_amp);
    t["initial.u0_mode"] = init_int(&InitialData::u0_mode);
    t["initial.h0_amp"] = init_num(&InitialData::h0_amp);
    t["initial.h0_mode"] = init_int(&InitialData::h0_mode);
    t["initial.remainder_amp"] = init_num(&InitialData::remainder_amp);
    t["initial.seed"] = [](SimConfig& c, const std::string& k, const std::string& r, auto& e) {
      const int s = parse_int(k, r, e);
      if (s < 0) e.push_back(k + ": seed must be nonnegative");
      c.seed = static_cast<std::uint64_t>(std::max(s, 0));
    };
    t["diagnostics.order_x"] = [](SimConfig& c, const std::string& k, const std::string& r, auto& e) {
      c.diag.order_x = parse_int(k, r, e);
    };
    t["diagnostics.order_v"] = [](SimConfig& c, const std::string& k, const std::string& r, auto& e) {
      c.diag.order_v = parse_int(k, r, e);
    };
    t["diagnostics.K1"] = [](SimConfig& c, const std::string& k, const std::string& r, auto& e) {
      c.diag.K1 = parse_number(k, r, e);
    };
    t["diagnostics.K1_alpha"] = [](SimConfig& c, const std::string& k, const std::string& r, auto& e) {
      parse_weights(k, r, c.diag.K1_alpha, 5, e);
    };
    t["diagnostics.K2_alpha"] = [](SimConfig& c, const std::string& k, const std::string& r, auto& e) {
      parse_weights(k, r, c.diag.K2_alpha, 5, e);
    };
    t["diagnostics.K3_alpha"] = [](SimConfig& c, const std::string& k, const std::string& r, auto& e) {
      parse_weights(k, r, c.diag.K3_alpha, 5, e);
    };
    t["diagnostics.lambda"] = [](SimConfig& c, const std::string& k, const std::string& r, auto& e) {
      parse_weights(k, r, c.diag.lambda, 6, e);
    };
    t["diagnostics.cbar"] = [](SimConfig& c, const std::string& k, const std::string& r, auto& e) {
      c.diag.cbar = parse_number(k, r, e);
    };
    t["diagnostics.energy"] = [](SimConfig& c, const std::string& k, const std::string& r, auto& e) {
      c.energy = parse_bool(k, r, e);
    };
    t["solver.filter"] = [](SimConfig& c, const std::string& k, const std::string& r, auto& e) {
      c.filter = parse_bool(k, r, e);
    };
    t["sweep.eps"] = [](SimConfig& c, const std::string& k, const std::string& r, auto& e) {
      c.sweep = parse_list(k, r, e);
    };
    t["output.dir"] = [](SimConfig& c, const std::string&, const std::string& r, auto&) {
      c.output_dir = boost::algorithm::trim_copy(r);
    };
    return t;
  }();
  return table;
}

SimConfig from_tree(const pt::ptree& tree) {
  SimConfig cfg;
  std::vector<std::string> errors;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      errors.push_back(fmt::format("key '{}' must appear inside a section", section));
      continue;
    }
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      const auto it = setters().find(full);
      if (it == setters().end()) {
        errors.push_back(fmt::format("unknown key '{}'", full));
        continue;
      }
      it->second(cfg, full, value.data(), errors);
    }
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
  cfg.validate();
  return cfg;
}

}  // namespace

SimConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(fmt::format("line {}: {}", e.line(), e.message()), e.line());
  }
  return from_tree(tree);
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot read configuration file '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace hydrolimit
