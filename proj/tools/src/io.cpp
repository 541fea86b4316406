#include "hypermoment/cli/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "hypermoment/errors.hpp"

namespace hypermoment::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& what) {
  if (!j.is_object()) throw DomainError(what + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw DomainError("unknown key '" + key + "' in " + what);
  }
}

double get_number(const json& j, const std::string& key, const std::string& what) {
  const json& v = j.at(key);
  if (!v.is_number()) throw DomainError(what + "." + key + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw DomainError(what + "." + key + " must be finite");
  return x;
}

double number_or(const json& j, const std::string& key, double fallback, const std::string& what) {
  return j.contains(key) ? get_number(j, key, what) : fallback;
}

int int_or(const json& j, const std::string& key, int fallback, const std::string& what) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) throw DomainError(what + "." + key + " must be an integer");
  return j.at(key).get<int>();
}

}  // namespace

MomentState state_from_json(const json& j, int dim, int max_order) {
  reject_unknown(j, {"D", "M", "rho", "u", "p", "theta", "f"}, "state");
  const int D = int_or(j, "D", dim, "state");
  const int M = int_or(j, "M", max_order, "state");
  if (dim > 0 && D != dim) throw DomainError("state.D does not match the enclosing configuration");
  if (max_order > 0 && M != max_order) throw DomainError("state.M does not match the enclosing configuration");
  if (D < 1) throw DomainError("state.D is required and must be at least 1");
  if (M < 2) throw DomainError("state.M is required and must be at least 2");
  if (!j.contains("rho")) throw DomainError("state.rho is required");

  MomentState s(D, M);
  s.set_rho(get_number(j, "rho", "state"));
  if (j.contains("u")) {
    const json& u = j.at("u");
    if (!u.is_array() || static_cast<int>(u.size()) != D) throw DomainError("state.u must hold D numbers");
    for (int i = 0; i < D; ++i) {
      if (!u[i].is_number()) throw DomainError("state.u must hold numbers");
      s.set_u(i, u[i].get<double>());
    }
  }
  if (j.contains("p") == j.contains("theta")) throw DomainError("state needs exactly one of 'p' and 'theta'");
  if (j.contains("theta")) {
    const double theta = get_number(j, "theta", "state");
    for (int i = 0; i < D; ++i) s.set_p(i, i, s.rho() * theta);
  } else {
    const json& p = j.at("p");
    if (!p.is_array() || static_cast<int>(p.size()) != D) throw DomainError("state.p must be a D x D array");
    for (int i = 0; i < D; ++i) {
      if (!p[i].is_array() || static_cast<int>(p[i].size()) != D) throw DomainError("state.p must be a D x D array");
      for (int k = 0; k < D; ++k) {
        if (!p[i][k].is_number()) throw DomainError("state.p must hold numbers");
      }
    }
    for (int i = 0; i < D; ++i) {
      for (int k = i; k < D; ++k) {
        const double a = p[i][k].get<double>(), b = p[k][i].get<double>();
        if (std::abs(a - b) > 1e-12 * std::max({1.0, std::abs(a), std::abs(b)})) {
          throw DomainError("state.p must be symmetric");
        }
        s.set_p(i, k, a);
      }
    }
  }
  if (j.contains("f")) {
    const json& f = j.at("f");
    if (!f.is_object()) throw DomainError("state.f must map \"a1,a2,...\" to numbers");
    for (const auto& [key, value] : f.items()) {
      const MultiIndex alpha = MultiIndex::parse(key);
      if (alpha.dim() != D) throw DomainError("state.f key '" + key + "' has the wrong dimension");
      if (alpha.order() < 3 || alpha.order() > M) {
        throw DomainError("state.f key '" + key + "' must have order between 3 and M");
      }
      if (!value.is_number()) throw DomainError("state.f['" + key + "'] must be a number");
      s.set_f(alpha, value.get<double>());
    }
  }
  validate(s);
  return s;
}

json state_to_json(const MomentState& s) {
  const int D = s.dim();
  json j;
  j["D"] = D;
  j["M"] = s.max_order();
  j["rho"] = s.rho();
  j["u"] = json::array();
  j["p"] = json::array();
  for (int i = 0; i < D; ++i) {
    j["u"].push_back(s.u(i));
    json row = json::array();
    for (int k = 0; k < D; ++k) row.push_back(s.p(i, k));
    j["p"].push_back(row);
  }
  j["f"] = json::object();
  const IndexSet& set = s.indices();
  if (s.max_order() >= 3) {
    for (std::size_t r = set.order_begin(3); r < set.size(); ++r) {
      const double v = s.w()(static_cast<long>(r));
      if (v != 0.0) j["f"][set.at(r).to_string()] = v;
    }
  }
  return j;
}

SimulationSetup simulation_from_json(const json& j) {
  reject_unknown(j,
                 {"D", "M", "t_end", "cfl", "output_interval", "x_interface", "path_points", "spectral_check",
                  "grid", "collision", "left", "right", "kinetic"},
                 "simulation");
  SimulationSetup setup;
  SimulationConfig& c = setup.config;
  c.dim = int_or(j, "D", c.dim, "simulation");
  c.max_order = int_or(j, "M", c.max_order, "simulation");
  c.t_end = number_or(j, "t_end", c.t_end, "simulation");
  c.cfl = number_or(j, "cfl", c.cfl, "simulation");
  c.output_interval = number_or(j, "output_interval", c.output_interval, "simulation");
  c.x_interface = number_or(j, "x_interface", c.x_interface, "simulation");
  c.path_points = int_or(j, "path_points", c.path_points, "simulation");
  if (j.contains("spectral_check")) {
    if (!j.at("spectral_check").is_boolean()) throw DomainError("simulation.spectral_check must be a boolean");
    c.spectral_check = j.at("spectral_check").get<bool>();
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    reject_unknown(g, {"nx", "x_min", "x_max", "boundary"}, "grid");
    c.grid.nx = int_or(g, "nx", c.grid.nx, "grid");
    c.grid.x_min = number_or(g, "x_min", c.grid.x_min, "grid");
    c.grid.x_max = number_or(g, "x_max", c.grid.x_max, "grid");
    if (g.contains("boundary")) {
      const std::string b = g.at("boundary").get<std::string>();
      if (b == "copy") {
        c.grid.boundary = Boundary::Copy;
      } else if (b == "periodic") {
        c.grid.boundary = Boundary::Periodic;
      } else {
        throw DomainError("grid.boundary must be 'copy' or 'periodic'");
      }
    }
  }
  if (j.contains("collision")) {
    const json& k = j.at("collision");
    reject_unknown(k, {"model", "nu", "prandtl"}, "collision");
    c.collision.nu = number_or(k, "nu", c.collision.nu, "collision");
    c.collision.prandtl = number_or(k, "prandtl", c.collision.prandtl, "collision");
    if (k.contains("model")) {
      const std::string m = k.at("model").get<std::string>();
      if (m == "bgk") {
        c.collision.kind = CollisionKind::BGK;
      } else if (m == "esbgk") {
        c.collision.kind = CollisionKind::ESBGK;
      } else {
        throw DomainError("collision.model must be 'bgk' or 'esbgk'");
      }
    }
  }
  if (j.contains("kinetic")) {
    const json& k = j.at("kinetic");
    reject_unknown(k, {"velocity_points", "width", "clip_tolerance"}, "kinetic");
    setup.kinetic.velocity_points = int_or(k, "velocity_points", setup.kinetic.velocity_points, "kinetic");
    setup.kinetic.width = number_or(k, "width", setup.kinetic.width, "kinetic");
    setup.kinetic.clip_tolerance = number_or(k, "clip_tolerance", setup.kinetic.clip_tolerance, "kinetic");
  }
  c.validate();
  if (!j.contains("left") || !j.contains("right")) throw DomainError("simulation needs 'left' and 'right' states");
  setup.left = state_from_json(j.at("left"), c.dim, c.max_order);
  setup.right = state_from_json(j.at("right"), c.dim, c.max_order);
  return setup;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DomainError("malformed JSON in '" + path + "': " + e.what());
  }
}

std::string number(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace hypermoment::cli
