#include "hypermoment/cli/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "hypermoment/assembly.hpp"
#include "hypermoment/cli/io.hpp"
#include "hypermoment/errors.hpp"
#include "hypermoment/hermite.hpp"
#include "hypermoment/riemann.hpp"
#include "hypermoment/solver.hpp"
#include "hypermoment/spectral.hpp"

namespace hypermoment::cli {

using nlohmann::json;

namespace {

std::vector<double> parse_vector(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw DomainError("'" + text + "' is not a comma-separated list of numbers");
    }
  }
  return v;
}

Eigen::VectorXd unit_direction(const std::string& text, int dim) {
  const std::vector<double> v = parse_vector(text);
  if (static_cast<int>(v.size()) != dim) throw DomainError("--dir needs " + std::to_string(dim) + " components");
  Eigen::VectorXd n = Eigen::Map<const Eigen::VectorXd>(v.data(), dim);
  const double norm = n.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw DomainError("--dir must be a nonzero finite vector");
  return n / norm;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t k = 0; k < cells.size(); ++k) out << (k ? "," : "") << cells[k];
  out << '\n';
}

// ---- assemble ---------------------------------------------------------------

struct AssembleArgs {
  std::string state, dir = "1";
  bool regularized = false, report = false;
};

int cmd_assemble(const AssembleArgs& a, std::ostream& out) {
  const MomentState s = state_from_json(read_json_file(a.state));
  CoefficientMatrix m;
  if (a.dir.find(',') == std::string::npos) {
    int d = 0;
    try {
      std::size_t used = 0;
      d = std::stoi(a.dir, &used);
      if (used != a.dir.size()) throw std::invalid_argument(a.dir);
    } catch (const std::logic_error&) {
      throw DomainError("--dir must be an axis 1..D or a direction vector");
    }
    if (d < 1 || d > s.dim()) throw DomainError("--dir axis must lie in 1.." + std::to_string(s.dim()));
    m = a.regularized ? assemble_regularized(s, d - 1) : assemble(s, d - 1);
  } else {
    m = directional(s, unit_direction(a.dir, s.dim()), a.regularized);
  }
  if (a.report) {
    const StructuralReport r = structural_report(m, s);
    json j;
    j["D"] = s.dim();
    j["M"] = s.max_order();
    j["size"] = s.size();
    j["direction"] = a.dir;
    j["regularized"] = m.regularized;
    j["max_abs_diagonal"] = r.max_abs_diagonal;
    j["max_upper_per_row"] = r.max_upper_per_row;
    j["velocity_sensitivity"] = r.velocity_sensitivity;
    if (m.direction == 0) {
      j["block_lower_triangular"] = r.block_lower_triangular;
      j["max_above_blocks"] = r.max_above_blocks;
    }
    out << j.dump(2) << '\n';
    return kOk;
  }
  for (long i = 0; i < m.a.rows(); ++i) {
    std::vector<std::string> row;
    for (long k = 0; k < m.a.cols(); ++k) row.push_back(number(m.a(i, k)));
    write_csv_row(out, row);
  }
  return kOk;
}

// ---- spectrum ---------------------------------------------------------------

struct SpectrumArgs {
  std::string state, dir;
  bool unregularized = false;
};

int cmd_spectrum(const SpectrumArgs& a, std::ostream& out, std::ostream& err) {
  const MomentState s = state_from_json(read_json_file(a.state));
  const std::optional<Eigen::VectorXd> n =
      a.dir.empty() ? std::nullopt : std::optional<Eigen::VectorXd>(unit_direction(a.dir, s.dim()));
  write_csv_row(out, {"eigenvalue", "multiplicity", "family_m", "root_index"});
  if (!a.unregularized) {
    for (const SpectrumEntry& e : n ? spectrum_regularized(s, *n) : spectrum_regularized(s)) {
      write_csv_row(out, {number(e.eigenvalue), std::to_string(e.multiplicity), std::to_string(e.family_m),
                          std::to_string(e.root_index)});
    }
    return kOk;
  }
  const Eigen::MatrixXd A = n ? directional(s, *n, false).a : assemble(s, 0).a;
  const NumericSpectrum num = numeric_spectrum(A);
  const double scale = std::max(1.0, num.eigenvalues.cwiseAbs().maxCoeff());
  if (num.max_imag > 1e-10 * scale) {
    err << "warning: complex eigenvalues, max |Im| = " << number(num.max_imag)
        << "; the eigenvalue column holds real parts\n";
  }
  const long size = num.eigenvalues.size();
  for (long k = 0; k < size; ++k) {
    int mult = 0;
    for (long q = 0; q < size; ++q) mult += std::abs(num.eigenvalues(q) - num.eigenvalues(k)) <= 1e-8 * scale;
    write_csv_row(out, {number(num.eigenvalues(k).real()), std::to_string(mult), "0", "0"});
  }
  return kOk;
}

// ---- hyperbolicity ----------------------------------------------------------

struct HyperbolicityArgs {
  std::string scan, state;
  int dim = 1, max_order = 3;
  bool regularized = false;
  double imag_tol = 1e-9;
};

int cmd_hyperbolicity(const HyperbolicityArgs& a, std::ostream& out, std::ostream& err) {
  MomentState base = a.state.empty() ? equilibrium(a.dim, a.max_order, 1.0, Eigen::VectorXd::Zero(a.dim), 1.0)
                                     : state_from_json(read_json_file(a.state));
  const int D = base.dim(), M = base.max_order();

  const auto eq = a.scan.find('=');
  if (eq == std::string::npos || eq < 2 || a.scan[0] != 'f') {
    throw DomainError("--scan must look like f3=a:b:steps or f1,2=a:b:steps");
  }
  const std::string key = a.scan.substr(1, eq - 1);
  MultiIndex alpha = key.find(',') == std::string::npos ? MultiIndex::unit(D, 0).shifted(0, std::stoi(key) - 1)
                                                         : MultiIndex::parse(key);
  if (alpha.dim() != D || alpha.order() < 3 || alpha.order() > M) {
    throw DomainError("scanned coefficient must have dimension D and order 3..M");
  }
  std::vector<std::string> range;
  {
    std::stringstream ss(a.scan.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ':')) range.push_back(item);
  }
  if (range.size() != 3) throw DomainError("--scan range must be a:b:steps");
  const double lo = parse_vector(range[0]).at(0), hi = parse_vector(range[1]).at(0);
  const int steps = std::stoi(range[2]);
  if (steps < 1) throw DomainError("--scan needs at least one step");

  const double tol = a.imag_tol * std::sqrt(base.theta(0, 0));
  write_csv_row(out, {"coefficient", "max_imag"});
  std::optional<double> last_real, first_complex;
  for (int k = 0; k <= steps; ++k) {
    const double v = lo + (hi - lo) * k / steps;
    base.set_f(alpha, v);
    const Eigen::MatrixXd A = a.regularized ? assemble_regularized(base, 0).a : assemble(base, 0).a;
    const double im = numeric_spectrum(A).max_imag;
    write_csv_row(out, {number(v), number(im)});
    if (im <= tol && !first_complex) last_real = v;
    if (im > tol && !first_complex) first_complex = v;
  }
  if (first_complex && last_real) {
    err << "hyperbolicity lost between f_" << alpha.to_string() << " = " << number(*last_real) << " and "
        << number(*first_complex) << '\n';
  } else if (first_complex) {
    err << "complex eigenvalues over the whole scan\n";
  } else {
    err << "real spectrum over the whole scan\n";
  }
  return kOk;
}

// ---- riemann ----------------------------------------------------------------

struct RiemannArgs {
  std::string left, right;
  double tol = 1e-8;
  int path_points = 32;
};

json field_json(const CharField& f) {
  return {{"c", f.c}, {"family_m", f.family_m}, {"root_index", f.root_index}, {"nature", to_string(f.nature)}};
}

int cmd_riemann(const RiemannArgs& a, std::ostream& out) {
  const MomentState L = state_from_json(read_json_file(a.left));
  const MomentState R = state_from_json(read_json_file(a.right));
  if (L.dim() != R.dim() || L.max_order() != R.max_order()) {
    throw DomainError("left and right states must share D and M");
  }
  if (a.path_points < 2) throw DomainError("--path-points must be at least 2");
  const int D = L.dim(), M = L.max_order();
  auto primitive = [](const MomentState& s) {
    return json{{"rho", s.rho()}, {"u1", s.u(0)}, {"p11", s.p(0, 0)}, {"theta11", s.theta(0, 0)}};
  };

  json report;
  report["D"] = D;
  report["M"] = M;
  report["left"] = primitive(L);
  report["right"] = primitive(R);

  // One row per (family, root); distinct characteristic speeds c for the wave search.
  std::map<std::pair<int, int>, int> multiplicity;
  for (const SpectrumEntry& e : spectrum_regularized(L)) multiplicity[{e.family_m, e.root_index}] += 1;
  report["fields"] = json::array();
  std::vector<CharField> distinct;
  for (const auto& [key, mult] : multiplicity) {
    const double c = hermite_roots(key.first)[static_cast<std::size_t>(key.second - 1)];
    CharField f;
    f.c = c;
    f.family_m = key.first;
    f.root_index = key.second;
    f.nature = key.first == M + 1 && c != 0.0 ? FieldNature::GenuinelyNonlinear : FieldNature::LinearlyDegenerate;
    json row = field_json(f);
    row["multiplicity"] = mult;
    row["lambda_left"] = field_eigenvalue(L, f);
    row["lambda_right"] = field_eigenvalue(R, f);
    report["fields"].push_back(row);
    const bool seen = std::any_of(distinct.begin(), distinct.end(),
                                  [&](const CharField& g) { return std::abs(g.c - c) <= 1e-12 * std::max(1.0, std::abs(c)); });
    if (!seen) distinct.push_back(classify_field(L, c));
  }

  const Eigen::VectorXd FL = to_conserved(L), FR = to_conserved(R);
  const double wscale = 1.0 + std::max(L.w().cwiseAbs().maxCoeff(), R.w().cwiseAbs().maxCoeff());
  const double fscale = 1.0 + std::max(FL.cwiseAbs().maxCoeff(), FR.cwiseAbs().maxCoeff());
  const bool density_jump = std::abs(L.rho() - R.rho()) > 1e-14 * std::max(L.rho(), R.rho());

  json candidates = json::array();
  std::optional<ElementaryWave> identified;
  auto consider = [&](WaveKind kind, const CharField& f, double residual, bool admissible, double sl, double sr,
                      json extra) {
    extra["kind"] = to_string(kind);
    extra["field"] = field_json(f);
    extra["residual"] = residual;
    extra["admissible"] = admissible;
    extra["matches"] = residual <= a.tol && admissible;
    candidates.push_back(extra);
    if (residual <= a.tol && admissible && !identified) {
      identified = ElementaryWave{kind, L, R, sl, sr, f};
    }
  };

  for (const CharField& f : distinct) {
    if (f.nature == FieldNature::GenuinelyNonlinear && density_jump) {
      const double S = mass_balance_speed(L, R);
      const ShockReport sh = shock_check(FL, FR, S, f, D, M, a.path_points);
      consider(WaveKind::Shock, f, std::max(sh.conservative_residual, sh.nonconservative_residual) / fscale,
               sh.entropy_ok, S, S,
               {{"speed", S},
                {"conservative_residual", sh.conservative_residual},
                {"nonconservative_residual", sh.nonconservative_residual},
                {"lambda_left", sh.lambda_left},
                {"lambda_right", sh.lambda_right},
                {"entropy_ok", sh.entropy_ok}});
      try {
        const RarefactionResult rc = rarefaction_curve(L, f, std::log(R.rho() / L.rho()));
        const double gap = (rc.state.w() - R.w()).cwiseAbs().maxCoeff() / wscale;
        const double ll = field_eigenvalue(L, f), lr = field_eigenvalue(R, f);
        consider(WaveKind::Rarefaction, f, gap, lr > ll, ll, lr,
                 {{"curve_distance", gap}, {"lambda_left", ll}, {"lambda_right", lr}});
      } catch (const std::exception& e) {
        candidates.push_back({{"kind", "rarefaction"}, {"field", field_json(f)}, {"matches", false},
                              {"note", std::string("integral curve failed: ") + e.what()}});
      }
    } else if (f.nature == FieldNature::LinearlyDegenerate) {
      const ContactVerdict cv = contact_check(L, R, f, a.tol);
      const double lambda = field_eigenvalue(L, f);
      consider(WaveKind::Contact, f, std::max({cv.velocity_gap, cv.pressure_gap, cv.eigenvalue_gap}) / wscale,
               cv.ok, lambda, lambda,
               {{"velocity_gap", cv.velocity_gap},
                {"pressure_gap", cv.pressure_gap},
                {"eigenvalue_gap", cv.eigenvalue_gap}});
    }
  }
  report["candidates"] = candidates;
  if (identified) {
    const TableVerdict tv = wave_table_check(*identified);
    report["identified"] = {{"kind", to_string(identified->kind)},
                            {"field", field_json(identified->field)},
                            {"speed_left", identified->speed_left},
                            {"speed_right", identified->speed_right},
                            {"table", {{"ok", tv.ok},
                                       {"expected", tv.expected},
                                       {"velocity_jump", tv.velocity_jump},
                                       {"pressure_jump", tv.pressure_jump}}}};
  } else {
    report["identified"] = nullptr;
  }
  out << report.dump(2) << '\n';
  return kOk;
}

// ---- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  bool oracle = false;
};

void write_snapshots(std::ostream& out, const std::vector<Snapshot>& snaps) {
  write_csv_row(out, {"t", "x", "rho", "u1", "p11", "theta", "q1"});
  for (const Snapshot& s : snaps) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      write_csv_row(out, {number(s.t), number(s.x[i]), number(s.rho[i]), number(s.u1[i]), number(s.p11[i]),
                          number(s.theta[i]), number(s.q1[i])});
    }
  }
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  const SimulationSetup setup = simulation_from_json(read_json_file(a.config));
  if (a.oracle) {
    const KineticResult k = kinetic_reference(setup.config, setup.left, setup.right, setup.kinetic);
    for (const std::string& w : k.warnings) err << "warning: " << w << '\n';
    err << k.steps << " steps, clipped mass fraction " << number(k.clipped_mass_fraction) << '\n';
    write_snapshots(out, k.snapshots);
  } else {
    const SimulationResult r = simulate(setup.config, setup.left, setup.right);
    err << r.steps << " steps\n";
    write_snapshots(out, r.snapshots);
  }
  return kOk;
}

// ---- conjecture / hermite-check ---------------------------------------------

struct ConjectureArgs {
  int n_max = 200;
  double tol = 1e-9;
  int keep = 10;
  bool violations_only = false;
};

int cmd_conjecture(const ConjectureArgs& a, std::ostream& out, std::ostream& err) {
  if (a.n_max < 2) throw DomainError("--n-max must be at least 2");
  if (a.keep < 0) throw DomainError("--keep must be non-negative");
  const CommonZeroReport r = common_zero_scan(a.n_max, a.tol, static_cast<std::size_t>(a.keep));
  write_csv_row(out, {"m", "n", "root", "distance"});
  for (const RootPair& p : a.violations_only ? r.violations : r.closest) {
    write_csv_row(out, {std::to_string(p.m), std::to_string(p.n), number(p.root), number(p.distance)});
  }
  err << r.violations.size() << " shared nonzero roots for n <= " << a.n_max << " at relative tolerance "
      << number(a.tol) << '\n';
  return kOk;
}

struct HermiteCheckArgs {
  int dim = 3, max_order = 6, n_max = 200;
  std::uint64_t seed = 1;
};

int cmd_hermite_check(const HermiteCheckArgs& a, std::ostream& out, std::ostream& err) {
  if (a.dim < 1 || a.max_order < 1 || a.n_max < 2) throw DomainError("--D, --M must be positive, --n-max >= 2");
  const auto checks = hermite_identity_checks(a.dim, a.max_order, a.n_max, a.seed);
  write_csv_row(out, {"name", "error", "tolerance", "pass"});
  bool all = true;
  for (const IdentityCheck& c : checks) {
    write_csv_row(out, {c.name, number(c.error), number(c.tolerance), c.pass ? "1" : "0"});
    if (!c.pass) err << c.name << " failed: " << c.detail << '\n';
    all = all && c.pass;
  }
  return all ? kOk : kNumericalError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hermite moment systems: assembly, spectra, Riemann waves and a 1D solver", "hypermoment"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string output;
  app.add_option("-o,--output", output, "write data to this file instead of standard output");

  AssembleArgs as;
  auto* assemble_cmd = app.add_subcommand("assemble", "coefficient matrix as CSV, or structural report as JSON");
  assemble_cmd->add_option("--state", as.state, "state JSON")->required();
  assemble_cmd->add_option("--dir", as.dir, "axis 1..D or a direction vector n1,n2,...");
  assemble_cmd->add_flag("--regularized", as.regularized, "apply the hyperbolic regularization");
  assemble_cmd->add_flag("--report", as.report, "emit structural diagnostics as JSON");

  SpectrumArgs sp;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "eigenvalues in the frame moving with the fluid");
  spectrum_cmd->add_option("--state", sp.state, "state JSON")->required();
  spectrum_cmd->add_option("--dir", sp.dir, "direction vector n1,n2,... (normalized); default x1");
  spectrum_cmd->add_flag("--unregularized", sp.unregularized, "numeric spectrum of the unregularized matrix");

  HyperbolicityArgs hy;
  auto* hyper_cmd = app.add_subcommand("hyperbolicity", "scan one coefficient and report max |Im lambda|");
  hyper_cmd->add_option("--scan", hy.scan, "fK=a:b:steps (f_{K e1}) or fA1,A2=a:b:steps")->required();
  hyper_cmd->add_option("--D", hy.dim, "dimension for the unit Maxwellian base state");
  hyper_cmd->add_option("--M", hy.max_order, "moment order for the unit Maxwellian base state");
  hyper_cmd->add_option("--state", hy.state, "base state JSON instead of the unit Maxwellian");
  hyper_cmd->add_flag("--regularized", hy.regularized, "scan the regularized matrix");
  hyper_cmd->add_option("--imag-tol", hy.imag_tol, "|Im| threshold relative to sqrt(theta_11)");

  RiemannArgs ri;
  auto* riemann_cmd = app.add_subcommand("riemann", "classify fields and the jump between two states as JSON");
  riemann_cmd->add_option("--left", ri.left, "left state JSON")->required();
  riemann_cmd->add_option("--right", ri.right, "right state JSON")->required();
  riemann_cmd->add_option("--tol", ri.tol, "relative tolerance for accepting an elementary wave");
  riemann_cmd->add_option("--path-points", ri.path_points, "Gauss-Legendre nodes on the jump path");

  SimulateArgs si;
  auto* simulate_cmd = app.add_subcommand("simulate", "1D Riemann problem; CSV snapshots");
  simulate_cmd->add_option("--config", si.config, "simulation JSON")->required();
  simulate_cmd->add_flag("--oracle", si.oracle, "run the discrete-velocity BGK reference instead");

  ConjectureArgs co;
  auto* conjecture_cmd = app.add_subcommand("conjecture", "closest nonzero roots shared by He_m and He_n");
  conjecture_cmd->add_option("--n-max", co.n_max, "largest degree scanned");
  conjecture_cmd->add_option("--tol", co.tol, "relative distance counted as a shared root");
  conjecture_cmd->add_option("--keep", co.keep, "number of closest pairs listed");
  conjecture_cmd->add_flag("--violations", co.violations_only, "list only pairs within the tolerance");

  HermiteCheckArgs hc;
  auto* hermite_cmd = app.add_subcommand("hermite-check", "numerical check of the Hermite identities");
  hermite_cmd->add_option("--D", hc.dim, "largest dimension");
  hermite_cmd->add_option("--M", hc.max_order, "largest multi-index order");
  hermite_cmd->add_option("--n-max", hc.n_max, "largest degree in the common-zero scan");
  hermite_cmd->add_option("--seed", hc.seed, "random seed for the test bases");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kValidationError;
  }

  std::ofstream file;
  if (!output.empty()) {
    file.open(output);
    if (!file) {
      err << "error: cannot write '" << output << "'\n";
      return kValidationError;
    }
  }
  std::ostream& data = output.empty() ? out : file;

  try {
    if (*assemble_cmd) return cmd_assemble(as, data);
    if (*spectrum_cmd) return cmd_spectrum(sp, data, err);
    if (*hyper_cmd) return cmd_hyperbolicity(hy, data, err);
    if (*riemann_cmd) return cmd_riemann(ri, data);
    if (*simulate_cmd) return cmd_simulate(si, data, err);
    if (*conjecture_cmd) return cmd_conjecture(co, data, err);
    if (*hermite_cmd) return cmd_hermite_check(hc, data, err);
  } catch (const AdmissibilityError& e) {
    err << "error: " << e.what() << '\n';
    return e.cell() >= 0 ? kNumericalError : kValidationError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const json::exception& e) {
    err << "error: invalid configuration: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  }
  return kValidationError;
}

}  // namespace hypermoment::cli
