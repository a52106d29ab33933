// Batch front-end: identity checks, single spectra, (alpha, eps) sweeps,
// functional evaluations, and expansion verification. Single runs emit JSON
// with all inputs echoed; sweeps emit CSV. Exit codes: 0 success,
// 1 validation error, 2 convergence failure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "spinlab/curvature.hpp"
#include "spinlab/eigensolve.hpp"
#include "spinlab/sweep.hpp"
#include "spinlab/testspinor.hpp"

namespace {

using nlohmann::json;
using namespace spinlab;

constexpr int kExitValidation = 1;
constexpr int kExitConvergence = 2;

void emit(const json& j, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream os(out);
  if (!os) throw std::invalid_argument("cannot open output file: " + out);
  os << j.dump(2) << "\n";
}

SpinStructure parse_spin(const std::string& text) {
  std::string s = text;
  for (char& c : s)
    if (c == ';') c = ',';
  const auto comma = s.find(',');
  if (comma == std::string::npos)
    throw std::invalid_argument("spin must be two values, e.g. 0.5,0");
  std::size_t used0 = 0, used1 = 0;
  const std::string left = s.substr(0, comma), right = s.substr(comma + 1);
  const double a = std::stod(left, &used0);
  const double b = std::stod(right, &used1);
  if (used0 != left.size() || used1 != right.size())
    throw std::invalid_argument("malformed spin value: " + text);
  return SpinStructure(a, b);  // rejects anything outside {0, 1/2}
}

// Factor spec: "family" (uses --alpha/--eps) or "const:<value>".
ConformalFactor parse_factor(const std::string& spec, const TorusDomain& dom,
                             double alpha, double eps) {
  if (spec == "family") return ConformalFactor::family(alpha, eps);
  const std::string prefix = "const:";
  if (spec.rfind(prefix, 0) == 0) {
    std::size_t used = 0;
    const std::string value = spec.substr(prefix.size());
    const double c = std::stod(value, &used);
    if (used != value.size())
      throw std::invalid_argument("malformed constant factor: " + spec);
    return ConformalFactor::constant(c);
  }
  (void)dom;
  throw std::invalid_argument("unknown factor spec: " + spec +
                              " (expected family or const:<value>)");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Flat key=value config support: --config <file> is extracted before CLI
// parsing and each key becomes --key <value> appended after the real argv,
// skipping keys already given on the command line (flags override the file).
// Unknown keys then fail option matching, which rejects them.
std::vector<std::string> apply_config(const std::vector<std::string>& args) {
  std::string path;
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config") {
      if (i + 1 >= args.size())
        throw std::invalid_argument("--config needs a file path");
      path = args[++i];
    } else if (a.rfind("--config=", 0) == 0) {
      path = a.substr(9);
    } else {
      out.push_back(a);
    }
  }
  if (path.empty()) return out;

  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot read config file: " + path);
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": empty key");
    std::erase_if(entries, [&](const auto& kv) { return kv.first == key; });
    entries.emplace_back(key, value);
  }
  for (const auto& [key, value] : entries) {
    const std::string flag = "--" + key;
    bool given = false;
    for (const auto& a : out)
      if (a == flag || a.rfind(flag + "=", 0) == 0) given = true;
    if (given) continue;
    out.push_back(flag);
    out.push_back(value);
  }
  return out;
}

void configure(CLI::App* sub) {
  // Registered for --help only; the value is consumed before parsing.
  sub->add_option("--config", "flat key=value file; flags override")
      ->type_name("FILE");
}

struct IdentityArgs {
  int n = 2;
  int samples = 200;
  std::uint64_t seed = 42;
  double eps = 1.0;
  double delta = 0.2;
  std::string out = "-";
};

int cmd_identities(const IdentityArgs& a) {
  TestSpinorParams p;
  p.n = a.n;
  p.eps = a.eps;
  p.delta_cut = a.delta;
  p.validate();
  const double dev = check_identities(p, a.samples, a.seed);
  const double threshold = 1e-10;
  json j = {{"command", "identities"}, {"n", a.n},       {"samples", a.samples},
            {"seed", a.seed},          {"eps", a.eps},   {"delta_cut", a.delta},
            {"max_deviation", dev},    {"threshold", threshold},
            {"pass", dev < threshold}};
  emit(j, a.out);
  return dev < threshold ? 0 : kExitConvergence;
}

struct SpectrumArgs {
  int grid = 64;
  std::string spin = "0,0";
  std::string factor = "family";
  double alpha = 1.0;
  double eps = 0.2;
  double length = 2.0 * M_PI;
  int k = 4;
  double tol = 1e-9;
  int maxit = 300;
  std::uint64_t seed = 7;
  std::string out = "-";
};

int cmd_spectrum(const SpectrumArgs& a) {
  const TorusDomain dom(a.grid, a.length);
  const auto spin = parse_spin(a.spin);
  const auto f = parse_factor(a.factor, dom, a.alpha, a.eps);
  EigenConfig cfg;
  cfg.tol = a.tol;
  cfg.maxit = a.maxit;
  cfg.seed = a.seed;

  const ConformalDirac A(dom, spin, f);
  const auto dirac = lambda1_plus(A, a.k, cfg);
  const ConformalLaplace C(dom, f);
  const auto laplace = mu1(C, a.k, cfg);
  const double vol = volume(f, dom);

  json j = {{"command", "spectrum"},
            {"grid", a.grid},
            {"length", a.length},
            {"spin", a.spin},
            {"factor", a.factor},
            {"alpha", a.alpha},
            {"eps", a.eps},
            {"k", a.k},
            {"tol", a.tol},
            {"maxit", a.maxit},
            {"seed", a.seed},
            {"lambda1", dirac.lambda1},
            {"kernel_dim", dirac.kernel_dim},
            {"dirac_values", std::vector<double>(dirac.values.begin(), dirac.values.end())},
            {"dirac_residuals", std::vector<double>(dirac.residuals.begin(), dirac.residuals.end())},
            {"dirac_iterations", dirac.iterations},
            {"mu1", laplace.mu1},
            {"laplace_values", std::vector<double>(laplace.values.begin(), laplace.values.end())},
            {"laplace_residuals", std::vector<double>(laplace.residuals.begin(), laplace.residuals.end())},
            {"laplace_iterations", laplace.iterations},
            {"vol", vol},
            {"lam1sq_vol", dirac.lambda1 * dirac.lambda1 * vol},
            {"mu1_vol", laplace.mu1 * vol},
            {"ratio", dirac.lambda1 * dirac.lambda1 / laplace.mu1}};
  emit(j, a.out);
  return 0;
}

struct SweepArgs {
  double alpha = 1.0;
  std::vector<double> eps;
  int grid = 256;
  std::string spin = "0,0";
  double length = 2.0 * M_PI;
  double tol = 1e-7;
  int maxit = 400;
  std::uint64_t seed = 7;
  int k = 4;
  double min_res_factor = 8.0;
  std::string out = "-";
};

int cmd_sweep(const SweepArgs& a) {
  const TorusDomain dom(a.grid, a.length);
  const auto spin = parse_spin(a.spin);
  if (a.eps.empty()) throw std::invalid_argument("sweep needs at least one eps");
  if (!(a.alpha < a.length / 2.0))
    throw std::invalid_argument("alpha must satisfy alpha < L/2");
  const double h = a.length / a.grid;
  for (double eps : a.eps) {
    if (!(eps > 0.0 && eps <= a.alpha))
      throw std::invalid_argument("eps must satisfy 0 < eps <= alpha");
    if (eps < a.min_res_factor * h) {
      std::ostringstream msg;
      msg << "eps = " << eps << " under-resolved on grid " << a.grid
          << " (requires eps >= " << a.min_res_factor << "*h = "
          << a.min_res_factor * h << "; lower --min-res-factor to override)";
      throw std::invalid_argument(msg.str());
    }
  }

  EigenConfig cfg;
  cfg.tol = a.tol;
  cfg.maxit = a.maxit;
  cfg.seed = a.seed;
  std::vector<RunPoint> pts;
  for (double eps : a.eps) pts.push_back({eps, a.alpha, a.grid, spin});

  const auto outcome = sweep_points(pts, cfg, env_worker_count());

  std::ostringstream csv;
  csv << csv_header() << "\n";
  for (const auto& r : outcome.rows) csv << csv_row(r) << "\n";
  if (a.out.empty() || a.out == "-") {
    std::cout << csv.str();
  } else {
    std::ofstream os(a.out);
    if (!os) throw std::invalid_argument("cannot open output file: " + a.out);
    os << csv.str();
  }
  for (const auto& [pt, what] : outcome.failures)
    std::cerr << "solve failed at eps = " << pt.eps << ": " << what << "\n";
  return outcome.failures.empty() ? 0 : kExitConvergence;
}

struct FunctionalArgs {
  int n = 2;
  double eps = 1e-3;
  double delta = 0.2;
  double amplitude = 1.0;
  std::string out = "-";
};

int cmd_functional(const FunctionalArgs& a) {
  const double value = j_flat(a.n, a.eps, a.delta, a.amplitude);
  const double limit = (a.n / 2.0) * std::pow(omega_sphere(a.n), 1.0 / a.n);
  json j = {{"command", "functional"},
            {"n", a.n},
            {"eps", a.eps},
            {"delta_cut", a.delta},
            {"amplitude", a.amplitude},
            {"j_flat", value},
            {"limit", limit},
            {"rel_gap", std::abs(value - limit) / limit}};
  if (a.n == 2) {
    const auto k = kappa(a.delta);
    j["kappa_quadrature"] = k.quadrature;
    j["kappa_closed_form"] = k.closed_form;
  }
  emit(j, a.out);
  return 0;
}

struct ExpansionArgs {
  std::string chart = "series";
  int n = 3;
  double K = 1.0;
  std::string file;
  double r0 = 0.1;
  int levels = 4;
  int directions = 6;
  std::uint64_t seed = 5;
  bool gauge = false;
  std::string out = "-";
};

int cmd_expansion(const ExpansionArgs& a) {
  MetricChart chart;
  if (a.chart == "flat") {
    chart = MetricChart::flat(a.n);
  } else if (a.chart == "series") {
    chart = MetricChart::constant_curvature_series(a.n, a.K);
  } else if (a.chart == "sphere") {
    chart = MetricChart::sphere_exact(a.n);
  } else if (a.chart == "file") {
    if (a.file.empty()) throw std::invalid_argument("--file required for chart=file");
    chart = MetricChart::from_poly_file(a.file);
  } else {
    throw std::invalid_argument("unknown chart: " + a.chart +
                                " (expected flat, series, sphere, file)");
  }
  chart.check_normal();

  const auto rep = riemann_at(chart);
  const auto orders = expansion_orders(chart, a.r0, a.levels, a.directions, a.seed);
  json j = {{"command", "expansion"},
            {"chart", a.chart},
            {"n", chart.n},
            {"curvature", a.K},
            {"r0", a.r0},
            {"levels", a.levels},
            {"directions", a.directions},
            {"seed", a.seed},
            {"scal0", rep.scal},
            {"ricci_norm0", rep.ric.norm()},
            {"bianchi_max", rep.bianchi_max},
            {"zero_branch", orders.zero_branch},
            {"b_slope", orders.b_slope},
            {"b_coeff_err", orders.b_coeff_err},
            {"gamma_slope", orders.gamma_slope},
            {"gamma_coeff_err", orders.gamma_coeff_err},
            {"v_slope", orders.v_slope},
            {"v_coeff_err", orders.v_coeff_err},
            {"w_slope", orders.w_slope},
            {"w_max", orders.w_max}};
  if (a.gauge) {
    const auto g = gauge_u(chart);
    j["gauge_scal0"] = g.scal0;
    j["gauge_r2_coeff"] = g.conformal_r2;
    j["gauge_quartic"] = g.quartic;
    j["gauge_ric_norm"] = g.ric_norm;
    j["gauge_delta_scal"] = g.delta_scal;
  }
  emit(j, a.out);
  return 0;
}

struct IntegralArgs {
  int n = 3;
  std::string out = "-";
};

int cmd_integral(const IntegralArgs& a) {
  const auto rep = sphere_integral(a.n);
  const double target = omega_sphere(a.n);
  const double gap = std::abs(rep.product - target);
  json j = {{"command", "integral"},
            {"n", a.n},
            {"I", rep.I},
            {"omega_n_minus_1", omega_sphere(a.n - 1)},
            {"product", rep.product},
            {"omega_n", target},
            {"abs_gap", gap},
            {"pass", gap <= 1e-8}};
  emit(j, a.out);
  return gap <= 1e-8 ? 0 : kExitConvergence;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conformal spectral torus laboratory"};
  app.require_subcommand(1);

  IdentityArgs ia;
  auto* identities = app.add_subcommand(
      "identities", "closed-form test-spinor identity check");
  identities->add_option("--n", ia.n, "ambient dimension (2 or 3)");
  identities->add_option("--samples", ia.samples, "random sample count");
  identities->add_option("--seed", ia.seed, "sample seed");
  identities->add_option("--eps", ia.eps, "rescale parameter");
  identities->add_option("--delta", ia.delta, "cutoff radius");
  identities->add_option("--out", ia.out, "output path (- for stdout)");
  configure(identities);

  SpectrumArgs pa;
  auto* spectrum = app.add_subcommand(
      "spectrum", "Dirac and Laplace spectrum of one conformal metric");
  spectrum->add_option("--grid", pa.grid, "grid resolution N");
  spectrum->add_option("--spin", pa.spin, "spin structure, e.g. 0.5,0");
  spectrum->add_option("--factor", pa.factor, "family or const:<value>");
  spectrum->add_option("--alpha", pa.alpha, "bubble radius");
  spectrum->add_option("--eps", pa.eps, "bubble scale");
  spectrum->add_option("--length", pa.length, "torus side length");
  spectrum->add_option("--k", pa.k, "eigenpairs per operator");
  spectrum->add_option("--tol", pa.tol, "relative residual tolerance");
  spectrum->add_option("--maxit", pa.maxit, "iteration cap");
  spectrum->add_option("--seed", pa.seed, "start-block seed");
  spectrum->add_option("--out", pa.out, "output path (- for stdout)");
  configure(spectrum);

  SweepArgs wa;
  auto* sweep = app.add_subcommand("sweep", "CSV sweep over bubble scales");
  sweep->add_option("--alpha", wa.alpha, "bubble radius");
  sweep->add_option("--eps", wa.eps, "bubble scales (comma separated)")
      ->delimiter(',');
  sweep->add_option("--grid", wa.grid, "grid resolution N");
  sweep->add_option("--spin", wa.spin, "spin structure, e.g. 0,0");
  sweep->add_option("--length", wa.length, "torus side length");
  sweep->add_option("--tol", wa.tol, "relative residual tolerance");
  sweep->add_option("--maxit", wa.maxit, "iteration cap");
  sweep->add_option("--seed", wa.seed, "start-block seed");
  sweep->add_option("--k", wa.k, "eigenpairs per operator");
  sweep->add_option("--min-res-factor", wa.min_res_factor,
                    "required eps/h resolution ratio");
  sweep->add_option("--out", wa.out, "CSV path (- for stdout)");
  configure(sweep);

  FunctionalArgs fa;
  auto* functional = app.add_subcommand(
      "functional", "scale-invariant spinor functional on the flat cutoff");
  functional->add_option("--n", fa.n, "ambient dimension (2 or 3)");
  functional->add_option("--eps", fa.eps, "rescale parameter");
  functional->add_option("--delta", fa.delta, "cutoff radius");
  functional->add_option("--amplitude", fa.amplitude, "spinor amplitude");
  functional->add_option("--out", fa.out, "output path (- for stdout)");
  configure(functional);

  ExpansionArgs xa;
  auto* expansion = app.add_subcommand(
      "expansion", "normal-chart expansion orders and conformal gauge");
  expansion->add_option("--chart", xa.chart, "flat, series, sphere, or file");
  expansion->add_option("--n", xa.n, "chart dimension (2..4)");
  expansion->add_option("--curvature", xa.K, "sectional curvature for series");
  expansion->add_option("--file", xa.file, "polynomial chart file");
  expansion->add_option("--r0", xa.r0, "outer probe radius");
  expansion->add_option("--levels", xa.levels, "radius halvings");
  expansion->add_option("--directions", xa.directions, "probe directions");
  expansion->add_option("--seed", xa.seed, "direction seed");
  expansion->add_flag("--gauge", xa.gauge, "also run the conformal gauge");
  expansion->add_option("--out", xa.out, "output path (- for stdout)");
  configure(expansion);

  IntegralArgs ga;
  auto* integral = app.add_subcommand(
      "integral", "sphere volume via the radial chart integral");
  integral->add_option("--n", ga.n, "sphere dimension");
  integral->add_option("--out", ga.out, "output path (- for stdout)");
  configure(integral);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = apply_config(args);
    std::reverse(args.begin(), args.end());  // CLI11 vector parse order
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (identities->parsed()) return cmd_identities(ia);
    if (spectrum->parsed()) return cmd_spectrum(pa);
    if (sweep->parsed()) return cmd_sweep(wa);
    if (functional->parsed()) return cmd_functional(fa);
    if (expansion->parsed()) return cmd_expansion(xa);
    if (integral->parsed()) return cmd_integral(ga);
  } catch (const ConvergenceFailure& e) {
    std::cerr << "convergence failure: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}
