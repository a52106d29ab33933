// Acceptance gate: one pass/fail line per criterion, exit nonzero when any
// in-scope criterion fails. Run all by default or a single one via --only k.
// Every tolerance is pinned here, not read from the environment.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "spinlab/curvature.hpp"
#include "spinlab/eigensolve.hpp"
#include "spinlab/sweep.hpp"
#include "spinlab/testspinor.hpp"

namespace {

using namespace spinlab;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double aitken(double x0, double x1, double x2) {
  const double d0 = x1 - x0, d1 = x2 - x1;
  return x2 - d1 * d1 / (d1 - d0);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return std::string(buf);
}

// Criteria 1 and 2 pin the same moderate-scale sweep: L = 2pi, alpha = 1,
// trivial structure, eps in {0.4, 0.2, 0.1}, N = 256.
const std::vector<double> kSweepEps = {0.4, 0.2, 0.1};
constexpr int kSweepGrid = 256;
constexpr double kSweepAlpha = 1.0;

EigenConfig sweep_config() {
  EigenConfig cfg;
  cfg.tol = 1e-7;
  cfg.maxit = 400;
  return cfg;
}

Outcome criterion_dirac_product_limit() {
  const auto t0 = std::chrono::steady_clock::now();
  const EigenConfig cfg = sweep_config();
  std::vector<double> l2v;
  for (double eps : kSweepEps) {
    const TorusDomain dom(kSweepGrid);
    const ConformalFactor f = ConformalFactor::family(kSweepAlpha, eps);
    const ConformalDirac A(dom, SpinStructure(0.0, 0.0), f);
    const auto spec = lambda1_plus(A, 4, cfg);
    l2v.push_back(spec.lambda1 * spec.lambda1 * volume(f, dom));
  }
  const double elapsed = seconds_since(t0);
  const double target = 4.0 * M_PI;
  const double extrap = aitken(l2v[0], l2v[1], l2v[2]);
  const bool monotone = l2v[0] > l2v[1] && l2v[1] > l2v[2] && l2v[2] > target;
  const bool close = std::abs(extrap - target) <= 0.05 * target;
  const bool fast = elapsed < 300.0;
  Outcome o;
  o.pass = monotone && close && fast;
  o.detail = fmt(
      "lam1^2*vol = {%.5f, %.5f, %.5f} -> extrapolated %.5f vs 4pi = %.5f "
      "(%+.2f%%), monotone=%d, %.0fs",
      l2v[0], l2v[1], l2v[2], extrap, target, 100.0 * (extrap - target) / target,
      monotone ? 1 : 0, elapsed);
  return o;
}

Outcome criterion_laplace_product_limit() {
  const EigenConfig cfg = sweep_config();
  std::vector<double> m1v;
  for (double eps : kSweepEps) {
    const TorusDomain dom(kSweepGrid);
    const ConformalFactor f = ConformalFactor::family(kSweepAlpha, eps);
    const ConformalLaplace C(dom, f);
    const auto spec = mu1(C, 4, cfg);
    m1v.push_back(spec.mu1 * volume(f, dom));
  }
  const double target = 8.0 * M_PI;
  const double extrap = aitken(m1v[0], m1v[1], m1v[2]);
  Outcome o;
  o.pass = std::abs(extrap - target) <= 0.05 * target;
  o.detail = fmt(
      "mu1*vol = {%.5f, %.5f, %.5f} -> extrapolated %.5f vs 8pi = %.5f "
      "(%+.2f%%); the sequence is not yet monotone at these scales (the "
      "first eigenfunction switches branch near eps = 0.135)",
      m1v[0], m1v[1], m1v[2], extrap, target, 100.0 * (extrap - target) / target);
  return o;
}

Outcome criterion_spectral_ratio() {
  // Deeper-scale chain of the same family, eps halving, eps/h >= 3 at every
  // point.  The two spectral products converge at measurably different
  // rates: mu1*vol contracts superlinearly (delta ratio ~4x per halving)
  // while lam1^2*vol decays along a logarithmic tail, the 1/ln(1/eps) law
  // of the annulus cutoff energy.  One delta-squared step on the raw ratio
  // fits neither component, so the ratio is extrapolated through its parts:
  // Aitken on mu1*vol, a linear fit in t = 1/ln(alpha/eps) on the deepest
  // lam1^2*vol pair.  Raw and split numbers are both printed.
  const std::vector<std::pair<double, int>> chain = {
      {0.1, 256}, {0.05, 512}, {0.025, 768}};
  EigenConfig cfg = sweep_config();
  cfg.maxit = 500;
  std::vector<double> ratios, l2v, m1v, ts;
  for (const auto& [eps, grid] : chain) {
    const TorusDomain dom(grid);
    const ConformalFactor f = ConformalFactor::family(kSweepAlpha, eps);
    double lam1 = 0.0, mu = 0.0;
    {
      const ConformalDirac A(dom, SpinStructure(0.0, 0.0), f);
      lam1 = lambda1_plus(A, 4, cfg).lambda1;
    }
    {
      const ConformalLaplace C(dom, f);
      mu = mu1(C, 4, cfg).mu1;
    }
    const double vol = volume(f, dom);
    ratios.push_back(lam1 * lam1 / mu);
    l2v.push_back(lam1 * lam1 * vol);
    m1v.push_back(mu * vol);
    ts.push_back(1.0 / std::log(kSweepAlpha / eps));
  }
  const double log_coeff = (l2v[2] - l2v[1]) / (ts[2] - ts[1]);
  const double lam_lim = l2v[2] - ts[2] * log_coeff;
  const double mu_lim = aitken(m1v[0], m1v[1], m1v[2]);
  const double extrap = lam_lim / mu_lim;
  const double raw = aitken(ratios[0], ratios[1], ratios[2]);
  const double best = *std::min_element(ratios.begin(), ratios.end());
  const bool close = std::abs(extrap - 0.5) <= 0.05 * 0.5;
  const bool witness = best < 0.55;
  Outcome o;
  o.pass = close && witness;
  o.detail = fmt(
      "ratio = {%.5f, %.5f, %.5f} at eps = {0.1, 0.05, 0.025}; split "
      "extrapolation %.5f vs 0.5 (%+.2f%%; lam side %.4f, mu side %.4f, "
      "log coeff %.2f; delta-squared on the raw ratio gives %.4f), best "
      "computed %.5f < 0.55: %s (that needs eps < 0.012, grid > 1600^2)",
      ratios[0], ratios[1], ratios[2], extrap, 100.0 * (extrap - 0.5) / 0.5,
      lam_lim, mu_lim, log_coeff, raw, best, witness ? "yes" : "no");
  return o;
}

Outcome criterion_flat_torus_spectra() {
  const int grid = 64;
  EigenConfig cfg;
  cfg.tol = 1e-9;
  cfg.maxit = 300;
  const TorusDomain dom(grid);
  const ConformalFactor one = ConformalFactor::constant(1.0);
  const double rel = 1e-8;

  struct Case {
    SpinStructure spin;
    std::vector<double> dirac_abs;  // 8 smallest |eigenvalues|, kernel deflated
    int kernel;
  };
  const double s2 = std::sqrt(0.5), s125 = std::sqrt(1.25);
  const std::vector<Case> cases = {
      {SpinStructure(0.0, 0.0), {1, 1, 1, 1, 1, 1, 1, 1}, 2},
      {SpinStructure(0.5, 0.0), {0.5, 0.5, 0.5, 0.5, s125, s125, s125, s125}, 0},
      {SpinStructure(0.0, 0.5), {0.5, 0.5, 0.5, 0.5, s125, s125, s125, s125}, 0},
      {SpinStructure(0.5, 0.5), {s2, s2, s2, s2, s2, s2, s2, s2}, 0},
  };

  double worst = 0.0;
  bool kernel_ok = true;
  double lambda_trivial = 0.0, lambda_half = 0.0;
  for (const auto& c : cases) {
    const ConformalDirac A(dom, c.spin, one);
    const auto spec = lambda1_plus(A, 8, cfg);
    if (spec.kernel_dim != c.kernel) kernel_ok = false;
    std::vector<double> abs_vals(spec.values.size());
    for (int i = 0; i < spec.values.size(); ++i) abs_vals[i] = std::abs(spec.values[i]);
    std::sort(abs_vals.begin(), abs_vals.end());
    for (std::size_t i = 0; i < c.dirac_abs.size(); ++i)
      worst = std::max(worst, std::abs(abs_vals[i] - c.dirac_abs[i]) / c.dirac_abs[i]);
    if (c.spin.d1 == 0.0 && c.spin.d2 == 0.0) lambda_trivial = spec.lambda1;
    if (c.spin.d1 == 0.5 && c.spin.d2 == 0.0) lambda_half = spec.lambda1;
  }

  const ConformalLaplace C(dom, one);
  const auto lap = mu1(C, 5, cfg);
  const std::vector<double> lap_expect = {1, 1, 1, 1, 2};
  for (int i = 0; i < 5; ++i)
    worst = std::max(worst, std::abs(lap.values[i] - lap_expect[i]) / lap_expect[i]);

  const double id_trivial = std::abs(lambda_trivial * lambda_trivial - lap.mu1);
  const double id_half = std::abs(lambda_half * lambda_half - lap.mu1 / 4.0);
  Outcome o;
  o.pass = worst <= rel && kernel_ok && id_trivial <= rel && id_half <= rel;
  o.detail = fmt(
      "worst relative spectrum error %.2e (<= 1e-8), trivial kernel dim ok=%d, "
      "lam1+^2 - mu1 = %.2e, lam1+^2 - mu1/4 = %.2e",
      worst, kernel_ok ? 1 : 0, id_trivial, id_half);
  return o;
}

Outcome criterion_spinor_identities() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int n : {2, 3}) {
    TestSpinorParams p;
    p.n = n;
    p.eps = 0.7;
    worst = std::max(worst, check_identities(p, 200, 42));
  }
  const double elapsed = seconds_since(t0);
  Outcome o;
  o.pass = worst < 1e-12 && elapsed < 1.0;
  o.detail = fmt("max deviation %.2e over 200 points, n = 2 and 3, %.3fs",
                 worst, elapsed);
  return o;
}

Outcome criterion_functional_bounds() {
  const double eps = 0.01, delta = 0.2, alpha = 1.0;
  const auto rep = cutoff_functional_exact(eps, delta, alpha);
  const double four_pi_eps = 4.0 * M_PI * eps;
  const double vol = family_volume_exact(eps, alpha);
  const double jsq_vol = rep.value * rep.value * vol;
  const double kappa_d = rep.kappa_delta;
  const double jsq_bound =
      4.0 * M_PI + 2.0 * kappa_d + kappa_d * kappa_d / (4.0 * M_PI) + 0.3;

  const bool num_ok = rep.numerator <= rep.numerator_bound + 0.5;
  const bool den_ok = std::abs(rep.denominator - four_pi_eps) <= 0.03 * four_pi_eps;
  const bool quot_ok = jsq_vol <= jsq_bound;
  Outcome o;
  o.pass = num_ok && den_ok && quot_ok;
  o.detail = fmt(
      "numerator %.6f <= %.6f: %s; denominator %.6f vs 4*pi*eps %+.2f%%: %s; "
      "J'^2*vol %.6f <= %.6f: %s (excess %+.2e)",
      rep.numerator, rep.numerator_bound + 0.5, num_ok ? "yes" : "no",
      rep.denominator, 100.0 * (rep.denominator - four_pi_eps) / four_pi_eps,
      den_ok ? "yes" : "no", jsq_vol, jsq_bound, quot_ok ? "yes" : "no",
      jsq_vol - jsq_bound);
  return o;
}

Outcome criterion_cutoff_energy() {
  const std::vector<double> deltas = {0.3, 0.1, std::exp(-10.0)};
  double worst = 0.0, prev = std::numeric_limits<double>::infinity();
  bool decreasing = true;
  for (double d : deltas) {
    const auto k = kappa(d);
    worst = std::max(worst, std::abs(k.quadrature - k.closed_form) / k.closed_form);
    if (!(k.quadrature < prev)) decreasing = false;
    prev = k.quadrature;
  }
  Outcome o;
  o.pass = worst < 0.01 && decreasing;
  o.detail = fmt("worst quadrature/closed-form gap %.2e (< 1%%), strictly "
                 "decreasing in delta: %s", worst, decreasing ? "yes" : "no");
  return o;
}

Outcome criterion_sphere_integral() {
  double worst = 0.0;
  for (int n : {2, 3, 4}) {
    const auto rep = sphere_integral(n);
    worst = std::max(worst, std::abs(rep.product - omega_sphere(n)));
  }
  Outcome o;
  o.pass = worst <= 1e-8;
  o.detail = fmt("max |omega_(n-1)*I - omega_n| = %.2e for n = 2, 3, 4", worst);
  return o;
}

Outcome criterion_flat_functional_constants() {
  const double c2 = 2.0 * std::sqrt(M_PI);
  const double c3 = 1.5 * std::pow(2.0 * M_PI * M_PI, 1.0 / 3.0);
  const double j2 = j_flat(2, 1e-5, 0.2);
  const double j3 = j_flat(3, 1e-4, 0.2);
  const double rel2 = std::abs(j2 - c2) / c2;
  const double rel3 = std::abs(j3 - c3) / c3;
  Outcome o;
  o.pass = rel2 <= 0.02 && rel3 <= 0.03;
  o.detail = fmt("j_flat(2) = %.6f vs %.6f (%+.3f%%); j_flat(3) = %.6f vs "
                 "%.6f (%+.4f%%)",
                 j2, c2, 100.0 * (j2 - c2) / c2, j3, c3, 100.0 * (j3 - c3) / c3);
  return o;
}

Outcome criterion_expansion_orders() {
  const MetricChart chart = MetricChart::constant_curvature_series(3, 1.0);
  const auto orders = expansion_orders(chart, 0.1, 4, 6, 5);

  // Decomposition and antisymmetry checked at a ring of sample points.
  double worst_decomp = 0.0, worst_antisym = 0.0;
  const std::vector<Eigen::Vector3d> dirs = {
      {1, 0, 0}, {0, 1, 0}, {0, 0, 1},
      {0.577350269189626, 0.577350269189626, 0.577350269189626},
      {-0.48, 0.6, 0.64}, {0.8, -0.36, 0.48}};
  for (const auto& d : dirs) {
    const Eigen::VectorXd x = 0.1 * d / d.norm();
    const auto cf = correction_fields(chart, x);
    worst_decomp = std::max(
        worst_decomp, (cf.clifford_full - cf.clifford_decomposed).norm());
    const auto tg = tilde_gamma(chart, x);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          worst_antisym = std::max(
              worst_antisym, std::abs(tg[k](i, j) + tg[j](i, k)));
  }

  const bool coeffs = orders.b_coeff_err < 0.01 && orders.v_coeff_err < 0.01 &&
                      orders.gamma_coeff_err < 0.01;
  const bool w_ok = orders.w_slope >= 2.8;  // +inf on the identically zero branch
  Outcome o;
  o.pass = coeffs && w_ok && worst_decomp <= 1e-10 && worst_antisym <= 1e-8;
  o.detail = fmt(
      "coeff errors b=%.2e gamma=%.2e v=%.2e (< 1%%), w order %s (max |W| = "
      "%.1e), decomposition %.1e <= 1e-10, antisymmetry %.1e <= 1e-8",
      orders.b_coeff_err, orders.gamma_coeff_err, orders.v_coeff_err,
      std::isinf(orders.w_slope) ? "inf" : fmt("%.2f", orders.w_slope).c_str(),
      orders.w_max, worst_decomp, worst_antisym);
  return o;
}

Outcome criterion_conformal_gauge() {
  const MetricChart chart = MetricChart::constant_curvature_series(3, 1.0);
  const auto rep = gauge_u(chart);

  // Conformal scalar-curvature formula against the direct chart computation.
  const auto u = [](const Eigen::VectorXd& x) { return 0.05 * x[0] - 0.03 * x[1] * x[2]; };
  const MetricChart bent = MetricChart::conformal(MetricChart::sphere_exact(3), u);
  Eigen::VectorXd x(3);
  x << 0.11, -0.07, 0.05;
  const double direct = scal_at(bent, x);
  const double formula = conformal_scal(MetricChart::sphere_exact(3), u, x);
  const double cross = std::abs(direct - formula) / std::abs(direct);

  Outcome o;
  o.pass = rep.ric_norm < 1e-4 && rep.delta_scal < 1e-3 && cross <= 1e-5;
  o.detail = fmt(
      "gauged chart: |Ric(0)| = %.2e (< 1e-4), |lap Scal(0)| = %.2e (< 1e-3), "
      "conformal scalar cross-check %.2e (<= 1e-5)",
      rep.ric_norm, rep.delta_scal, cross);
  return o;
}

Outcome criterion_eigenvalue_sandwich() {
  const TorusDomain dom(32);
  EigenConfig cfg;
  cfg.tol = 1e-9;
  cfg.maxit = 300;
  int passed = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 20; ++k) {
    const ConformalFactor f =
        perturbed_factor(dom, ConformalFactor::constant(1.0), 0.5, 1000 + k);
    const auto rep = sandwich_check(dom, f, 0.1, cfg, 2000 + k);
    if (rep.pass) ++passed;
    worst_margin = std::min(worst_margin, std::min(rep.mu_margin, rep.lam_margin));
  }
  Outcome o;
  o.pass = passed == 20;
  o.detail = fmt("%d/20 random factor pairs satisfy both sandwiches, "
                 "worst margin %.3e", passed, worst_margin);
  return o;
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

const std::vector<Criterion> kCriteria = {
    {"dirac_product_limit", criterion_dirac_product_limit},
    {"laplace_product_limit", criterion_laplace_product_limit},
    {"spectral_ratio", criterion_spectral_ratio},
    {"flat_torus_spectra", criterion_flat_torus_spectra},
    {"spinor_identities", criterion_spinor_identities},
    {"functional_bounds", criterion_functional_bounds},
    {"cutoff_energy", criterion_cutoff_energy},
    {"sphere_integral", criterion_sphere_integral},
    {"flat_functional_constants", criterion_flat_functional_constants},
    {"expansion_orders", criterion_expansion_orders},
    {"conformal_gauge", criterion_conformal_gauge},
    {"eigenvalue_sandwich", criterion_eigenvalue_sandwich},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;  // 1-based; 0 runs everything
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: acceptance [--only k]\n");
      return 2;
    }
  }
  if (only < 0 || only > static_cast<int>(kCriteria.size())) {
    std::fprintf(stderr, "criterion index out of range: %d\n", only);
    return 2;
  }

  int failures = 0;
  for (std::size_t i = 0; i < kCriteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i + 1) != only) continue;
    Outcome o;
    try {
      o = kCriteria[i].run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("criterion %02zu %s %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL",
                kCriteria[i].name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
