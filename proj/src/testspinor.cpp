#include "spinlab/testspinor.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace spinlab {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

constexpr double kInvSqrt2 = 0.70710678118654752440;

double quad(const std::function<double(double)>& g, double a, double b) {
  if (!(b > a)) return 0.0;
  return GK::integrate(g, a, b, 12, 1e-13);
}

/// Quadrature over [a, b] split at the scale transitions of the test-spinor
/// profile (core at r ~ eps, cutoff kinks at delta^2 and delta) so the
/// adaptive rule sees smooth pieces only.
double quad_profile(const std::function<double(double)>& g, double a, double b,
                    double eps, double delta_cut) {
  std::vector<double> cuts = {a, b};
  for (double c : {eps, 10.0 * eps, delta_cut * delta_cut, delta_cut}) {
    if (c > a && c < b) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += quad(g, cuts[i], cuts[i + 1]);
  }
  return total;
}

}  // namespace

void TestSpinorParams::validate() const {
  if (n != 2 && n != 3) {
    throw std::invalid_argument("test spinor dimension must be 2 or 3");
  }
  if (!(eps > 0.0)) throw std::invalid_argument("test spinor scale must be positive");
  if (!(delta_cut > 0.0 && delta_cut < 1.0)) {
    throw std::invalid_argument("cutoff radius must lie in (0,1)");
  }
  if (std::abs(psi0.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("psi0 must be a unit spinor");
  }
}

Spinor psi(const TestSpinorParams& p, const Eigen::VectorXd& x) {
  p.validate();
  if (x.size() != p.n) throw std::invalid_argument("point dimension mismatch");
  const CliffordRep rep(p.n);
  const Eigen::VectorXd y = x / p.eps;
  const double f = f_round(y.norm());
  const Spinor s = kInvSqrt2 * p.psi0;
  return std::pow(f, 0.5 * p.n) * (s - rep.vector_mul(y, s));
}

Spinor psi_gradient(const TestSpinorParams& p, const Eigen::VectorXd& x, int i) {
  p.validate();
  if (x.size() != p.n) throw std::invalid_argument("point dimension mismatch");
  if (i < 0 || i >= p.n) throw std::invalid_argument("axis out of range");
  const CliffordRep rep(p.n);
  const Eigen::VectorXd y = x / p.eps;
  const double f = f_round(y.norm());
  const Spinor s = kInvSqrt2 * p.psi0;
  const double fn2 = std::pow(f, 0.5 * p.n);
  Eigen::VectorXd ei = Eigen::VectorXd::Zero(p.n);
  ei[i] = 1.0;
  const Spinor term1 = -fn2 * rep.vector_mul(ei, s);
  const Spinor term2 =
      -(0.5 * p.n) * fn2 * f * y[i] * (s - rep.vector_mul(y, s));
  return (term1 + term2) / p.eps;
}

Spinor psi_dirac(const TestSpinorParams& p, const Eigen::VectorXd& x) {
  const CliffordRep rep(p.n);
  Spinor out = Spinor::Zero();
  Eigen::VectorXd ei = Eigen::VectorXd::Zero(p.n);
  for (int i = 0; i < p.n; ++i) {
    ei.setZero();
    ei[i] = 1.0;
    out += rep.vector_mul(ei, psi_gradient(p, x, i));
  }
  return out;
}

double check_identities(const TestSpinorParams& p, int samples, std::uint64_t seed) {
  p.validate();
  if (samples <= 0) throw std::invalid_argument("sample count must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  double worst = 0.0;
  const double half_n = 0.5 * p.n;
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd x(p.n);
    for (int i = 0; i < p.n; ++i) x[i] = unif(rng) * p.eps;
    const double f = f_round(x.norm() / p.eps);
    const Spinor v = psi(p, x);
    const Spinor dv = psi_dirac(p, x);
    // D psi = (n/(2 eps)) f psi
    worst = std::max(worst, (dv - (half_n / p.eps) * f * v).norm());
    // |psi| = f^((n-1)/2)
    worst = std::max(worst, std::abs(v.norm() - std::pow(f, 0.5 * (p.n - 1))));
    // |D psi| = (n/(2 eps)) f^((n+1)/2)
    worst = std::max(
        worst, std::abs(dv.norm() - (half_n / p.eps) * std::pow(f, 0.5 * (p.n + 1))));
  }
  return worst;
}

double eta(double r, double delta_cut) {
  if (r < 0.0) throw std::invalid_argument("radius must be nonnegative");
  if (!(delta_cut > 0.0 && delta_cut < 1.0)) {
    throw std::invalid_argument("cutoff radius must lie in (0,1)");
  }
  const double d2 = delta_cut * delta_cut;
  if (r <= d2) return 1.0;
  if (r >= delta_cut) return 0.0;
  return std::log(r) / std::log(delta_cut) - 1.0;
}

double eta_prime(double r, double delta_cut) {
  const double d2 = delta_cut * delta_cut;
  if (r <= d2 || r >= delta_cut) return 0.0;
  return 1.0 / (r * std::log(delta_cut));
}

KappaReport kappa(double delta_cut) {
  if (!(delta_cut > 0.0 && delta_cut < 1.0)) {
    throw std::invalid_argument("cutoff radius must lie in (0,1)");
  }
  KappaReport rep;
  rep.closed_form = 2.0 * M_PI / std::log(1.0 / delta_cut);
  const double d2 = delta_cut * delta_cut;
  rep.quadrature = quad(
      [&](double r) {
        const double ep = eta_prime(r, delta_cut);
        return 2.0 * M_PI * r * ep * ep;
      },
      d2, delta_cut);
  return rep;
}

FunctionalReport j_prime(const SpinorField& phi, const ConformalFactor& f,
                         const TorusDomain& dom, const SpinStructure& spin,
                         std::optional<double> lambda1) {
  if (phi.N != dom.N) throw std::invalid_argument("field grid mismatch");
  DiracFlat D(dom, spin);
  SpinorField dphi = apply_dirac(D, phi);
  const Eigen::VectorXd fv = f.grid_values(dom);
  const long nn = dom.nodes();
  const double w = dom.h() * dom.h();
  double num = 0.0, den = 0.0;
  for (long i = 0; i < nn; ++i) {
    const cplx a0 = dphi.data[i], a1 = dphi.data[nn + i];
    const cplx b0 = phi.data[i], b1 = phi.data[nn + i];
    num += (std::norm(a0) + std::norm(a1)) / fv[i];
    den += (std::conj(a0) * b0 + std::conj(a1) * b1).real();
  }
  num *= w;
  den *= w;
  if (!(den > 0.0)) {
    std::ostringstream os;
    os << "inadmissible test spinor: <D phi, phi> integral is " << den;
    throw std::invalid_argument(os.str());
  }
  FunctionalReport rep;
  rep.numerator = num;
  rep.denominator = den;
  rep.value = num / den;
  if (lambda1.has_value() && rep.value < *lambda1 * (1.0 - 1e-9)) {
    std::ostringstream os;
    os << "variational bound violated: quotient " << rep.value
       << " below first eigenvalue " << *lambda1;
    throw std::logic_error(os.str());
  }
  return rep;
}

SpinorField cutoff_spinor_field(const TorusDomain& dom, const TestSpinorParams& p) {
  p.validate();
  if (p.n != 2) throw std::invalid_argument("grid test spinors are 2-dimensional");
  SpinorField phi = SpinorField::zero(dom.N);
  const long nn = dom.nodes();
  Eigen::VectorXd dx(2);
  for (int iy = 0; iy < dom.N; ++iy) {
    for (int ix = 0; ix < dom.N; ++ix) {
      const long idx = static_cast<long>(iy) * dom.N + ix;
      double d0 = dom.coord(ix) - dom.base[0];
      double d1 = dom.coord(iy) - dom.base[1];
      d0 -= dom.L * std::round(d0 / dom.L);
      d1 -= dom.L * std::round(d1 / dom.L);
      dx << d0, d1;
      const double ct = eta(dx.norm(), p.delta_cut);
      if (ct == 0.0) continue;
      const Spinor v = ct * psi(p, dx);
      phi.data[idx] = v[0];
      phi.data[nn + idx] = v[1];
    }
  }
  return phi;
}

FunctionalReport cutoff_functional_exact(double eps, double delta_cut, double alpha) {
  if (!(eps > 0.0 && delta_cut > 0.0 && delta_cut < 1.0)) {
    throw std::invalid_argument("need eps > 0 and cutoff in (0,1)");
  }
  if (!(delta_cut <= alpha)) {
    throw std::invalid_argument("cutoff support must stay inside the bubble");
  }
  const double kap = kappa(delta_cut).closed_form;
  // E = integral over the plane of eta^2 f^2, f = eps^2/(eps^2+r^2).
  const double E = quad_profile(
      [&](double r) {
        const double ct = eta(r, delta_cut);
        const double f = eps * eps / (eps * eps + r * r);
        return 2.0 * M_PI * r * ct * ct * f * f;
      },
      0.0, delta_cut, eps, delta_cut);
  FunctionalReport rep;
  rep.denominator = 4.0 / eps * E;
  rep.numerator = 2.0 * kap + 8.0 / (eps * eps) * E;
  rep.value = rep.numerator / rep.denominator;
  rep.kappa_delta = kap;
  rep.numerator_bound = 8.0 * M_PI + 2.0 * kap;
  return rep;
}

double family_volume_exact(double eps, double alpha, double L) {
  if (!(eps > 0.0 && eps <= alpha && alpha < L / 2.0)) {
    throw std::invalid_argument("need 0 < eps <= alpha < L/2");
  }
  const double e2 = eps * eps, a2 = alpha * alpha;
  // integral of (e^2/(e^2+r^2))^2 over the bubble disk, then the frozen tail.
  const double disk = M_PI * e2 * e2 * (1.0 / e2 - 1.0 / (e2 + a2));
  const double tail = std::pow(e2 / (e2 + a2), 2) * (L * L - M_PI * a2);
  return disk + tail;
}

double j_flat(int n, double eps, double delta_cut, double amplitude) {
  if (n != 2 && n != 3) throw std::invalid_argument("dimension must be 2 or 3");
  if (!(eps > 0.0 && delta_cut > 0.0 && delta_cut < 1.0 && amplitude > 0.0)) {
    throw std::invalid_argument("need eps > 0, cutoff in (0,1), amplitude > 0");
  }
  const double area = omega_sphere(n - 1);  // unit-sphere factor of radial volume
  const double half_n = 0.5 * n;
  const double c2 = amplitude * amplitude;
  const double pw = static_cast<double>(n) / (n + 1);

  // Pointwise |D(eta psi_eps)|^2 = eta'^2 |psi|^2 + eta^2 |D psi|^2 (the
  // mixed term has zero real part), all radial closed forms.
  auto d_sq = [&](double r) {
    const double f = f_round(r / eps);
    const double ct = eta(r, delta_cut);
    const double cp = eta_prime(r, delta_cut);
    const double dpsi2 =
        std::pow(half_n / eps, 2) * std::pow(f, n + 1);  // |D psi|^2
    const double psi2 = std::pow(f, n - 1);              // |psi|^2
    return c2 * (cp * cp * psi2 + ct * ct * dpsi2);
  };

  const double num_int = quad_profile(
      [&](double r) {
        return std::pow(d_sq(r), pw) * area * std::pow(r, n - 1);
      },
      0.0, delta_cut, eps, delta_cut);
  const double den = quad_profile(
      [&](double r) {
        const double f = f_round(r / eps);
        const double ct = eta(r, delta_cut);
        return c2 * ct * ct * (half_n / eps) * std::pow(f, n) * area *
               std::pow(r, n - 1);
      },
      0.0, delta_cut, eps, delta_cut);
  if (!(den > 0.0)) throw std::invalid_argument("degenerate denominator");
  return std::pow(num_int, (n + 1.0) / n) / den;
}

SphereIntegralReport sphere_integral(int n) {
  if (n < 2) throw std::invalid_argument("dimension must be at least 2");
  SphereIntegralReport rep;
  rep.I = GK::integrate(
      [n](double r) {
        return std::pow(2.0, n) * std::pow(r, n - 1) /
               std::pow(1.0 + r * r, n);
      },
      0.0, std::numeric_limits<double>::infinity(), 12, 1e-13);
  rep.product = omega_sphere(n - 1) * rep.I;
  return rep;
}

double omega_sphere(int k) {
  if (k < 0) throw std::invalid_argument("sphere dimension must be nonnegative");
  return 2.0 * std::pow(M_PI, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1));
}

}  // namespace spinlab
