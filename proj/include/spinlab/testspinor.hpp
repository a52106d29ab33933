#pragma once

#include <cstdint>
#include <limits>
#include <optional>

#include "spinlab/clifford.hpp"
#include "spinlab/operators.hpp"

namespace spinlab {

/// Explicit conformal test spinor and its rescalings. The stored psi0 is a
/// unit spinor; internally the construction scales it by 1/sqrt(2) so the
/// pointwise norm identity |psi| = f^((n-1)/2) holds exactly.
struct TestSpinorParams {
  int n = 2;               // ambient dimension, 2 or 3
  double eps = 1.0;        // rescale: fields are evaluated at x/eps
  double delta_cut = 0.2;  // cutoff radius, in (0,1); annulus [delta^2, delta]
  Spinor psi0 = Spinor(1.0, 0.0);

  void validate() const;  // throws std::invalid_argument
};

/// Round-sphere chart weight 2/(1+r^2).
inline double f_round(double r) { return 2.0 / (1.0 + r * r); }

/// psi(x) = f^(n/2)(y) (1 - y).psi0 at y = x/eps (Clifford product).
Spinor psi(const TestSpinorParams& p, const Eigen::VectorXd& x);

/// Closed-form partial derivative of psi along axis i:
/// (1/eps) [ -f^(n/2) gamma_i - (n/2) f^(n/2+1) y_i (1 - y). ] psi0 at y = x/eps.
Spinor psi_gradient(const TestSpinorParams& p, const Eigen::VectorXd& x, int i);

/// Dirac derivative assembled from the closed-form gradient,
/// D psi = sum_i gamma_i d_i psi; equals (n/(2 eps)) f(y) psi pointwise.
Spinor psi_dirac(const TestSpinorParams& p, const Eigen::VectorXd& x);

/// Worst deviation over `samples` random points of the three closed-form
/// identities: D psi = (n/(2 eps)) f psi, |psi| = f^((n-1)/2), and
/// |D psi| = (n/(2 eps)) f^((n+1)/2). All sides analytic, no grid.
double check_identities(const TestSpinorParams& p, int samples, std::uint64_t seed);

/// Logarithmic cutoff: 1 on [0, d^2], log(r)/log(d) - 1 on [d^2, d], 0 beyond.
double eta(double r, double delta_cut);
/// Radial derivative of eta (zero outside the annulus).
double eta_prime(double r, double delta_cut);

struct KappaReport {
  double quadrature = 0.0;   // integral of |grad eta|^2 over the plane
  double closed_form = 0.0;  // 2 pi / ln(1/delta)
};
/// Cutoff gradient energy; conformally invariant in dimension 2, so the flat
/// quadrature equals the value in any conformal metric.
KappaReport kappa(double delta_cut);

struct FunctionalReport {
  double numerator = 0.0;
  double denominator = 0.0;
  double value = 0.0;  // numerator / denominator
  // Cutoff context (dimension-2 spinor energies); NaN when not applicable.
  double kappa_delta = std::numeric_limits<double>::quiet_NaN();
  double numerator_bound = std::numeric_limits<double>::quiet_NaN();  // 8 pi + 2 kappa
};

/// Dirac Rayleigh-type quotient of the conformal metric f^2 * flat:
///   numerator = integral |D phi|^2 f^-1, denominator = integral <D phi, phi>,
/// both by spectral Dirac application and trapezoid quadrature. Throws
/// std::invalid_argument when the denominator is not positive, and
/// std::logic_error if a supplied first eigenvalue exceeds the quotient
/// (the quotient is an upper bound for lambda1+ by the variational principle).
FunctionalReport j_prime(const SpinorField& phi, const ConformalFactor& f,
                         const TorusDomain& dom, const SpinStructure& spin = {},
                         std::optional<double> lambda1 = {});

/// Grid samples of the cutoff test spinor eta(r) psi(x/eps) centered at the
/// domain base point (min-image displacement), extended by zero.
SpinorField cutoff_spinor_field(const TorusDomain& dom, const TestSpinorParams& p);

/// Radial closed-form evaluation of j_prime for the cutoff test spinor on
/// the torus metric f_{alpha,eps}^2 * flat (support of the cutoff must stay
/// inside the bubble: delta_cut <= alpha). The integrands reduce to
///   numerator = 2 kappa + (8/eps^2) integral eta^2 f^2,
///   denominator = (4/eps) integral eta^2 f^2,
/// with f = eps^2/(eps^2+r^2); adaptive quadrature removes all grid error.
FunctionalReport cutoff_functional_exact(double eps, double delta_cut, double alpha);

/// Riemannian area of the bubble metric on [0,L)^2, closed form.
double family_volume_exact(double eps, double alpha, double L = 2.0 * M_PI);

/// Conformal-invariant functional J on the cutoff spinor over flat R^n
/// (radial quadrature; the integrand is supported in r <= delta_cut):
///   J = (int |D phi|^(2n/(n+1)))^((n+1)/n) / int <D phi, phi>.
/// Converges to (n/2) omega_n^(1/n) as eps -> 0. The amplitude scales the
/// spinor and must drop out (degree-zero homogeneity).
double j_flat(int n, double eps, double delta_cut, double amplitude = 1.0);

struct SphereIntegralReport {
  double I = 0.0;        // integral of 2^n r^(n-1)/(1+r^2)^n over [0, inf)
  double product = 0.0;  // omega_{n-1} * I, equal to omega_n
};
SphereIntegralReport sphere_integral(int n);

/// Volume of the unit k-sphere, 2 pi^((k+1)/2) / Gamma((k+1)/2).
double omega_sphere(int k);

}  // namespace spinlab
