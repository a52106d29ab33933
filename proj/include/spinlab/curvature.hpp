#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "spinlab/clifford.hpp"

namespace spinlab {

/// Analytic metric chart around the origin: x in R^n maps to the symmetric
/// matrix g(x). Expansion claims additionally require the normal-coordinate
/// precondition g(0) = Id, dg(0) = 0 (checked numerically, never assumed).
struct MetricChart {
  int n = 2;       // 2, 3, or 4
  double h = 1e-4;  // finite-difference step; derivatives use Richardson h, h/2
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> g;

  Eigen::MatrixXd eval(const Eigen::VectorXd& x) const;
  /// Throws std::invalid_argument unless g(0) = Id and all first derivatives
  /// vanish at 0 within tol.
  void check_normal(double tol = 1e-7) const;

  static MetricChart flat(int n);
  /// Normal-coordinate series of the constant-curvature-K space truncated at
  /// order four:
  ///   g = Id + (K/3)(x_i x_j - r^2 d_ij) + (2K^2/45)(r^4 d_ij - r^2 x_i x_j).
  /// The omitted remainder is O(r^6).
  static MetricChart constant_curvature_series(int n, double K);
  /// Exact unit-sphere normal chart g = rhat rhat^T + (sin^2 r / r^2)(Id - rhat rhat^T).
  static MetricChart sphere_exact(int n);
  /// Conformal chart g = f^2 Id with f = 2/(1+r^2) (not normal: g(0) = 4 Id).
  static MetricChart conformal_round(int n);
  /// e^{2u} * base.
  static MetricChart conformal(MetricChart base,
                               std::function<double(const Eigen::VectorXd&)> u);
  /// Plain-text polynomial chart: one term per line,
  ///   i j d a_1 ... a_n c
  /// meaning g_{ij} += c * x^a (i <= j required; mirrored to g_{ji}; d is the
  /// total degree and must equal sum(a)). '#' starts a comment. The dimension
  /// n is inferred from the first term line.
  static MetricChart from_poly_file(const std::string& path);
};

/// Unique symmetric positive definite B with B^2 = G^{-1}, by
/// eigendecomposition. Throws std::invalid_argument for non-SPD input.
Eigen::MatrixXd sqrt_inv(const Eigen::MatrixXd& G);

/// Christoffel symbols at x: Gam[k](i,j) = 1/2 g^{kl}(d_i g_{jl} + d_j g_{il}
/// - d_l g_{ij}), first derivatives by Richardson-refined central differences.
std::vector<Eigen::MatrixXd> christoffel(const MetricChart& chart,
                                         const Eigen::VectorXd& x);

/// Connection coefficients in the orthonormal trivialization b = sqrt_inv(g):
/// tg[k](i,j) = (b_i^r d_r b_j^l + b_i^r b_j^s Gam^l_rs) (b^-1)^k_l.
/// Antisymmetric in (upper k) <-> (second lower j).
std::vector<Eigen::MatrixXd> tilde_gamma(const MetricChart& chart,
                                         const Eigen::VectorXd& x);

/// Dirac comparison correction fields at a point. The Clifford matrices are
/// populated for n <= 3 only (the 2x2 irreducible representation).
struct CorrectionFields {
  Eigen::VectorXd V;                        // vector part of the correction
  std::vector<std::array<int, 3>> W_index;  // strictly increasing triples
  std::vector<double> W;                    // matching 3-form components
  Mat2 clifford_full = Mat2::Zero();        // 1/4 sum tg^k_ij g_i g_j g_k
  Mat2 clifford_decomposed = Mat2::Zero();  // V-part + W-part as matrices
};

/// V = 1/4 sum (tg^i_ik - tg^k_ii) e_k and W = 1/4 sum over distinct triples
/// of tg^k_ij e_i e_j e_k. The raw finite-difference tg is antisymmetrized in
/// (k <-> j) first: the decomposition is an identity of the antisymmetric
/// part, and the projection removes O(h^4) finite-difference asymmetry that
/// would otherwise dominate the 1e-10 identity budget.
CorrectionFields correction_fields(const MetricChart& chart,
                                   const Eigen::VectorXd& x);

struct Tensor4 {
  int n = 0;
  std::vector<double> v;
  explicit Tensor4(int nn)
      : n(nn), v(static_cast<std::size_t>(nn) * nn * nn * nn, 0.0) {}
  double& operator()(int i, int a, int j, int b) {
    return v[static_cast<std::size_t>(((i * n + a) * n + j)) * n + b];
  }
  double operator()(int i, int a, int j, int b) const {
    return v[static_cast<std::size_t>(((i * n + a) * n + j)) * n + b];
  }
};

/// Curvature at the origin of a normal chart, from second differences of g:
///   R(i,a,j,b) = 1/2 (d2_aj g_ib + d2_ib g_aj - d2_ab g_ij - d2_ij g_ab),
/// the unique tensor with (1/3) R_{i a b j} x^a x^b the quadratic metric
/// term. ric(a,b) = sum_i R(i,a,i,b); scal = trace. Sphere of curvature K:
/// ric = (n-1) K Id.
struct RiemannReport {
  Tensor4 R;
  Eigen::MatrixXd ric;
  double scal = 0.0;
  double bianchi_max = 0.0;  // worst cyclic sum R(i,a,j,b)+R(i,j,b,a)+R(i,b,a,j)
  explicit RiemannReport(int n) : R(n), ric(Eigen::MatrixXd::Zero(n, n)) {}
};
RiemannReport riemann_at(const MetricChart& chart);

/// Scalar curvature at a general chart point, assembled from Christoffel
/// symbols and their central differences (R = dGam + Gam Gam, traced twice).
double scal_at(const MetricChart& chart, const Eigen::VectorXd& x);

/// Leading-order fits of the normal-coordinate expansions along random rays,
/// radii r0 * 2^-k. Fields that vanish identically take the exact-zero
/// branch: slope +inf, coefficient error 0.
struct ExpansionReport {
  bool zero_branch = false;  // every probed field below the zero floor
  double b_slope = 0.0;      // expected 2 (quadratic leading term)
  double b_coeff_err = 0.0;  // rel. dev. from -(1/6) R contraction
  double gamma_slope = 0.0;  // expected 1
  double gamma_coeff_err = 0.0;
  double v_slope = 0.0;  // expected 1
  double v_coeff_err = 0.0;  // rel. dev. from -(1/4) Ric x
  double w_slope = std::numeric_limits<double>::infinity();  // >= 3 claimed
  double w_max = 0.0;
};
ExpansionReport expansion_orders(const MetricChart& chart, double r0 = 0.1,
                                 int levels = 4, int directions = 6,
                                 std::uint64_t seed = 5);

/// Scalar curvature of e^{2u} g at x via the conformal transformation rule
///   e^{-2u} (Scal_g + 2(n-1) Lap_g u - (n-1)(n-2) |grad u|_g^2)
/// with the positive Laplacian Lap = -g^{ij}(d2_ij - Gam^k_ij d_k).
/// Cross-check against scal_at on MetricChart::conformal(chart, u).
double conformal_scal(const MetricChart& chart,
                      const std::function<double(const Eigen::VectorXd&)>& u,
                      const Eigen::VectorXd& x);

/// Conformal gauge at the origin: after normalizing Scal(0) to zero with a
/// multiple of r^2, a quadratic term proportional to the trace-free Ricci
/// tensor kills Ric(0) and a quartic (x1)^4 term kills Lap Scal (0). Each
/// coefficient is computed from the metric produced by the previous step.
/// Requires n >= 3.
struct GaugeReport {
  double scal0 = 0.0;        // Scal(0) of the input chart
  double conformal_r2 = 0.0;  // u1 = conformal_r2 * r^2
  Eigen::MatrixXd quad;      // u2 = x^T quad x
  double quartic = 0.0;      // u3 = quartic * (x1)^4
  double ric_norm = 0.0;     // ||Ric(0)|| of the gauged metric
  double delta_scal = 0.0;   // |Lap Scal(0)| of the gauged metric
  std::function<double(const Eigen::VectorXd&)> u;  // total exponent
};
GaugeReport gauge_u(const MetricChart& chart);

}  // namespace spinlab
