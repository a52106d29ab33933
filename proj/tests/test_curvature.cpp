#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "spinlab/curvature.hpp"

using namespace spinlab;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("square-root inverse: unique SPD root, non-SPD rejected") {
  MatrixXd G(3, 3);
  G << 4, 1, 0, 1, 3, -1, 0, -1, 2;
  MatrixXd B = sqrt_inv(G);
  CHECK((B - B.transpose()).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((B * B * G - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(B);
  CHECK(es.eigenvalues().minCoeff() > 0);

  // a sign-flipped eigenvalue still squares to G^-1 but is not SPD
  Eigen::SelfAdjointEigenSolver<MatrixXd> eg(G);
  VectorXd lam = eg.eigenvalues().cwiseSqrt().cwiseInverse();
  lam[0] = -lam[0];
  MatrixXd Bbad = eg.eigenvectors() * lam.asDiagonal() * eg.eigenvectors().transpose();
  CHECK((Bbad * Bbad * G - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eb(Bbad);
  CHECK(eb.eigenvalues().minCoeff() < 0);

  MatrixXd neg = -G;
  CHECK_THROWS_AS(sqrt_inv(neg), std::invalid_argument);
}

TEST_CASE("curvature extraction at the origin") {
  for (int n : {2, 3, 4}) {
    auto rr = riemann_at(MetricChart::flat(n));
    CHECK(std::abs(rr.scal) < 1e-9);
    CHECK(rr.ric.cwiseAbs().maxCoeff() < 1e-9);
  }
  for (int n : {2, 3}) {
    auto rr = riemann_at(MetricChart::constant_curvature_series(n, 1.0));
    CHECK(rr.scal == doctest::Approx(double(n * (n - 1))).epsilon(1e-6));
    CHECK((rr.ric - double(n - 1) * MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <
          1e-6);
    CHECK(rr.bianchi_max < 1e-6);
  }
  // independent chart of the same geometry: trigonometric, all orders
  auto rr = riemann_at(MetricChart::sphere_exact(3));
  CHECK(rr.scal == doctest::Approx(6.0).epsilon(1e-6));
  // scaling: curvature K = 2 doubles the Ricci tensor
  auto r2 = riemann_at(MetricChart::constant_curvature_series(3, 2.0));
  CHECK((r2.ric - 4.0 * MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-6);
  // non-normal chart rejected
  CHECK_THROWS_AS(riemann_at(MetricChart::conformal_round(2)), std::invalid_argument);
}

TEST_CASE("Christoffel symbols of a conformal metric match the closed form") {
  auto cr = MetricChart::conformal_round(3);
  VectorXd x(3);
  x << 0.17, 0.05, -0.29;
  auto Gam = christoffel(cr, x);
  const VectorXd dlnf = -2.0 * x / (1.0 + x.squaredNorm());
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double expect = (i == k ? dlnf[j] : 0.0) + (j == k ? dlnf[i] : 0.0) -
                              (i == j ? dlnf[k] : 0.0);
        CHECK(Gam[k](i, j) == doctest::Approx(expect).epsilon(1e-9));
      }
}

TEST_CASE("scalar curvature away from the origin") {
  VectorXd x(3);
  x << 0.21, -0.13, 0.09;
  CHECK(scal_at(MetricChart::sphere_exact(3), x) == doctest::Approx(6.0).epsilon(1e-6));
  CHECK(std::abs(scal_at(MetricChart::flat(3), x)) < 1e-9);
}

TEST_CASE("orthonormal-frame coefficients: antisymmetry and the matrix identity") {
  auto sp = MetricChart::constant_curvature_series(3, 1.0);
  for (double scale : {0.05, 0.12}) {
    VectorXd x(3);
    x << scale, -0.7 * scale, 0.4 * scale;
    auto tg = tilde_gamma(sp, x);
    double anti = 0;
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          anti = std::max(anti, std::abs(tg[k](i, j) + tg[j](i, k)));
    CHECK(anti < 1e-8);
    auto cf = correction_fields(sp, x);
    CHECK((cf.clifford_full - cf.clifford_decomposed).cwiseAbs().maxCoeff() < 1e-10);
    // leading order of the vector part: -(1/4) Ric x = -x/2 on the unit sphere
    CHECK((cf.V + 0.5 * x).cwiseAbs().maxCoeff() < 2e-3 * x.norm() + 1e-12);
  }
  // two dimensions: no three-form, identity reduces to the vector part
  auto s2 = MetricChart::constant_curvature_series(2, 1.0);
  VectorXd y(2);
  y << 0.09, -0.04;
  auto cf2 = correction_fields(s2, y);
  CHECK(cf2.W.empty());
  CHECK((cf2.clifford_full - cf2.clifford_decomposed).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("expansion order fits") {
  auto rep = expansion_orders(MetricChart::constant_curvature_series(3, 1.0));
  CHECK_FALSE(rep.zero_branch);
  CHECK(rep.b_slope == doctest::Approx(2.0).epsilon(5e-3));
  CHECK(rep.gamma_slope == doctest::Approx(1.0).epsilon(5e-3));
  CHECK(rep.v_slope == doctest::Approx(1.0).epsilon(5e-3));
  CHECK(rep.w_slope >= 2.8);  // identically zero here: exact-zero branch
  CHECK(rep.b_coeff_err < 1e-3);
  CHECK(rep.gamma_coeff_err < 1e-3);
  CHECK(rep.v_coeff_err < 1e-3);

  auto flat = expansion_orders(MetricChart::flat(3));
  CHECK(flat.zero_branch);

  CHECK_THROWS_AS(expansion_orders(MetricChart::conformal_round(3)),
                  std::invalid_argument);
}

TEST_CASE("conformal scalar-curvature rule cross-checks against direct evaluation") {
  auto u = [](const VectorXd& y) {
    return 0.1 * y[0] * y[0] - 0.07 * y[1] * y[2] + 0.03 * y[1] * y[1];
  };
  VectorXd x(3);
  x << 0.12, -0.31, 0.22;
  auto flat = MetricChart::flat(3);
  CHECK(std::abs(conformal_scal(flat, u, x) -
                 scal_at(MetricChart::conformal(flat, u), x)) < 1e-5);
  auto sp = MetricChart::constant_curvature_series(3, 1.0);
  CHECK(std::abs(conformal_scal(sp, u, x) -
                 scal_at(MetricChart::conformal(sp, u), x)) < 1e-5);
}

TEST_CASE("conformal gauge flattens Ricci and the scalar Laplacian at the origin") {
  auto gr = gauge_u(MetricChart::constant_curvature_series(3, 1.0));
  CHECK(gr.scal0 == doctest::Approx(6.0).epsilon(1e-6));
  CHECK(gr.conformal_r2 == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(gr.ric_norm < 1e-4);
  CHECK(gr.delta_scal < 1e-3);
  // already Ricci-flat input: u vanishes identically
  auto fl = gauge_u(MetricChart::flat(3));
  CHECK(std::abs(fl.conformal_r2) < 1e-9);
  CHECK(fl.quad.cwiseAbs().maxCoeff() < 1e-9);
  CHECK(std::abs(fl.quartic) < 1e-6);
  CHECK_THROWS_AS(gauge_u(MetricChart::constant_curvature_series(2, 1.0)),
                  std::invalid_argument);
}

TEST_CASE("polynomial chart files") {
  const char* path = "chart_test.txt";
  {
    std::ofstream out(path);
    out << "# simple normal chart with one curvature-like term\n";
    out << "0 0 0 0 0 1\n";
    out << "1 1 0 0 0 1\n";
    out << "0 0 2 0 2 -0.5\n";  // g_00 = 1 - 0.5 y^2
    out << "0 1 2 1 1 0.25\n";  // g_01 = g_10 = 0.25 x y
  }
  auto chart = MetricChart::from_poly_file(path);
  CHECK(chart.n == 2);
  VectorXd x(2);
  x << 0.3, 0.2;
  MatrixXd G = chart.eval(x);
  CHECK(G(0, 0) == doctest::Approx(1.0 - 0.5 * 0.04).epsilon(1e-14));
  CHECK(G(0, 1) == doctest::Approx(0.25 * 0.06).epsilon(1e-14));
  CHECK(G(1, 0) == G(0, 1));
  CHECK(G(1, 1) == 1.0);
  chart.check_normal();

  // malformed inputs
  auto write_and_load = [&](const char* body) {
    std::ofstream out(path);
    out << body;
    out.close();
    return MetricChart::from_poly_file(path);
  };
  CHECK_THROWS_AS(write_and_load("0 0 1 0 0 1\n"), std::runtime_error);  // bad degree
  CHECK_THROWS_AS(write_and_load("1 0 0 0 0 1\n"), std::runtime_error);  // i > j
  CHECK_THROWS_AS(write_and_load("# only comments\n"), std::runtime_error);
  CHECK_THROWS_AS(MetricChart::from_poly_file("missing_file.txt"), std::runtime_error);
  std::remove(path);
}
