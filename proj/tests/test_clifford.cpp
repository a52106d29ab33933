#include "doctest.h"

#include "spinlab/clifford.hpp"

using namespace spinlab;

TEST_CASE("built-in representations satisfy the defining relations") {
  for (int n : {2, 3}) {
    CliffordRep rep(n);
    CHECK(rep.n() == n);
    CHECK(rep.check_relations() < 1e-14);
    for (int i = 0; i < n; ++i) {
      // anti-Hermitian and unitary-up-to-sign: gamma^2 = -Id
      CHECK(((rep.gamma(i) * rep.gamma(i)) + Mat2::Identity()).norm() < 1e-14);
    }
  }
}

TEST_CASE("invalid dimension is rejected") {
  CHECK_THROWS_AS(CliffordRep(1), std::invalid_argument);
  CHECK_THROWS_AS(CliffordRep(4), std::invalid_argument);
}

TEST_CASE("volume element of the n=3 representation is +Id") {
  CliffordRep rep(3);
  Mat2 vol = rep.gamma(0) * rep.gamma(1) * rep.gamma(2);
  CHECK((vol - Mat2::Identity()).norm() < 1e-14);
}

TEST_CASE("vector action matches the explicit matrix sum") {
  CliffordRep rep(3);
  Eigen::VectorXd v(3);
  v << 0.3, -1.2, 0.7;
  Spinor s;
  s << cplx(0.6, -0.1), cplx(-0.2, 0.9);
  Mat2 m = Mat2::Zero();
  for (int i = 0; i < 3; ++i) m += v[i] * rep.gamma(i);
  CHECK((rep.vector_mul(v, s) - m * s).norm() < 1e-14);
  // Clifford square: (v.)^2 = -|v|^2
  Spinor twice = rep.vector_mul(v, rep.vector_mul(v, s));
  CHECK((twice + v.squaredNorm() * s).norm() < 1e-12);
}

TEST_CASE("corrupted representations are detected") {
  // Hermitian instead of anti-Hermitian gammas (plain Pauli matrices)
  Mat2 s1, s2;
  s1 << 0, 1, 1, 0;
  s2 << 0, cplx(0, -1), cplx(0, 1), 0;
  CliffordRep bad({s1, s2});
  CHECK(bad.check_relations() >= 0.2);

  // sign flip in one generator entry
  CliffordRep good(2);
  Mat2 g0 = good.gamma(0);
  g0(0, 1) = -g0(0, 1);
  CliffordRep bad2({g0, good.gamma(1)});
  CHECK(bad2.check_relations() >= 0.2);
}
