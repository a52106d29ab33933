#include "spinlab/clifford.hpp"

#include <stdexcept>

namespace spinlab {

namespace {

std::vector<Mat2> builtin_gammas(int n) {
  if (n != 2 && n != 3) {
    throw std::invalid_argument("CliffordRep: only n = 2 and n = 3 are supported");
  }
  const cplx i{0.0, 1.0};
  Mat2 g1, g2, g3;
  g1 << cplx(0, 0), i, i, cplx(0, 0);            // i*sigma_1
  g2 << cplx(0, 0), cplx(1, 0), cplx(-1, 0), cplx(0, 0);  // i*sigma_2
  g3 << i, cplx(0, 0), cplx(0, 0), -i;           // i*sigma_3
  std::vector<Mat2> g{g1, g2};
  if (n == 3) g.push_back(g3);
  return g;
}

}  // namespace

CliffordRep::CliffordRep(int n) : gamma_(builtin_gammas(n)) {}

CliffordRep::CliffordRep(std::vector<Mat2> gammas) : gamma_(std::move(gammas)) {
  if (gamma_.size() < 2 || gamma_.size() > 3) {
    throw std::invalid_argument("CliffordRep: need 2 or 3 gamma matrices");
  }
}

Spinor CliffordRep::vector_mul(const Eigen::VectorXd& v, const Spinor& s) const {
  if (v.size() != n()) {
    throw std::invalid_argument("vector_mul: vector dimension does not match representation");
  }
  Mat2 m = Mat2::Zero();
  for (int i = 0; i < n(); ++i) m += v[i] * gamma_[i];
  return m * s;
}

double CliffordRep::check_relations() const {
  double worst = 0.0;
  for (int i = 0; i < n(); ++i) {
    worst = std::max(worst, (gamma_[i].adjoint() + gamma_[i]).norm());
    for (int j = 0; j < n(); ++j) {
      Mat2 anti = gamma_[i] * gamma_[j] + gamma_[j] * gamma_[i];
      if (i == j) anti += 2.0 * Mat2::Identity();
      worst = std::max(worst, anti.norm());
    }
  }
  return worst;
}

}  // namespace spinlab
