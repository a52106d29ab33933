#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace spinlab {

using cplx = std::complex<double>;
using Spinor = Eigen::Vector2cd;
using Mat2 = Eigen::Matrix2cd;

/// Irreducible Clifford representation on 2-component spinors, n = 2 or 3.
///
/// Convention: e_i e_j + e_j e_i = -2 delta_ij with every gamma anti-Hermitian,
/// the unique sign for which D(f(1-x).s) = (n/2) f^2 (1-x).s holds verbatim
/// for f = 2/(1+r^2).
class CliffordRep {
 public:
  static constexpr int spinor_dim = 2;

  /// Built-in representation: gamma_k = i * (Pauli sigma_k), k = 1..n.
  explicit CliffordRep(int n);

  /// Custom matrices (used by tests to probe corrupted representations).
  explicit CliffordRep(std::vector<Mat2> gammas);

  int n() const { return static_cast<int>(gamma_.size()); }
  const Mat2& gamma(int i) const { return gamma_.at(i); }

  /// Clifford action of a real vector: (sum_i v_i gamma_i) s.
  Spinor vector_mul(const Eigen::VectorXd& v, const Spinor& s) const;

  /// Max deviation over the defining relations and anti-Hermiticity:
  /// max_ij ||g_i g_j + g_j g_i + 2 delta_ij|| and max_i ||g_i^H + g_i||.
  double check_relations() const;

 private:
  std::vector<Mat2> gamma_;
};

}  // namespace spinlab
