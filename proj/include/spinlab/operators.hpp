#pragma once

#include <memory>

#include "spinlab/clifford.hpp"
#include "spinlab/fft.hpp"
#include "spinlab/torus.hpp"

namespace spinlab {

/// Matrix-free Hermitian operator on complex grid data.
struct LinOp {
  virtual ~LinOp() = default;
  virtual long dim() const = 0;
  virtual void apply(const cplx* in, cplx* out) const = 0;

  void apply_vec(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const;
  Eigen::VectorXcd apply_vec(const Eigen::VectorXcd& in) const;
};

/// Flat Dirac operator on the torus with the spin structure realized as a
/// Fourier twist: fields are stored in the periodic gauge and the symbol is
/// evaluated at dual nodes (2pi/L)(m + delta). Spectrum: +-|k + delta|.
class DiracFlat : public LinOp {
 public:
  DiracFlat(const TorusDomain& dom, const SpinStructure& spin);

  long dim() const override { return 2 * dom_.nodes(); }
  const TorusDomain& domain() const { return dom_; }
  const SpinStructure& spin() const { return spin_; }

  /// Forward FFT per component, multiply by the Hermitian symbol
  /// i (k+delta) . gamma, inverse FFT.
  void apply(const cplx* in, cplx* out) const override;

  /// Fourier pseudo-inverse: symbol divided by |k+delta|^2, zero on the
  /// kernel modes. Used as the smoothing kernel of preconditioners.
  void apply_pinv(const cplx* in, cplx* out) const;

  /// Analytic kernel dimension (complex): 2 for the trivial structure.
  int kernel_dim() const { return spin_.trivial() ? 2 : 0; }

 private:
  void apply_symbol(const cplx* in, cplx* out, bool pinv) const;

  TorusDomain dom_;
  SpinStructure spin_;
  Fft2 fft_;
  Eigen::VectorXd k1_, k2_;  // dual components per node index
};

/// Conformally transformed Dirac operator A = f^{-1/2} D f^{-1/2}.
///
/// D_g phi = lambda f phi  <=>  A w = lambda w  with  w = f^{1/2} phi, so the
/// spectrum of A is the Dirac spectrum of the metric f^2 * (flat).
class ConformalDirac : public LinOp {
 public:
  ConformalDirac(const TorusDomain& dom, const SpinStructure& spin,
                 const ConformalFactor& f);

  long dim() const override { return 2 * dom_.nodes(); }
  const TorusDomain& domain() const { return dom_; }
  const DiracFlat& flat() const { return flat_; }
  const Eigen::VectorXd& f() const { return f_; }
  const Eigen::VectorXd& f_sqrt() const { return fsqrt_; }

  void apply(const cplx* in, cplx* out) const override;

  /// Exact kernel of A for the trivial structure: f^{1/2} * constant
  /// spinors (2 complex dimensions). Empty matrix otherwise.
  Eigen::MatrixXcd kernel() const;

 private:
  TorusDomain dom_;
  DiracFlat flat_;
  Eigen::VectorXd f_, fsqrt_, finvsqrt_;
};

/// A^2 as a PSD operator for the squared-spectrum eigensolve.
class SquaredOp : public LinOp {
 public:
  explicit SquaredOp(const LinOp& a) : a_(a), tmp_(a.dim()) {}
  long dim() const override { return a_.dim(); }
  void apply(const cplx* in, cplx* out) const override;

 private:
  const LinOp& a_;
  mutable Eigen::VectorXcd tmp_;
};

/// Preconditioner for A^2: M = f^{1/2} D+ f D+ f^{1/2}, the exact inverse of
/// A^2 up to kernel modes when f varies slowly; Hermitian PSD by symmetry.
class DiracSquarePrecond : public LinOp {
 public:
  explicit DiracSquarePrecond(const ConformalDirac& a);
  long dim() const override { return a_.dim(); }
  void apply(const cplx* in, cplx* out) const override;

 private:
  const ConformalDirac& a_;
  mutable Eigen::VectorXcd t1_, t2_;
};

/// Conformal Laplace operator C = f^-1 Laplacian f^-1 with the flat positive
/// Laplacian applied spectrally (symbol |k|^2). The substitution v = f u maps
/// the mean-zero constraint of the Rayleigh quotient to v orthogonal to f,
/// and the nonzero spectrum of C is the conformal Laplace spectrum.
class ConformalLaplace : public LinOp {
 public:
  ConformalLaplace(const TorusDomain& dom, const ConformalFactor& f);

  long dim() const override { return dom_.nodes(); }
  const TorusDomain& domain() const { return dom_; }
  const Eigen::VectorXd& f() const { return f_; }

  void apply(const cplx* in, cplx* out) const override;

  /// Image of the constants: v0 = f, the exact kernel vector.
  Eigen::MatrixXcd kernel() const;

  /// Flat positive Laplacian (symbol |k|^2) or its pseudo-inverse.
  void apply_flat_laplace(const cplx* in, cplx* out, bool pinv) const;

 private:
  TorusDomain dom_;
  Fft2 fft_;
  Eigen::VectorXd f_, finv_, k2abs_;
};

/// Preconditioner for C: M = f Laplacian+ f.
class LaplacePrecond : public LinOp {
 public:
  explicit LaplacePrecond(const ConformalLaplace& c);
  long dim() const override { return c_.dim(); }
  void apply(const cplx* in, cplx* out) const override;

 private:
  const ConformalLaplace& c_;
  mutable Eigen::VectorXcd t1_;
};

/// Grid-checked wrappers.
SpinorField apply_dirac(const DiracFlat& op, const SpinorField& phi);
SpinorField apply_conformal_dirac(const ConformalDirac& op, const SpinorField& w);
ScalarField apply_conformal_laplace(const ConformalLaplace& op, const ScalarField& v);

}  // namespace spinlab
