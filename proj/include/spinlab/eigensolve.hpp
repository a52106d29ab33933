#pragma once

#include <cstdint>
#include <stdexcept>

#include "spinlab/operators.hpp"

namespace spinlab {

/// Thrown when an eigensolve does not reach the requested residual tolerance
/// or a Dirac eigenvalue sign cannot be classified unambiguously.
struct ConvergenceFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EigenConfig {
  double tol = 1e-9;   // relative residual target, ||Ax-tx|| <= tol*max(1,|t|)
  int maxit = 300;
  int block = 0;       // iteration block size; 0 selects want + 4
  std::uint64_t seed = 7;
};

struct LobpcgResult {
  Eigen::VectorXd values;     // ascending
  Eigen::MatrixXcd vectors;   // orthonormal, orthogonal to the constraints
  Eigen::VectorXd residuals;  // ||op x - value x|| per pair
  int iterations = 0;
  bool converged = false;
};

/// Smallest `want` eigenpairs of a Hermitian PSD operator, orthogonal to the
/// constraint columns. Preconditioned LOBPCG on an orthonormal combined
/// basis with hard prefix locking: a leading group of Ritz vectors is locked
/// only when its block residual (including coupling into the unlocked tail)
/// is below tolerance, so degenerate clusters lock as a whole. The iteration
/// runs on a block larger than `want` so a cluster straddling position
/// `want` cannot stall the wanted prefix.
LobpcgResult lowest_eigenpairs(const LinOp& op, int want,
                               const Eigen::MatrixXcd& constraints,
                               const EigenConfig& cfg,
                               const LinOp* prec = nullptr);

struct DiracSpectrum {
  double lambda1 = 0.0;        // smallest positive eigenvalue of A
  Eigen::VectorXd values;      // signed eigenvalues of A, ascending
  Eigen::VectorXd residuals;   // ||A w - value w|| per reported pair
  Eigen::MatrixXcd vectors;    // columns match `values`
  int kernel_dim = 0;          // analytically deflated kernel dimension
  int iterations = 0;
};

/// First positive Dirac eigenvalue of the conformal metric. Solves A^2 (PSD)
/// with the exact kernel deflated for the trivial structure, then recovers
/// signs per near-degenerate cluster by a Rayleigh-Ritz step with A itself.
/// A cluster whose span is not A-invariant (a truncated degenerate level) is
/// re-solved with a larger block rather than guessed at.
DiracSpectrum lambda1_plus(const ConformalDirac& A, int want, const EigenConfig& cfg);

struct LaplaceSpectrum {
  double mu1 = 0.0;            // first nonzero eigenvalue
  Eigen::VectorXd values;
  Eigen::VectorXd residuals;
  Eigen::MatrixXcd vectors;
  int iterations = 0;
};

/// First conformal Laplace eigenvalue: smallest eigenvalue of C orthogonal
/// to the image of constants v0 = f.
LaplaceSpectrum mu1(const ConformalLaplace& C, int want, const EigenConfig& cfg);

struct SandwichReport {
  bool pass = false;
  double rho = 0.0;
  double mu_f = 0.0, mu_ft = 0.0;
  double lam_f = 0.0, lam_ft = 0.0;
  double mu_margin = 0.0;   // min slack across the two mu inequalities
  double lam_margin = 0.0;  // min slack across the two lambda inequalities
};

/// Eigenvalue stability under factor perturbation: builds a random factor
/// f~ inside the envelope (1+rho)^{-1} f <= f~ <= (1+rho) f and checks
///   (1+rho)^{-2} mu1(f~) <= mu1(f) <= (1+rho)^2 mu1(f~)
///   (1+rho)^{-1} lam1(f~) <= lam1(f) <= (1+rho) lam1(f~)
/// on the discrete operators (trivial spin structure).
SandwichReport sandwich_check(const TorusDomain& dom, const ConformalFactor& f,
                              double rho, const EigenConfig& cfg,
                              std::uint64_t perturb_seed);

/// Random factor inside the sandwich envelope of f (exposed for tests).
ConformalFactor perturbed_factor(const TorusDomain& dom, const ConformalFactor& f,
                                 double rho, std::uint64_t seed);

}  // namespace spinlab
