#pragma once

#include <string>
#include <utility>
#include <vector>

#include "spinlab/eigensolve.hpp"

namespace spinlab {

struct RunPoint {
  double eps = 0.0;
  double alpha = 0.0;
  int grid = 0;
  SpinStructure spin;
};

/// Joint Dirac/Laplace summary of one conformal metric f_{alpha,eps}^2 * flat.
struct SpectralReport {
  RunPoint point;
  double lambda1 = 0.0;      // first positive Dirac eigenvalue
  double mu1 = 0.0;          // first Laplace eigenvalue
  double vol = 0.0;          // Riemannian area
  double lam1sq_vol = 0.0;   // lambda1^2 * vol
  double mu1_vol = 0.0;      // mu1 * vol
  double ratio = 0.0;        // lambda1^2 / mu1
  double lam_residual = 0.0;  // worst ||A w - t w|| / max(1,|t|) over pairs
  double mu_residual = 0.0;   // same for the Laplace solve
  int dirac_iterations = 0;
  int laplace_iterations = 0;
  int dirac_kernel_dim = 0;
  Eigen::VectorXd dirac_values;    // signed, ascending
  Eigen::VectorXd laplace_values;  // ascending, constants deflated
};

/// Solve both spectra for one point. Throws std::invalid_argument on bad
/// parameters and ConvergenceFailure when a solve cannot be certified.
SpectralReport compute_spectral_report(const RunPoint& pt, const EigenConfig& cfg,
                                       int want_dirac = 4, int want_laplace = 4);

struct SweepOutcome {
  std::vector<SpectralReport> rows;  // successes, in input order
  std::vector<std::pair<RunPoint, std::string>> failures;
};

/// Run points on a small worker pool (size from worker_count, each point is
/// independent); results are reassembled in input order.
SweepOutcome sweep_points(const std::vector<RunPoint>& pts, const EigenConfig& cfg,
                          int worker_count);

/// Worker count from SPINLAB_WORKERS (>= 1); defaults to 1.
int env_worker_count();

std::string csv_header();
std::string csv_row(const SpectralReport& r);

}  // namespace spinlab
