#include "spinlab/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <future>
#include <sstream>
#include <thread>

namespace spinlab {

SpectralReport compute_spectral_report(const RunPoint& pt, const EigenConfig& cfg,
                                       int want_dirac, int want_laplace) {
  TorusDomain dom(pt.grid);
  ConformalFactor f = ConformalFactor::family(pt.alpha, pt.eps);
  if (!(pt.alpha < dom.L / 2.0)) {
    throw std::invalid_argument("alpha must be below half the torus length");
  }

  SpectralReport rep;
  rep.point = pt;
  rep.vol = volume(f, dom);

  ConformalDirac A(dom, pt.spin, f);
  DiracSpectrum ds = lambda1_plus(A, want_dirac, cfg);
  rep.lambda1 = ds.lambda1;
  rep.dirac_values = ds.values;
  rep.dirac_iterations = ds.iterations;
  rep.dirac_kernel_dim = ds.kernel_dim;
  rep.lam_residual = 0.0;
  for (Eigen::Index i = 0; i < ds.values.size(); ++i) {
    rep.lam_residual =
        std::max(rep.lam_residual,
                 ds.residuals[i] / std::max(1.0, std::abs(ds.values[i])));
  }

  ConformalLaplace C(dom, f);
  LaplaceSpectrum ls = mu1(C, want_laplace, cfg);
  rep.mu1 = ls.mu1;
  rep.laplace_values = ls.values;
  rep.laplace_iterations = ls.iterations;
  rep.mu_residual = 0.0;
  for (Eigen::Index i = 0; i < ls.values.size(); ++i) {
    rep.mu_residual =
        std::max(rep.mu_residual,
                 ls.residuals[i] / std::max(1.0, std::abs(ls.values[i])));
  }

  rep.lam1sq_vol = rep.lambda1 * rep.lambda1 * rep.vol;
  rep.mu1_vol = rep.mu1 * rep.vol;
  rep.ratio = rep.lambda1 * rep.lambda1 / rep.mu1;
  return rep;
}

SweepOutcome sweep_points(const std::vector<RunPoint>& pts, const EigenConfig& cfg,
                          int worker_count) {
  const int n = static_cast<int>(pts.size());
  const int workers = std::max(1, std::min(worker_count, n));

  struct Slot {
    bool ok = false;
    SpectralReport rep;
    std::string error;
  };
  std::vector<Slot> slots(n);
  std::atomic<int> next{0};

  auto drain = [&]() {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        slots[i].rep = compute_spectral_report(pts[i], cfg);
        slots[i].ok = true;
      } catch (const std::exception& e) {
        slots[i].error = e.what();
      }
    }
  };

  if (workers == 1) {
    drain();
  } else {
    std::vector<std::future<void>> tasks;
    tasks.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      tasks.push_back(std::async(std::launch::async, drain));
    }
    for (auto& t : tasks) t.get();
  }

  SweepOutcome out;
  for (int i = 0; i < n; ++i) {
    if (slots[i].ok) {
      out.rows.push_back(std::move(slots[i].rep));
    } else {
      out.failures.emplace_back(pts[i], slots[i].error);
    }
  }
  return out;
}

int env_worker_count() {
  const char* v = std::getenv("SPINLAB_WORKERS");
  if (v == nullptr) return 1;
  const int n = std::atoi(v);
  return n >= 1 ? n : 1;
}

std::string csv_header() {
  return "eps,alpha,grid,spin,lambda1,mu1,vol,lam1sq_vol,mu1_vol,ratio,"
         "lam_residual,mu_residual";
}

std::string csv_row(const SpectralReport& r) {
  std::ostringstream os;
  os.precision(12);
  os << r.point.eps << ',' << r.point.alpha << ',' << r.point.grid << ','
     << r.point.spin.csv_token() << ',' << r.lambda1 << ',' << r.mu1 << ','
     << r.vol << ',' << r.lam1sq_vol << ',' << r.mu1_vol << ',' << r.ratio
     << ',';
  os.precision(3);
  os << std::scientific << r.lam_residual << ',' << r.mu_residual;
  return os.str();
}

}  // namespace spinlab
