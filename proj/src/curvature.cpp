#include "spinlab/curvature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace spinlab {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd axis(int n, int k, double s) {
  VectorXd e = VectorXd::Zero(n);
  e[k] = s;
  return e;
}

/// Richardson-refined central first difference of a matrix-valued map along
/// axis r at x: error O(h^4), exact through quartic polynomials.
template <class F>
auto diff1(const F& f, const VectorXd& x, int r, double h)
    -> decltype(f(x)) {
  const VectorXd e = axis(static_cast<int>(x.size()), r, 1.0);
  auto d = [&](double s) { return ((f(x + s * e) - f(x - s * e)) / (2 * s)).eval(); };
  return ((4.0 * d(h / 2) - d(h)) / 3.0).eval();
}

template <class F>
double diff1_scalar(const F& f, const VectorXd& x, int r, double h) {
  const VectorXd e = axis(static_cast<int>(x.size()), r, 1.0);
  auto d = [&](double s) { return (f(x + s * e) - f(x - s * e)) / (2 * s); };
  return (4.0 * d(h / 2) - d(h)) / 3.0;
}

/// Richardson-refined central second difference d2_{cd} at x.
template <class F>
auto diff2(const F& f, const VectorXd& x, int c, int d, double h)
    -> decltype(f(x)) {
  const int n = static_cast<int>(x.size());
  const VectorXd ec = axis(n, c, 1.0), ed = axis(n, d, 1.0);
  auto dd = [&](double s) {
    if (c == d)
      return ((f(x + s * ec) - 2.0 * f(x) + f(x - s * ec)) / (s * s)).eval();
    return ((f(x + s * ec + s * ed) - f(x + s * ec - s * ed) -
             f(x - s * ec + s * ed) + f(x - s * ec - s * ed)) /
            (4 * s * s))
        .eval();
  };
  return ((4.0 * dd(h / 2) - dd(h)) / 3.0).eval();
}

template <class F>
double diff2_scalar(const F& f, const VectorXd& x, int c, int d, double h) {
  const int n = static_cast<int>(x.size());
  const VectorXd ec = axis(n, c, 1.0), ed = axis(n, d, 1.0);
  auto dd = [&](double s) {
    if (c == d) return (f(x + s * ec) - 2.0 * f(x) + f(x - s * ec)) / (s * s);
    return (f(x + s * ec + s * ed) - f(x + s * ec - s * ed) -
            f(x - s * ec + s * ed) + f(x - s * ec - s * ed)) /
           (4 * s * s);
  };
  return (4.0 * dd(h / 2) - dd(h)) / 3.0;
}

void require_dim(int n) {
  if (n < 2 || n > 4)
    throw std::invalid_argument("chart dimension must be 2, 3, or 4");
}

struct PolyTerm {
  int i = 0, j = 0;
  std::vector<int> alpha;
  double c = 0.0;
};

}  // namespace

MatrixXd MetricChart::eval(const VectorXd& x) const {
  if (static_cast<int>(x.size()) != n)
    throw std::invalid_argument("chart point has wrong dimension");
  MatrixXd G = g(x);
  if (G.rows() != n || G.cols() != n)
    throw std::invalid_argument("chart returned a matrix of wrong shape");
  return G;
}

void MetricChart::check_normal(double tol) const {
  require_dim(n);
  const VectorXd x0 = VectorXd::Zero(n);
  const MatrixXd G0 = eval(x0);
  if ((G0 - MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("chart is not normal: g(0) != Id");
  auto f = [&](const VectorXd& y) { return eval(y); };
  for (int r = 0; r < n; ++r) {
    if (diff1(f, x0, r, h).cwiseAbs().maxCoeff() > tol)
      throw std::invalid_argument("chart is not normal: dg(0) != 0");
  }
}

MetricChart MetricChart::flat(int n) {
  require_dim(n);
  MetricChart c;
  c.n = n;
  c.g = [n](const VectorXd&) { return MatrixXd::Identity(n, n).eval(); };
  return c;
}

MetricChart MetricChart::constant_curvature_series(int n, double K) {
  require_dim(n);
  MetricChart c;
  c.n = n;
  c.g = [n, K](const VectorXd& x) {
    const double r2 = x.squaredNorm();
    MatrixXd G = MatrixXd::Identity(n, n);
    G += (K / 3.0) * (x * x.transpose() - r2 * MatrixXd::Identity(n, n));
    G += (2.0 * K * K / 45.0) *
         (r2 * r2 * MatrixXd::Identity(n, n) - r2 * x * x.transpose());
    return G.eval();
  };
  return c;
}

MetricChart MetricChart::sphere_exact(int n) {
  require_dim(n);
  MetricChart c;
  c.n = n;
  c.g = [n](const VectorXd& x) {
    const double r2 = x.squaredNorm();
    // sin^2(r)/r^2, series below the rounding knee of the quotient
    double s;
    if (r2 < 1e-8) {
      s = 1.0 - r2 / 3.0 + 2.0 * r2 * r2 / 45.0;
    } else {
      const double r = std::sqrt(r2);
      s = std::sin(r) * std::sin(r) / r2;
    }
    MatrixXd P = MatrixXd::Identity(n, n);
    if (r2 > 0) P -= x * x.transpose() / r2;
    MatrixXd G = s * P;
    if (r2 > 0)
      G += x * x.transpose() / r2;
    else
      G = MatrixXd::Identity(n, n);
    return G.eval();
  };
  return c;
}

MetricChart MetricChart::conformal_round(int n) {
  require_dim(n);
  MetricChart c;
  c.n = n;
  c.g = [n](const VectorXd& x) {
    const double f = 2.0 / (1.0 + x.squaredNorm());
    return (f * f * MatrixXd::Identity(n, n)).eval();
  };
  return c;
}

MetricChart MetricChart::conformal(
    MetricChart base, std::function<double(const VectorXd&)> u) {
  MetricChart c;
  c.n = base.n;
  c.h = base.h;
  c.g = [base = std::move(base), u = std::move(u)](const VectorXd& x) {
    return (std::exp(2.0 * u(x)) * base.eval(x)).eval();
  };
  return c;
}

MetricChart MetricChart::from_poly_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open chart file: " + path);
  std::vector<PolyTerm> terms;
  int n = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    if (n == 0) {
      if (static_cast<int>(tok.size()) < 4 + 2)
        throw std::runtime_error(where + ": too few fields for a chart term");
      n = static_cast<int>(tok.size()) - 4;
      if (n < 2 || n > 4)
        throw std::runtime_error(where + ": inferred dimension must be 2..4");
    }
    if (static_cast<int>(tok.size()) != n + 4)
      throw std::runtime_error(where + ": expected " + std::to_string(n + 4) +
                               " fields (i j degree multi-index value)");
    PolyTerm t;
    try {
      t.i = std::stoi(tok[0]);
      t.j = std::stoi(tok[1]);
      const int deg = std::stoi(tok[2]);
      int total = 0;
      t.alpha.resize(n);
      for (int k = 0; k < n; ++k) {
        t.alpha[k] = std::stoi(tok[3 + k]);
        if (t.alpha[k] < 0) throw std::runtime_error("negative exponent");
        total += t.alpha[k];
      }
      t.c = std::stod(tok[3 + n]);
      if (total != deg)
        throw std::runtime_error("degree does not match multi-index");
      if (t.i < 0 || t.j < 0 || t.i >= n || t.j >= n)
        throw std::runtime_error("component index out of range");
      if (t.i > t.j)
        throw std::runtime_error("terms must use i <= j (lower triangle is mirrored)");
    } catch (const std::exception& e) {
      throw std::runtime_error(where + ": " + e.what());
    }
    terms.push_back(std::move(t));
  }
  if (n == 0) throw std::runtime_error(path + ": no chart terms found");
  MetricChart c;
  c.n = n;
  c.g = [n, terms](const VectorXd& x) {
    MatrixXd G = MatrixXd::Zero(n, n);
    for (const auto& t : terms) {
      double m = t.c;
      for (int k = 0; k < n; ++k)
        for (int p = 0; p < t.alpha[k]; ++p) m *= x[k];
      G(t.i, t.j) += m;
      if (t.i != t.j) G(t.j, t.i) += m;
    }
    return G.eval();
  };
  return c;
}

MatrixXd sqrt_inv(const MatrixXd& G) {
  const MatrixXd S = 0.5 * (G + G.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(S);
  if (es.info() != Eigen::Success)
    throw std::invalid_argument("sqrt_inv: eigendecomposition failed");
  const VectorXd lam = es.eigenvalues();
  if (lam.minCoeff() <= 0.0)
    throw std::invalid_argument("sqrt_inv: matrix is not positive definite");
  return es.eigenvectors() *
         lam.cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

std::vector<MatrixXd> christoffel(const MetricChart& chart,
                                  const VectorXd& x) {
  const int n = chart.n;
  require_dim(n);
  auto f = [&](const VectorXd& y) { return chart.eval(y); };
  std::vector<MatrixXd> dg(n);
  for (int r = 0; r < n; ++r) dg[r] = diff1(f, x, r, chart.h);
  const MatrixXd Ginv = chart.eval(x).inverse();
  std::vector<MatrixXd> Gam(n, MatrixXd::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l)
          s += Ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        Gam[k](i, j) = 0.5 * s;
      }
  return Gam;
}

std::vector<MatrixXd> tilde_gamma(const MetricChart& chart,
                                  const VectorXd& x) {
  const int n = chart.n;
  require_dim(n);
  auto bmap = [&](const VectorXd& y) { return sqrt_inv(chart.eval(y)); };
  const MatrixXd B = bmap(x);
  const MatrixXd Binv = B.inverse();
  std::vector<MatrixXd> dB(n);
  for (int r = 0; r < n; ++r) dB[r] = diff1(bmap, x, r, chart.h);
  const auto Gam = christoffel(chart, x);
  std::vector<MatrixXd> tg(n, MatrixXd::Zero(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        double s = 0.0;
        for (int r = 0; r < n; ++r) {
          s += B(i, r) * dB[r](j, l);
          for (int m = 0; m < n; ++m)
            s += B(i, r) * B(j, m) * Gam[l](r, m);
        }
        for (int k = 0; k < n; ++k) tg[k](i, j) += s * Binv(l, k);
      }
  return tg;
}

CorrectionFields correction_fields(const MetricChart& chart,
                                   const VectorXd& x) {
  const int n = chart.n;
  const auto raw = tilde_gamma(chart, x);
  // Antisymmetric projection in (upper k) <-> (second lower j); the exact
  // coefficients have this symmetry, the finite differences only approximately.
  std::vector<MatrixXd> tg(n, MatrixXd::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        tg[k](i, j) = 0.5 * (raw[k](i, j) - raw[j](i, k));

  CorrectionFields out;
  out.V = VectorXd::Zero(n);
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += tg[i](i, k) - tg[k](i, i);
    out.V[k] = 0.25 * s;
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        const double c = 0.25 * (tg[k](i, j) - tg[k](j, i) + tg[i](j, k) -
                                 tg[i](k, j) + tg[j](k, i) - tg[j](i, k));
        out.W_index.push_back({i, j, k});
        out.W.push_back(c);
      }
  if (n <= 3) {
    const CliffordRep rep(n);
    Mat2 full = Mat2::Zero();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          full += 0.25 * tg[k](i, j) * (rep.gamma(i) * rep.gamma(j) * rep.gamma(k));
    Mat2 dec = Mat2::Zero();
    for (int k = 0; k < n; ++k) dec += out.V[k] * rep.gamma(k);
    for (std::size_t t = 0; t < out.W.size(); ++t) {
      const auto& id = out.W_index[t];
      dec += out.W[t] * (rep.gamma(id[0]) * rep.gamma(id[1]) * rep.gamma(id[2]));
    }
    out.clifford_full = full;
    out.clifford_decomposed = dec;
  }
  return out;
}

RiemannReport riemann_at(const MetricChart& chart) {
  const int n = chart.n;
  require_dim(n);
  chart.check_normal();
  const VectorXd x0 = VectorXd::Zero(n);
  auto f = [&](const VectorXd& y) { return chart.eval(y); };
  std::vector<std::vector<MatrixXd>> d2(n, std::vector<MatrixXd>(n));
  for (int c = 0; c < n; ++c)
    for (int d = c; d < n; ++d) {
      d2[c][d] = diff2(f, x0, c, d, chart.h);
      if (d != c) d2[d][c] = d2[c][d];
    }
  RiemannReport rep(n);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < n; ++a)
      for (int j = 0; j < n; ++j)
        for (int b = 0; b < n; ++b)
          rep.R(i, a, j, b) = 0.5 * (d2[a][j](i, b) + d2[i][b](a, j) -
                                     d2[a][b](i, j) - d2[i][j](a, b));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += rep.R(i, a, i, b);
      rep.ric(a, b) = s;
    }
  rep.scal = rep.ric.trace();
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < n; ++a)
      for (int j = 0; j < n; ++j)
        for (int b = 0; b < n; ++b) {
          const double cyc =
              rep.R(i, a, j, b) + rep.R(i, j, b, a) + rep.R(i, b, a, j);
          rep.bianchi_max = std::max(rep.bianchi_max, std::abs(cyc));
        }
  return rep;
}

double scal_at(const MetricChart& chart, const VectorXd& x) {
  const int n = chart.n;
  require_dim(n);
  const double H = std::max(20.0 * chart.h, 1e-3);
  auto gam = [&](const VectorXd& y) { return christoffel(chart, y); };
  const auto G0 = gam(x);
  // dGam[m][k](i,j) = d_m Gamma^k_ij, Richardson central over christoffel
  std::vector<std::vector<MatrixXd>> dG(n);
  for (int m = 0; m < n; ++m) {
    const VectorXd e = axis(n, m, 1.0);
    auto signed_diff = [&](double s) {
      const auto p = gam(x + s * e);
      const auto q = gam(x - s * e);
      std::vector<MatrixXd> out(n);
      for (int k = 0; k < n; ++k) out[k] = (p[k] - q[k]) / (2 * s);
      return out;
    };
    const auto a = signed_diff(H / 2);
    const auto b = signed_diff(H);
    dG[m].resize(n);
    for (int k = 0; k < n; ++k) dG[m][k] = (4.0 * a[k] - b[k]) / 3.0;
  }
  const MatrixXd Ginv = chart.eval(x).inverse();
  double scal = 0.0;
  // Ric_{sn} = d_m Gam^m_ns - d_n Gam^m_ms + Gam^m_ml Gam^l_ns - Gam^m_nl Gam^l_ms
  for (int s = 0; s < n; ++s)
    for (int nu = 0; nu < n; ++nu) {
      double ric = 0.0;
      for (int m = 0; m < n; ++m) {
        ric += dG[m][m](nu, s) - dG[nu][m](m, s);
        for (int l = 0; l < n; ++l)
          ric += G0[m](m, l) * G0[l](nu, s) - G0[m](nu, l) * G0[l](m, s);
      }
      scal += Ginv(s, nu) * ric;
    }
  return scal;
}

ExpansionReport expansion_orders(const MetricChart& chart, double r0,
                                 int levels, int directions,
                                 std::uint64_t seed) {
  const int n = chart.n;
  require_dim(n);
  if (levels < 2) throw std::invalid_argument("expansion_orders: levels >= 2");
  if (r0 <= 0.0) throw std::invalid_argument("expansion_orders: r0 > 0");
  chart.check_normal();
  const auto rr = riemann_at(chart);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<VectorXd> dirs;
  for (int d = 0; d < directions; ++d) {
    VectorXd u(n);
    do {
      for (int k = 0; k < n; ++k) u[k] = gauss(rng);
    } while (u.norm() < 1e-3);
    dirs.push_back(u / u.norm());
  }

  // Leading-term predictions contracted with a unit direction u.
  auto pred_b = [&](const VectorXd& u) {
    MatrixXd P = MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) s += rr.R(i, a, j, b) * u[a] * u[b];
        P(i, j) = s / 6.0;
      }
    return P;
  };
  auto pred_gamma = [&](const VectorXd& u) {
    std::vector<MatrixXd> P(n, MatrixXd::Zero(n, n));
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double s = 0.0;
          for (int a = 0; a < n; ++a)
            s += (rr.R(i, k, j, a) + rr.R(i, a, j, k)) * u[a];
          P[k](i, j) = s / 3.0;
        }
    return P;
  };
  auto pred_v = [&](const VectorXd& u) {
    VectorXd P = VectorXd::Zero(n);
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int a = 0; a < n; ++a) s += rr.ric(a, k) * u[a];
      P[k] = -0.25 * s;
    }
    return P;
  };

  const double floor = 1e-8;
  const int L = levels;
  std::vector<double> mb(L, 0.0), mg(L, 0.0), mv(L, 0.0), mw(L, 0.0);
  double eb = 0.0, eg = 0.0, ev = 0.0;   // coefficient deviations, finest level
  double sb = 0.0, sg = 0.0, sv = 0.0;   // prediction scales
  for (int lev = 0; lev < L; ++lev) {
    const double r = r0 * std::pow(0.5, lev);
    for (const auto& u : dirs) {
      const VectorXd x = r * u;
      const MatrixXd dev = sqrt_inv(chart.eval(x)) - MatrixXd::Identity(n, n);
      mb[lev] = std::max(mb[lev], dev.cwiseAbs().maxCoeff());
      const auto Gam = christoffel(chart, x);
      for (int k = 0; k < n; ++k)
        mg[lev] = std::max(mg[lev], Gam[k].cwiseAbs().maxCoeff());
      const auto cf = correction_fields(chart, x);
      mv[lev] = std::max(mv[lev], cf.V.cwiseAbs().maxCoeff());
      for (double w : cf.W) mw[lev] = std::max(mw[lev], std::abs(w));
      if (lev == L - 1) {
        const MatrixXd Pb = pred_b(u);
        eb = std::max(eb, (dev / (r * r) - Pb).cwiseAbs().maxCoeff());
        sb = std::max(sb, Pb.cwiseAbs().maxCoeff());
        const auto Pg = pred_gamma(u);
        for (int k = 0; k < n; ++k) {
          eg = std::max(eg, (Gam[k] / r - Pg[k]).cwiseAbs().maxCoeff());
          sg = std::max(sg, Pg[k].cwiseAbs().maxCoeff());
        }
        const VectorXd Pv = pred_v(u);
        ev = std::max(ev, (cf.V / r - Pv).cwiseAbs().maxCoeff());
        sv = std::max(sv, Pv.cwiseAbs().maxCoeff());
      }
    }
  }

  auto fit = [&](const std::vector<double>& m, const char* field) {
    double peak = 0.0;
    for (double v : m) peak = std::max(peak, v);
    if (peak < floor) return std::numeric_limits<double>::infinity();
    for (int k = 0; k + 1 < L; ++k)
      if (m[k + 1] >= m[k])
        throw std::runtime_error(
            std::string("expansion fit failed: ") + field +
            " does not decay with radius (normal-coordinate precondition?)");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int k = 0; k < L; ++k) {
      const double lx = std::log(r0 * std::pow(0.5, k)), ly = std::log(m[k]);
      sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    return (L * sxy - sx * sy) / (L * sxx - sx * sx);
  };

  ExpansionReport rep;
  rep.b_slope = fit(mb, "orthonormalization deviation");
  rep.gamma_slope = fit(mg, "Christoffel symbols");
  rep.v_slope = fit(mv, "vector correction");
  rep.w_slope = fit(mw, "three-form correction");
  rep.w_max = mw[0];
  rep.zero_branch = std::isinf(rep.b_slope) && std::isinf(rep.gamma_slope) &&
                    std::isinf(rep.v_slope) && std::isinf(rep.w_slope);
  auto rel = [&](double err, double scale) {
    if (scale < floor) return err < floor ? 0.0 : std::numeric_limits<double>::infinity();
    return err / scale;
  };
  rep.b_coeff_err = rel(eb, sb);
  rep.gamma_coeff_err = rel(eg, sg);
  rep.v_coeff_err = rel(ev, sv);
  return rep;
}

double conformal_scal(const MetricChart& chart,
                      const std::function<double(const VectorXd&)>& u,
                      const VectorXd& x) {
  const int n = chart.n;
  require_dim(n);
  const double scal = scal_at(chart, x);
  const MatrixXd Ginv = chart.eval(x).inverse();
  const auto Gam = christoffel(chart, x);
  VectorXd du(n);
  for (int r = 0; r < n; ++r) du[r] = diff1_scalar(u, x, r, chart.h);
  MatrixXd d2u(n, n);
  for (int r = 0; r < n; ++r)
    for (int s = r; s < n; ++s) {
      d2u(r, s) = diff2_scalar(u, x, r, s, chart.h);
      d2u(s, r) = d2u(r, s);
    }
  double lap = 0.0, grad2 = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double hess = d2u(i, j);
      for (int k = 0; k < n; ++k) hess -= Gam[k](i, j) * du[k];
      lap -= Ginv(i, j) * hess;  // positive Laplacian
      grad2 += Ginv(i, j) * du[i] * du[j];
    }
  const double u0 = u(x);
  return std::exp(-2.0 * u0) *
         (scal + 2.0 * (n - 1) * lap - (n - 1.0) * (n - 2.0) * grad2);
}

namespace {

/// Positive Laplacian of the scalar curvature at the origin, Richardson
/// second differences over scal_at with base step 0.05.
double lap_scal0(const MetricChart& chart) {
  const int n = chart.n;
  const VectorXd x0 = VectorXd::Zero(n);
  auto f = [&](const VectorXd& y) { return scal_at(chart, y); };
  double lap = 0.0;
  for (int i = 0; i < n; ++i) lap -= diff2_scalar(f, x0, i, i, 0.05);
  return lap;
}

}  // namespace

GaugeReport gauge_u(const MetricChart& chart) {
  const int n = chart.n;
  require_dim(n);
  if (n < 3)
    throw std::invalid_argument("gauge_u: needs n >= 3 (the quadratic step divides by n - 2)");
  chart.check_normal();

  GaugeReport rep;
  const auto rr0 = riemann_at(chart);
  rep.scal0 = rr0.scal;
  rep.conformal_r2 = rep.scal0 / (4.0 * n * (n - 1));
  const double c1 = rep.conformal_r2;
  auto u1 = [c1](const VectorXd& y) { return c1 * y.squaredNorm(); };
  const MetricChart g1 = MetricChart::conformal(chart, u1);

  const auto rr1 = riemann_at(g1);
  rep.quad = (rr1.ric - (rr1.scal / n) * MatrixXd::Identity(n, n)) /
             (2.0 * (n - 2));
  const MatrixXd Q = rep.quad;
  auto u2 = [Q](const VectorXd& y) { return y.dot(Q * y); };
  const MetricChart g2 = MetricChart::conformal(g1, u2);

  // 2(n-1) Lap applied to q (x1)^4 shifts Lap Scal (0) by 48 (n-1) q.
  const double L2 = lap_scal0(g2);
  rep.quartic = -L2 / (48.0 * (n - 1));
  const double q = rep.quartic;
  auto u3 = [q](const VectorXd& y) { return q * y[0] * y[0] * y[0] * y[0]; };
  const MetricChart g3 = MetricChart::conformal(g2, u3);

  const auto rr3 = riemann_at(g3);
  rep.ric_norm = rr3.ric.norm();
  rep.delta_scal = std::abs(lap_scal0(g3));
  rep.u = [c1, Q, q](const VectorXd& y) {
    return c1 * y.squaredNorm() + y.dot(Q * y) + q * y[0] * y[0] * y[0] * y[0];
  };
  return rep;
}

}  // namespace spinlab
