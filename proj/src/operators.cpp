#include "spinlab/operators.hpp"

#include <stdexcept>

namespace spinlab {

void LinOp::apply_vec(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
  if (in.size() != dim()) throw std::invalid_argument("LinOp: dimension mismatch");
  out.resize(dim());
  apply(in.data(), out.data());
}

Eigen::VectorXcd LinOp::apply_vec(const Eigen::VectorXcd& in) const {
  Eigen::VectorXcd out;
  apply_vec(in, out);
  return out;
}

namespace {

// Dual coordinates (2pi/L)(m + delta) per node, FFT frequency order.
void fill_duals(const TorusDomain& dom, const SpinStructure& spin,
                Eigen::VectorXd& k1, Eigen::VectorXd& k2) {
  const int N = dom.N;
  const double scale = 2.0 * M_PI / dom.L;
  Eigen::VectorXd freq(N);
  for (int i = 0; i < N; ++i) freq[i] = (i < N / 2) ? i : i - N;
  k1.resize(dom.nodes());
  k2.resize(dom.nodes());
  for (int iy = 0; iy < N; ++iy) {
    for (int ix = 0; ix < N; ++ix) {
      const long idx = static_cast<long>(iy) * N + ix;
      k1[idx] = scale * (freq[ix] + spin.d1);
      k2[idx] = scale * (freq[iy] + spin.d2);
    }
  }
}

Eigen::VectorXd positive_grid_values(const ConformalFactor& f, const TorusDomain& dom) {
  Eigen::VectorXd v = f.grid_values(dom);
  if ((v.array() <= 0.0).any()) {
    throw std::invalid_argument("operator: conformal factor must be positive on the grid");
  }
  return v;
}

}  // namespace

DiracFlat::DiracFlat(const TorusDomain& dom, const SpinStructure& spin)
    : dom_(dom), spin_(spin), fft_(dom.N) {
  fill_duals(dom_, spin_, k1_, k2_);
}

void DiracFlat::apply_symbol(const cplx* in, cplx* out, bool pinv) const {
  const long M = dom_.nodes();
  Eigen::VectorXcd f0 = Eigen::Map<const Eigen::VectorXcd>(in, M);
  Eigen::VectorXcd f1 = Eigen::Map<const Eigen::VectorXcd>(in + M, M);
  fft_.forward(f0.data());
  fft_.forward(f1.data());
  // Symbol of sum_j gamma_j d/dx_j at dual K: i K.gamma = -(K1 s1 + K2 s2),
  // i.e. (a, b) -> (-(K1 - i K2) b, -(K1 + i K2) a); eigenvalues +-|K|.
  for (long m = 0; m < M; ++m) {
    const double kk = k1_[m] * k1_[m] + k2_[m] * k2_[m];
    cplx w(k1_[m], k2_[m]);
    cplx a = -std::conj(w) * f1[m];
    cplx b = -w * f0[m];
    if (pinv) {
      if (kk == 0.0) {
        a = 0.0;
        b = 0.0;
      } else {
        a /= kk;
        b /= kk;
      }
    }
    f0[m] = a;
    f1[m] = b;
  }
  fft_.backward(f0.data());
  fft_.backward(f1.data());
  Eigen::Map<Eigen::VectorXcd>(out, M) = f0;
  Eigen::Map<Eigen::VectorXcd>(out + M, M) = f1;
}

void DiracFlat::apply(const cplx* in, cplx* out) const { apply_symbol(in, out, false); }

void DiracFlat::apply_pinv(const cplx* in, cplx* out) const { apply_symbol(in, out, true); }

ConformalDirac::ConformalDirac(const TorusDomain& dom, const SpinStructure& spin,
                               const ConformalFactor& f)
    : dom_(dom), flat_(dom, spin), f_(positive_grid_values(f, dom)) {
  fsqrt_ = f_.array().sqrt();
  finvsqrt_ = fsqrt_.array().inverse();
}

void ConformalDirac::apply(const cplx* in, cplx* out) const {
  const long M = dom_.nodes();
  Eigen::VectorXcd tmp(2 * M);
  for (int c = 0; c < 2; ++c) {
    for (long m = 0; m < M; ++m) tmp[c * M + m] = in[c * M + m] * finvsqrt_[m];
  }
  flat_.apply(tmp.data(), out);
  for (int c = 0; c < 2; ++c) {
    for (long m = 0; m < M; ++m) out[c * M + m] *= finvsqrt_[m];
  }
}

Eigen::MatrixXcd ConformalDirac::kernel() const {
  const long M = dom_.nodes();
  if (!flat_.spin().trivial()) return Eigen::MatrixXcd(2 * M, 0);
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(2 * M, 2);
  for (long m = 0; m < M; ++m) {
    k(m, 0) = fsqrt_[m];
    k(M + m, 1) = fsqrt_[m];
  }
  return k;
}

void SquaredOp::apply(const cplx* in, cplx* out) const {
  a_.apply(in, tmp_.data());
  a_.apply(tmp_.data(), out);
}

DiracSquarePrecond::DiracSquarePrecond(const ConformalDirac& a)
    : a_(a), t1_(a.dim()), t2_(a.dim()) {}

void DiracSquarePrecond::apply(const cplx* in, cplx* out) const {
  const long M = a_.domain().nodes();
  const Eigen::VectorXd& fs = a_.f_sqrt();
  const Eigen::VectorXd& f = a_.f();
  for (int c = 0; c < 2; ++c) {
    for (long m = 0; m < M; ++m) t1_[c * M + m] = in[c * M + m] * fs[m];
  }
  a_.flat().apply_pinv(t1_.data(), t2_.data());
  for (int c = 0; c < 2; ++c) {
    for (long m = 0; m < M; ++m) t2_[c * M + m] *= f[m];
  }
  a_.flat().apply_pinv(t2_.data(), t1_.data());
  for (int c = 0; c < 2; ++c) {
    for (long m = 0; m < M; ++m) out[c * M + m] = t1_[c * M + m] * fs[m];
  }
}

ConformalLaplace::ConformalLaplace(const TorusDomain& dom, const ConformalFactor& f)
    : dom_(dom), fft_(dom.N), f_(positive_grid_values(f, dom)) {
  finv_ = f_.array().inverse();
  SpinStructure untwisted;
  Eigen::VectorXd k1, k2;
  fill_duals(dom_, untwisted, k1, k2);
  k2abs_ = k1.array().square() + k2.array().square();
}

void ConformalLaplace::apply_flat_laplace(const cplx* in, cplx* out, bool pinv) const {
  const long M = dom_.nodes();
  Eigen::VectorXcd buf = Eigen::Map<const Eigen::VectorXcd>(in, M);
  fft_.forward(buf.data());
  for (long m = 0; m < M; ++m) {
    if (pinv) {
      buf[m] = (k2abs_[m] == 0.0) ? cplx(0.0) : buf[m] / k2abs_[m];
    } else {
      buf[m] *= k2abs_[m];
    }
  }
  fft_.backward(buf.data());
  Eigen::Map<Eigen::VectorXcd>(out, M) = buf;
}

void ConformalLaplace::apply(const cplx* in, cplx* out) const {
  const long M = dom_.nodes();
  Eigen::VectorXcd tmp(M);
  for (long m = 0; m < M; ++m) tmp[m] = in[m] * finv_[m];
  apply_flat_laplace(tmp.data(), out, false);
  for (long m = 0; m < M; ++m) out[m] *= finv_[m];
}

Eigen::MatrixXcd ConformalLaplace::kernel() const {
  return f_.cast<cplx>();
}

LaplacePrecond::LaplacePrecond(const ConformalLaplace& c) : c_(c), t1_(c.dim()) {}

void LaplacePrecond::apply(const cplx* in, cplx* out) const {
  const long M = c_.dim();
  const Eigen::VectorXd& f = c_.f();
  Eigen::VectorXcd tmp(M);
  for (long m = 0; m < M; ++m) tmp[m] = in[m] * f[m];
  c_.apply_flat_laplace(tmp.data(), t1_.data(), true);
  for (long m = 0; m < M; ++m) out[m] = t1_[m] * f[m];
}

namespace {
void check_grid(int op_n, int field_n, const char* what) {
  if (op_n != field_n) {
    throw std::invalid_argument(std::string(what) + ": field grid does not match operator grid");
  }
}
}  // namespace

SpinorField apply_dirac(const DiracFlat& op, const SpinorField& phi) {
  check_grid(op.domain().N, phi.N, "apply_dirac");
  SpinorField out;
  out.N = phi.N;
  out.data.resize(phi.data.size());
  op.apply(phi.data.data(), out.data.data());
  return out;
}

SpinorField apply_conformal_dirac(const ConformalDirac& op, const SpinorField& w) {
  check_grid(op.domain().N, w.N, "apply_conformal_dirac");
  SpinorField out;
  out.N = w.N;
  out.data.resize(w.data.size());
  op.apply(w.data.data(), out.data.data());
  return out;
}

ScalarField apply_conformal_laplace(const ConformalLaplace& op, const ScalarField& v) {
  check_grid(op.domain().N, v.N, "apply_conformal_laplace");
  ScalarField out;
  out.N = v.N;
  out.data.resize(v.data.size());
  op.apply(v.data.data(), out.data.data());
  return out;
}

}  // namespace spinlab
