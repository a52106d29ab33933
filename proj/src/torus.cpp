#include "spinlab/torus.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace spinlab {

TorusDomain::TorusDomain(int N_, double L_, std::array<double, 2> base_)
    : N(N_), L(L_), base(base_) {
  if (N < 8 || N % 2 != 0) {
    throw std::invalid_argument("TorusDomain: N must be even and >= 8");
  }
  if (!(L > 0.0)) {
    throw std::invalid_argument("TorusDomain: period must be positive");
  }
}

double TorusDomain::min_image_radius(double x, double y) const {
  const double dx0 = x - base[0];
  const double dy0 = y - base[1];
  double best = std::numeric_limits<double>::infinity();
  for (int tx = -1; tx <= 1; ++tx) {
    for (int ty = -1; ty <= 1; ++ty) {
      const double dx = dx0 + tx * L;
      const double dy = dy0 + ty * L;
      best = std::min(best, dx * dx + dy * dy);
    }
  }
  return std::sqrt(best);
}

SpinStructure::SpinStructure(double a, double b) : d1(a), d2(b) {
  auto ok = [](double t) { return t == 0.0 || t == 0.5; };
  if (!ok(d1) || !ok(d2)) {
    throw std::invalid_argument("SpinStructure: twists must be 0 or 1/2");
  }
}

std::string SpinStructure::csv_token() const {
  auto tok = [](double t) { return t == 0.0 ? std::string("0") : std::string("0.5"); };
  return tok(d1) + ";" + tok(d2);
}

ConformalFactor ConformalFactor::family(double alpha, double eps) {
  if (!(eps > 0.0) || !(eps <= alpha)) {
    throw std::invalid_argument("ConformalFactor::family: need 0 < eps <= alpha");
  }
  ConformalFactor f;
  f.kind_ = Kind::Family;
  f.alpha_ = alpha;
  f.eps_ = eps;
  return f;
}

ConformalFactor ConformalFactor::sphere() {
  ConformalFactor f;
  f.kind_ = Kind::Sphere;
  return f;
}

ConformalFactor ConformalFactor::constant(double c) {
  if (!(c > 0.0)) {
    throw std::invalid_argument("ConformalFactor::constant: factor must be positive");
  }
  ConformalFactor f;
  f.kind_ = Kind::Constant;
  f.c_ = c;
  return f;
}

ConformalFactor ConformalFactor::sampled(Eigen::VectorXd values, int N) {
  if (values.size() != static_cast<long>(N) * N) {
    throw std::invalid_argument("ConformalFactor::sampled: need N^2 values");
  }
  if ((values.array() <= 0.0).any()) {
    throw std::invalid_argument("ConformalFactor::sampled: factor must be positive");
  }
  ConformalFactor f;
  f.kind_ = Kind::Sampled;
  f.samples_ = std::move(values);
  f.sample_n_ = N;
  return f;
}

double ConformalFactor::operator()(const TorusDomain& dom, double x, double y) const {
  switch (kind_) {
    case Kind::Constant:
      return c_;
    case Kind::Family: {
      if (!(alpha_ < 0.5 * dom.L)) {
        throw std::invalid_argument("ConformalFactor: alpha must be below L/2");
      }
      const double r = dom.min_image_radius(x, y);
      const double rr = std::min(r, alpha_);
      return eps_ * eps_ / (eps_ * eps_ + rr * rr);
    }
    case Kind::Sphere: {
      const double r = dom.min_image_radius(x, y);
      return 2.0 / (1.0 + r * r);
    }
    case Kind::Sampled: {
      if (sample_n_ != dom.N) {
        throw std::invalid_argument("ConformalFactor: sample grid does not match domain");
      }
      const double h = dom.h();
      const long ix = std::lround(x / h) % dom.N;
      const long iy = std::lround(y / h) % dom.N;
      return samples_[iy * dom.N + ix];
    }
  }
  throw std::logic_error("ConformalFactor: unknown kind");
}

Eigen::VectorXd ConformalFactor::grid_values(const TorusDomain& dom) const {
  if (kind_ == Kind::Sampled) {
    if (sample_n_ != dom.N) {
      throw std::invalid_argument("ConformalFactor: sample grid does not match domain");
    }
    return samples_;
  }
  Eigen::VectorXd out(dom.nodes());
  for (int iy = 0; iy < dom.N; ++iy) {
    for (int ix = 0; ix < dom.N; ++ix) {
      out[static_cast<long>(iy) * dom.N + ix] = (*this)(dom, dom.coord(ix), dom.coord(iy));
    }
  }
  return out;
}

double volume_of_samples(const Eigen::VectorXd& f, const TorusDomain& dom) {
  if (f.size() != dom.nodes()) {
    throw std::invalid_argument("volume: sample count does not match domain");
  }
  return f.array().square().sum() * dom.h() * dom.h();
}

double volume(const ConformalFactor& f, const TorusDomain& dom) {
  return volume_of_samples(f.grid_values(dom), dom);
}

SpinorField SpinorField::zero(int N) {
  SpinorField s;
  s.N = N;
  s.data = Eigen::VectorXcd::Zero(2L * N * N);
  return s;
}

namespace {

void write_spsf_raw(const std::string& path, int N, int components,
                    const double* data, long count) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_spsf: cannot open " + path);
  char header[16] = {};
  std::memcpy(header, "SPSF", 4);
  const uint16_t version = 1;
  const uint16_t n16 = static_cast<uint16_t>(N);
  const uint16_t c16 = static_cast<uint16_t>(components);
  std::memcpy(header + 4, &version, 2);
  std::memcpy(header + 6, &n16, 2);
  std::memcpy(header + 8, &c16, 2);
  out.write(header, sizeof(header));
  out.write(reinterpret_cast<const char*>(data), count * sizeof(double));
  if (!out) throw std::runtime_error("write_spsf: write failed for " + path);
}

}  // namespace

void write_spsf_real(const std::string& path, const Eigen::VectorXd& values, int N) {
  if (values.size() != static_cast<long>(N) * N) {
    throw std::invalid_argument("write_spsf: need N^2 values");
  }
  write_spsf_raw(path, N, 1, values.data(), values.size());
}

void write_spsf(const std::string& path, const ScalarField& field) {
  // Scalar dumps store the real part (module scalars of interest are real);
  // complex data belongs in spinor dumps.
  Eigen::VectorXd re = field.data.real();
  write_spsf_real(path, re, field.N);
}

void write_spsf(const std::string& path, const SpinorField& field) {
  const long M = field.nodes();
  Eigen::VectorXd flat(4 * M);
  for (long m = 0; m < M; ++m) {
    const cplx a = field.data[m];
    const cplx b = field.data[M + m];
    flat[4 * m + 0] = a.real();
    flat[4 * m + 1] = a.imag();
    flat[4 * m + 2] = b.real();
    flat[4 * m + 3] = b.imag();
  }
  write_spsf_raw(path, field.N, 2, flat.data(), flat.size());
}

SpsfData read_spsf(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_spsf: cannot open " + path);
  char header[16] = {};
  in.read(header, sizeof(header));
  if (!in || std::memcmp(header, "SPSF", 4) != 0) {
    throw std::runtime_error("read_spsf: bad magic in " + path);
  }
  uint16_t version = 0, n16 = 0, c16 = 0;
  std::memcpy(&version, header + 4, 2);
  std::memcpy(&n16, header + 6, 2);
  std::memcpy(&c16, header + 8, 2);
  if (version != 1) throw std::runtime_error("read_spsf: unsupported version");
  SpsfData d;
  d.N = n16;
  d.components = c16;
  const long per_node = (d.components == 2) ? 4 : 1;
  const long count = per_node * static_cast<long>(d.N) * d.N;
  d.raw.resize(count);
  in.read(reinterpret_cast<char*>(d.raw.data()), count * sizeof(double));
  if (!in) throw std::runtime_error("read_spsf: truncated file " + path);
  return d;
}

}  // namespace spinlab
