#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

namespace spinlab {

using cplx = std::complex<double>;

/// Flat square torus [0,L)^2 with a uniform N x N grid and a base point
/// at a grid node. Node (ix, iy) sits at (ix*h, iy*h), index iy*N + ix.
struct TorusDomain {
  int N;
  double L;
  std::array<double, 2> base;

  explicit TorusDomain(int N_, double L_ = 2.0 * M_PI,
                       std::array<double, 2> base_ = {0.0, 0.0});

  double h() const { return L / N; }
  long nodes() const { return static_cast<long>(N) * N; }
  double coord(int i) const { return L * i / N; }

  /// Distance from (x, y) to the base point, minimized over the 3x3 block
  /// of lattice translates (the torus min-image distance).
  double min_image_radius(double x, double y) const;
};

/// One of the four spin structures, encoded as Fourier twists per generator.
/// (0,0) is the trivial structure (periodic spinors, nontrivial Dirac kernel).
struct SpinStructure {
  double d1 = 0.0;
  double d2 = 0.0;

  SpinStructure() = default;
  SpinStructure(double a, double b);

  bool trivial() const { return d1 == 0.0 && d2 == 0.0; }
  std::string csv_token() const;  // "0;0", "0.5;0", ...
};

/// Strictly positive conformal weight f on the torus. The metric under
/// study is f^2 * (flat); all operators consume f through grid samples.
class ConformalFactor {
 public:
  enum class Kind { Family, Sphere, Constant, Sampled };

  /// Piecewise bubble profile: eps^2/(eps^2+r^2) for r <= alpha, frozen at
  /// its boundary value beyond; r is the min-image distance to the base
  /// point. Continuous, C^0 only at r = alpha. Requires 0 < eps <= alpha.
  static ConformalFactor family(double alpha, double eps);

  /// Round-sphere chart factor 2/(1+r^2) (chart use; not torus-periodic).
  static ConformalFactor sphere();

  static ConformalFactor constant(double c);

  /// Positive samples on the N x N grid, node order iy*N + ix.
  static ConformalFactor sampled(Eigen::VectorXd values, int N);

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double eps() const { return eps_; }

  /// Pointwise evaluation (Sampled factors only at grid nodes).
  double operator()(const TorusDomain& dom, double x, double y) const;

  /// All grid samples, node order iy*N + ix. Validates alpha < L/2 for the
  /// Family kind (beyond that the bubble overlaps its own translates).
  Eigen::VectorXd grid_values(const TorusDomain& dom) const;

 private:
  ConformalFactor() = default;
  Kind kind_ = Kind::Constant;
  double alpha_ = 0.0, eps_ = 0.0, c_ = 1.0;
  Eigen::VectorXd samples_;
  int sample_n_ = 0;
};

/// Riemannian area of f^2 * (flat) : integral of f^2, trapezoid rule
/// (spectrally accurate on the periodic grid).
double volume(const ConformalFactor& f, const TorusDomain& dom);
double volume_of_samples(const Eigen::VectorXd& f, const TorusDomain& dom);

/// Complex scalar field on the grid, node order iy*N + ix.
struct ScalarField {
  int N = 0;
  Eigen::VectorXcd data;
};

/// Two-component spinor field; component planes are contiguous:
/// data[c * N^2 + node] for c = 0, 1.
struct SpinorField {
  int N = 0;
  Eigen::VectorXcd data;

  static SpinorField zero(int N);
  long nodes() const { return static_cast<long>(N) * N; }
};

/// Binary field dump. 16-byte header: magic "SPSF", version u16, N u16,
/// components u16, 6 reserved bytes; then row-major little-endian f64 node
/// data (components = 1: one real per node; components = 2: complex
/// 2-spinor per node, real/imaginary interleaved).
void write_spsf(const std::string& path, const ScalarField& field);
void write_spsf(const std::string& path, const SpinorField& field);
void write_spsf_real(const std::string& path, const Eigen::VectorXd& values, int N);

struct SpsfData {
  int N = 0;
  int components = 0;
  Eigen::VectorXd raw;  // doubles in file order
};
SpsfData read_spsf(const std::string& path);

}  // namespace spinlab
