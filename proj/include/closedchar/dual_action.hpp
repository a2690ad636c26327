#pragma once

// Mean-zero loops u: S^1 → R^{2n} as truncated real Fourier series
//
//   u(t) = Σ_{k=1..N} a_k cos 2πkt + b_k sin 2πkt
//
// and the dual action Φ(u) = ∫ ½ Ju·Mu + H*(-Ju) dt with Mu' = u, ∫ Mu = 0.
// In coefficients the quadratic term is Σ_k a_k^T J b_k / (4πk).

#include <cmath>

#include "closedchar/model.hpp"

namespace closedchar {

class DualLoop {
 public:
  DualLoop(int n, int n_fourier);
  DualLoop(int n, int n_fourier, Vec coeffs);

  int half_dim() const { return n_; }
  int n_fourier() const { return nf_; }
  /// Packed [a_1, b_1, a_2, b_2, ...], each block of size 2n.
  const Vec& coeffs() const { return c_; }
  Vec& coeffs() { return c_; }

  auto a(int k) { return c_.segment(offset(k, 0), 2 * n_); }
  auto b(int k) { return c_.segment(offset(k, 1), 2 * n_); }
  auto a(int k) const { return c_.segment(offset(k, 0), 2 * n_); }
  auto b(int k) const { return c_.segment(offset(k, 1), 2 * n_); }
  /// Complex coefficient at frequency k (k != 0): u = Σ_k c_k e^{2πikt}.
  CVec complex_coeff(int k) const;

  Vec operator()(double t) const;
  /// Mu: coefficient k mapped by 1/(2πik).
  DualLoop primitive() const;
  DualLoop derivative() const;
  /// Pointwise linear map t ↦ L u(t).
  DualLoop mapped(const Mat& l) const;
  /// Time shift t ↦ u(t + s).
  DualLoop shifted(double s) const;
  /// ∫ u·v dt.
  double l2_dot(const DualLoop& other) const;
  double l2_norm() const { return std::sqrt(l2_dot(*this)); }
  /// Same loop with truncation order n_fourier (zero padding or truncation).
  DualLoop resized(int n_fourier) const;

  int offset(int k, int part) const { return ((k - 1) * 2 + part) * 2 * n_; }

 private:
  int n_;
  int nf_;
  Vec c_;
};

/// Samples of Φ restricted to the trapezoidal rule on Q equispaced nodes.
class DualAction {
 public:
  DualAction(const HypersurfaceModel& model, int n_fourier, int quad_points = 0);

  int n_fourier() const { return nf_; }
  int quad_points() const { return q_; }
  const HypersurfaceModel& model() const { return model_; }

  double value(const DualLoop& u) const;
  /// Gradient with respect to the packed coefficients.
  double value_and_coeff_gradient(const DualLoop& u, Vec* grad) const;
  /// L^2 representative of Φ'(u), mean-zero by construction.
  DualLoop gradient(const DualLoop& u) const;
  /// Hessian with respect to the packed coefficients.
  Mat coeff_hessian(const DualLoop& u) const;
  /// Samples u(t_q) as columns, t_q = q/Q.
  Mat samples(const DualLoop& u) const;

 private:
  HypersurfaceModel model_;
  int n_;
  int nf_;
  int q_;
  Mat cos_;  ///< Q x N, cos 2πk t_q
  Mat sin_;
};

double dual_action(const HypersurfaceModel& model, const DualLoop& u, int quad_points = 0);
/// Throws NumericalError when doubling the quadrature changes Φ by more than
/// 1e-8 |Φ|.
double dual_action_checked(const HypersurfaceModel& model, const DualLoop& u, int quad_points = 0);
DualLoop dual_action_gradient(const HypersurfaceModel& model, const DualLoop& u, int quad_points = 0);

}  // namespace closedchar
