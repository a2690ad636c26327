#pragma once

// Symplectic paths γ:[0,τ] → Sp(2n) with γ(0) = I, given by an evaluator
// returning γ(t) and γ'(t). The generator A(t) = -J γ'(t) γ(t)^{-1} is
// symmetric; the path is "convex" when A(t) is positive definite.

#include <functional>
#include <memory>
#include <vector>

#include "closedchar/symplectic.hpp"

namespace closedchar {

struct PathPoint {
  Mat value;
  Mat velocity;
};

class SymplecticPath {
 public:
  using Evaluator = std::function<PathPoint(double)>;

  /// `rate_hint` is an upper estimate of max |A(t)| used to size the
  /// sampling grid; pass 0 to have it estimated.
  SymplecticPath(int n, double tau, Evaluator eval, bool convex_certified,
                 double rate_hint = 0.0);

  int half_dim() const { return n_; }
  double tau() const { return tau_; }
  bool convex_certified() const { return convex_; }

  PathPoint at(double t) const;
  Mat value(double t) const { return at(t).value; }
  const Mat& endpoint() const { return *end_; }
  SymplecticMatrix monodromy() const { return SymplecticMatrix(*end_); }

  /// Generator A(t) = -J γ'(t) γ(t)^{-1}, symmetrised.
  Mat generator(double t) const;

  /// Uniform grid on [0,τ] whose spacing keeps every rotation angle of
  /// consecutive samples below π/4. Always contains 0 and τ.
  const std::vector<double>& grid() const { return grid_->t; }
  /// max |A(t)| over grid(); max |γ'(t)|_F over grid().
  double max_rate() const { return grid_->max_rate; }
  double max_speed() const { return grid_->max_speed; }

  SymplecticPath restrict(double t_end) const;
  /// t ↦ Q γ(t) Q^{-1} for symplectic Q.
  SymplecticPath conjugate(const SymplecticMatrix& q) const;

  /// Exponential path exp(t J A) for constant symmetric A.
  static SymplecticPath autonomous(const Mat& a, double tau);
  /// A convex path from I to M on [0,τ] (polar factor geodesic plus enough
  /// full turns of exp(2π t J) to make the generator positive definite).
  static SymplecticPath positive_path_to(const SymplecticMatrix& m, double tau = 1.0);
  /// Geodesic interpolation through samples (t_k, γ_k), t_0 = 0, γ_0 = I.
  /// Convexity is certified only if `claim_convex` and every interpolating
  /// generator is positive definite.
  static SymplecticPath from_samples(const std::vector<double>& t, const std::vector<Mat>& values,
                                     bool claim_convex);

 private:
  struct Grid {
    std::vector<double> t;
    double max_rate = 0.0;
    double max_speed = 0.0;
  };
  void build_grid(double rate_hint);

  int n_;
  double tau_;
  Evaluator eval_;
  bool convex_;
  std::shared_ptr<const Mat> end_;
  std::shared_ptr<const Grid> grid_;
};

/// The P-iteration γ_P^m on [0, mτ]:
///   γ_P^m(t) = P^j γ(t - jτ) (P^{-1} γ(τ))^j,  jτ <= t <= (j+1)τ.
/// Convexity is inherited when P is orthogonal and commutes with J.
SymplecticPath iterate_path(const SymplecticPath& gamma, const SymplecticMatrix& p, int m);

/// {"n","tau","convex_certified","samples":[{"t","matrix"}]}.
nlohmann::json path_to_json(const SymplecticPath& path, int min_samples = 64);
SymplecticPath path_from_json(const nlohmann::json& j);

}  // namespace closedchar
