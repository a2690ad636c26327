#pragma once

// Convex P-cyclic symmetric hypersurfaces Σ = j^{-1}(1) with H_α = j^α.
//
//   ellipsoid:  j(x)^2 = ρ(x)^2 = Σ_i (x_i^2 + x_{n+i}^2) / r_i^2
//   perturbed:  j(x)^2 = ρ^2 + ε Re(z^h) ρ^{2-h},  z = x_1 + i x_{n+1}
//
// The perturbation is homogeneous of degree 2 and invariant under rotation
// by 2π/h in the (x_1, x_{n+1}) plane.

#include <vector>

#include "closedchar/cyclic.hpp"

namespace closedchar {

enum class ModelKind { Ellipsoid, PerturbedEllipsoid };

struct ConvexityCertificate {
  int samples = 0;
  double min_ratio = 0.0;  ///< min over samples of λ_min(H'') / λ_max(H'') on Σ
};

class HypersurfaceModel {
 public:
  static HypersurfaceModel ellipsoid(std::vector<double> radii_sq, double alpha,
                                     CyclicSymmetry symmetry);
  static HypersurfaceModel perturbed(std::vector<double> radii_sq, double alpha, double epsilon,
                                     int harmonic, CyclicSymmetry symmetry);
  /// {"kind","radii_sq","alpha","symmetry",["epsilon","harmonic"]}.
  static HypersurfaceModel from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  int half_dim() const { return n_; }
  ModelKind kind() const { return kind_; }
  bool is_ellipsoid() const { return kind_ == ModelKind::Ellipsoid; }
  double alpha() const { return alpha_; }
  double beta() const { return alpha_ / (alpha_ - 1.0); }
  const std::vector<double>& radii_sq() const { return radii_sq_; }
  double epsilon() const { return epsilon_; }
  int harmonic() const { return harmonic_; }
  const CyclicSymmetry& symmetry() const { return symmetry_; }
  const ConvexityCertificate& convexity() const { return certificate_; }
  /// max |x - x'| over Σ (ellipsoid: exact; perturbed: sampled).
  double diameter() const { return diameter_; }

  double gauge(const Vec& x) const;
  Vec gauge_grad(const Vec& x) const;
  Mat gauge_hess(const Vec& x) const;

  double hamiltonian(const Vec& x) const;
  Vec ham_grad(const Vec& x) const;
  Mat ham_hess(const Vec& x) const;

  /// j°(v) = sup_{j(x) <= 1} x·v.
  double polar_gauge(const Vec& v) const;
  /// H*(v) = sup_x (x·v - H(x)) = (α-1) α^{-β} j°(v)^β.
  double fenchel(const Vec& v) const;
  /// ∇H*(v), the maximiser x* with ∇H(x*) = v.
  Vec fenchel_grad(const Vec& v) const;
  /// ∇²H*(v) = H''(x*)^{-1}; zero at v = 0.
  Mat fenchel_hess(const Vec& v) const;

  /// Radial projection x / j(x) onto Σ.
  Vec project(const Vec& x) const;

 private:
  HypersurfaceModel(ModelKind kind, std::vector<double> radii_sq, double alpha, double epsilon,
                    int harmonic, CyclicSymmetry symmetry);
  double g(const Vec& x) const;
  Vec g_grad(const Vec& x) const;
  Mat g_hess(const Vec& x) const;
  Vec ellipsoid_fenchel_grad(const Vec& v) const;

  int n_;
  ModelKind kind_;
  double alpha_;
  std::vector<double> radii_sq_;
  Vec dinv_;  ///< diagonal of D = diag(1/r^2, 1/r^2)
  double epsilon_;
  int harmonic_;
  CyclicSymmetry symmetry_;
  ConvexityCertificate certificate_;
  double diameter_ = 0.0;
};

/// Sampled convexity certificate of H_α on Σ.
ConvexityCertificate certify_convexity(const HypersurfaceModel& model, int samples,
                                       unsigned long long seed = 1);

/// Largest ε (to 1e-4) for which the perturbed model passes the sampled
/// convexity certificate.
double convexity_bound_epsilon(std::vector<double> radii_sq, double alpha, int harmonic,
                               const CyclicSymmetry& symmetry, int samples = 4000);

}  // namespace closedchar
