#pragma once

// Closed characteristics on Σ, stored as uniform samples of the solution of
//
//   ẏ = J H_α'(y),  H_α(y) = 1,
//
// over one minimal period τ. Reparametrising by s = α t gives the
// characteristic ẏ = J N_Σ(y) with N_Σ = ∇j, whose period is α τ.

#include <memory>
#include <vector>

#include "closedchar/model.hpp"

namespace closedchar {

struct ClosedCharacteristic {
  double tau = 0.0;                 ///< minimal period of ẏ = J H_α'(y)
  int multiplicity_m = 1;           ///< iterate index of the generating critical loop
  std::vector<Vec> samples;         ///< y(k τ / K), k = 0..K-1
  std::shared_ptr<const HypersurfaceModel> model;
  double residual = 0.0;            ///< max |dy/ds - J ∇j(y)| in the s = α t time
  double closure_defect = 0.0;      ///< |y(τ) - y(0)| after re-integration
  double energy_defect = 0.0;       ///< max |H_α(y) - 1|

  double tau_characteristic() const { return model->alpha() * tau; }
  nlohmann::json to_json() const;
};

struct SampleDefects {
  double residual = 0.0;
  double energy = 0.0;
};

/// Trigonometric interpolant of a uniformly sampled closed curve,
/// parametrised by the period fraction s ∈ [0, 1).
class TraceCurve {
 public:
  explicit TraceCurve(const std::vector<Vec>& samples);
  Vec operator()(double s) const;
  int size() const { return k_; }
  const std::vector<Vec>& samples() const { return samples_; }
  /// min over s of |curve(s) - p|, with the minimising s.
  double distance_to(const Vec& p, double* s_min = nullptr) const;

 private:
  int k_;
  std::vector<Vec> samples_;
  std::vector<CVec> coeffs_;  ///< frequencies 0..K/2
};

/// Symmetric Hausdorff distance between the traces of two sampled closed
/// curves, refined on the trigonometric interpolants.
double hausdorff_distance(const TraceCurve& a, const TraceCurve& b);
double trace_distance(const ClosedCharacteristic& a, const ClosedCharacteristic& b);

/// Spectral derivative of a periodic sample set of period tau.
std::vector<Vec> spectral_derivative(const std::vector<Vec>& samples, double tau);

/// Residual and energy defects of a sampled loop of period tau.
SampleDefects sample_defects(const HypersurfaceModel& model, double tau,
                             const std::vector<Vec>& samples);

/// The n planar circles of an ellipsoid with distinct radii; throws
/// DomainError for repeated radii or a non-ellipsoid model.
std::vector<ClosedCharacteristic> known_orbits(std::shared_ptr<const HypersurfaceModel> model,
                                               int samples = 512);

}  // namespace closedchar
