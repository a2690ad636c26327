#pragma once

// Orbit census under a cyclic symmetry P: geometric distinctness, P-images,
// P-cyclic symmetry y(t + τ/k) = P^l y(t), and the symmetric / asymmetric
// bookkeeping S = s1 + 2 s2 (with s2 = s3 + 2 s4 for the P^2 refinement).

#include <optional>
#include <utility>
#include <vector>

#include "closedchar/characteristic.hpp"

namespace closedchar {

struct CensusTolerances {
  double distance_rel = 1e-4;  ///< geometric distinctness, relative to the diameter
  double match_rel = 1e-6;     ///< y(s) = P y(0) matching, relative to the diameter
  double time_tol = 1e-5;      ///< |s k / τ - j| for the shift s = j τ / k
};

/// Hausdorff distance of the traces above distance_rel * diameter.
bool geometrically_distinct(const ClosedCharacteristic& a, const ClosedCharacteristic& b,
                            const CensusTolerances& tol = {});

/// Samples mapped by P, residual re-certified. Throws NumericalError when the
/// residual grows beyond twice the original.
ClosedCharacteristic p_image(const ClosedCharacteristic& orbit, const Mat& p);

/// l in [1, k-1] with y(t + τ/k) = P^l y(t) on the whole sample grid, or
/// nothing when P y(0) is not on the trace. Throws NumericalError when the
/// matching shift is not j τ / k with gcd(j, k) = 1 or the identity fails.
std::optional<int> detect_p_cyclic(const ClosedCharacteristic& orbit, const CyclicSymmetry& sym,
                                   const CensusTolerances& tol = {});

struct CensusEntry {
  ClosedCharacteristic orbit;
  std::optional<int> p_cyclic;
  bool appended = false;       ///< added as a P-power image, not found by the solver
  int p_class = 0;             ///< index of the P-orbit class
  bool dichotomy = true;       ///< exactly one of: P-cyclic, or P-image distinct
};

struct P2Refinement {
  int s3 = 0;
  int s4 = 0;
  int unpaired = 0;
};

struct OrbitCensus {
  std::vector<CensusEntry> orbits;
  std::vector<int> symmetric;                         ///< indices, s1 of them
  std::vector<std::pair<int, int>> asymmetric_pairs;  ///< (y, P y), s2 of them
  std::vector<int> unpaired;  ///< asymmetric members left over in classes of odd size
  std::optional<P2Refinement> p2;  ///< present when k >= 3
  int order_k = 2;

  int s1() const { return static_cast<int>(symmetric.size()); }
  int s2() const { return static_cast<int>(asymmetric_pairs.size()); }
  int total() const { return static_cast<int>(orbits.size()); }
  /// Indices of one representative per symmetric orbit and per pair.
  std::vector<int> representatives() const;
};

/// Deduplicates by trace, closes the set under P, classifies each orbit and
/// orders the result by (τ, trace key).
OrbitCensus build_census(const std::vector<ClosedCharacteristic>& orbits, const CyclicSymmetry& sym,
                         const CensusTolerances& tol = {});

/// {"orbits":[...], "s1","s2","s3","s4","S"}; samples included when asked.
nlohmann::json to_json(const OrbitCensus& census, bool with_samples);

}  // namespace closedchar
