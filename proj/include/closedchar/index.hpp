#pragma once

// Maslov-type ω-indices of convex symplectic paths, computed by counting
// interior degeneracies:
//
//   i_ω(γ)   = n [ω = 1] + Σ_{0<s<τ} ν_ω(γ(s))
//   i_ω^P(γ) = ν_ω(P^{-1}) + Σ_{0<s<τ} dim ker(γ(s) - ωP)
//
// Degeneracy times are the zeros of h(s) = σ_min(γ(s) - T). Since h is
// Lipschitz with constant max|γ'|, an interval [a,b] can contain a zero only
// if h(a) + h(b) <= L (b - a); everything else is discarded, the rest is
// subdivided down to a floor and polished by golden-section search.

#include <map>
#include <vector>

#include "closedchar/path.hpp"

namespace closedchar {

struct IndexOptions {
  SymplecticTolerances tol = default_tolerances();
  double floor_rel = 1e-10;       ///< refinement floor, relative to τ
  double merge_rel = 1e-7;        ///< degeneracies closer than this are counted jointly
  double unresolved_rel = 1e-6;   ///< a degenerate stretch longer than this is an error
  double lipschitz_safety = 2.5;  ///< L = safety * max |γ'|_F over the grid
  std::vector<double> eps_sweep{1e-2, 1e-3, 1e-4};
};

const IndexOptions& default_index_options();

struct Crossing {
  double s;
  int multiplicity;
};

/// Interior zeros of σ_min(γ(s) - T) with their kernel dimensions.
std::vector<Crossing> find_crossings(const SymplecticPath& path, const CMat& target,
                                     const IndexOptions& opt = default_index_options());

int omega_index_convex(const SymplecticPath& path, Complex omega,
                       const IndexOptions& opt = default_index_options());
int p_omega_index_convex(const SymplecticPath& path, const SymplecticMatrix& p, Complex omega,
                         const IndexOptions& opt = default_index_options());
/// dim_C ker(M - ωP).
int p_nullity(const Mat& m, const SymplecticMatrix& p, Complex omega,
              const SymplecticTolerances& tol = default_tolerances());

struct SplittingNumbers {
  int plus = 0;
  int minus = 0;
  friend bool operator==(const SplittingNumbers&, const SplittingNumbers&) = default;
};

/// S^±(ω) = i_{ω e^{±iε}} - i_ω for a decreasing ε sweep; the first two
/// consecutive agreeing values are returned.
SplittingNumbers splitting_numbers_perturbative(const SymplecticPath& path, Complex omega,
                                                const IndexOptions& opt = default_index_options());
/// Splitting numbers of a matrix, through a convex path ending at it.
SplittingNumbers splitting_numbers(const SymplecticMatrix& m, Complex omega,
                                   const IndexOptions& opt = default_index_options());
/// (P,ω)-splitting numbers by the same sweep on the (P,ω)-index, cross-checked
/// against S_{P^{-1}M}(ω) - S_{P^{-1}}(ω); a mismatch throws NumericalError.
SplittingNumbers p_splitting_numbers(const SymplecticPath& path, const SymplecticMatrix& p,
                                     Complex omega,
                                     const IndexOptions& opt = default_index_options());

struct BottResult {
  int lhs = 0;
  int rhs = 0;
  int nullity_lhs = 0;
  int nullity_rhs = 0;
  bool holds() const { return lhs == rhs && nullity_lhs == nullity_rhs; }
};

/// i_z^{P^m}(γ_P^m) against Σ_{ω^m=z} i_ω^P(γ), and the nullity version.
BottResult bott_check(const SymplecticPath& path, const SymplecticMatrix& p, int m, Complex z,
                      const IndexOptions& opt = default_index_options());
/// Ordinary version: i_z(γ^m) against Σ_{ω^m=z} i_ω(γ).
BottResult bott_check_plain(const SymplecticPath& path, int m, Complex z,
                            const IndexOptions& opt = default_index_options());

/// θ ↦ i_{e^{iθ}}(γ). Constant on the arcs between unit-circle eigenvalue
/// angles of γ(τ) (0 is always a breakpoint).
struct IndexFunction {
  int n = 0;
  std::vector<double> angles;        ///< breakpoints in [0, 2π), ascending
  std::vector<int> at_angle;         ///< value at each breakpoint
  std::vector<int> nullity_at_angle; ///< ν at each breakpoint
  std::vector<int> on_arc;           ///< value on (angles[i], angles[i+1]) cyclically
  double match_tol = 1e-9;

  int value(double theta) const;
  int nullity(double theta) const;
  /// (1/2π) ∫ i_{e^{iθ}} dθ.
  double circle_average() const;
};

IndexFunction index_function(const SymplecticPath& path,
                             const IndexOptions& opt = default_index_options());

struct IterateIndex {
  int i = 0;
  int nu = 0;
};

struct IndexData {
  int n = 0;
  int i_1 = 0;
  int nu_1 = 0;
  int splitting_plus = 0;
  int splitting_minus = 0;
  double mean_index = 0.0;            ///< circle average of the index function
  double mean_index_ratio = 0.0;      ///< i(m_max) / m_max
  double mean_index_richardson = 0.0; ///< (i(m_max) - i(m_max/2)) / (m_max - m_max/2)
  bool mean_index_flag = false;       ///< richardson differs from mean_index by > 0.05
  std::map<int, IterateIndex> iterates;
  int elliptic_height = 0;
  bool hyperbolic = false;
};

/// i(y,m) = i_1(γ^m) and ν(y,m) for m <= m_max through the Bott formula,
/// plus splitting numbers at 1, mean index and Floquet data of γ(τ).
IndexData index_iterates(const SymplecticPath& path, int m_max,
                         const IndexOptions& opt = default_index_options());

nlohmann::json to_json(const IndexData& d);
IndexData index_data_from_json(const nlohmann::json& j);

/// Parses "a+bi", "a-bi", "a", "bi", "i", "-1".
Complex parse_complex(const std::string& s);

}  // namespace closedchar
