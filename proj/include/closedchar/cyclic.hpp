#pragma once

// Cyclic symplectic orthogonal symmetries P with P^k = I and their
// rotation normal form Q P Q^{-1} = R(θ_1) ⋄ ... ⋄ R(θ_n).

#include <vector>

#include "closedchar/symplectic.hpp"

namespace closedchar {

struct CyclicTolerances {
  double structure = 1e-10;  ///< |P^T P - I|, |PJ - JP|, |P^k - I|
  double normal_form = 1e-9; ///< reconstruction bound for Q P Q^{-1}
  double angle = 1e-8;       ///< equality of angles mod 2π
};

struct CyclicSymmetry {
  SymplecticMatrix P;
  int order_k;
  SymplecticMatrix Q;
  std::vector<double> angles;  ///< sorted ascending, each in [0, 2π)
  double reconstruction_defect;
};

/// ⋄-product R(θ_1) ⋄ ... ⋄ R(θ_n).
Mat rotation_product(const std::vector<double>& angles);

/// Unitary diagonalisation through the complex structure. Throws DomainError
/// when P is not orthogonal, does not commute with J, or P^k != I.
CyclicSymmetry decompose_cyclic(const SymplecticMatrix& P, int k,
                                const CyclicTolerances& tol = {});

/// True iff l θ_i is not in 2πZ for all 1 <= l < k and all i.
bool check_ker_condition(const CyclicSymmetry& sym, const CyclicTolerances& tol = {});

/// P = R(2π/k) ⋄ ... ⋄ R(2π/k), n >= 2, k >= 2.
CyclicSymmetry rotation_symmetry(int n, int k);

/// {"type":"rotation","k":k} (needs n) or {"type":"matrix","matrix":{...},"k":k}.
CyclicSymmetry symmetry_from_json(const nlohmann::json& j, int n);
nlohmann::json to_json(const CyclicSymmetry& sym);

}  // namespace closedchar
