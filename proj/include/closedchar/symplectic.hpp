#pragma once

// Linear symplectic algebra on R^{2n} with the standard complex structure
//
//   J = [ 0  -I_n ]
//       [ I_n  0  ]
//
// Coordinates are ordered (q_1..q_n, p_1..p_n); the diamond product
// interleaves blocks so that M1 ⋄ M2 acts on (q_1, q_2, p_1, p_2) as
// M1 on (q_1, p_1) and M2 on (q_2, p_2).

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

namespace closedchar {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Numerical tolerances for the symplectic layer. None of these come from
/// the mathematics; they are surfaced so callers can tighten or relax them.
struct SymplecticTolerances {
  double symplectic_rel = 1e-10;  ///< |M^T J M - J| <= symplectic_rel * (1 + |M|)
  double rank_rel = 1e-8;         ///< singular value cut-off relative to |M|
  double circle = 1e-7;           ///< | |lambda| - 1 | band for the unit circle
  double cluster = 1e-5;          ///< eigenvalue clustering radius
};

const SymplecticTolerances& default_tolerances();

/// Standard complex structure J of half-dimension n.
Mat standard_j_matrix(int n);

/// Operator 2-norm.
double op_norm(const Mat& m);

/// Real 2n x 2n matrix certified to be symplectic at construction.
class SymplecticMatrix {
 public:
  /// Validates M^T J M = J and det M > 0; throws DomainError otherwise.
  explicit SymplecticMatrix(Mat entries,
                            const SymplecticTolerances& tol = default_tolerances());

  static SymplecticMatrix identity(int n);

  int half_dim() const { return n_; }
  int dim() const { return 2 * n_; }
  const Mat& matrix() const { return m_; }
  double symplectic_defect() const { return defect_; }

  /// Symplectic inverse -J M^T J (never a general inversion).
  SymplecticMatrix inverse() const;
  SymplecticMatrix power(int k) const;

  friend SymplecticMatrix operator*(const SymplecticMatrix& a, const SymplecticMatrix& b);

 private:
  struct Unchecked {};
  SymplecticMatrix(Mat entries, double defect, Unchecked);

  int n_;
  Mat m_;
  double defect_;
};

/// |M^T J M - J| in the operator norm.
double symplectic_defect(const Mat& m);

SymplecticMatrix standard_j(int n);

/// Diamond product of two symplectic matrices.
SymplecticMatrix diamond(const SymplecticMatrix& a, const SymplecticMatrix& b);
/// Diamond product on raw square matrices of even size (paths use this).
Mat diamond(const Mat& a, const Mat& b);

/// ν_ω(M) = dim_C ker(M - ωI), by singular-value counting.
int nullity_omega(const Mat& m, Complex omega,
                  const SymplecticTolerances& tol = default_tolerances());
int nullity_omega(const SymplecticMatrix& m, Complex omega,
                  const SymplecticTolerances& tol = default_tolerances());

struct Eigenvalue {
  Complex value;
  int multiplicity = 1;
};

struct SpectrumReport {
  std::vector<Eigenvalue> eigenvalues;       ///< clustered, sorted by (arg, modulus)
  std::vector<Eigenvalue> unit_circle_part;  ///< clusters with | |λ|-1 | <= tol.circle
  int total_multiplicity() const;
};

/// Clustered spectrum. Throws NumericalError when a cluster sits inside the
/// ambiguity band (tol.circle, 2 tol.circle] around the unit circle.
SpectrumReport spectrum(const Mat& m, const SymplecticTolerances& tol = default_tolerances());
SpectrumReport spectrum(const SymplecticMatrix& m,
                        const SymplecticTolerances& tol = default_tolerances());

/// Total algebraic multiplicity of eigenvalues on the unit circle.
int elliptic_height(const SymplecticMatrix& m,
                    const SymplecticTolerances& tol = default_tolerances());

// Basic normal forms.
enum class NormalFormKind { D, N1, R, N2 };

/// D(λ), λ = ±2.
SymplecticMatrix normal_form_d(double lambda);
/// N1(λ, b), λ = ±1, b ∈ {-1, 0, 1}.
SymplecticMatrix normal_form_n1(double lambda, double b);
/// R(θ), θ ∈ (0, π) ∪ (π, 2π).
SymplecticMatrix normal_form_r(double theta);
/// N2(e^{iθ}, B) = [[R(θ), B], [0, R(θ)]] with b2 != b3. The literal matrix
/// is symplectic only when B^T R(θ) is symmetric; that is validated.
SymplecticMatrix normal_form_n2(double theta, const Eigen::Matrix2d& b);

/// Rotation R(θ) for any θ (no range restriction); used for symmetries.
Mat rotation(double theta);

/// Real 2n x 2n form of a complex n x n matrix U = A + iB: [[A, -B], [B, A]].
Mat real_form(const CMat& u);
/// Inverse of real_form for matrices commuting with J.
CMat complex_form(const Mat& m);

nlohmann::json to_json(const Mat& m);
Mat matrix_from_json(const nlohmann::json& j);

}  // namespace closedchar
