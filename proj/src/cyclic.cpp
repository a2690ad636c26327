#include "closedchar/cyclic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "closedchar/error.hpp"

namespace closedchar {

namespace {

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a;
}

bool multiple_of_two_pi(double a, double tol) {
  const double r = wrap_angle(a);
  return r <= tol || kTwoPi - r <= tol;
}

}  // namespace

Mat rotation_product(const std::vector<double>& angles) {
  if (angles.empty()) throw DomainError("rotation_product: no angles");
  Mat r = rotation(angles.front());
  for (std::size_t i = 1; i < angles.size(); ++i) r = diamond(r, rotation(angles[i]));
  return r;
}

CyclicSymmetry decompose_cyclic(const SymplecticMatrix& P, int k, const CyclicTolerances& tol) {
  if (k < 1) throw DomainError("decompose_cyclic: order k must be positive");
  const int n = P.half_dim();
  const Mat& p = P.matrix();
  const Mat id = Mat::Identity(2 * n, 2 * n);
  const Mat j = standard_j_matrix(n);

  if (op_norm(p.transpose() * p - id) > tol.structure) {
    throw DomainError("decompose_cyclic: P is not orthogonal");
  }
  if (op_norm(p * j - j * p) > tol.structure) {
    throw DomainError("decompose_cyclic: P does not commute with J");
  }
  const double pk_defect = op_norm(P.power(k).matrix() - id);
  if (pk_defect > tol.structure * k) {
    std::ostringstream os;
    os << "decompose_cyclic: |P^" << k << " - I| = " << pk_defect;
    throw DomainError(os.str());
  }

  const CMat u = complex_form(p);
  Eigen::ComplexSchur<CMat> schur(u);
  if (schur.info() != Eigen::Success) throw NumericalError("decompose_cyclic: Schur failed");
  const CMat& t = schur.matrixT();
  const CMat& v = schur.matrixU();

  std::vector<double> raw(n);
  for (int i = 0; i < n; ++i) {
    double a = wrap_angle(std::arg(t(i, i)));
    if (kTwoPi - a <= tol.angle) a = 0.0;
    raw[i] = a;
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return raw[a] < raw[b]; });

  CMat vs(n, n);
  std::vector<double> angles(n);
  for (int i = 0; i < n; ++i) {
    vs.col(i) = v.col(order[i]);
    angles[i] = raw[order[i]];
  }
  for (double a : angles) {
    if (!multiple_of_two_pi(k * a, tol.angle * k)) {
      throw DomainError("decompose_cyclic: angle incompatible with P^k = I");
    }
  }

  Mat q = real_form(vs.adjoint());
  const Mat q_inv = real_form(vs);
  const double defect = op_norm(q * p * q_inv - rotation_product(angles));
  if (defect > tol.normal_form) {
    std::ostringstream os;
    os << "decompose_cyclic: reconstruction defect " << defect << " exceeds " << tol.normal_form;
    throw NumericalError(os.str());
  }
  return CyclicSymmetry{P, k, SymplecticMatrix(std::move(q)), std::move(angles), defect};
}

bool check_ker_condition(const CyclicSymmetry& sym, const CyclicTolerances& tol) {
  for (int l = 1; l < sym.order_k; ++l) {
    for (double a : sym.angles) {
      if (multiple_of_two_pi(l * a, tol.angle * l)) return false;
    }
  }
  return true;
}

CyclicSymmetry rotation_symmetry(int n, int k) {
  if (n < 2) throw DomainError("rotation_symmetry: n must be >= 2");
  if (k < 2) throw DomainError("rotation_symmetry: k must be >= 2");
  const std::vector<double> angles(n, kTwoPi / k);
  SymplecticMatrix p(rotation_product(angles));
  return CyclicSymmetry{p, k, SymplecticMatrix::identity(n), angles, 0.0};
}

CyclicSymmetry symmetry_from_json(const nlohmann::json& j, int n) {
  const std::string type = j.value("type", std::string("rotation"));
  if (!j.contains("k")) throw DomainError("symmetry JSON: missing \"k\"");
  const int k = j.at("k").get<int>();
  if (type == "rotation") return rotation_symmetry(n, k);
  if (type == "matrix") {
    SymplecticMatrix p(matrix_from_json(j.at("matrix")));
    if (p.half_dim() != n) throw DomainError("symmetry JSON: matrix dimension mismatch");
    if (k < 2) throw DomainError("symmetry JSON: k must be >= 2");
    return decompose_cyclic(p, k);
  }
  throw DomainError("symmetry JSON: unknown type \"" + type + "\"");
}

nlohmann::json to_json(const CyclicSymmetry& sym) {
  return {{"type", "matrix"}, {"k", sym.order_k}, {"angles", sym.angles}, {"matrix", to_json(sym.P.matrix())}};
}

}  // namespace closedchar
