#include "closedchar/symplectic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "closedchar/error.hpp"

namespace closedchar {

const SymplecticTolerances& default_tolerances() {
  static const SymplecticTolerances tol{};
  return tol;
}

Mat standard_j_matrix(int n) {
  if (n < 1) throw DomainError("standard_j: n must be >= 1");
  Mat j = Mat::Zero(2 * n, 2 * n);
  j.block(0, n, n, n) = -Mat::Identity(n, n);
  j.block(n, 0, n, n) = Mat::Identity(n, n);
  return j;
}

double op_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

double symplectic_defect(const Mat& m) {
  if (m.rows() != m.cols() || m.rows() % 2 != 0) {
    throw DomainError("symplectic_defect: matrix must be square of even size");
  }
  const Mat j = standard_j_matrix(static_cast<int>(m.rows() / 2));
  return op_norm(m.transpose() * j * m - j);
}

SymplecticMatrix::SymplecticMatrix(Mat entries, const SymplecticTolerances& tol)
    : n_(0), m_(std::move(entries)), defect_(0.0) {
  if (m_.rows() != m_.cols() || m_.rows() == 0 || m_.rows() % 2 != 0) {
    throw DomainError("SymplecticMatrix: expected a non-empty square matrix of even size");
  }
  n_ = static_cast<int>(m_.rows() / 2);
  defect_ = closedchar::symplectic_defect(m_);
  const double bound = tol.symplectic_rel * (1.0 + op_norm(m_));
  if (!(defect_ <= bound)) {
    std::ostringstream os;
    os << "SymplecticMatrix: symplectic defect " << defect_ << " exceeds " << bound;
    throw DomainError(os.str());
  }
  if (!(m_.determinant() > 0.0)) throw DomainError("SymplecticMatrix: det <= 0");
}

SymplecticMatrix::SymplecticMatrix(Mat entries, double defect, Unchecked)
    : n_(static_cast<int>(entries.rows() / 2)), m_(std::move(entries)), defect_(defect) {}

SymplecticMatrix SymplecticMatrix::identity(int n) {
  if (n < 1) throw DomainError("identity: n must be >= 1");
  return SymplecticMatrix(Mat::Identity(2 * n, 2 * n), 0.0, Unchecked{});
}

SymplecticMatrix SymplecticMatrix::inverse() const {
  const Mat j = standard_j_matrix(n_);
  Mat inv = -j * m_.transpose() * j;
  return SymplecticMatrix(std::move(inv), defect_, Unchecked{});
}

SymplecticMatrix SymplecticMatrix::power(int k) const {
  if (k < 0) return inverse().power(-k);
  Mat result = Mat::Identity(dim(), dim());
  Mat base = m_;
  while (k > 0) {
    if (k & 1) result = result * base;
    base = base * base;
    k >>= 1;
  }
  const double d = closedchar::symplectic_defect(result);
  return SymplecticMatrix(std::move(result), d, Unchecked{});
}

SymplecticMatrix operator*(const SymplecticMatrix& a, const SymplecticMatrix& b) {
  if (a.n_ != b.n_) throw DomainError("SymplecticMatrix product: dimension mismatch");
  Mat p = a.m_ * b.m_;
  const double d = symplectic_defect(p);
  return SymplecticMatrix(std::move(p), d, SymplecticMatrix::Unchecked{});
}

SymplecticMatrix standard_j(int n) { return SymplecticMatrix(standard_j_matrix(n)); }

Mat diamond(const Mat& a, const Mat& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() % 2 || b.rows() % 2) {
    throw DomainError("diamond: operands must be square of even size");
  }
  const Eigen::Index m1 = a.rows() / 2;
  const Eigen::Index m2 = b.rows() / 2;
  const Eigen::Index m = m1 + m2;
  Mat r = Mat::Zero(2 * m, 2 * m);
  // Row/column blocks: A at (0,0), B at (0,m), C at (m,0), D at (m,m).
  r.block(0, 0, m1, m1) = a.block(0, 0, m1, m1);
  r.block(0, m, m1, m1) = a.block(0, m1, m1, m1);
  r.block(m, 0, m1, m1) = a.block(m1, 0, m1, m1);
  r.block(m, m, m1, m1) = a.block(m1, m1, m1, m1);
  r.block(m1, m1, m2, m2) = b.block(0, 0, m2, m2);
  r.block(m1, m + m1, m2, m2) = b.block(0, m2, m2, m2);
  r.block(m + m1, m1, m2, m2) = b.block(m2, 0, m2, m2);
  r.block(m + m1, m + m1, m2, m2) = b.block(m2, m2, m2, m2);
  return r;
}

SymplecticMatrix diamond(const SymplecticMatrix& a, const SymplecticMatrix& b) {
  return SymplecticMatrix(diamond(a.matrix(), b.matrix()));
}

int nullity_omega(const Mat& m, Complex omega, const SymplecticTolerances& tol) {
  const CMat shifted = m.cast<Complex>() - omega * CMat::Identity(m.rows(), m.cols());
  Eigen::JacobiSVD<CMat> svd(shifted);
  const double cutoff = tol.rank_rel * std::max(1.0, op_norm(m));
  const auto& sv = svd.singularValues();
  return static_cast<int>((sv.array() <= cutoff).count());
}

int nullity_omega(const SymplecticMatrix& m, Complex omega, const SymplecticTolerances& tol) {
  return nullity_omega(m.matrix(), omega, tol);
}

int SpectrumReport::total_multiplicity() const {
  int s = 0;
  for (const auto& e : eigenvalues) s += e.multiplicity;
  return s;
}

namespace {

double positive_arg(Complex z) {
  double a = std::arg(z);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a -= kTwoPi;
  return a;
}

}  // namespace

SpectrumReport spectrum(const Mat& m, const SymplecticTolerances& tol) {
  Eigen::EigenSolver<Mat> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw NumericalError("spectrum: eigensolver did not converge");
  const CVec ev = es.eigenvalues();
  const int size = static_cast<int>(ev.size());

  // Single-linkage clustering with a radius relative to the eigenvalue scale.
  std::vector<int> parent(size);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < size; ++i) {
    for (int j = i + 1; j < size; ++j) {
      const double scale = std::max(1.0, std::max(std::abs(ev(i)), std::abs(ev(j))));
      if (std::abs(ev(i) - ev(j)) <= tol.cluster * scale) parent[find(i)] = find(j);
    }
  }
  std::vector<std::vector<int>> groups;
  std::vector<int> slot(size, -1);
  for (int i = 0; i < size; ++i) {
    const int r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[slot[r]].push_back(i);
  }

  SpectrumReport report;
  for (const auto& g : groups) {
    Complex mean{0.0, 0.0};
    for (int i : g) mean += ev(i);
    mean /= static_cast<double>(g.size());
    if (std::abs(mean.imag()) <= tol.cluster * std::max(1.0, std::abs(mean))) mean.imag(0.0);
    report.eigenvalues.push_back({mean, static_cast<int>(g.size())});
  }
  std::sort(report.eigenvalues.begin(), report.eigenvalues.end(),
            [](const Eigenvalue& a, const Eigenvalue& b) {
              const double aa = positive_arg(a.value), ab = positive_arg(b.value);
              if (aa != ab) return aa < ab;
              return std::abs(a.value) < std::abs(b.value);
            });
  for (const auto& e : report.eigenvalues) {
    const double d = std::abs(std::abs(e.value) - 1.0);
    if (d <= tol.circle) {
      report.unit_circle_part.push_back(e);
    } else if (d <= 2.0 * tol.circle) {
      std::ostringstream os;
      os << "spectrum: eigenvalue cluster " << e.value << " lies in the ambiguity band around"
         << " the unit circle (distance " << d << ")";
      throw NumericalError(os.str());
    }
  }
  return report;
}

SpectrumReport spectrum(const SymplecticMatrix& m, const SymplecticTolerances& tol) {
  return spectrum(m.matrix(), tol);
}

int elliptic_height(const SymplecticMatrix& m, const SymplecticTolerances& tol) {
  int e = 0;
  for (const auto& ev : spectrum(m, tol).unit_circle_part) e += ev.multiplicity;
  return e;
}

SymplecticMatrix normal_form_d(double lambda) {
  if (lambda != 2.0 && lambda != -2.0) throw DomainError("D(λ): λ must be ±2");
  Mat d(2, 2);
  d << lambda, 0.0, 0.0, 1.0 / lambda;
  return SymplecticMatrix(d);
}

SymplecticMatrix normal_form_n1(double lambda, double b) {
  if (lambda != 1.0 && lambda != -1.0) throw DomainError("N1(λ,b): λ must be ±1");
  if (b != 1.0 && b != -1.0 && b != 0.0) throw DomainError("N1(λ,b): b must be in {-1,0,1}");
  Mat n(2, 2);
  n << lambda, b, 0.0, lambda;
  return SymplecticMatrix(n);
}

Mat rotation(double theta) {
  Mat r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

namespace {

void require_normal_form_angle(double theta, const char* what) {
  const bool in_range = (theta > 0.0 && theta < kPi) || (theta > kPi && theta < kTwoPi);
  if (!in_range) throw DomainError(std::string(what) + ": θ must lie in (0,π)∪(π,2π)");
}

}  // namespace

SymplecticMatrix normal_form_r(double theta) {
  require_normal_form_angle(theta, "R(θ)");
  return SymplecticMatrix(rotation(theta));
}

SymplecticMatrix normal_form_n2(double theta, const Eigen::Matrix2d& b) {
  require_normal_form_angle(theta, "N2(ω,B)");
  if (b(0, 1) == b(1, 0)) throw DomainError("N2(ω,B): requires b2 != b3");
  Mat m = Mat::Zero(4, 4);
  const Mat r = rotation(theta);
  m.block(0, 0, 2, 2) = r;
  m.block(0, 2, 2, 2) = b;
  m.block(2, 2, 2, 2) = r;
  return SymplecticMatrix(m);
}

Mat real_form(const CMat& u) {
  const Eigen::Index n = u.rows();
  Mat r(2 * n, 2 * n);
  r.block(0, 0, n, n) = u.real();
  r.block(0, n, n, n) = -u.imag();
  r.block(n, 0, n, n) = u.imag();
  r.block(n, n, n, n) = u.real();
  return r;
}

CMat complex_form(const Mat& m) {
  const Eigen::Index n = m.rows() / 2;
  CMat u(n, n);
  u.real() = m.block(0, 0, n, n);
  u.imag() = m.block(n, 0, n, n);
  return u;
}

nlohmann::json to_json(const Mat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return {{"n", m.rows() / 2}, {"rows", std::move(rows)}};
}

Mat matrix_from_json(const nlohmann::json& j) {
  if (!j.contains("rows") || !j.at("rows").is_array()) {
    throw DomainError("matrix JSON: missing \"rows\" array");
  }
  const auto& rows = j.at("rows");
  const auto size = static_cast<Eigen::Index>(rows.size());
  if (size == 0 || size % 2 != 0) throw DomainError("matrix JSON: row count must be even");
  if (j.contains("n") && j.at("n").get<Eigen::Index>() * 2 != size) {
    throw DomainError("matrix JSON: \"n\" does not match row count");
  }
  Mat m(size, size);
  for (Eigen::Index i = 0; i < size; ++i) {
    const auto& row = rows.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != size) {
      throw DomainError("matrix JSON: matrix must be square");
    }
    for (Eigen::Index c = 0; c < size; ++c) m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

}  // namespace closedchar
