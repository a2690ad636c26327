#include "closedchar/dual_action.hpp"

#include "closedchar/error.hpp"

namespace closedchar {

namespace {

using Strided = Eigen::Map<const Mat, 0, Eigen::OuterStride<>>;

// Coefficient blocks as 2n x N matrices.
Strided a_block(const Vec& c, int n, int nf) {
  return Strided(c.data(), 2 * n, nf, Eigen::OuterStride<>(4 * n));
}
Strided b_block(const Vec& c, int n, int nf) {
  return Strided(c.data() + 2 * n, 2 * n, nf, Eigen::OuterStride<>(4 * n));
}

}  // namespace

DualLoop::DualLoop(int n, int n_fourier) : DualLoop(n, n_fourier, Vec::Zero(4 * n * n_fourier)) {}

DualLoop::DualLoop(int n, int n_fourier, Vec coeffs) : n_(n), nf_(n_fourier), c_(std::move(coeffs)) {
  if (n < 1 || n_fourier < 1) throw DomainError("DualLoop: n and N must be positive");
  if (c_.size() != 4 * n * n_fourier) throw DomainError("DualLoop: coefficient size mismatch");
}

CVec DualLoop::complex_coeff(int k) const {
  if (k == 0) return CVec::Zero(2 * n_);
  const int ak = std::abs(k);
  if (ak > nf_) return CVec::Zero(2 * n_);
  const CVec c = 0.5 * (a(ak).cast<Complex>() - Complex(0, 1) * b(ak).cast<Complex>());
  return k > 0 ? c : CVec(c.conjugate());
}

Vec DualLoop::operator()(double t) const {
  Vec out = Vec::Zero(2 * n_);
  for (int k = 1; k <= nf_; ++k) {
    const double ph = kTwoPi * k * t;
    out += std::cos(ph) * a(k) + std::sin(ph) * b(k);
  }
  return out;
}

DualLoop DualLoop::primitive() const {
  DualLoop out(n_, nf_);
  for (int k = 1; k <= nf_; ++k) {
    const double w = kTwoPi * k;
    out.a(k) = -b(k) / w;
    out.b(k) = a(k) / w;
  }
  return out;
}

DualLoop DualLoop::derivative() const {
  DualLoop out(n_, nf_);
  for (int k = 1; k <= nf_; ++k) {
    const double w = kTwoPi * k;
    out.a(k) = w * b(k);
    out.b(k) = -w * a(k);
  }
  return out;
}

DualLoop DualLoop::mapped(const Mat& l) const {
  if (l.rows() != 2 * n_ || l.cols() != 2 * n_) throw DomainError("DualLoop::mapped: size mismatch");
  DualLoop out(n_, nf_);
  for (int k = 1; k <= nf_; ++k) {
    out.a(k) = l * a(k);
    out.b(k) = l * b(k);
  }
  return out;
}

DualLoop DualLoop::shifted(double s) const {
  DualLoop out(n_, nf_);
  for (int k = 1; k <= nf_; ++k) {
    const double c = std::cos(kTwoPi * k * s), sn = std::sin(kTwoPi * k * s);
    out.a(k) = c * a(k) + sn * b(k);
    out.b(k) = c * b(k) - sn * a(k);
  }
  return out;
}

double DualLoop::l2_dot(const DualLoop& other) const {
  if (other.n_ != n_ || other.nf_ != nf_) throw DomainError("DualLoop: shape mismatch");
  return 0.5 * c_.dot(other.c_);
}

DualLoop DualLoop::resized(int n_fourier) const {
  DualLoop out(n_, n_fourier);
  const int keep = std::min(nf_, n_fourier);
  out.c_.head(4 * n_ * keep) = c_.head(4 * n_ * keep);
  return out;
}

DualAction::DualAction(const HypersurfaceModel& model, int n_fourier, int quad_points)
    : model_(model), n_(model.half_dim()), nf_(n_fourier), q_(quad_points > 0 ? quad_points : 8 * n_fourier) {
  if (n_fourier < 1) throw DomainError("DualAction: N must be positive");
  if (q_ < 2 * n_fourier + 1) throw DomainError("DualAction: too few quadrature points");
  cos_.resize(q_, nf_);
  sin_.resize(q_, nf_);
  for (int q = 0; q < q_; ++q) {
    for (int k = 1; k <= nf_; ++k) {
      // Reduce the phase index exactly before scaling.
      const double ph = kTwoPi * static_cast<double>((static_cast<long>(k) * q) % q_) / q_;
      cos_(q, k - 1) = std::cos(ph);
      sin_(q, k - 1) = std::sin(ph);
    }
  }
}

Mat DualAction::samples(const DualLoop& u) const {
  if (u.half_dim() != n_ || u.n_fourier() != nf_) throw DomainError("DualAction: loop shape mismatch");
  return a_block(u.coeffs(), n_, nf_) * cos_.transpose() + b_block(u.coeffs(), n_, nf_) * sin_.transpose();
}

double DualAction::value(const DualLoop& u) const { return value_and_coeff_gradient(u, nullptr); }

double DualAction::value_and_coeff_gradient(const DualLoop& u, Vec* grad) const {
  const Mat j = standard_j_matrix(n_);
  const Mat us = samples(u);
  const auto a = a_block(u.coeffs(), n_, nf_);
  const auto b = b_block(u.coeffs(), n_, nf_);
  double quad = 0.0;
  for (int k = 1; k <= nf_; ++k) quad += a.col(k - 1).dot(j * b.col(k - 1)) / (2 * kTwoPi * k);
  double hstar = 0.0;
  Mat f(2 * n_, q_);
  for (int q = 0; q < q_; ++q) {
    const Vec v = -j * us.col(q);
    hstar += model_.fenchel(v);
    if (grad) f.col(q) = model_.fenchel_grad(v);
  }
  if (grad) {
    Vec d(nf_);
    for (int k = 1; k <= nf_; ++k) d(k - 1) = 1.0 / (2 * kTwoPi * k);
    const Mat jf = j * f / static_cast<double>(q_);
    const Mat ga = j * b * d.asDiagonal() + jf * cos_;
    const Mat gb = -j * a * d.asDiagonal() + jf * sin_;
    grad->resize(u.coeffs().size());
    for (int k = 1; k <= nf_; ++k) {
      grad->segment(u.offset(k, 0), 2 * n_) = ga.col(k - 1);
      grad->segment(u.offset(k, 1), 2 * n_) = gb.col(k - 1);
    }
  }
  return quad + hstar / q_;
}

DualLoop DualAction::gradient(const DualLoop& u) const {
  Vec g;
  value_and_coeff_gradient(u, &g);
  return DualLoop(n_, nf_, 2.0 * g);
}

Mat DualAction::coeff_hessian(const DualLoop& u) const {
  const int d = 2 * n_;
  const Mat j = standard_j_matrix(n_);
  const Mat us = samples(u);
  std::vector<Mat> w(q_);
  for (int q = 0; q < q_; ++q) w[q] = j.transpose() * model_.fenchel_hess(-j * us.col(q)) * j;
  // Trigonometric moments of W up to frequency 2N.
  std::vector<Mat> cf(2 * nf_ + 1, Mat::Zero(d, d)), sf(2 * nf_ + 1, Mat::Zero(d, d));
  for (int f = 0; f <= 2 * nf_; ++f) {
    for (int q = 0; q < q_; ++q) {
      const double ph = kTwoPi * static_cast<double>((static_cast<long>(f) * q) % q_) / q_;
      cf[f] += std::cos(ph) * w[q];
      sf[f] += std::sin(ph) * w[q];
    }
    cf[f] /= q_;
    sf[f] /= q_;
  }
  auto s_of = [&](int f) -> Mat { return f >= 0 ? sf[f] : Mat(-sf[-f]); };
  DualLoop shape(n_, nf_);
  Mat h = Mat::Zero(4 * n_ * nf_, 4 * n_ * nf_);
  for (int k = 1; k <= nf_; ++k) {
    for (int l = 1; l <= nf_; ++l) {
      const int ak = shape.offset(k, 0), bk = shape.offset(k, 1);
      const int al = shape.offset(l, 0), bl = shape.offset(l, 1);
      h.block(ak, al, d, d) = 0.5 * (cf[std::abs(k - l)] + cf[k + l]);
      h.block(bk, bl, d, d) = 0.5 * (cf[std::abs(k - l)] - cf[k + l]);
      h.block(ak, bl, d, d) = 0.5 * (s_of(k + l) - s_of(k - l));
      h.block(bk, al, d, d) = 0.5 * (s_of(k + l) - s_of(l - k));
    }
    const int ak = shape.offset(k, 0), bk = shape.offset(k, 1);
    h.block(ak, bk, d, d) += j / (2 * kTwoPi * k);
    h.block(bk, ak, d, d) += j.transpose() / (2 * kTwoPi * k);
  }
  return h;
}

double dual_action(const HypersurfaceModel& model, const DualLoop& u, int quad_points) {
  return DualAction(model, u.n_fourier(), quad_points).value(u);
}

double dual_action_checked(const HypersurfaceModel& model, const DualLoop& u, int quad_points) {
  const DualAction base(model, u.n_fourier(), quad_points);
  const double v = base.value(u);
  const double v2 = DualAction(model, u.n_fourier(), 2 * base.quad_points()).value(u);
  if (std::abs(v2 - v) > 1e-8 * std::abs(v)) {
    throw NumericalError("dual_action: quadrature under-resolved (doubling moved the value by " +
                         std::to_string(std::abs(v2 - v)) + ")");
  }
  return v;
}

DualLoop dual_action_gradient(const HypersurfaceModel& model, const DualLoop& u, int quad_points) {
  return DualAction(model, u.n_fourier(), quad_points).gradient(u);
}

}  // namespace closedchar
