#include "closedchar/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "closedchar/error.hpp"

namespace closedchar {

namespace {

constexpr int kCertificateSamples = 10000;
constexpr double kConvexityMargin = 1e-6;
constexpr double kInvarianceTol = 1e-12;

bool is_standard_rotation(const CyclicSymmetry& sym) {
  const int n = sym.P.half_dim();
  if (n < 2) return false;
  return (sym.P.matrix() - rotation_symmetry(n, sym.order_k).P.matrix()).norm() <= 1e-14;
}

Vec random_direction(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Vec x(dim);
  for (int i = 0; i < dim; ++i) x(i) = nd(rng);
  return x;
}

}  // namespace

HypersurfaceModel::HypersurfaceModel(ModelKind kind, std::vector<double> radii_sq, double alpha,
                                     double epsilon, int harmonic, CyclicSymmetry symmetry)
    : n_(static_cast<int>(radii_sq.size())),
      kind_(kind),
      alpha_(alpha),
      radii_sq_(std::move(radii_sq)),
      epsilon_(epsilon),
      harmonic_(harmonic),
      symmetry_(std::move(symmetry)) {
  if (n_ < 1) throw DomainError("model: radii_sq must be non-empty");
  for (double r : radii_sq_) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("model: radii_sq must be positive");
  }
  if (!(alpha_ > 1.0 && alpha_ < 2.0)) throw DomainError("model: alpha must lie in (1, 2)");
  if (symmetry_.P.half_dim() != n_) throw DomainError("model: symmetry dimension mismatch");
  if (kind_ == ModelKind::PerturbedEllipsoid) {
    if (harmonic_ < 2) throw DomainError("model: harmonic order must be >= 2");
    if (!std::isfinite(epsilon_) || epsilon_ < 0.0) throw DomainError("model: epsilon must be >= 0");
  }
  dinv_.resize(2 * n_);
  for (int i = 0; i < n_; ++i) dinv_(i) = dinv_(n_ + i) = 1.0 / radii_sq_[i];

  std::mt19937_64 rng(0x5eed);
  double rmax = 0.0;
  const Mat& p = symmetry_.P.matrix();
  for (int s = 0; s < 200; ++s) {
    const Vec x = random_direction(2 * n_, rng);
    const double jx = gauge(x);
    if (std::abs(gauge(p * x) - jx) > kInvarianceTol * std::max(1.0, jx)) {
      throw DomainError("model: gauge is not invariant under the symmetry");
    }
  }
  certificate_ = certify_convexity(*this, kCertificateSamples);
  if (!(certificate_.min_ratio > kConvexityMargin)) {
    throw DomainError("model: sampled convexity certificate failed");
  }
  if (kind_ == ModelKind::Ellipsoid || epsilon_ == 0.0) {
    for (double r : radii_sq_) rmax = std::max(rmax, std::sqrt(r));
  } else {
    for (int s = 0; s < kCertificateSamples; ++s) {
      rmax = std::max(rmax, project(random_direction(2 * n_, rng)).norm());
    }
  }
  diameter_ = 2.0 * rmax;
}

HypersurfaceModel HypersurfaceModel::ellipsoid(std::vector<double> radii_sq, double alpha,
                                               CyclicSymmetry symmetry) {
  return HypersurfaceModel(ModelKind::Ellipsoid, std::move(radii_sq), alpha, 0.0, 0,
                           std::move(symmetry));
}

HypersurfaceModel HypersurfaceModel::perturbed(std::vector<double> radii_sq, double alpha,
                                               double epsilon, int harmonic,
                                               CyclicSymmetry symmetry) {
  return HypersurfaceModel(ModelKind::PerturbedEllipsoid, std::move(radii_sq), alpha, epsilon,
                           harmonic, std::move(symmetry));
}

HypersurfaceModel HypersurfaceModel::from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    auto radii = j.at("radii_sq").get<std::vector<double>>();
    const double alpha = j.value("alpha", 1.5);
    const int n = static_cast<int>(radii.size());
    const nlohmann::json sym_json =
        j.contains("symmetry") ? j.at("symmetry") : nlohmann::json{{"type", "rotation"}, {"k", 2}};
    CyclicSymmetry sym = symmetry_from_json(sym_json, n);
    if (kind == "ellipsoid") return ellipsoid(std::move(radii), alpha, std::move(sym));
    if (kind == "perturbed" || kind == "perturbed_ellipsoid") {
      return perturbed(std::move(radii), alpha, j.value("epsilon", 0.05),
                       j.at("harmonic").get<int>(), std::move(sym));
    }
    throw DomainError("model JSON: unknown kind \"" + kind + "\"");
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("model JSON: ") + e.what());
  }
}

nlohmann::json HypersurfaceModel::to_json() const {
  nlohmann::json j;
  j["kind"] = is_ellipsoid() ? "ellipsoid" : "perturbed";
  j["radii_sq"] = radii_sq_;
  j["alpha"] = alpha_;
  if (is_standard_rotation(symmetry_)) {
    j["symmetry"] = {{"type", "rotation"}, {"k", symmetry_.order_k}};
  } else {
    j["symmetry"] = closedchar::to_json(symmetry_);
  }
  if (!is_ellipsoid()) {
    j["epsilon"] = epsilon_;
    j["harmonic"] = harmonic_;
  }
  return j;
}

// g = j^2 = q + ε Re(z^h) q^e,  q = x^T D x,  e = (2 - h) / 2.
double HypersurfaceModel::g(const Vec& x) const {
  const double q = x.dot(dinv_.cwiseProduct(x));
  if (kind_ == ModelKind::Ellipsoid || epsilon_ == 0.0) return q;
  if (q == 0.0) return 0.0;
  const Complex z(x(0), x(n_));
  const double e = 0.5 * (2 - harmonic_);
  return q + epsilon_ * std::pow(z, harmonic_).real() * std::pow(q, e);
}

Vec HypersurfaceModel::g_grad(const Vec& x) const {
  const Vec dq = 2.0 * dinv_.cwiseProduct(x);
  if (kind_ == ModelKind::Ellipsoid || epsilon_ == 0.0) return dq;
  const double q = x.dot(dinv_.cwiseProduct(x));
  const int h = harmonic_;
  const double e = 0.5 * (2 - h);
  const Complex z(x(0), x(n_));
  const double w = std::pow(z, h).real();
  const Complex dz = static_cast<double>(h) * std::pow(z, h - 1);
  const double s = std::pow(q, e);
  Vec grad = dq + epsilon_ * w * e * std::pow(q, e - 1) * dq;
  grad(0) += epsilon_ * s * dz.real();
  grad(n_) -= epsilon_ * s * dz.imag();
  return grad;
}

Mat HypersurfaceModel::g_hess(const Vec& x) const {
  const int dim = 2 * n_;
  Mat hq = Mat::Zero(dim, dim);
  hq.diagonal() = 2.0 * dinv_;
  if (kind_ == ModelKind::Ellipsoid || epsilon_ == 0.0) return hq;
  const double q = x.dot(dinv_.cwiseProduct(x));
  const int h = harmonic_;
  const double e = 0.5 * (2 - h);
  const Complex z(x(0), x(n_));
  const double w = std::pow(z, h).real();
  const Complex dz = static_cast<double>(h) * std::pow(z, h - 1);
  const Complex ddz = static_cast<double>(h) * (h - 1) * std::pow(z, h - 2);
  const double s = std::pow(q, e);
  const Vec dq = 2.0 * dinv_.cwiseProduct(x);
  const Vec ds = e * std::pow(q, e - 1) * dq;
  const Mat hs = e * std::pow(q, e - 1) * hq + e * (e - 1) * std::pow(q, e - 2) * dq * dq.transpose();
  Vec dw = Vec::Zero(dim);
  dw(0) = dz.real();
  dw(n_) = -dz.imag();
  Mat hw = Mat::Zero(dim, dim);
  hw(0, 0) = ddz.real();
  hw(0, n_) = hw(n_, 0) = -ddz.imag();
  hw(n_, n_) = -ddz.real();
  return hq + epsilon_ * (s * hw + dw * ds.transpose() + ds * dw.transpose() + w * hs);
}

double HypersurfaceModel::gauge(const Vec& x) const {
  if (x.size() != 2 * n_) throw DomainError("gauge: dimension mismatch");
  return std::sqrt(std::max(0.0, g(x)));
}

Vec HypersurfaceModel::gauge_grad(const Vec& x) const {
  const double j = gauge(x);
  if (j == 0.0) throw DomainError("gauge_grad: undefined at the origin");
  return g_grad(x) / (2.0 * j);
}

Mat HypersurfaceModel::gauge_hess(const Vec& x) const {
  const double j = gauge(x);
  if (j == 0.0) throw DomainError("gauge_hess: undefined at the origin");
  const Vec dg = g_grad(x);
  return g_hess(x) / (2.0 * j) - dg * dg.transpose() / (4.0 * j * j * j);
}

double HypersurfaceModel::hamiltonian(const Vec& x) const {
  if (x.size() != 2 * n_) throw DomainError("hamiltonian: dimension mismatch");
  return std::pow(std::max(0.0, g(x)), 0.5 * alpha_);
}

// H = g^{α/2}.
Vec HypersurfaceModel::ham_grad(const Vec& x) const {
  if (x.size() != 2 * n_) throw DomainError("ham_grad: dimension mismatch");
  const double gx = g(x);
  if (!(gx > 0.0)) throw DomainError("ham_grad: undefined at the origin");
  const double a = 0.5 * alpha_;
  return a * std::pow(gx, a - 1) * g_grad(x);
}

Mat HypersurfaceModel::ham_hess(const Vec& x) const {
  if (x.size() != 2 * n_) throw DomainError("ham_hess: dimension mismatch");
  const double gx = g(x);
  if (!(gx > 0.0)) throw DomainError("ham_hess: undefined at the origin");
  const double a = 0.5 * alpha_;
  const Vec dg = g_grad(x);
  return a * std::pow(gx, a - 1) * g_hess(x) + a * (a - 1) * std::pow(gx, a - 2) * dg * dg.transpose();
}

Vec HypersurfaceModel::project(const Vec& x) const {
  const double j = gauge(x);
  if (j == 0.0) throw DomainError("project: undefined at the origin");
  return x / j;
}

// ∇H*(v) = α^{1-β} j°(v)^{β-2} R^2 v.
Vec HypersurfaceModel::ellipsoid_fenchel_grad(const Vec& v) const {
  const Vec r2v = v.cwiseQuotient(dinv_);
  const double jp = std::sqrt(v.dot(r2v));
  if (jp == 0.0) return Vec::Zero(v.size());
  const double b = beta();
  return std::pow(alpha_, 1 - b) * std::pow(jp, b - 2) * r2v;
}

Vec HypersurfaceModel::fenchel_grad(const Vec& v) const {
  if (v.size() != 2 * n_) throw DomainError("fenchel_grad: dimension mismatch");
  const double vn = v.norm();
  if (vn == 0.0) return Vec::Zero(v.size());
  if (kind_ == ModelKind::Ellipsoid || epsilon_ == 0.0) return ellipsoid_fenchel_grad(v);

  // Damped Newton on ψ(x) = H(x) - x·v̂ for the unit direction, then rescale
  // by the (β-1)-homogeneity of ∇H*.
  const Vec u = v / vn;
  Vec x = ellipsoid_fenchel_grad(u);
  auto psi = [&](const Vec& y) { return hamiltonian(y) - y.dot(u); };
  auto accept = [&](const Vec& y, double f0, double decrease, double r0) {
    if (!(y.norm() > 0.0)) return false;
    // Near the optimum ψ stalls at round-off, so the residual decides.
    return psi(y) <= f0 - 1e-4 * decrease || (ham_grad(y) - u).norm() < 0.5 * r0;
  };
  bool converged = false;
  for (int it = 0; it < 100; ++it) {
    const Vec r = ham_grad(x) - u;
    const double rn = r.norm();
    if (rn <= 1e-14) {
      converged = true;
      break;
    }
    const Vec step = ham_hess(x).llt().solve(r);
    const double f = psi(x);
    double t = 1.0;
    while (!accept(x - t * step, f, t * r.dot(step), rn) && t > 1e-12) t *= 0.5;
    if (t <= 1e-12) {
      converged = rn <= 1e-12;
      break;
    }
    x -= t * step;
  }
  if (!converged) throw NumericalError("fenchel_grad: Newton iteration did not converge");
  return std::pow(vn, beta() - 1) * x;
}

double HypersurfaceModel::polar_gauge(const Vec& v) const {
  if (v.size() != 2 * n_) throw DomainError("polar_gauge: dimension mismatch");
  if (v.norm() == 0.0) return 0.0;
  if (kind_ == ModelKind::Ellipsoid || epsilon_ == 0.0) {
    return std::sqrt(v.dot(v.cwiseQuotient(dinv_)));
  }
  // The maximiser of x·v on Σ is the radial projection of ∇H*(v).
  const Vec x = fenchel_grad(v);
  return v.dot(x) / gauge(x);
}

double HypersurfaceModel::fenchel(const Vec& v) const {
  const double b = beta();
  return (alpha_ - 1) * std::pow(alpha_, -b) * std::pow(polar_gauge(v), b);
}

Mat HypersurfaceModel::fenchel_hess(const Vec& v) const {
  if (v.size() != 2 * n_) throw DomainError("fenchel_hess: dimension mismatch");
  const int dim = 2 * n_;
  if (v.norm() == 0.0) return Mat::Zero(dim, dim);
  if (kind_ == ModelKind::Ellipsoid || epsilon_ == 0.0) {
    const Vec r2v = v.cwiseQuotient(dinv_);
    const double jp = std::sqrt(v.dot(r2v));
    const double b = beta();
    Mat out = std::pow(jp, b - 4) * (b - 2) * r2v * r2v.transpose();
    out.diagonal() += std::pow(jp, b - 2) * dinv_.cwiseInverse();
    return std::pow(alpha_, 1 - b) * out;
  }
  const Mat hh = ham_hess(fenchel_grad(v));
  return hh.llt().solve(Mat::Identity(dim, dim));
}

ConvexityCertificate certify_convexity(const HypersurfaceModel& model, int samples,
                                       unsigned long long seed) {
  std::mt19937_64 rng(seed);
  const int dim = 2 * model.half_dim();
  ConvexityCertificate cert;
  cert.samples = samples;
  cert.min_ratio = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Vec x = random_direction(dim, rng);
    const double j = model.gauge(x);
    if (!(j > 0.0)) {
      cert.min_ratio = -1.0;
      return cert;
    }
    x /= j;
    Eigen::SelfAdjointEigenSolver<Mat> es(model.ham_hess(x), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    cert.min_ratio = std::min(cert.min_ratio, hi > 0.0 ? lo / hi : -1.0);
  }
  return cert;
}

double convexity_bound_epsilon(std::vector<double> radii_sq, double alpha, int harmonic,
                               const CyclicSymmetry& symmetry, int samples) {
  auto passes = [&](double eps) {
    try {
      const HypersurfaceModel probe =
          HypersurfaceModel::perturbed(radii_sq, alpha, eps, harmonic, symmetry);
      return certify_convexity(probe, samples, 7).min_ratio > kConvexityMargin;
    } catch (const DomainError&) {
      return false;
    }
  };
  double lo = 0.0, hi = 1.0;
  if (passes(hi)) return hi;
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    (passes(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace closedchar
