#include "closedchar/path.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "closedchar/error.hpp"

namespace closedchar {

namespace {

Mat symplectic_inverse(const Mat& m) {
  const Mat j = standard_j_matrix(static_cast<int>(m.rows() / 2));
  return -j * m.transpose() * j;
}

Mat generator_of(const PathPoint& p) {
  const Mat j = standard_j_matrix(static_cast<int>(p.value.rows() / 2));
  const Mat a = -j * p.velocity * symplectic_inverse(p.value);
  return 0.5 * (a + a.transpose());
}

bool is_positive_definite(const Mat& a, double margin = 0.0) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() > margin;
}

}  // namespace

SymplecticPath::SymplecticPath(int n, double tau, Evaluator eval, bool convex_certified,
                               double rate_hint)
    : n_(n), tau_(tau), eval_(std::move(eval)), convex_(convex_certified) {
  if (n < 1) throw DomainError("SymplecticPath: n must be >= 1");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("SymplecticPath: τ must be positive");
  end_ = std::make_shared<const Mat>(eval_(tau_).value);
  build_grid(rate_hint);
}

void SymplecticPath::build_grid(double rate_hint) {
  auto g = std::make_shared<Grid>();
  double rate = rate_hint;
  if (!(rate > 0.0)) {
    for (int i = 0; i <= 64; ++i) {
      rate = std::max(rate, op_norm(generator_of(eval_(tau_ * i / 64.0))));
    }
  }
  for (int pass = 0; pass < 6; ++pass) {
    const double spacing = std::min(0.25 * kPi / std::max(rate, 1e-300), tau_ / 16.0);
    const int cells = static_cast<int>(std::ceil(tau_ / spacing - 1e-12));
    g->t.resize(cells + 1);
    g->max_rate = 0.0;
    g->max_speed = 0.0;
    for (int i = 0; i <= cells; ++i) {
      const double t = (i == cells) ? tau_ : tau_ * i / cells;
      g->t[i] = t;
      const PathPoint p = eval_(t);
      g->max_rate = std::max(g->max_rate, op_norm(generator_of(p)));
      g->max_speed = std::max(g->max_speed, p.velocity.norm());
    }
    if (g->max_rate <= 1.25 * rate) break;
    rate = g->max_rate;
  }
  grid_ = std::move(g);
}

PathPoint SymplecticPath::at(double t) const {
  if (t < 0.0 || t > tau_ * (1.0 + 1e-14)) throw DomainError("SymplecticPath: t outside [0,τ]");
  return eval_(std::min(t, tau_));
}

Mat SymplecticPath::generator(double t) const { return generator_of(at(t)); }

SymplecticPath SymplecticPath::restrict(double t_end) const {
  if (!(t_end > 0.0) || t_end > tau_ * (1.0 + 1e-14)) {
    throw DomainError("restrict: end time outside (0,τ]");
  }
  return SymplecticPath(n_, std::min(t_end, tau_), eval_, convex_, grid_->max_rate);
}

SymplecticPath SymplecticPath::conjugate(const SymplecticMatrix& q) const {
  if (q.half_dim() != n_) throw DomainError("conjugate: dimension mismatch");
  const Mat qm = q.matrix();
  const Mat qi = q.inverse().matrix();
  auto inner = eval_;
  return SymplecticPath(
      n_, tau_,
      [inner, qm, qi](double t) {
        PathPoint p = inner(t);
        return PathPoint{qm * p.value * qi, qm * p.velocity * qi};
      },
      convex_);
}

SymplecticPath SymplecticPath::autonomous(const Mat& a, double tau) {
  if (a.rows() != a.cols() || a.rows() % 2) throw DomainError("autonomous: bad generator shape");
  if ((a - a.transpose()).norm() > 1e-12 * (1.0 + a.norm())) {
    throw DomainError("autonomous: generator must be symmetric");
  }
  const int n = static_cast<int>(a.rows() / 2);
  const Mat ja = standard_j_matrix(n) * a;
  return SymplecticPath(
      n, tau,
      [ja](double t) {
        Mat v = (t * ja).exp();
        Mat d = ja * v;
        return PathPoint{std::move(v), std::move(d)};
      },
      is_positive_definite(a), op_norm(a));
}

SymplecticPath SymplecticPath::positive_path_to(const SymplecticMatrix& m, double tau) {
  const int n = m.half_dim();
  const Mat& mm = m.matrix();
  const Mat j = standard_j_matrix(n);

  // Polar decomposition M = O S with S = (M^T M)^{1/2}.
  Eigen::SelfAdjointEigenSolver<Mat> es(mm.transpose() * mm);
  const Vec lam = es.eigenvalues();
  const Mat& w = es.eigenvectors();
  const Vec half_log = 0.5 * lam.array().log().matrix();
  const Mat log_s = w * half_log.asDiagonal() * w.transpose();
  const Mat s_inv = w * lam.array().rsqrt().matrix().asDiagonal() * w.transpose();
  const Mat o = mm * s_inv;

  Eigen::ComplexSchur<CMat> schur(complex_form(o));
  if (schur.info() != Eigen::Success) throw NumericalError("positive_path_to: Schur failed");
  const CMat v = schur.matrixU();
  Vec phi(n);
  for (int i = 0; i < n; ++i) phi(i) = std::arg(schur.matrixT()(i, i));

  auto beta = [v, phi, log_s](double u) {
    CVec rot(phi.size()), drot(phi.size());
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
      rot(i) = std::polar(1.0, phi(i) * u);
      drot(i) = Complex(0.0, phi(i)) * rot(i);
    }
    const Mat ou = real_form(v * rot.asDiagonal() * v.adjoint());
    const Mat dou = real_form(v * drot.asDiagonal() * v.adjoint());
    const Mat su = (u * log_s).exp();
    return PathPoint{ou * su, dou * su + ou * log_s * su};
  };

  auto make = [=](int turns) {
    const Mat jt = kTwoPi * turns * j;
    return [=](double t) {
      const double u = t / tau;
      const PathPoint b = beta(u);
      const Mat e = (u * jt).exp();
      Mat value = b.value * e;
      Mat velocity = (b.velocity * e + b.value * jt * e) / tau;
      return PathPoint{std::move(value), std::move(velocity)};
    };
  };

  for (int turns = 1; turns <= 64; ++turns) {
    auto eval = make(turns);
    bool ok = true;
    for (int i = 0; i <= 512 && ok; ++i) {
      const Mat a = generator_of(eval(tau * i / 512.0));
      ok = is_positive_definite(a, 1e-3 * op_norm(a));
    }
    if (ok) return SymplecticPath(n, tau, eval, true);
  }
  throw NumericalError("positive_path_to: could not make the generator positive definite");
}

SymplecticPath SymplecticPath::from_samples(const std::vector<double>& t,
                                            const std::vector<Mat>& values, bool claim_convex) {
  if (t.size() != values.size() || t.size() < 2) {
    throw DomainError("from_samples: need at least two samples with matching times");
  }
  if (t.front() != 0.0) throw DomainError("from_samples: first sample must be at t = 0");
  const Eigen::Index dim = values.front().rows();
  if ((values.front() - Mat::Identity(dim, dim)).norm() > 1e-12) {
    throw DomainError("from_samples: γ(0) must be the identity");
  }
  const int n = static_cast<int>(dim / 2);
  const Mat j = standard_j_matrix(n);
  auto logs = std::make_shared<std::vector<Mat>>();
  bool convex = claim_convex;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    if (!(t[k + 1] > t[k])) throw DomainError("from_samples: times must increase");
    SymplecticMatrix check(values[k + 1]);
    const Mat step = symplectic_inverse(values[k]) * values[k + 1];
    Mat l = step.log();
    logs->push_back(l);
    // l = J S; the interpolant is convex on this cell iff S is positive definite.
    const Mat s = -j * l;
    if (!is_positive_definite(0.5 * (s + s.transpose()))) convex = false;
  }
  auto times = std::make_shared<std::vector<double>>(t);
  auto vals = std::make_shared<std::vector<Mat>>(values);
  return SymplecticPath(
      n, t.back(),
      [times, vals, logs](double s) {
        auto it = std::upper_bound(times->begin(), times->end(), s);
        std::size_t k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - times->begin() - 1));
        k = std::min(k, times->size() - 2);
        const double h = (*times)[k + 1] - (*times)[k];
        const double u = (s - (*times)[k]) / h;
        const Mat e = (u * (*logs)[k]).exp();
        Mat value = (*vals)[k] * e;
        Mat velocity = value * (*logs)[k] / h;
        return PathPoint{std::move(value), std::move(velocity)};
      },
      convex);
}

SymplecticPath iterate_path(const SymplecticPath& gamma, const SymplecticMatrix& p, int m) {
  if (m < 1) throw DomainError("iterate_path: m must be positive");
  if (p.half_dim() != gamma.half_dim()) throw DomainError("iterate_path: dimension mismatch");
  if (m == 1) return gamma;
  const int n = gamma.half_dim();
  const double tau = gamma.tau();
  const Mat& pm = p.matrix();
  const Mat j = standard_j_matrix(n);
  const Mat id = Mat::Identity(2 * n, 2 * n);
  const bool orthogonal = op_norm(pm.transpose() * pm - id) <= 1e-10 &&
                          op_norm(pm * j - j * pm) <= 1e-10;

  auto ppow = std::make_shared<std::vector<Mat>>();
  auto tail = std::make_shared<std::vector<Mat>>();
  const Mat step = p.inverse().matrix() * gamma.endpoint();
  ppow->push_back(id);
  tail->push_back(id);
  for (int k = 1; k < m; ++k) {
    ppow->push_back(ppow->back() * pm);
    tail->push_back(tail->back() * step);
  }
  SymplecticPath base = gamma;
  return SymplecticPath(
      n, m * tau,
      [base, ppow, tail, tau, m](double t) {
        int k = std::min(m - 1, static_cast<int>(std::floor(t / tau)));
        k = std::max(k, 0);
        const double local = std::clamp(t - k * tau, 0.0, tau);
        const PathPoint g = base.at(local);
        const Mat& pk = (*ppow)[k];
        const Mat& tk = (*tail)[k];
        return PathPoint{pk * g.value * tk, pk * g.velocity * tk};
      },
      gamma.convex_certified() && orthogonal, gamma.max_rate());
}

nlohmann::json path_to_json(const SymplecticPath& path, int min_samples) {
  const std::vector<double>& g = path.grid();
  const int cells = std::max<int>(min_samples, 2 * (static_cast<int>(g.size()) - 1));
  nlohmann::json samples = nlohmann::json::array();
  for (int i = 0; i <= cells; ++i) {
    const double t = (i == cells) ? path.tau() : path.tau() * i / cells;
    samples.push_back({{"t", t}, {"matrix", to_json(path.value(t))}});
  }
  return {{"n", path.half_dim()},
          {"tau", path.tau()},
          {"convex_certified", path.convex_certified()},
          {"samples", std::move(samples)}};
}

SymplecticPath path_from_json(const nlohmann::json& j) {
  if (!j.contains("samples")) throw DomainError("path JSON: missing \"samples\"");
  std::vector<double> t;
  std::vector<Mat> values;
  for (const auto& s : j.at("samples")) {
    t.push_back(s.at("t").get<double>());
    values.push_back(matrix_from_json(s.at("matrix")));
  }
  if (j.contains("n") && !values.empty() && values.front().rows() != 2 * j.at("n").get<int>()) {
    throw DomainError("path JSON: \"n\" does not match sample size");
  }
  return SymplecticPath::from_samples(t, values, j.value("convex_certified", false));
}

}  // namespace closedchar
