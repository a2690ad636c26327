#include <cmath>
#include <random>

#include "doctest.h"

#include "closedchar/characteristic.hpp"
#include "closedchar/error.hpp"
#include "closedchar/model.hpp"

using namespace closedchar;

namespace {

Vec gaussian(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Vec x(dim);
  for (int i = 0; i < dim; ++i) x(i) = nd(rng);
  return x;
}

HypersurfaceModel ellipsoid2() { return HypersurfaceModel::ellipsoid({1.0, 2.5}, 1.5, rotation_symmetry(2, 3)); }
HypersurfaceModel perturbed2() {
  return HypersurfaceModel::perturbed({1.0, 2.5}, 1.5, 0.05, 3, rotation_symmetry(2, 3));
}

// Central differences of a scalar function.
template <class F>
Vec fd_grad(F f, const Vec& x, double h = 1e-6) {
  Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec a = x, b = x;
    a(i) += h;
    b(i) -= h;
    g(i) = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

template <class F>
Mat fd_jac(F f, const Vec& x, double h = 1e-6) {
  Mat m(x.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec a = x, b = x;
    a(i) += h;
    b(i) -= h;
    m.col(i) = (f(a) - f(b)) / (2 * h);
  }
  return m;
}

// sup over unit directions θ of θ·y / j(θ): random search then shrinking
// random hill climbing, using gauge evaluations only.
double brute_polar(const HypersurfaceModel& m, const Vec& y, std::mt19937_64& rng) {
  const int dim = static_cast<int>(y.size());
  auto value = [&](const Vec& t) { return t.dot(y) / m.gauge(t); };
  Vec best = y;
  double bv = value(best);
  for (int s = 0; s < 20000; ++s) {
    const Vec t = gaussian(dim, rng);
    const double v = value(t);
    if (v > bv) {
      bv = v;
      best = t;
    }
  }
  for (double step = 0.1; step > 1e-9; step *= 0.7) {
    for (int s = 0; s < 200; ++s) {
      const Vec t = best + step * best.norm() * gaussian(dim, rng);
      const double v = value(t);
      if (v > bv) {
        bv = v;
        best = t;
      }
    }
  }
  return bv;
}

// max over ρ >= 0 of ρ a - ρ^α by golden section.
double golden_max(double a, double alpha) {
  auto f = [&](double r) { return r * a - std::pow(r, alpha); };
  double lo = 0.0, hi = 1.0;
  while (f(hi) > f(0.5 * hi) && hi < 1e12) hi *= 2;
  const double g = 0.5 * (std::sqrt(5.0) - 1);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  for (int it = 0; it < 200; ++it) {
    if (f(x1) < f(x2)) {
      lo = x1;
      x1 = x2;
      x2 = lo + g * (hi - lo);
    } else {
      hi = x2;
      x2 = x1;
      x1 = hi - g * (hi - lo);
    }
  }
  return f(0.5 * (lo + hi));
}

}  // namespace

TEST_CASE("gauge examples and homogeneity") {
  const HypersurfaceModel ball = HypersurfaceModel::ellipsoid({1.0, 1.0}, 1.5, rotation_symmetry(2, 2));
  Vec e1 = Vec::Zero(4);
  e1(0) = 1;
  CHECK(ball.gauge(e1) == doctest::Approx(1.0));
  const HypersurfaceModel m = ellipsoid2();
  Vec tip = Vec::Zero(4);
  tip(1) = std::sqrt(2.5);
  CHECK(m.gauge(tip) == doctest::Approx(1.0).epsilon(1e-15));
  std::mt19937_64 rng(5);
  for (const HypersurfaceModel& mm : {ellipsoid2(), perturbed2()}) {
    for (int s = 0; s < 20; ++s) {
      const Vec x = gaussian(4, rng);
      CHECK(mm.gauge(2 * x) == doctest::Approx(2 * mm.gauge(x)).epsilon(1e-14));
      CHECK((mm.gauge_grad(3 * x) - mm.gauge_grad(x)).norm() <= 1e-13 * mm.gauge_grad(x).norm());
      CHECK((3 * mm.gauge_hess(3 * x) - mm.gauge_hess(x)).norm() <= 1e-12 * mm.gauge_hess(x).norm());
    }
  }
  CHECK_THROWS_AS(m.gauge_grad(Vec::Zero(4)), DomainError);
  CHECK_THROWS_AS(m.ham_hess(Vec::Zero(4)), DomainError);
}

TEST_CASE("hamiltonian derivatives by finite differences") {
  std::mt19937_64 rng(9);
  for (const HypersurfaceModel& m : {ellipsoid2(), perturbed2()}) {
    for (int s = 0; s < 25; ++s) {
      const Vec x = gaussian(4, rng);
      const Vec g = m.ham_grad(x);
      const Vec gfd = fd_grad([&](const Vec& y) { return m.hamiltonian(y); }, x);
      CHECK((g - gfd).norm() <= 1e-6 * (1 + g.norm()));
      const Mat h = m.ham_hess(x);
      const Mat hfd = fd_jac([&](const Vec& y) { return m.ham_grad(y); }, x);
      CHECK((h - hfd).norm() <= 1e-6 * (1 + h.norm()));
      const Mat jh = m.gauge_hess(x);
      const Mat jfd = fd_jac([&](const Vec& y) { return m.gauge_grad(y); }, x);
      CHECK((jh - jfd).norm() <= 1e-6 * (1 + jh.norm()));
      CHECK((m.gauge_grad(x) - fd_grad([&](const Vec& y) { return m.gauge(y); }, x)).norm() <= 1e-7);
    }
  }
}

TEST_CASE("values on the hypersurface") {
  std::mt19937_64 rng(10);
  for (const HypersurfaceModel& m : {ellipsoid2(), perturbed2()}) {
    for (int s = 0; s < 10; ++s) {
      const Vec y = m.project(gaussian(4, rng));
      CHECK(m.hamiltonian(y) == doctest::Approx(1.0).epsilon(1e-14));
      CHECK((m.ham_grad(y) - 1.5 * m.gauge_grad(y)).norm() <= 1e-13);
      Eigen::SelfAdjointEigenSolver<Mat> es(m.ham_hess(y));
      CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
  }
}

TEST_CASE("ellipsoid hessian against the symbolic form") {
  // H = q^{α/2}, q = x^T D x: H'' = α q^{α/2-1} D + α(α-2) q^{α/2-2} (Dx)(Dx)^T.
  const HypersurfaceModel m = ellipsoid2();
  Eigen::Vector4d dvec(1.0, 1 / 2.5, 1.0, 1 / 2.5);
  const Mat d = dvec.asDiagonal();
  std::mt19937_64 rng(4);
  for (int s = 0; s < 10; ++s) {
    const Vec x = gaussian(4, rng);
    const double q = x.dot(d * x), a = 1.5;
    const Vec dx = d * x;
    const Mat want = a * std::pow(q, a / 2 - 1) * d + a * (a - 2) * std::pow(q, a / 2 - 2) * dx * dx.transpose();
    CHECK((m.ham_hess(x) - want).norm() <= 1e-13 * want.norm());
  }
}

TEST_CASE("polar gauge") {
  const HypersurfaceModel ball = HypersurfaceModel::ellipsoid({1.0, 1.0}, 1.5, rotation_symmetry(2, 2));
  std::mt19937_64 rng(12);
  const Vec y = gaussian(4, rng);
  CHECK(ball.polar_gauge(y) == doctest::Approx(y.norm()).epsilon(1e-14));
  CHECK(ball.polar_gauge(Vec::Zero(4)) == 0.0);
  const HypersurfaceModel m12 = HypersurfaceModel::ellipsoid({1.0, 4.0}, 1.5, rotation_symmetry(2, 2));
  Vec e2 = Vec::Zero(4);
  e2(1) = 1.0;
  CHECK(m12.polar_gauge(e2) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(brute_polar(m12, e2, rng) == doctest::Approx(2.0).epsilon(1e-8));

  const HypersurfaceModel p = perturbed2();
  for (int s = 0; s < 6; ++s) {
    const Vec v = gaussian(4, rng);
    CHECK(p.polar_gauge(v) == doctest::Approx(brute_polar(p, v, rng)).epsilon(1e-8));
  }
}

TEST_CASE("Fenchel transform") {
  const HypersurfaceModel ball = HypersurfaceModel::ellipsoid({1.0, 1.0}, 1.5, rotation_symmetry(2, 2));
  Vec u = Vec::Zero(4);
  u(2) = 1.0;
  CHECK(ball.fenchel(u) == doctest::Approx(4.0 / 27.0).epsilon(1e-14));
  CHECK(golden_max(1.0, 1.5) == doctest::Approx(4.0 / 27.0).epsilon(1e-10));
  CHECK(ball.fenchel(Vec::Zero(4)) == 0.0);
  CHECK(ball.fenchel_grad(Vec::Zero(4)).norm() == 0.0);

  std::mt19937_64 rng(21);
  for (const HypersurfaceModel& m : {ellipsoid2(), perturbed2()}) {
    const double beta = m.beta();
    for (int s = 0; s < 20; ++s) {
      const Vec v = gaussian(4, rng);
      const double hs = m.fenchel(v);
      // Duality through the 1-D reduction.
      CHECK(hs == doctest::Approx(golden_max(m.polar_gauge(v), m.alpha())).epsilon(1e-8));
      CHECK(m.fenchel(2.5 * v) == doctest::Approx(std::pow(2.5, beta) * hs).epsilon(1e-12));
      // Young–Fenchel, with equality along y = ∇H(x).
      const Vec x = gaussian(4, rng);
      CHECK(x.dot(v) <= m.hamiltonian(x) + hs + 1e-12);
      const Vec yx = m.ham_grad(x);
      CHECK(x.dot(yx) == doctest::Approx(m.hamiltonian(x) + m.fenchel(yx)).epsilon(1e-8));
      CHECK((m.fenchel_grad(yx) - x).norm() <= 1e-10 * x.norm());
      // Derivatives.
      const Vec g = m.fenchel_grad(v);
      CHECK((g - fd_grad([&](const Vec& w) { return m.fenchel(w); }, v)).norm() <= 1e-6 * (1 + g.norm()));
      const Mat h = m.fenchel_hess(v);
      const Mat hfd = fd_jac([&](const Vec& w) { return m.fenchel_grad(w); }, v);
      CHECK((h - hfd).norm() <= 1e-6 * (1 + h.norm()));
      CHECK((h * m.ham_hess(g) - Mat::Identity(4, 4)).norm() <= 1e-9);
    }
  }
}

TEST_CASE("symmetry of the hamiltonian") {
  const HypersurfaceModel m = perturbed2();
  const Mat p = m.symmetry().P.matrix();
  std::mt19937_64 rng(31);
  for (int s = 0; s < 50; ++s) {
    const Vec x = gaussian(4, rng);
    CHECK(m.hamiltonian(p * x) == doctest::Approx(m.hamiltonian(x)).epsilon(1e-13));
    CHECK((m.ham_grad(p * x) - p * m.ham_grad(x)).norm() <= 1e-12 * (1 + m.ham_grad(x).norm()));
    CHECK((m.ham_hess(x) - p.transpose() * m.ham_hess(p * x) * p).norm() <= 1e-12 * (1 + m.ham_hess(x).norm()));
    CHECK((m.fenchel_grad(p * x) - p * m.fenchel_grad(x)).norm() <= 1e-10 * (1 + x.norm()));
  }
  // Harmonic 3 is not invariant under rotation by π.
  CHECK_THROWS_AS(HypersurfaceModel::perturbed({1.0, 2.5}, 1.5, 0.05, 3, rotation_symmetry(2, 2)),
                  DomainError);
  CHECK_NOTHROW(HypersurfaceModel::perturbed({1.0, 2.5}, 1.5, 0.05, 6, rotation_symmetry(2, 3)));
}

TEST_CASE("zero perturbation agrees with the ellipsoid") {
  const HypersurfaceModel e = ellipsoid2();
  const HypersurfaceModel z = HypersurfaceModel::perturbed({1.0, 2.5}, 1.5, 0.0, 3, rotation_symmetry(2, 3));
  std::mt19937_64 rng(41);
  for (int s = 0; s < 20; ++s) {
    const Vec x = gaussian(4, rng);
    CHECK(z.gauge(x) == e.gauge(x));
    CHECK((z.ham_grad(x) - e.ham_grad(x)).norm() == 0.0);
    CHECK((z.ham_hess(x) - e.ham_hess(x)).norm() == 0.0);
    CHECK(z.fenchel(x) == e.fenchel(x));
    CHECK((z.fenchel_hess(x) - e.fenchel_hess(x)).norm() == 0.0);
  }
}

TEST_CASE("convexity certificate and bound") {
  CHECK(perturbed2().convexity().samples == 10000);
  CHECK(perturbed2().convexity().min_ratio > 0.0);
  const double bound = convexity_bound_epsilon({1.0, 2.5}, 1.5, 3, rotation_symmetry(2, 3), 2000);
  CHECK(bound > 0.05);
  CHECK(bound < 1.0);
  CHECK_THROWS_AS(HypersurfaceModel::perturbed({1.0, 2.5}, 1.5, std::min(1.0, bound + 0.05), 3,
                                               rotation_symmetry(2, 3)),
                  DomainError);
  CHECK_THROWS_AS(HypersurfaceModel::ellipsoid({1.0, 2.5}, 2.0, rotation_symmetry(2, 3)), DomainError);
  CHECK_THROWS_AS(HypersurfaceModel::ellipsoid({1.0, -2.5}, 1.5, rotation_symmetry(2, 3)), DomainError);
}

TEST_CASE("diameter") {
  CHECK(ellipsoid2().diameter() == doctest::Approx(2 * std::sqrt(2.5)));
  CHECK(perturbed2().diameter() > 2.0);
}

TEST_CASE("model JSON") {
  const auto j = nlohmann::json::parse(
      R"({"kind":"ellipsoid","radii_sq":[1,2.5],"alpha":1.5,"symmetry":{"type":"rotation","k":3}})");
  const HypersurfaceModel m = HypersurfaceModel::from_json(j);
  CHECK(m.is_ellipsoid());
  CHECK(m.symmetry().order_k == 3);
  CHECK(m.to_json() == j);
  const HypersurfaceModel p = perturbed2();
  const HypersurfaceModel back = HypersurfaceModel::from_json(p.to_json());
  CHECK(back.harmonic() == 3);
  CHECK(back.epsilon() == 0.05);
  CHECK_THROWS_AS(HypersurfaceModel::from_json(nlohmann::json{{"kind", "torus"}, {"radii_sq", {1, 2}}}),
                  DomainError);
  CHECK_THROWS_AS(HypersurfaceModel::from_json(nlohmann::json{{"kind", "ellipsoid"}}), DomainError);
}

TEST_CASE("known ellipsoid orbits") {
  auto m = std::make_shared<const HypersurfaceModel>(ellipsoid2());
  const auto orbits = known_orbits(m);
  REQUIRE(orbits.size() == 2);
  CHECK(orbits[0].tau == doctest::Approx(kTwoPi / 1.5));
  CHECK(orbits[1].tau == doctest::Approx(kTwoPi * 2.5 / 1.5));
  CHECK(orbits[0].tau_characteristic() == doctest::Approx(kTwoPi));
  const Mat p = m->symmetry().P.matrix();
  for (const auto& o : orbits) {
    CHECK(o.residual <= 1e-10);
    CHECK(o.energy_defect <= 1e-12);
    // Independent check of the flow: ẏ = J H'(y) at t = 0 by central differences.
    const int k = static_cast<int>(o.samples.size());
    const double dt = o.tau / k;
    const Vec dy = (o.samples[1] - o.samples[k - 1]) / (2 * dt);
    const Vec rhs = standard_j_matrix(2) * m->ham_grad(o.samples[0]);
    CHECK((dy - rhs).norm() <= 1e-4 * rhs.norm());
    // The trace is P-invariant.
    for (int s = 0; s < k; s += 37) {
      const Vec py = p * o.samples[s];
      double best = 1e9;
      for (const Vec& y : o.samples) best = std::min(best, (y - py).norm());
      CHECK(best <= 0.02);
      CHECK(m->gauge(py) == doctest::Approx(1.0));
    }
  }
  CHECK_THROWS_AS(known_orbits(std::make_shared<const HypersurfaceModel>(
                      HypersurfaceModel::ellipsoid({2.0, 2.0}, 1.5, rotation_symmetry(2, 2)))),
                  DomainError);
  CHECK_THROWS_AS(known_orbits(std::make_shared<const HypersurfaceModel>(perturbed2())), DomainError);
}
