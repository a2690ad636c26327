#include <cmath>
#include <complex>

#include "doctest.h"

#include "closedchar/census.hpp"
#include "closedchar/error.hpp"

using namespace closedchar;

namespace {

std::shared_ptr<const HypersurfaceModel> ellipsoid(std::vector<double> r2, int k) {
  const int n = static_cast<int>(r2.size());
  return std::make_shared<const HypersurfaceModel>(
      HypersurfaceModel::ellipsoid(std::move(r2), 1.5, rotation_symmetry(n, k)));
}

// The round sphere |z| = 1 in C^2 with P = diag(e^{iθ1}, e^{iθ2}).
std::shared_ptr<const HypersurfaceModel> sphere(double th1, double th2, int k) {
  const CyclicSymmetry sym = decompose_cyclic(SymplecticMatrix(rotation_product({th1, th2})), k);
  return std::make_shared<const HypersurfaceModel>(HypersurfaceModel::ellipsoid({1.0, 1.0}, 1.5, sym));
}

// Hopf circle e^{it}(a, b), |a|^2 + |b|^2 = 1, sampled by hand.
ClosedCharacteristic hopf(std::shared_ptr<const HypersurfaceModel> m, std::complex<double> a,
                          std::complex<double> b, double phase = 0.0, int samples = 256) {
  ClosedCharacteristic c;
  c.model = m;
  c.tau = kTwoPi / m->alpha();
  for (int s = 0; s < samples; ++s) {
    const std::complex<double> e = std::polar(1.0, kTwoPi * s / samples + phase);
    const std::complex<double> za = e * a, zb = e * b;
    Vec y(4);
    y << za.real(), zb.real(), za.imag(), zb.imag();
    c.samples.push_back(y);
  }
  const SampleDefects d = sample_defects(*m, c.tau, c.samples);
  c.residual = d.residual;
  c.energy_defect = d.energy;
  return c;
}

}  // namespace

TEST_CASE("hand-built circles solve the equation") {
  const auto m = sphere(kTwoPi / 3, 2 * kTwoPi / 3, 3);
  const auto c = hopf(m, {0.6, 0.0}, {0.0, 0.8});
  CHECK(c.residual <= 1e-12);
  CHECK(c.energy_defect <= 1e-12);
}

TEST_CASE("ellipsoid circles are P-symmetric") {
  const auto m = ellipsoid({1.0, 2.5}, 3);
  const auto orbits = known_orbits(m, 256);
  for (const auto& o : orbits) {
    // R(2π/3) advances the circle phase by τ/3, so l = 1.
    CHECK(detect_p_cyclic(o, m->symmetry()) == std::optional<int>(1));
  }
  const OrbitCensus census = build_census(orbits, m->symmetry());
  CHECK(census.s1() == 2);
  CHECK(census.s2() == 0);
  CHECK(census.total() == 2);
  REQUIRE(census.p2.has_value());
  CHECK(census.p2->s3 == 0);
  CHECK(census.p2->s4 == 0);
  for (const auto& e : census.orbits) CHECK(e.dichotomy);
}

TEST_CASE("k = 2 acts as the antipodal map") {
  const auto m = ellipsoid({1.0, 2.5}, 2);
  for (const auto& o : known_orbits(m, 128)) {
    CHECK(detect_p_cyclic(o, m->symmetry()) == std::optional<int>(1));
    const int half = static_cast<int>(o.samples.size()) / 2;
    for (int i = 0; i < half; ++i) CHECK((o.samples[i + half] + o.samples[i]).norm() <= 1e-13);
  }
}

TEST_CASE("l is the inverse of the matching shift") {
  // P = R(4π/5) in both planes advances the phase by 2τ/5, so y(t + τ/5) = P^3 y(t).
  const CyclicSymmetry sym = decompose_cyclic(SymplecticMatrix(rotation_product({2 * kTwoPi / 5, 2 * kTwoPi / 5})), 5);
  const auto m = std::make_shared<const HypersurfaceModel>(HypersurfaceModel::ellipsoid({1.0, 2.5}, 1.5, sym));
  for (const auto& o : known_orbits(m, 200)) CHECK(detect_p_cyclic(o, sym) == std::optional<int>(3));
}

TEST_CASE("time shifts are not distinct, different circles are") {
  const auto m = ellipsoid({1.0, 2.5}, 3);
  const auto orbits = known_orbits(m, 256);
  ClosedCharacteristic shifted = orbits[0];
  std::rotate(shifted.samples.begin(), shifted.samples.begin() + 37, shifted.samples.end());
  CHECK_FALSE(geometrically_distinct(orbits[0], shifted));
  CHECK(geometrically_distinct(orbits[0], orbits[1]));
  const OrbitCensus census = build_census({orbits[1], shifted, orbits[0]}, m->symmetry());
  CHECK(census.total() == 2);
  CHECK(census.orbits[0].orbit.tau < census.orbits[1].orbit.tau);
}

TEST_CASE("asymmetric Hopf circles pair up under P^2 = -I") {
  // k = 4, P = diag(i, -i): P maps the circle through (a, b) to the one
  // through (a, -b), and P^2 = -I keeps every circle.
  const auto m = sphere(kTwoPi / 4, 3 * kTwoPi / 4, 4);
  const auto y = hopf(m, {0.6, 0.0}, {0.0, 0.8});
  CHECK_FALSE(detect_p_cyclic(y, m->symmetry()).has_value());
  const ClosedCharacteristic py = p_image(y, m->symmetry().P.matrix());
  CHECK(py.residual <= 1e-12);
  CHECK(geometrically_distinct(y, py));

  const OrbitCensus census = build_census({y}, m->symmetry());
  CHECK(census.total() == 2);
  CHECK(census.s1() == 0);
  CHECK(census.s2() == 1);
  CHECK(census.unpaired.empty());
  CHECK(census.orbits[0].appended != census.orbits[1].appended);
  CHECK(census.orbits[0].p_class == census.orbits[1].p_class);
  REQUIRE(census.p2.has_value());
  CHECK(census.p2->s3 == 1);
  CHECK(census.p2->s4 == 0);
  for (const auto& e : census.orbits) CHECK(e.dichotomy);

  // Adding symmetric coordinate circles raises S by one each.
  const auto e1 = hopf(m, {1.0, 0.0}, {0.0, 0.0});
  const OrbitCensus c2 = build_census({y, e1}, m->symmetry());
  CHECK(c2.total() == 3);
  CHECK(c2.s1() == 1);
  CHECK(c2.total() == c2.s1() + 2 * c2.s2());
}

TEST_CASE("P-classes of size four refine into s4") {
  // k = 4, P = diag(i, -1): P^2 = diag(-1, 1) moves the circle through
  // (a, b) to the one through (a, -b).
  const auto m = sphere(kTwoPi / 4, kTwoPi / 2, 4);
  const auto y = hopf(m, {0.6, 0.0}, {0.8, 0.0});
  const OrbitCensus census = build_census({y}, m->symmetry());
  // P-class: (a,b), (ia,-b), (-a,b), (-ia,-b); the last two are distinct from the first two.
  CHECK(census.total() == 4);
  CHECK(census.s2() == 2);
  REQUIRE(census.p2.has_value());
  CHECK(census.p2->s4 == 1);
  CHECK(census.p2->s3 == 0);
  CHECK(census.p2->s3 + 2 * census.p2->s4 == census.s2());
}

TEST_CASE("odd P-classes leave one member unpaired") {
  // k = 3, P = diag(ω, ω^2): the circle through (a, b) with ab != 0 has a
  // P-class of three distinct circles.
  const auto m = sphere(kTwoPi / 3, 2 * kTwoPi / 3, 3);
  const auto y = hopf(m, {0.6, 0.0}, {0.8, 0.0});
  const OrbitCensus census = build_census({y}, m->symmetry());
  CHECK(census.total() == 3);
  CHECK(census.s1() == 0);
  CHECK(census.s2() == 1);
  CHECK(census.unpaired.size() == 1);
  CHECK(census.total() != census.s1() + 2 * census.s2());
}

TEST_CASE("k applications of p_image return the orbit") {
  const auto m = sphere(kTwoPi / 3, 2 * kTwoPi / 3, 3);
  const auto y = hopf(m, {0.6, 0.0}, {0.0, 0.8}, 0.3);
  ClosedCharacteristic img = y;
  for (int i = 0; i < 3; ++i) img = p_image(img, m->symmetry().P.matrix());
  for (size_t i = 0; i < y.samples.size(); ++i) CHECK((img.samples[i] - y.samples[i]).norm() <= 1e-13);
}

TEST_CASE("p_image rejects a map that breaks the equation") {
  const auto m = ellipsoid({1.0, 2.5}, 3);
  const auto o = known_orbits(m, 128)[0];
  Mat swap = Mat::Zero(4, 4);
  swap(0, 1) = swap(1, 0) = swap(2, 3) = swap(3, 2) = 1.0;
  CHECK_THROWS_AS(p_image(o, swap), NumericalError);
}

TEST_CASE("census JSON") {
  const auto m = ellipsoid({1.0, 2.5}, 3);
  const OrbitCensus census = build_census(known_orbits(m, 64), m->symmetry());
  const auto j = to_json(census, false);
  CHECK(j.at("S") == 2);
  CHECK(j.at("s1") == 2);
  CHECK(j.at("s3") == 0);
  CHECK(j.at("orbits").size() == 2);
  CHECK_FALSE(j.at("orbits")[0].contains("samples"));
  CHECK(j.at("orbits")[0].at("p_cyclic") == 1);
  CHECK(to_json(census, true).at("orbits")[1].at("samples").size() == 64);
}
