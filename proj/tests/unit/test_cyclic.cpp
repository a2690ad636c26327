#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"

#include "closedchar/cyclic.hpp"
#include "closedchar/error.hpp"

using namespace closedchar;

TEST_CASE("already in normal form") {
  const double a = 2 * kPi / 3;
  const CyclicSymmetry s = decompose_cyclic(SymplecticMatrix(rotation_product({a, a})), 3);
  REQUIRE(s.angles.size() == 2);
  CHECK(s.angles[0] == doctest::Approx(a).epsilon(1e-12));
  CHECK(s.angles[1] == doctest::Approx(a).epsilon(1e-12));
  CHECK(s.reconstruction_defect <= 1e-9);
  CHECK(check_ker_condition(s));
}

TEST_CASE("minus identity") {
  const CyclicSymmetry s = decompose_cyclic(SymplecticMatrix(-Mat::Identity(4, 4)), 2);
  CHECK(s.angles[0] == doctest::Approx(kPi));
  CHECK(s.angles[1] == doctest::Approx(kPi));
  CHECK(check_ker_condition(s));
}

TEST_CASE("conjugated round trip") {
  std::mt19937_64 rng(11);
  const Mat q0 = testing_support::random_symplectic_orthogonal(2, rng);
  const Mat p = q0 * rotation_product({2 * kPi / 5, 4 * kPi / 5}) * q0.transpose();
  const CyclicSymmetry s = decompose_cyclic(SymplecticMatrix(p), 5);
  CHECK(s.angles[0] == doctest::Approx(2 * kPi / 5).epsilon(1e-10));
  CHECK(s.angles[1] == doctest::Approx(4 * kPi / 5).epsilon(1e-10));
  const Mat qm = s.Q.matrix();
  CHECK(symplectic_defect(qm) <= 1e-10);
  CHECK((qm * p * s.Q.inverse().matrix() - rotation_product(s.angles)).norm() <= 1e-9);
}

TEST_CASE("kernel condition by modular arithmetic") {
  CyclicSymmetry s = rotation_symmetry(2, 4);
  s.angles = {2 * kPi / 4, 2 * 2 * kPi / 4};
  CHECK_FALSE(check_ker_condition(s));
  for (int n = 2; n <= 5; ++n) {
    for (int k = 2; k <= 12; ++k) CHECK(check_ker_condition(rotation_symmetry(n, k)));
  }
}

TEST_CASE("rotation symmetry") {
  const CyclicSymmetry s = rotation_symmetry(2, 3);
  CHECK((s.P.power(3).matrix() - Mat::Identity(4, 4)).norm() < 1e-14);
  CHECK((rotation_symmetry(2, 2).P.matrix() + Mat::Identity(4, 4)).norm() < 1e-15);
  const CyclicSymmetry five = rotation_symmetry(3, 5);
  CHECK((five.P.power(5).matrix() - Mat::Identity(6, 6)).norm() < 1e-13);
  for (int l = 1; l < 5; ++l) CHECK(nullity_omega(five.P.power(l), 1.0) == 0);
  CHECK_THROWS_AS(rotation_symmetry(1, 3), DomainError);
  CHECK_THROWS_AS(rotation_symmetry(2, 1), DomainError);
}

TEST_CASE("rejections") {
  Mat shear(2, 2);
  shear << 1, 1, 0, 1;
  CHECK_THROWS_AS(decompose_cyclic(SymplecticMatrix(shear), 2), DomainError);
  CHECK_THROWS_AS(decompose_cyclic(SymplecticMatrix(rotation(2 * kPi / 5)), 3), DomainError);
  // Orthogonal, symplectic, but not commuting with J is impossible; a
  // symplectic matrix of finite order that is not orthogonal is rejected.
  Mat d(2, 2);
  d << 2, 0, 0, 0.5;
  const Mat conj = d * rotation(kPi / 2) * d.inverse();
  CHECK_THROWS_AS(decompose_cyclic(SymplecticMatrix(conj), 4), DomainError);
}

TEST_CASE("random round trips") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> nd(1, 4), kd(2, 8);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = nd(rng), k = kd(rng);
    std::uniform_int_distribution<int> jd(0, k - 1);
    std::vector<double> angles;
    for (int i = 0; i < n; ++i) angles.push_back(kTwoPi * jd(rng) / k);
    const Mat q0 = testing_support::random_symplectic_orthogonal(n, rng);
    const Mat p = q0 * rotation_product(angles) * q0.transpose();
    const CyclicSymmetry s = decompose_cyclic(SymplecticMatrix(p), k);
    std::sort(angles.begin(), angles.end());
    for (int i = 0; i < n; ++i) CHECK(std::abs(s.angles[i] - angles[i]) <= 1e-8);
    CHECK(s.reconstruction_defect <= 1e-9);
    CHECK(symplectic_defect(s.Q.matrix()) <= 1e-10);
  }
}

TEST_CASE("symmetry JSON") {
  const CyclicSymmetry r = symmetry_from_json({{"type", "rotation"}, {"k", 3}}, 2);
  CHECK(r.order_k == 3);
  const nlohmann::json file{{"type", "matrix"}, {"k", 2}, {"matrix", to_json(Mat(-Mat::Identity(4, 4)))}};
  CHECK(symmetry_from_json(file, 2).angles[0] == doctest::Approx(kPi));
  CHECK_THROWS_AS(symmetry_from_json({{"type", "mirror"}, {"k", 2}}, 2), DomainError);
}
