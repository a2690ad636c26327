#pragma once

#include <random>

#include "closedchar/cyclic.hpp"
#include "closedchar/symplectic.hpp"

namespace testing_support {

using closedchar::Mat;

// Random symplectic matrix: product of Cayley transforms of J S with small
// symmetric S, so entries stay O(1).
inline Mat random_symplectic(int n, std::mt19937_64& rng, double scale = 0.4) {
  std::normal_distribution<double> g(0.0, scale);
  const Mat j = closedchar::standard_j_matrix(n);
  Mat m = Mat::Identity(2 * n, 2 * n);
  for (int f = 0; f < 3; ++f) {
    Mat s(2 * n, 2 * n);
    for (int a = 0; a < 2 * n; ++a)
      for (int b = 0; b <= a; ++b) s(a, b) = s(b, a) = g(rng);
    const Mat h = j * s;
    const Mat id = Mat::Identity(2 * n, 2 * n);
    m = m * (id - 0.5 * h).inverse() * (id + 0.5 * h);
  }
  return m;
}

// Random unitary-derived symplectic orthogonal matrix.
inline Mat random_symplectic_orthogonal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  closedchar::CMat z(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) z(a, b) = {g(rng), g(rng)};
  Eigen::HouseholderQR<closedchar::CMat> qr(z);
  closedchar::CMat q = qr.householderQ();
  return closedchar::real_form(q);
}

}  // namespace testing_support
