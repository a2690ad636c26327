#include "closedchar/characteristic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <unsupported/Eigen/FFT>

#include "closedchar/error.hpp"

namespace closedchar {

std::vector<Vec> spectral_derivative(const std::vector<Vec>& samples, double tau) {
  const int k = static_cast<int>(samples.size());
  if (k < 4 || k % 2 != 0) throw DomainError("spectral_derivative: need an even sample count >= 4");
  const int dim = static_cast<int>(samples[0].size());
  std::vector<Vec> out(k, Vec::Zero(dim));
  Eigen::FFT<double> fft;
  std::vector<double> col(k);
  std::vector<Complex> spec;
  for (int c = 0; c < dim; ++c) {
    for (int i = 0; i < k; ++i) col[i] = samples[i](c);
    fft.fwd(spec, col);
    for (int f = 0; f < k; ++f) {
      const int freq = (f <= k / 2) ? f : f - k;
      spec[f] *= (f == k / 2) ? Complex(0.0) : Complex(0.0, kTwoPi * freq / tau);
    }
    std::vector<Complex> back;
    fft.inv(back, spec);
    for (int i = 0; i < k; ++i) out[i](c) = back[i].real();
  }
  return out;
}

TraceCurve::TraceCurve(const std::vector<Vec>& samples)
    : k_(static_cast<int>(samples.size())), samples_(samples) {
  if (k_ < 4 || k_ % 2 != 0) throw DomainError("TraceCurve: need an even sample count >= 4");
  const int dim = static_cast<int>(samples[0].size());
  coeffs_.assign(k_ / 2 + 1, CVec::Zero(dim));
  Eigen::FFT<double> fft;
  std::vector<double> col(k_);
  std::vector<Complex> spec;
  for (int c = 0; c < dim; ++c) {
    for (int i = 0; i < k_; ++i) col[i] = samples[i](c);
    fft.fwd(spec, col);
    for (int f = 0; f <= k_ / 2; ++f) coeffs_[f](c) = spec[f] / static_cast<double>(k_);
  }
}

Vec TraceCurve::operator()(double s) const {
  CVec acc = CVec::Zero(coeffs_[0].size());
  const Complex w = std::polar(1.0, kTwoPi * s);
  Complex e = w;
  for (int f = 1; f < k_ / 2; ++f) {
    acc += coeffs_[f] * e;
    e *= w;
  }
  Vec out = coeffs_[0].real() + 2.0 * acc.real();
  // Nyquist term, real part only.
  out += (coeffs_[k_ / 2] * std::cos(kTwoPi * (k_ / 2) * s)).real();
  return out;
}

double TraceCurve::distance_to(const Vec& p, double* s_min) const {
  int best = 0;
  double bd = (samples_[0] - p).squaredNorm();
  for (int i = 1; i < k_; ++i) {
    const double d = (samples_[i] - p).squaredNorm();
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  // Golden section on the neighbouring sample interval.
  const double g = 0.5 * (std::sqrt(5.0) - 1);
  auto f = [&](double s) { return ((*this)(s) - p).squaredNorm(); };
  double lo = (best - 1.0) / k_, hi = (best + 1.0) / k_;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > 1e-13) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  const double sm = 0.5 * (lo + hi);
  const double d = std::min(bd, f(sm));
  if (s_min) *s_min = (d == bd) ? static_cast<double>(best) / k_ : sm - std::floor(sm);
  return std::sqrt(d);
}

namespace {

double directed_hausdorff(const TraceCurve& a, const TraceCurve& b) {
  double worst = 0.0;
  for (const Vec& p : a.samples()) worst = std::max(worst, b.distance_to(p));
  return worst;
}

double max_spacing(const TraceCurve& c) {
  double s = 0.0;
  const auto& x = c.samples();
  for (size_t i = 0; i < x.size(); ++i) s = std::max(s, (x[(i + 1) % x.size()] - x[i]).norm());
  return s;
}

}  // namespace

double hausdorff_distance(const TraceCurve& a, const TraceCurve& b) {
  // Cheap sample-to-sample bound first; refine only when it is inconclusive.
  double coarse = 0.0;
  for (const Vec& p : a.samples()) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec& q : b.samples()) best = std::min(best, (p - q).squaredNorm());
    coarse = std::max(coarse, best);
  }
  coarse = std::sqrt(coarse);
  if (coarse > 4.0 * std::max(max_spacing(a), max_spacing(b))) return coarse;
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

double trace_distance(const ClosedCharacteristic& a, const ClosedCharacteristic& b) {
  return hausdorff_distance(TraceCurve(a.samples), TraceCurve(b.samples));
}

SampleDefects sample_defects(const HypersurfaceModel& model, double tau,
                             const std::vector<Vec>& samples) {
  const std::vector<Vec> dy = spectral_derivative(samples, tau);
  const Mat j = standard_j_matrix(model.half_dim());
  const double alpha = model.alpha();
  SampleDefects d;
  for (size_t i = 0; i < samples.size(); ++i) {
    d.residual = std::max(d.residual, (dy[i] / alpha - j * model.gauge_grad(samples[i])).norm());
    d.energy = std::max(d.energy, std::abs(model.hamiltonian(samples[i]) - 1.0));
  }
  return d;
}

nlohmann::json ClosedCharacteristic::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const Vec& y : samples) pts.push_back(std::vector<double>(y.data(), y.data() + y.size()));
  return {{"tau", tau},
          {"tau_characteristic", tau_characteristic()},
          {"multiplicity", multiplicity_m},
          {"residual", residual},
          {"closure_defect", closure_defect},
          {"energy_defect", energy_defect},
          {"samples", pts}};
}

// Plane i: y(t) = r_i (cos ωt e_i + sin ωt e_{n+i}), ω = α / r_i^2.
std::vector<ClosedCharacteristic> known_orbits(std::shared_ptr<const HypersurfaceModel> model,
                                               int samples) {
  if (!model || !model->is_ellipsoid()) throw DomainError("known_orbits: ellipsoid model required");
  const std::vector<double>& r2 = model->radii_sq();
  const int n = model->half_dim();
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (std::abs(r2[a] - r2[b]) <= 1e-12 * std::max(r2[a], r2[b])) {
        throw DomainError("known_orbits: repeated radii give a continuum of orbits");
      }
    }
  }
  std::vector<ClosedCharacteristic> out;
  for (int i = 0; i < n; ++i) {
    ClosedCharacteristic c;
    c.model = model;
    c.tau = kTwoPi * r2[i] / model->alpha();
    const double r = std::sqrt(r2[i]);
    for (int s = 0; s < samples; ++s) {
      const double ph = kTwoPi * s / samples;
      Vec y = Vec::Zero(2 * n);
      y(i) = r * std::cos(ph);
      y(n + i) = r * std::sin(ph);
      c.samples.push_back(y);
    }
    const SampleDefects d = sample_defects(*model, c.tau, c.samples);
    c.residual = d.residual;
    c.energy_defect = d.energy;
    c.closure_defect = r * std::abs(std::polar(1.0, kTwoPi) - 1.0);
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.tau < b.tau; });
  return out;
}

}  // namespace closedchar
