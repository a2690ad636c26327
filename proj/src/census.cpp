#include "closedchar/census.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "closedchar/error.hpp"

namespace closedchar {

namespace {

double diameter_of(const ClosedCharacteristic& c) {
  if (!c.model) throw DomainError("census: orbit without a model");
  return c.model->diameter();
}

bool same_period(double a, double b) { return std::abs(a - b) <= 1e-5 * std::max(a, b); }

bool same_orbit(const ClosedCharacteristic& a, const ClosedCharacteristic& b, const CensusTolerances& tol) {
  return same_period(a.tau, b.tau) && !geometrically_distinct(a, b, tol);
}

// Per-coordinate maxima over the trace, rounded; independent of the phase.
std::vector<long long> trace_key(const ClosedCharacteristic& c) {
  const int dim = static_cast<int>(c.samples[0].size());
  std::vector<long long> key(dim);
  for (int i = 0; i < dim; ++i) {
    double m = -1e300;
    for (const Vec& y : c.samples) m = std::max(m, y(i));
    key[i] = std::llround(m * 1e6);
  }
  return key;
}

}  // namespace

bool geometrically_distinct(const ClosedCharacteristic& a, const ClosedCharacteristic& b,
                            const CensusTolerances& tol) {
  return trace_distance(a, b) > tol.distance_rel * diameter_of(a);
}

ClosedCharacteristic p_image(const ClosedCharacteristic& orbit, const Mat& p) {
  ClosedCharacteristic out = orbit;
  for (Vec& y : out.samples) y = p * y;
  const SampleDefects d = sample_defects(*orbit.model, orbit.tau, out.samples);
  if (d.residual > 2.0 * orbit.residual + 1e-12) {
    throw NumericalError("p_image: residual " + std::to_string(d.residual) +
                         " not preserved by P (original " + std::to_string(orbit.residual) + ")");
  }
  out.residual = d.residual;
  out.energy_defect = d.energy;
  return out;
}

std::optional<int> detect_p_cyclic(const ClosedCharacteristic& orbit, const CyclicSymmetry& sym,
                                   const CensusTolerances& tol) {
  const int k = sym.order_k;
  const Mat& p = sym.P.matrix();
  const double diam = diameter_of(orbit);
  const TraceCurve curve(orbit.samples);
  double s = 0.0;
  if (curve.distance_to(p * orbit.samples[0], &s) > tol.match_rel * diam) return std::nullopt;

  const double sk = s * k;
  const long long jr = std::llround(sk);
  if (std::abs(sk - static_cast<double>(jr)) > tol.time_tol) {
    throw NumericalError("detect_p_cyclic: shift " + std::to_string(s) + " is not a multiple of 1/k");
  }
  const int j = static_cast<int>(((jr % k) + k) % k);
  if (j == 0 || std::gcd(j, k) != 1) {
    throw NumericalError("detect_p_cyclic: shift j = " + std::to_string(j) + " not coprime to k = " +
                         std::to_string(k));
  }
  int l = 1;
  while ((l * j) % k != 1) ++l;

  const Mat pl = sym.P.power(l).matrix();
  const int nsamp = static_cast<int>(orbit.samples.size());
  double worst = 0.0;
  for (int i = 0; i < nsamp; ++i) {
    const double t = static_cast<double>(i) / nsamp + 1.0 / k;
    worst = std::max(worst, (curve(t - std::floor(t)) - pl * orbit.samples[i]).norm());
  }
  if (worst > tol.match_rel * diam) {
    throw NumericalError("detect_p_cyclic: y(t + τ/k) = P^" + std::to_string(l) +
                         " y(t) fails by " + std::to_string(worst));
  }
  return l;
}

std::vector<int> OrbitCensus::representatives() const {
  std::vector<int> r = symmetric;
  for (const auto& pr : asymmetric_pairs) r.push_back(pr.first);
  r.insert(r.end(), unpaired.begin(), unpaired.end());
  std::sort(r.begin(), r.end());
  return r;
}

OrbitCensus build_census(const std::vector<ClosedCharacteristic>& input, const CyclicSymmetry& sym,
                         const CensusTolerances& tol) {
  const int k = sym.order_k;
  const Mat& p = sym.P.matrix();

  std::vector<CensusEntry> found;
  for (const ClosedCharacteristic& c : input) {
    const bool dup = std::any_of(found.begin(), found.end(),
                                 [&](const CensusEntry& e) { return same_orbit(e.orbit, c, tol); });
    if (!dup) found.push_back({c, std::nullopt, false, 0, true});
  }

  // Close under P.
  const size_t solver_count = found.size();
  for (size_t i = 0; i < solver_count; ++i) {
    ClosedCharacteristic img = found[i].orbit;
    for (int step = 1; step < k; ++step) {
      img = p_image(img, p);
      const bool dup = std::any_of(found.begin(), found.end(),
                                   [&](const CensusEntry& e) { return same_orbit(e.orbit, img, tol); });
      if (!dup) found.push_back({img, std::nullopt, true, 0, true});
    }
  }

  std::vector<std::pair<std::tuple<long long, std::vector<long long>>, size_t>> keys;
  for (size_t i = 0; i < found.size(); ++i) {
    keys.push_back({{std::llround(found[i].orbit.tau * 1e7), trace_key(found[i].orbit)}, i});
  }
  std::stable_sort(keys.begin(), keys.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  OrbitCensus census;
  census.order_k = k;
  for (const auto& kv : keys) census.orbits.push_back(std::move(found[kv.second]));
  const int count = census.total();

  // next[i]: index of the P-image of orbit i.
  std::vector<int> next(count, -1);
  for (int i = 0; i < count; ++i) {
    CensusEntry& e = census.orbits[i];
    e.p_cyclic = detect_p_cyclic(e.orbit, sym, tol);
    const ClosedCharacteristic img = p_image(e.orbit, p);
    e.dichotomy = e.p_cyclic.has_value() != geometrically_distinct(e.orbit, img, tol);
    for (int j = 0; j < count; ++j) {
      if (same_orbit(census.orbits[j].orbit, img, tol)) {
        next[i] = j;
        break;
      }
    }
    if (next[i] < 0) throw NumericalError("build_census: P-image of orbit " + std::to_string(i) + " missing");
  }

  std::vector<int> cls(count, -1);
  int n_classes = 0;
  for (int i = 0; i < count; ++i) {
    if (cls[i] >= 0) continue;
    std::vector<int> members;
    for (int j = i; cls[j] < 0; j = next[j]) {
      cls[j] = n_classes;
      members.push_back(j);
    }
    for (int m : members) census.orbits[m].p_class = n_classes;
    ++n_classes;
    const CensusEntry& head = census.orbits[i];
    if (members.size() == 1 && head.p_cyclic) {
      census.symmetric.push_back(i);
      continue;
    }
    // Members are y, P y, P^2 y, ...; pair them as (P^{2r} y, P^{2r+1} y).
    size_t r = 0;
    for (; r + 1 < members.size(); r += 2) census.asymmetric_pairs.push_back({members[r], members[r + 1]});
    if (r < members.size()) census.unpaired.push_back(members[r]);
  }

  if (k >= 3) {
    P2Refinement ref;
    std::vector<int> reps;
    for (const auto& pr : census.asymmetric_pairs) reps.push_back(pr.first);
    std::vector<bool> used(count, false);
    for (int r : reps) {
      if (used[r]) continue;
      used[r] = true;
      const int q = next[next[r]];
      if (q == r) {
        ++ref.s3;
      } else if (std::find(reps.begin(), reps.end(), q) != reps.end() && !used[q]) {
        used[q] = true;
        ++ref.s4;
      } else {
        ++ref.unpaired;
      }
    }
    census.p2 = ref;
  }
  return census;
}

nlohmann::json to_json(const OrbitCensus& census, bool with_samples) {
  nlohmann::json orbits = nlohmann::json::array();
  for (const CensusEntry& e : census.orbits) {
    nlohmann::json o = e.orbit.to_json();
    if (!with_samples) o.erase("samples");
    o["p_cyclic"] = e.p_cyclic ? nlohmann::json(*e.p_cyclic) : nlohmann::json(nullptr);
    o["appended"] = e.appended;
    o["p_class"] = e.p_class;
    o["dichotomy"] = e.dichotomy;
    orbits.push_back(std::move(o));
  }
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& pr : census.asymmetric_pairs) pairs.push_back({pr.first, pr.second});
  nlohmann::json out = {{"k", census.order_k},
                        {"orbits", orbits},
                        {"symmetric", census.symmetric},
                        {"asymmetric_pairs", pairs},
                        {"unpaired", census.unpaired},
                        {"s1", census.s1()},
                        {"s2", census.s2()},
                        {"S", census.total()}};
  if (census.p2) {
    out["s3"] = census.p2->s3;
    out["s4"] = census.p2->s4;
  }
  return out;
}

}  // namespace closedchar
