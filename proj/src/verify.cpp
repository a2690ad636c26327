#include "closedchar/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

#include "closedchar/error.hpp"

namespace closedchar {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Skipped: return "skipped";
    case Verdict::Consistent: return "consistent";
  }
  return "?";
}

const std::vector<std::string>& all_checks() {
  static const std::vector<std::string> names{"residual", "bookkeeping", "prop43", "basic",
                                              "bott",     "theorems",    "index_jump"};
  return names;
}

namespace {

std::string label(int i) { return "y" + std::to_string(i + 1); }

CheckResult verdict(std::string check, std::string name, bool ok, nlohmann::json witness) {
  return {std::move(check), std::move(name), ok ? Verdict::Pass : Verdict::Fail, std::move(witness)};
}

const IterateIndex& iterate(const IndexData& d, int m) {
  const auto it = d.iterates.find(m);
  if (it == d.iterates.end()) throw DomainError("index data lacks iterate " + std::to_string(m));
  return it->second;
}

int max_iterate(const IndexData& d) { return d.iterates.empty() ? 0 : d.iterates.rbegin()->first; }

// Restricts deep index data to m <= m_max with the m_max-based estimates.
IndexData trimmed(const IndexData& deep, int m_max) {
  IndexData d = deep;
  d.iterates.erase(d.iterates.upper_bound(m_max), d.iterates.end());
  d.mean_index_ratio = static_cast<double>(iterate(d, m_max).i) / m_max;
  if (m_max >= 2) {
    const int h = m_max / 2;
    d.mean_index_richardson = static_cast<double>(iterate(d, m_max).i - iterate(d, h).i) / (m_max - h);
  } else {
    d.mean_index_richardson = d.mean_index_ratio;
  }
  d.mean_index_flag = std::abs(d.mean_index_richardson - d.mean_index) > 0.05;
  return d;
}

template <class Job>
void parallel_for(int count, int threads, Job job) {
  std::vector<std::string> errors(count);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int s = next++; s < count; s = next++) {
      try {
        job(s);
      } catch (const std::exception& e) {
        errors[s] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < std::min(threads, count); ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (int s = 0; s < count; ++s) {
    if (!errors[s].empty()) throw NumericalError(label(s) + ": " + errors[s]);
  }
}

const char* kConditionNames[5] = {
    "nu(2m-1) = nu(1)",
    "i(2m) >= 2T - e/2",
    "i(2m) + nu(2m) <= 2T + e/2 - 1",
    "i(2m+1) = 2T + i(1)",
    "i(2m-1) + nu(2m-1) = 2T - (i(1) + 2S+ - nu(1))",
};

}  // namespace

void ScenarioConfig::validate() const {
  const HypersurfaceModel m = HypersurfaceModel::from_json(model);
  if (m.half_dim() < 2) throw DomainError("scenario: n must be at least 2");
  if (m.symmetry().order_k < 2) throw DomainError("scenario: k must be at least 2");
  if (starts < 1) throw DomainError("scenario: starts must be positive");
  if (m_max < 1) throw DomainError("scenario: m_max must be positive");
  if (t_max < 1) throw DomainError("scenario: T_max must be positive");
  if (threads < 0) throw DomainError("scenario: threads must be non-negative");
  if (!(solver.grad_tol > 0) || !(solver.tol_orbit > 0)) {
    throw DomainError("scenario: tolerances must be positive");
  }
  if (solver.n_fourier < 4 || solver.quad_factor < 2 || solver.samples < 8 || solver.samples % 2 != 0) {
    throw DomainError("scenario: bad discretisation sizes");
  }
  for (const std::string& c : checks) {
    if (std::find(all_checks().begin(), all_checks().end(), c) == all_checks().end()) {
      throw DomainError("scenario: unknown check \"" + c + "\"");
    }
  }
}

ScenarioConfig scenario_from_json(const nlohmann::json& j) {
  try {
    ScenarioConfig c;
    c.model = j.at("model");
    c.starts = j.value("starts", c.starts);
    c.seed = j.value("seed", c.seed);
    c.m_max = j.value("m_max", c.m_max);
    c.t_max = j.value("T_max", c.t_max);
    c.threads = j.value("threads", c.threads);
    if (j.contains("checks")) c.checks = j.at("checks").get<std::vector<std::string>>();
    if (j.contains("solver")) {
      const nlohmann::json& s = j.at("solver");
      OrbitSolverOptions& o = c.solver;
      o.n_fourier = s.value("n_fourier", o.n_fourier);
      o.quad_factor = s.value("quad_factor", o.quad_factor);
      o.grad_tol = s.value("grad_tol", o.grad_tol);
      o.max_iterations = s.value("max_iterations", o.max_iterations);
      o.max_newton = s.value("max_newton", o.max_newton);
      o.tol_orbit = s.value("tol_orbit", o.tol_orbit);
      o.samples = s.value("samples", o.samples);
      o.max_divisor = s.value("max_divisor", o.max_divisor);
    }
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("scenario JSON: ") + e.what());
  }
}

nlohmann::json to_json(const ScenarioConfig& c) {
  const OrbitSolverOptions& o = c.solver;
  // Thread count is left out: it does not change the result.
  return {{"model", HypersurfaceModel::from_json(c.model).to_json()},
          {"starts", c.starts},
          {"seed", c.seed},
          {"m_max", c.m_max},
          {"T_max", c.t_max},
          {"checks", c.checks},
          {"solver",
           {{"n_fourier", o.n_fourier},
            {"quad_factor", o.quad_factor},
            {"grad_tol", o.grad_tol},
            {"max_iterations", o.max_iterations},
            {"max_newton", o.max_newton},
            {"tol_orbit", o.tol_orbit},
            {"samples", o.samples},
            {"max_divisor", o.max_divisor}}}};
}

std::vector<CheckResult> check_prop43(const OrbitCensus& census, const std::vector<IndexData>& index, int n) {
  std::vector<CheckResult> out;
  for (int i = 0; i < census.total(); ++i) {
    if (!census.orbits[i].p_cyclic) continue;
    if (i >= static_cast<int>(index.size())) throw DomainError("check_prop43: missing index data");
    const IndexData& d = index[i];
    const int lhs = d.i_1 + 2 * d.splitting_plus - d.nu_1;
    out.push_back(verdict("prop43", label(i) + ": i(y,1) + 2S+ - nu(y,1) >= n", lhs >= n,
                          {{"i", d.i_1}, {"S+", d.splitting_plus}, {"nu", d.nu_1}, {"n", n}, {"lhs", lhs}}));
  }
  return out;
}

std::vector<CheckResult> check_basic_inequalities(const OrbitCensus& census,
                                                  const std::vector<IndexData>& index, int m_max) {
  std::vector<CheckResult> out;
  for (int i = 0; i < census.total(); ++i) {
    const IndexData& d = index.at(i);
    const std::string y = label(i);
    out.push_back(verdict("basic", y + ": i(y,1) >= n", d.i_1 >= d.n, {{"i", d.i_1}, {"n", d.n}}));

    nlohmann::json w = {{"m_max", m_max}};
    bool mono = true;
    for (int m = 1; m < m_max && mono; ++m) {
      const int jump = iterate(d, m + 1).i - iterate(d, m).i;
      if (jump < 2) {
        mono = false;
        w = {{"m", m}, {"i(m)", iterate(d, m).i}, {"i(m+1)", iterate(d, m + 1).i}};
      }
    }
    out.push_back(verdict("basic", y + ": i(y,m+1) - i(y,m) >= 2", mono, w));
    out.push_back(verdict("basic", y + ": mean index > 2", d.mean_index > 2.0, {{"mean_index", d.mean_index}}));
    out.push_back(verdict("basic", y + ": nu(y,1) >= 1", d.nu_1 >= 1, {{"nu", d.nu_1}}));
    out.push_back(verdict("basic", y + ": S+(y) >= 1", d.splitting_plus >= 1, {{"S+", d.splitting_plus}}));
  }
  return out;
}

std::vector<CheckResult> check_bookkeeping(const OrbitCensus& census, const std::vector<IndexData>& index) {
  std::vector<CheckResult> out;
  const int s = census.total(), s1 = census.s1(), s2 = census.s2();
  out.push_back(verdict("bookkeeping", "S = s1 + 2 s2", s == s1 + 2 * s2,
                        {{"S", s}, {"s1", s1}, {"s2", s2}, {"unpaired", census.unpaired}}));
  if (census.p2) {
    const P2Refinement& r = *census.p2;
    out.push_back(verdict("bookkeeping", "s2 = s3 + 2 s4", s2 == r.s3 + 2 * r.s4 && r.unpaired == 0,
                          {{"s2", s2}, {"s3", r.s3}, {"s4", r.s4}, {"unpaired", r.unpaired}}));
  }
  for (int i = 0; i < s; ++i) {
    const CensusEntry& e = census.orbits[i];
    out.push_back(verdict("bookkeeping", label(i) + ": P-cyclic xor distinct P-image", e.dichotomy,
                          {{"p_cyclic", e.p_cyclic ? nlohmann::json(*e.p_cyclic) : nlohmann::json(nullptr)}}));
  }
  double closest = std::numeric_limits<double>::infinity();
  nlohmann::json closest_pair = nullptr;
  for (int a = 0; a < s; ++a) {
    for (int b = a + 1; b < s; ++b) {
      const double d = trace_distance(census.orbits[a].orbit, census.orbits[b].orbit);
      if (d < closest) {
        closest = d;
        closest_pair = {a + 1, b + 1};
      }
    }
  }
  if (s >= 2) {
    const double tol = CensusTolerances{}.distance_rel * census.orbits[0].orbit.model->diameter();
    out.push_back(verdict("bookkeeping", "pairwise geometric distinctness", closest > tol,
                          {{"closest", closest_pair}, {"distance", closest}, {"tolerance", tol}}));
  }
  for (const auto& [a, b] : census.asymmetric_pairs) {
    const IndexData& x = index.at(a);
    const IndexData& y = index.at(b);
    const bool ok = x.i_1 == y.i_1 && x.nu_1 == y.nu_1 && x.splitting_plus == y.splitting_plus &&
                    std::abs(x.mean_index - y.mean_index) <= 1e-6;
    out.push_back(verdict("bookkeeping", label(a) + ", " + label(b) + ": equal index data of y and Py", ok,
                          {{"i", {x.i_1, y.i_1}},
                           {"nu", {x.nu_1, y.nu_1}},
                           {"S+", {x.splitting_plus, y.splitting_plus}},
                           {"mean_index", {x.mean_index, y.mean_index}}}));
  }
  return out;
}

std::vector<CheckResult> check_bott(const OrbitCensus& census, const std::vector<SymplecticPath>& paths,
                                    const std::vector<IndexData>& index, const CyclicSymmetry& sym,
                                    int m_max) {
  std::vector<CheckResult> out;
  const SymplecticMatrix id = SymplecticMatrix::identity(sym.P.half_dim());
  for (int i = 0; i < census.total(); ++i) {
    const SymplecticPath& path = paths.at(i);
    // Left: crossings of the iterated path. Right: root sums of the index function.
    nlohmann::json bad = nlohmann::json::array();
    for (int m = 1; m <= m_max; ++m) {
      const SymplecticPath iter = iterate_path(path, id, m);
      const int lhs = omega_index_convex(iter, 1.0);
      const int nu_lhs = nullity_omega(iter.endpoint(), 1.0);
      const IterateIndex& rhs = iterate(index.at(i), m);
      if (lhs != rhs.i || nu_lhs != rhs.nu) {
        bad.push_back({{"m", m}, {"lhs", lhs}, {"rhs", rhs.i}, {"nu_lhs", nu_lhs}, {"nu_rhs", rhs.nu}});
      }
    }
    out.push_back(verdict("bott", label(i) + ": i_1(gamma^m) = sum over m-th roots, m <= " + std::to_string(m_max),
                          bad.empty(), bad.empty() ? nlohmann::json{{"m_max", m_max}} : bad));
    if (census.orbits[i].p_cyclic) {
      const int k = sym.order_k;
      const BottResult r = bott_check(path, sym.P, k, 1.0);
      out.push_back(verdict("bott", label(i) + ": P-twisted closure at m = k", r.holds(),
                            {{"k", k}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"nu_lhs", r.nullity_lhs}, {"nu_rhs", r.nullity_rhs}}));
    }
  }
  return out;
}

std::vector<CheckResult> check_theorems(const OrbitCensus& census, const std::vector<IndexData>& index,
                                        int n, bool exhaustive) {
  std::vector<CheckResult> out;
  auto add = [&](std::string name, bool ok, nlohmann::json w) {
    CheckResult r = verdict("theorems", std::move(name), ok, std::move(w));
    if (ok && !exhaustive) r.verdict = Verdict::Consistent;
    out.push_back(std::move(r));
  };
  const int s = census.total();
  add("S >= n", s >= n, {{"S", s}, {"n", n}});

  int elliptic = 0;
  nlohmann::json heights = nlohmann::json::array();
  for (int i = 0; i < s; ++i) {
    heights.push_back(index.at(i).elliptic_height);
    if (!index.at(i).hyperbolic) ++elliptic;
  }
  add("non-hyperbolic count >= 2 floor(n/2)", elliptic >= 2 * (n / 2),
      {{"non_hyperbolic", elliptic}, {"required", 2 * (n / 2)}, {"elliptic_heights", heights}});

  const int k = census.order_k;
  if (s == n && k >= 3) {
    nlohmann::json asym = nlohmann::json::array();
    for (int i = 0; i < s; ++i) {
      if (!census.orbits[i].p_cyclic) asym.push_back(i + 1);
    }
    add("S = n, k >= 3: all orbits P-cyclic symmetric", asym.empty(), {{"asymmetric", asym}, {"k", k}});
  } else {
    out.push_back({"theorems", "S = n, k >= 3: all orbits P-cyclic symmetric", Verdict::Skipped,
                   {{"S", s}, {"n", n}, {"k", k}}});
  }
  return out;
}

std::vector<CheckResult> check_residuals(const OrbitCensus& census, double tol_orbit) {
  std::vector<CheckResult> out;
  for (int i = 0; i < census.total(); ++i) {
    const ClosedCharacteristic& c = census.orbits[i].orbit;
    const bool ok = c.residual <= tol_orbit && c.energy_defect <= tol_orbit && c.closure_defect <= tol_orbit;
    out.push_back(verdict("residual", label(i) + ": residual, energy and closure <= tol_orbit", ok,
                          {{"residual", c.residual},
                           {"energy_defect", c.energy_defect},
                           {"closure_defect", c.closure_defect},
                           {"tol_orbit", tol_orbit}}));
  }
  return out;
}

bool IndexJumpCandidate::all() const {
  return std::all_of(conditions.begin(), conditions.end(), [](bool b) { return b; });
}

IndexJumpCandidate index_jump_conditions(const IndexData& d, int T, int m) {
  if (m < 1) throw DomainError("index_jump_conditions: m must be positive");
  const IterateIndex& lo = iterate(d, 2 * m - 1);
  const IterateIndex& mid = iterate(d, 2 * m);
  const IterateIndex& hi = iterate(d, 2 * m + 1);
  const int e = d.elliptic_height;
  IndexJumpCandidate c;
  c.m = m;
  c.conditions = {
      lo.nu == d.nu_1,
      2 * mid.i >= 4 * T - e,
      2 * (mid.i + mid.nu) <= 4 * T + e - 2,
      hi.i == 2 * T + d.i_1,
      lo.i + lo.nu == 2 * T - (d.i_1 + 2 * d.splitting_plus - d.nu_1),
  };
  return c;
}

int index_jump_depth(double min_mean_index, int t_max) {
  const int m = static_cast<int>(std::ceil(t_max / min_mean_index)) + 2;
  return 2 * m + 1;
}

IndexJumpResult search_index_jump(const std::vector<IndexData>& reps_index, const std::vector<int>& reps,
                                  int t_max) {
  IndexJumpResult res;
  res.representatives = reps;
  res.t_max = t_max;
  const int q = static_cast<int>(reps_index.size());
  if (q == 0) {
    res.ledger = nlohmann::json::object();
    return res;
  }
  struct Tally {
    int candidates = 0;
    int skipped = 0;
    int required_depth = 0;
    int passed[5] = {0, 0, 0, 0, 0};
    int first_t[5] = {0, 0, 0, 0, 0};
  };
  std::vector<Tally> tally(q);
  int scanned = 0;
  for (int T = 1; T <= t_max && !res.T; ++T) {
    scanned = T;
    bool all_ok = true;
    std::vector<int> chosen(q, 0);
    for (int j = 0; j < q; ++j) {
      const IndexData& d = reps_index[j];
      Tally& t = tally[j];
      const int m0 = static_cast<int>(std::lround(T / d.mean_index));
      for (int m = std::max(1, m0 - 2); m <= m0 + 2; ++m) {
        if (2 * m + 1 > max_iterate(d)) {
          ++t.skipped;
          t.required_depth = std::max(t.required_depth, 2 * m + 1);
          continue;
        }
        const IndexJumpCandidate c = index_jump_conditions(d, T, m);
        ++t.candidates;
        for (int k = 0; k < 5; ++k) {
          if (c.conditions[k]) {
            ++t.passed[k];
            if (t.first_t[k] == 0) t.first_t[k] = T;
          }
        }
        if (c.all() && chosen[j] == 0) chosen[j] = m;
      }
      if (chosen[j] == 0) all_ok = false;
    }
    if (all_ok) {
      res.T = T;
      res.m = chosen;
    }
  }

  nlohmann::json per = nlohmann::json::array();
  for (int j = 0; j < q; ++j) {
    const Tally& t = tally[j];
    nlohmann::json conds = nlohmann::json::array();
    for (int k = 0; k < 5; ++k) {
      conds.push_back({{"condition", kConditionNames[k]},
                       {"passed", t.passed[k]},
                       {"first_T", t.first_t[k] ? nlohmann::json(t.first_t[k]) : nlohmann::json(nullptr)}});
    }
    nlohmann::json o = {{"orbit", reps[j] + 1},
                        {"mean_index", reps_index[j].mean_index},
                        {"elliptic_height", reps_index[j].elliptic_height},
                        {"candidates", t.candidates},
                        {"conditions", conds}};
    if (t.skipped > 0) o["skipped"] = {{"candidates", t.skipped}, {"required_depth", t.required_depth}};
    if (res.T) {
      const IndexJumpCandidate c = index_jump_conditions(reps_index[j], *res.T, res.m[j]);
      o["at_tuple"] = {{"m", res.m[j]}, {"conditions", c.conditions}};
    }
    per.push_back(std::move(o));
  }
  res.ledger = {{"scanned_T", scanned}, {"per_orbit", per}};
  return res;
}

bool VerificationReport::failed() const {
  return std::any_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.verdict == Verdict::Fail; });
}

int exit_code(const VerificationReport& r) { return r.failed() ? 1 : 0; }

namespace {

template <class F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const DomainError& e) {
    throw DomainError(name + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(name + ": " + e.what());
  }
}

bool wants(const ScenarioConfig& c, const std::string& name) {
  return std::find(c.checks.begin(), c.checks.end(), name) != c.checks.end();
}

}  // namespace

VerificationReport run_scenario(const ScenarioConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  stage("config", [&] { config.validate(); });
  VerificationReport rep;
  rep.config = config;

  const auto model = stage("model", [&] {
    return std::make_shared<const HypersurfaceModel>(HypersurfaceModel::from_json(config.model));
  });
  const int n = model->half_dim();
  const int threads = config.threads > 0 ? config.threads : default_thread_count();

  OrbitSearchOptions search;
  search.starts = config.starts;
  search.seed = config.seed;
  search.threads = threads;
  search.solver = config.solver;
  const OrbitSearchResult found = stage("orbit search", [&] { return find_orbits(model, search); });
  rep.diagnostics = found.diagnostics;

  rep.census = stage("census", [&] { return build_census(found.orbits, model->symmetry()); });
  const int s = rep.census.total();

  // Iterates deep enough for the index-jump window at any mean index > 2.
  const int depth = std::max(config.m_max, wants(config, "index_jump") ? index_jump_depth(2.0, config.t_max) : 0);
  std::vector<std::optional<SymplecticPath>> slots(s);
  std::vector<IndexData> deep(s);
  stage("index", [&] {
    parallel_for(s, threads, [&](int i) {
      slots[i] = linearized_path(rep.census.orbits[i].orbit, 1);
      deep[i] = index_iterates(*slots[i], depth);
    });
  });
  std::vector<SymplecticPath> paths;
  for (auto& p : slots) paths.push_back(std::move(*p));
  for (const IndexData& d : deep) rep.index.push_back(trimmed(d, config.m_max));

  for (const std::string& c : all_checks()) {
    if (!wants(config, c)) continue;
    std::vector<CheckResult> r;
    if (c == "residual") r = check_residuals(rep.census, config.solver.tol_orbit);
    if (c == "bookkeeping") r = stage(c, [&] { return check_bookkeeping(rep.census, rep.index); });
    if (c == "prop43") r = check_prop43(rep.census, rep.index, n);
    if (c == "basic") r = check_basic_inequalities(rep.census, rep.index, config.m_max);
    if (c == "bott") r = stage(c, [&] { return check_bott(rep.census, paths, rep.index, model->symmetry(), config.m_max); });
    if (c == "theorems") r = check_theorems(rep.census, rep.index, n, model->is_ellipsoid());
    if (c == "index_jump") {
      const std::vector<int> reps = rep.census.representatives();
      std::vector<IndexData> ri;
      for (int i : reps) ri.push_back(deep[i]);
      IndexJumpResult j = search_index_jump(ri, reps, config.t_max);
      nlohmann::json w = {{"T_max", config.t_max}};
      if (j.T) {
        w = {{"T", *j.T}, {"m", j.m}};
        r.push_back({"index_jump", "tuple (T, m_j) with all five window conditions", Verdict::Pass, w});
      } else {
        // Absence within T_max is not a refutation.
        r.push_back({"index_jump", "tuple (T, m_j) with all five window conditions", Verdict::Skipped, w});
      }
      rep.index_jump = std::move(j);
    }
    rep.checks.insert(rep.checks.end(), r.begin(), r.end());
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

nlohmann::json to_json(const VerificationReport& r, bool with_timing) {
  nlohmann::json checks = nlohmann::json::array();
  std::map<std::string, int> counts{{"pass", 0}, {"fail", 0}, {"skipped", 0}, {"consistent", 0}};
  for (const CheckResult& c : r.checks) {
    checks.push_back({{"check", c.check}, {"name", c.name}, {"verdict", to_string(c.verdict)}, {"witness", c.witness}});
    ++counts[to_string(c.verdict)];
  }
  nlohmann::json index = nlohmann::json::array();
  for (const IndexData& d : r.index) index.push_back(to_json(d));
  nlohmann::json jump = nullptr;
  if (r.index_jump) {
    const IndexJumpResult& j = *r.index_jump;
    nlohmann::json reps = nlohmann::json::array();
    for (int i : j.representatives) reps.push_back(i + 1);
    jump = {{"T_max", j.t_max},
            {"T", j.T ? nlohmann::json(*j.T) : nlohmann::json(nullptr)},
            {"m", j.m},
            {"representatives", reps},
            {"ledger", j.ledger}};
  }
  nlohmann::json out = {{"config", to_json(r.config)},
                        {"census", to_json(r.census, false)},
                        {"index", index},
                        {"checks", checks},
                        {"index_jump", jump},
                        {"diagnostics", r.diagnostics},
                        {"summary", counts},
                        {"exit_code", exit_code(r)}};
  if (with_timing) out["seconds"] = r.seconds;
  return out;
}

std::string format_table(const VerificationReport& r) {
  std::ostringstream os;
  const OrbitCensus& c = r.census;
  os << "census: S=" << c.total() << " s1=" << c.s1() << " s2=" << c.s2();
  if (c.p2) os << " s3=" << c.p2->s3 << " s4=" << c.p2->s4;
  os << " k=" << c.order_k << "\n\n";
  os << std::left << std::setw(6) << "orbit" << std::setw(14) << "tau" << std::setw(6) << "i(1)" << std::setw(6)
     << "nu(1)" << std::setw(5) << "S+" << std::setw(10) << "mean" << std::setw(4) << "e" << std::setw(10)
     << "p_cyclic" << "residual\n";
  for (int i = 0; i < c.total(); ++i) {
    const IndexData& d = r.index.at(i);
    const CensusEntry& e = c.orbits[i];
    os << std::setw(6) << label(i) << std::setw(14) << std::setprecision(8) << e.orbit.tau << std::setw(6) << d.i_1
       << std::setw(6) << d.nu_1 << std::setw(5) << d.splitting_plus << std::setw(10) << std::setprecision(6)
       << d.mean_index << std::setw(4) << d.elliptic_height << std::setw(10)
       << (e.p_cyclic ? "l=" + std::to_string(*e.p_cyclic) : std::string("-")) << std::setprecision(3)
       << e.orbit.residual << "\n";
  }
  os << "\n";
  for (const CheckResult& k : r.checks) {
    os << std::setw(12) << to_string(k.verdict) << std::setw(13) << k.check << k.name;
    if (k.verdict == Verdict::Fail || k.check == "index_jump") os << "  " << k.witness.dump();
    os << "\n";
  }
  if (!r.diagnostics.empty()) {
    os << "\n" << r.diagnostics.size() << " failed start(s)\n";
    for (const std::string& d : r.diagnostics) os << "  " << d << "\n";
  }
  return os.str();
}

}  // namespace closedchar
