#include <complex>

#include "doctest.h"

#include "closedchar/error.hpp"
#include "closedchar/verify.hpp"

using namespace closedchar;

namespace {

std::shared_ptr<const HypersurfaceModel> ellipsoid2(int k = 3) {
  return std::make_shared<const HypersurfaceModel>(
      HypersurfaceModel::ellipsoid({1.0, 2.5}, 1.5, rotation_symmetry(2, k)));
}

struct Fixture {
  std::shared_ptr<const HypersurfaceModel> model = ellipsoid2();
  OrbitCensus census = build_census(known_orbits(model, 256), model->symmetry());
  std::vector<SymplecticPath> paths;
  std::vector<IndexData> index;
  Fixture() {
    for (const auto& e : census.orbits) {
      paths.push_back(linearized_path(e.orbit, 1));
      index.push_back(index_iterates(paths.back(), index_jump_depth(2.0, 40)));
    }
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

IndexData synthetic(int n, int i1, int nu1, int splus) {
  IndexData d;
  d.n = n;
  d.i_1 = i1;
  d.nu_1 = nu1;
  d.splitting_plus = splus;
  d.mean_index = 3.0;
  for (int m = 1; m <= 12; ++m) d.iterates[m] = {i1 + 3 * (m - 1), nu1};
  return d;
}

bool any_fail(const std::vector<CheckResult>& r) {
  for (const auto& c : r) {
    if (c.verdict == Verdict::Fail) return true;
  }
  return false;
}

// Direct transcription of the five window conditions.
bool window(const IndexData& d, int T, int m) {
  auto i = [&](int k) { return d.iterates.at(k).i; };
  auto nu = [&](int k) { return d.iterates.at(k).nu; };
  const double e = d.elliptic_height;
  return nu(2 * m - 1) == d.nu_1 && i(2 * m) >= 2.0 * T - e / 2 && i(2 * m) + nu(2 * m) <= 2.0 * T + e / 2 - 1 &&
         i(2 * m + 1) == 2 * T + d.i_1 &&
         i(2 * m - 1) + nu(2 * m - 1) == 2 * T - (d.i_1 + 2 * d.splitting_plus - d.nu_1);
}

}  // namespace

TEST_CASE("prop43 on the ellipsoid census") {
  const Fixture& f = fixture();
  const auto r = check_prop43(f.census, f.index, 2);
  REQUIRE(r.size() == 2);
  // y1: 2 + 2 - 1 = 3, y2: 6 + 2 - 1 = 7.
  CHECK(r[0].witness.at("lhs") == 3);
  CHECK(r[1].witness.at("lhs") == 7);
  CHECK_FALSE(any_fail(r));
}

TEST_CASE("prop43 reports a synthetic violation with its witness") {
  const Fixture& f = fixture();
  std::vector<IndexData> bad = f.index;
  bad[0] = synthetic(2, 1, 1, 0);
  const auto r = check_prop43(f.census, bad, 2);
  REQUIRE(r.size() == 2);
  CHECK(r[0].verdict == Verdict::Fail);
  CHECK(r[0].witness.at("lhs") == 0);
  CHECK(r[0].witness.at("i") == 1);
  CHECK(r[0].witness.at("S+") == 0);
  CHECK(r[0].witness.at("nu") == 1);
  // The witness alone reproduces the verdict.
  const auto& w = r[0].witness;
  CHECK(w.at("i").get<int>() + 2 * w.at("S+").get<int>() - w.at("nu").get<int>() < w.at("n").get<int>());
  CHECK(r[1].verdict == Verdict::Pass);
}

TEST_CASE("basic inequalities") {
  const Fixture& f = fixture();
  CHECK_FALSE(any_fail(check_basic_inequalities(f.census, f.index, 12)));

  std::vector<IndexData> bad = f.index;
  bad[1] = synthetic(2, 6, 1, 1);
  bad[1].iterates[5].i = bad[1].iterates[4].i + 1;
  const auto r = check_basic_inequalities(f.census, bad, 12);
  int fails = 0;
  for (const auto& c : r) {
    if (c.verdict == Verdict::Fail) {
      ++fails;
      CHECK(c.witness.at("m") == 4);
    }
  }
  CHECK(fails == 1);
}

TEST_CASE("Bott closure on census orbits") {
  const Fixture& f = fixture();
  const auto r = check_bott(f.census, f.paths, f.index, f.model->symmetry(), 6);
  CHECK(r.size() == 4);
  CHECK_FALSE(any_fail(r));
  // A wrong right-hand side is caught.
  std::vector<IndexData> bad = f.index;
  bad[0].iterates[3].i += 2;
  const auto rb = check_bott(f.census, f.paths, bad, f.model->symmetry(), 4);
  CHECK(rb[0].verdict == Verdict::Fail);
  CHECK(rb[0].witness[0].at("m") == 3);
}

TEST_CASE("theorem checks: pass on exhaustive censuses, consistent otherwise") {
  const Fixture& f = fixture();
  const auto r = check_theorems(f.census, f.index, 2, true);
  REQUIRE(r.size() == 3);
  for (const auto& c : r) CHECK(c.verdict == Verdict::Pass);
  for (const auto& c : check_theorems(f.census, f.index, 2, false)) CHECK(c.verdict == Verdict::Consistent);
  const auto r3 = check_theorems(f.census, f.index, 3, true);
  CHECK(r3[0].verdict == Verdict::Fail);
  CHECK(r3[0].witness.at("S") == 2);
  CHECK(r3[2].verdict == Verdict::Skipped);
}

TEST_CASE("bookkeeping on a symmetric census") {
  const Fixture& f = fixture();
  const auto r = check_bookkeeping(f.census, f.index);
  CHECK_FALSE(any_fail(r));
  CHECK(r[0].witness.at("S") == 2);
}

TEST_CASE("index-jump search against a brute-force scan") {
  const Fixture& f = fixture();
  const IndexData& y1 = f.index[0];
  CHECK(y1.mean_index == doctest::Approx(2.8).epsilon(1e-9));
  const auto r = search_index_jump({y1}, {0}, 40);
  REQUIRE(r.T.has_value());
  CHECK(window(y1, *r.T, r.m[0]));
  // No T below the returned one admits any m at all.
  int brute = 0;
  for (int T = 1; T <= 40 && brute == 0; ++T) {
    for (int m = 1; 2 * m + 1 <= 2 * (40 / 2 + 2) + 1 && brute == 0; ++m) {
      if (window(y1, T, m)) brute = T;
    }
  }
  CHECK(brute == *r.T);
  // The iterates used agree with directly computed iterated paths.
  for (int k : {2 * r.m[0] - 1, 2 * r.m[0], 2 * r.m[0] + 1}) {
    const SymplecticPath it = iterate_path(f.paths[0], SymplecticMatrix::identity(2), k);
    CHECK(omega_index_convex(it, 1.0) == y1.iterates.at(k).i);
  }
  CHECK(r.ledger.at("per_orbit")[0].at("at_tuple").at("m") == r.m[0]);
}

TEST_CASE("index-jump search on the two-orbit census and edge cases") {
  const Fixture& f = fixture();
  const auto r = search_index_jump(f.index, {0, 1}, 40);
  REQUIRE(r.T.has_value());
  CHECK(*r.T == 14);
  CHECK(r.m == std::vector<int>{5, 2});
  for (int j = 0; j < 2; ++j) CHECK(window(f.index[j], *r.T, r.m[j]));

  const auto empty = search_index_jump({}, {}, 40);
  CHECK_FALSE(empty.T.has_value());
  CHECK(empty.ledger.empty());

  // Too shallow data is skipped, not evaluated.
  IndexData shallow = synthetic(2, 2, 1, 1);
  const auto s = search_index_jump({shallow}, {0}, 40);
  CHECK_FALSE(s.T.has_value());
  CHECK(s.ledger.at("per_orbit")[0].contains("skipped"));
}

TEST_CASE("scenario configuration") {
  nlohmann::json j = {{"model", ellipsoid2()->to_json()}, {"starts", 4}, {"checks", {"prop43"}}};
  const ScenarioConfig c = scenario_from_json(j);
  CHECK(c.starts == 4);
  CHECK(c.checks == std::vector<std::string>{"prop43"});
  CHECK(c.m_max == 12);
  CHECK(c.t_max == 200);

  nlohmann::json bad = j;
  bad["checks"] = {"nonsense"};
  CHECK_THROWS_AS(scenario_from_json(bad), DomainError);
  bad = j;
  bad["starts"] = 0;
  CHECK_THROWS_AS(scenario_from_json(bad), DomainError);
  bad = j;
  bad["model"]["radii_sq"] = {1.0};
  bad["model"]["symmetry"] = {{"type", "rotation"}, {"k", 3}};
  CHECK_THROWS_AS(scenario_from_json(bad), DomainError);
  CHECK_THROWS_AS(scenario_from_json(nlohmann::json::object()), DomainError);
}

TEST_CASE("small scenario: selected checks, determinism, exit code") {
  ScenarioConfig c;
  c.model = ellipsoid2()->to_json();
  c.starts = 3;
  c.checks = {"prop43", "residual"};
  const VerificationReport a = run_scenario(c);
  for (const auto& r : a.checks) CHECK((r.check == "prop43" || r.check == "residual"));
  CHECK_FALSE(a.index_jump.has_value());
  CHECK(exit_code(a) == 0);
  CHECK(a.census.total() == 2);
  c.threads = 1;
  const VerificationReport b = run_scenario(c);
  CHECK(to_json(a).dump() == to_json(b).dump());
  CHECK_FALSE(to_json(a).contains("seconds"));
  CHECK(to_json(a, true).contains("seconds"));
  CHECK(format_table(a).find("prop43") != std::string::npos);
}
