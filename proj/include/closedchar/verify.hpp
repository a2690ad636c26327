#pragma once

// Scenario runner: orbit search, census, index data and the inequality /
// theorem checks, with a canonical JSON report.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "closedchar/census.hpp"
#include "closedchar/index.hpp"
#include "closedchar/orbit.hpp"

namespace closedchar {

enum class Verdict { Pass, Fail, Skipped, Consistent };
std::string to_string(Verdict v);

struct CheckResult {
  std::string check;   ///< family: prop43, basic, bookkeeping, bott, theorems, residual, index_jump
  std::string name;    ///< the individual assertion
  Verdict verdict = Verdict::Pass;
  nlohmann::json witness;
};

/// Check families in report order.
const std::vector<std::string>& all_checks();

struct ScenarioConfig {
  nlohmann::json model;
  int starts = 20;
  std::uint64_t seed = 42;
  int m_max = 12;
  int t_max = 200;
  std::vector<std::string> checks = all_checks();
  int threads = 0;
  OrbitSolverOptions solver;

  /// Throws DomainError on n < 2, k < 2, non-positive counts or tolerances,
  /// or unknown check names.
  void validate() const;
};
ScenarioConfig scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScenarioConfig& c);

struct IndexJumpCandidate {
  int m = 0;
  std::vector<bool> conditions;  ///< the five window conditions, in order
  bool all() const;
};

struct IndexJumpResult {
  std::optional<int> T;
  std::vector<int> m;             ///< one per representative, when T is set
  std::vector<int> representatives;
  nlohmann::json ledger;
  int t_max = 0;
};

// Individual check families. `index` holds one entry per census orbit.
std::vector<CheckResult> check_prop43(const OrbitCensus& census, const std::vector<IndexData>& index, int n);
std::vector<CheckResult> check_basic_inequalities(const OrbitCensus& census,
                                                  const std::vector<IndexData>& index, int m_max);
std::vector<CheckResult> check_bookkeeping(const OrbitCensus& census, const std::vector<IndexData>& index);
/// Bott closure: the index of the m-th iterated path against the root sums
/// in `index` for m <= m_max, and the P-twisted version at m = k for
/// P-cyclic orbits.
std::vector<CheckResult> check_bott(const OrbitCensus& census, const std::vector<SymplecticPath>& paths,
                                    const std::vector<IndexData>& index, const CyclicSymmetry& sym,
                                    int m_max);
/// Exhaustive censuses (ellipsoids) give pass / fail, others consistent / fail.
std::vector<CheckResult> check_theorems(const OrbitCensus& census, const std::vector<IndexData>& index,
                                        int n, bool exhaustive);
std::vector<CheckResult> check_residuals(const OrbitCensus& census, double tol_orbit);

/// Window conditions for one orbit at (T, m).
IndexJumpCandidate index_jump_conditions(const IndexData& d, int T, int m);
/// Scans T = 1..t_max with m_j = round(T / mean index) ± 2. The index data
/// must carry iterates up to 2 m_j + 1; shallower data is reported in the
/// ledger as skipped.
IndexJumpResult search_index_jump(const std::vector<IndexData>& reps_index,
                                  const std::vector<int>& reps, int t_max);
/// Iterate depth that the search needs for a given smallest mean index.
int index_jump_depth(double min_mean_index, int t_max);

struct VerificationReport {
  ScenarioConfig config;
  OrbitCensus census;
  std::vector<IndexData> index;   ///< per census orbit, iterates up to m_max
  std::vector<CheckResult> checks;
  std::optional<IndexJumpResult> index_jump;
  std::vector<std::string> diagnostics;
  double seconds = 0.0;

  bool failed() const;
};

/// Deterministic end-to-end run. Errors are rethrown with the stage named.
VerificationReport run_scenario(const ScenarioConfig& config);

/// Canonical JSON: byte-stable for fixed config; timing only when asked.
nlohmann::json to_json(const VerificationReport& r, bool with_timing = false);
std::string format_table(const VerificationReport& r);

/// 0 when nothing failed, 1 otherwise.
int exit_code(const VerificationReport& r);

}  // namespace closedchar
