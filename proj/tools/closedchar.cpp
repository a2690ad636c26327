// closedchar: verify | find-orbits | index
//
// Exit codes: 0 pass / consistent, 1 a check failed, 2 error.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "closedchar/error.hpp"
#include "closedchar/verify.hpp"

using namespace closedchar;

namespace {

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path);
  out << text;
}

// "rotation:k" or "file:<path>".
CyclicSymmetry parse_symmetry(const std::string& spec, int n) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw DomainError("--symmetry expects rotation:k or file:<path>");
  const std::string kind = spec.substr(0, colon), arg = spec.substr(colon + 1);
  if (kind == "rotation") {
    int k = 0;
    try {
      k = std::stoi(arg);
    } catch (const std::exception&) {
      throw DomainError("--symmetry rotation:k needs an integer k");
    }
    return rotation_symmetry(n, k);
  }
  if (kind == "file") return symmetry_from_json(read_json(arg), n);
  throw DomainError("unknown symmetry kind \"" + kind + "\"");
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed characteristics on P-cyclic symmetric convex hypersurfaces"};
  app.require_subcommand(1);

  std::string scenario_path, out_path, format = "json", checks;
  int threads = 0;
  bool timing = false;
  auto* verify = app.add_subcommand("verify", "Run a scenario and report every check");
  verify->add_option("scenario", scenario_path, "Scenario JSON")->required();
  verify->add_option("--out", out_path, "Write the report here instead of stdout");
  verify->add_option("--format", format, "json or table")->check(CLI::IsMember({"json", "table"}));
  verify->add_option("--checks", checks, "Comma-separated subset of checks");
  verify->add_option("--threads", threads, "Worker threads (default: CLOSEDCHAR_THREADS or all cores)");
  verify->add_flag("--timing", timing, "Include wall time in the JSON report");

  std::string model_path, orbits_out;
  int starts = 20, n_fourier = 64, orbit_threads = 0;
  std::uint64_t seed = 42;
  auto* find = app.add_subcommand("find-orbits", "Multi-start search for closed characteristics");
  find->add_option("model", model_path, "Model JSON")->required();
  find->add_option("--starts", starts, "Number of starts")->check(CLI::PositiveNumber);
  find->add_option("--seed", seed, "RNG seed");
  find->add_option("--n-fourier", n_fourier, "Fourier modes")->check(CLI::Range(4, 4096));
  find->add_option("--threads", orbit_threads, "Worker threads");
  find->add_option("--out", orbits_out, "Write the census here instead of stdout");

  std::string path_file, omega_text, symmetry_text;
  int m_max = 12;
  auto* index = app.add_subcommand("index", "Index data of a sampled symplectic path");
  index->add_option("--path", path_file, "Path sample JSON")->required();
  index->add_option("--omega", omega_text, "Unit complex number, e.g. -1 or 0.6+0.8i");
  index->add_option("--symmetry", symmetry_text, "rotation:k or file:<path>");
  index->add_option("--m-max", m_max, "Iteration depth")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) {
      ScenarioConfig config = scenario_from_json(read_json(scenario_path));
      if (!checks.empty()) config.checks = split_commas(checks);
      if (threads > 0) config.threads = threads;
      config.validate();
      const VerificationReport report = run_scenario(config);
      write_text(out_path, format == "table" ? format_table(report) : to_json(report, timing).dump(2) + "\n");
      return exit_code(report);
    }
    if (*find) {
      auto model = std::make_shared<const HypersurfaceModel>(HypersurfaceModel::from_json(read_json(model_path)));
      OrbitSearchOptions opts;
      opts.starts = starts;
      opts.seed = seed;
      opts.threads = orbit_threads;
      opts.solver.n_fourier = n_fourier;
      const OrbitSearchResult found = find_orbits(model, opts);
      const OrbitCensus census = build_census(found.orbits, model->symmetry());
      nlohmann::json out = to_json(census, true);
      out["model"] = model->to_json();
      out["diagnostics"] = found.diagnostics;
      write_text(orbits_out, out.dump(2) + "\n");
      return 0;
    }
    if (*index) {
      const SymplecticPath path = path_from_json(read_json(path_file));
      nlohmann::json out = to_json(index_iterates(path, m_max));
      const Complex omega = omega_text.empty() ? Complex(1.0, 0.0) : parse_complex(omega_text);
      if (!omega_text.empty()) {
        out["omega"] = {{"re", omega.real()}, {"im", omega.imag()}};
        out["i_omega"] = omega_index_convex(path, omega);
        out["nu_omega"] = nullity_omega(path.endpoint(), omega);
        const SplittingNumbers s = splitting_numbers_perturbative(path, omega);
        out["splitting_omega"] = {{"plus", s.plus}, {"minus", s.minus}};
      }
      if (!symmetry_text.empty()) {
        const CyclicSymmetry sym = parse_symmetry(symmetry_text, path.half_dim());
        out["symmetry"] = to_json(sym);
        out["i_omega_P"] = p_omega_index_convex(path, sym.P, omega);
        out["nu_omega_P"] = p_nullity(path.endpoint(), sym.P, omega);
        const SplittingNumbers s = p_splitting_numbers(path, sym.P, omega);
        out["splitting_omega_P"] = {{"plus", s.plus}, {"minus", s.minus}};
      }
      std::cout << out.dump(2) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
