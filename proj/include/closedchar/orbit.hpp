#pragma once

// Closed characteristics from critical points of the dual action, and the
// linearised flow along them.

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "closedchar/characteristic.hpp"
#include "closedchar/dual_action.hpp"
#include "closedchar/path.hpp"

namespace closedchar {

struct OrbitSolverOptions {
  int n_fourier = 64;
  int quad_factor = 8;         ///< quadrature nodes per Fourier mode
  double grad_tol = 1e-9;      ///< L^2 norm of Φ'(u)
  int max_iterations = 3000;   ///< quasi-Newton iterations
  int max_newton = 15;
  double tol_orbit = 1e-8;
  int samples = 512;           ///< samples per period of a returned orbit
  int max_divisor = 12;        ///< minimality is checked for d = 2..max_divisor
};

struct MinimizeResult {
  DualLoop u;
  double value = 0.0;
  double grad_norm = 0.0;   ///< L^2 norm of the full gradient
  int iterations = 0;       ///< quasi-Newton iterations
  int newton_steps = 0;
};

/// Loops whose only non-zero components lie in the plane (q_i, p_i);
/// plane = -1 means no restriction.
DualLoop random_seed(int n, int n_fourier, std::mt19937_64& rng, int plane = -1);

/// Quasi-Newton descent (skipped for near-critical seeds) followed by a
/// Newton polish with the time-shift direction removed. Throws
/// NumericalError on non-convergence or when u collapses to 0.
MinimizeResult minimize(const HypersurfaceModel& model, const DualLoop& seed,
                        const OrbitSolverOptions& opts = {}, int plane = -1);

/// (τ, y) from a critical loop: x_u = Mu - ξ, h = H(x_u), m from trace
/// self-matching, then y(t) = h^{-1/α} x_u(h^{(2-α)/α} t) polished by
/// shooting and certified by re-integration.
ClosedCharacteristic extract_orbit(std::shared_ptr<const HypersurfaceModel> model, const DualLoop& u,
                                   const OrbitSolverOptions& opts = {});

/// u(t) = (mτ)^{(1-α)/(2-α)} ẏ(mτ t), the critical loop of the m-th iterate.
DualLoop loop_from_orbit(const ClosedCharacteristic& orbit, int m, int n_fourier);

/// y(t) for ẏ = J H'(y).
Vec flow(const HypersurfaceModel& model, const Vec& y0, double t, double tol = 1e-13);
/// y(t) and the fundamental solution Z(t) of ż = J H''(y) z.
std::pair<Vec, Mat> flow_with_variation(const HypersurfaceModel& model, const Vec& y0, double t,
                                        double tol = 1e-13);

/// γ(t) = Z(t) on [0, mτ]. Symplectic defect is held below 1e-9 (relative
/// to |γ|^2) by tightening the integrator tolerance.
SymplecticPath linearized_path(const ClosedCharacteristic& orbit, int m = 1);

struct FloquetReport {
  SpectrumReport spectrum;
  int elliptic_height = 0;
  bool hyperbolic = false;
};
FloquetReport floquet(const SymplecticMatrix& monodromy);
FloquetReport floquet(const ClosedCharacteristic& orbit);

struct OrbitSearchOptions {
  int starts = 20;
  std::uint64_t seed = 42;
  int threads = 0;  ///< 0: CLOSEDCHAR_THREADS or hardware concurrency
  bool p_image_seeds = true;
  OrbitSolverOptions solver;
};

struct OrbitSearchResult {
  std::vector<ClosedCharacteristic> orbits;  ///< one per successful start, in start order
  std::vector<DualLoop> loops;
  std::vector<std::string> diagnostics;      ///< failed starts
};

/// Multi-start search. Start s uses plane (s mod (n+1)) - 1; found loops
/// are re-seeded through P when requested. Deterministic for fixed options.
OrbitSearchResult find_orbits(std::shared_ptr<const HypersurfaceModel> model,
                              const OrbitSearchOptions& opts = {});

/// Worker count from CLOSEDCHAR_THREADS, else hardware concurrency.
int default_thread_count();

}  // namespace closedchar
