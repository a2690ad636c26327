#include "closedchar/orbit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <thread>

#include <boost/numeric/odeint.hpp>
#include <ceres/gradient_problem.h>
#include <ceres/gradient_problem_solver.h>
#include <unsupported/Eigen/FFT>

#include "closedchar/error.hpp"

namespace closedchar {

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::vector<double>;

struct FlowRhs {
  const HypersurfaceModel* model;
  Mat j;
  void operator()(const State& x, State& dx, double /*t*/) const {
    const int d = static_cast<int>(j.rows());
    const Vec y = Eigen::Map<const Vec>(x.data(), d);
    Eigen::Map<Vec>(dx.data(), d) = j * model->ham_grad(y);
  }
};

struct VariationRhs {
  const HypersurfaceModel* model;
  Mat j;
  void operator()(const State& x, State& dx, double /*t*/) const {
    const int d = static_cast<int>(j.rows());
    const Vec y = Eigen::Map<const Vec>(x.data(), d);
    const Eigen::Map<const Mat> z(x.data() + d, d, d);
    Eigen::Map<Vec>(dx.data(), d) = j * model->ham_grad(y);
    Eigen::Map<Mat>(dx.data() + d, d, d) = j * model->ham_hess(y) * z;
  }
};

template <class Rhs>
void integrate(const Rhs& rhs, State& x, double t0, double t1, double tol) {
  if (!(t1 > t0)) return;
  auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_fehlberg78<State>());
  odeint::integrate_adaptive(stepper, rhs, x, t0, t1, (t1 - t0) / 16);
}

State pack(const Vec& y, const Mat& z) {
  const int d = static_cast<int>(y.size());
  State x(d + d * d);
  Eigen::Map<Vec>(x.data(), d) = y;
  Eigen::Map<Mat>(x.data() + d, d, d) = z;
  return x;
}

std::vector<int> plane_indices(const DualLoop& shape, int plane) {
  std::vector<int> idx;
  const int n = shape.half_dim();
  for (int k = 1; k <= shape.n_fourier(); ++k) {
    for (int part = 0; part < 2; ++part) {
      const int off = shape.offset(k, part);
      if (plane < 0) {
        for (int c = 0; c < 2 * n; ++c) idx.push_back(off + c);
      } else {
        idx.push_back(off + plane);
        idx.push_back(off + n + plane);
      }
    }
  }
  return idx;
}

class ReducedAction final : public ceres::FirstOrderFunction {
 public:
  ReducedAction(const DualAction& action, DualLoop base, std::vector<int> idx)
      : action_(action), base_(std::move(base)), idx_(std::move(idx)) {}

  bool Evaluate(const double* p, double* cost, double* grad) const override {
    DualLoop u = base_;
    for (size_t i = 0; i < idx_.size(); ++i) u.coeffs()(idx_[i]) = p[i];
    Vec g;
    *cost = action_.value_and_coeff_gradient(u, grad ? &g : nullptr);
    if (grad) {
      for (size_t i = 0; i < idx_.size(); ++i) grad[i] = g(idx_[i]);
    }
    return std::isfinite(*cost);
  }
  int NumParameters() const override { return static_cast<int>(idx_.size()); }

 private:
  const DualAction& action_;
  DualLoop base_;
  std::vector<int> idx_;
};

// L^2 norm of the L^2 gradient from the packed coefficient gradient g:
// the representative has coefficients 2g and |v|_{L^2}^2 = |coeffs|^2 / 2.
double l2_grad_norm(const Vec& g) { return std::sqrt(2.0) * g.norm(); }

}  // namespace

DualLoop random_seed(int n, int n_fourier, std::mt19937_64& rng, int plane) {
  if (plane >= n) throw DomainError("random_seed: plane out of range");
  std::normal_distribution<double> nd;
  DualLoop u(n, n_fourier);
  for (int k = 1; k <= std::min(3, n_fourier); ++k) {
    for (int part = 0; part < 2; ++part) {
      for (int c = 0; c < 2 * n; ++c) {
        const double v = 0.3 * nd(rng) / k;
        if (plane < 0 || c % n == plane) u.coeffs()(u.offset(k, part) + c) = v;
      }
    }
  }
  return u;
}

MinimizeResult minimize(const HypersurfaceModel& model, const DualLoop& seed,
                        const OrbitSolverOptions& opts, int plane) {
  if (seed.half_dim() != model.half_dim()) throw DomainError("minimize: dimension mismatch");
  const DualAction action(model, seed.n_fourier(), opts.quad_factor * seed.n_fourier());
  const std::vector<int> idx = plane_indices(seed, plane);
  MinimizeResult res{seed, 0.0, 0.0, 0, 0};

  Vec g;
  action.value_and_coeff_gradient(res.u, &g);
  const double scale = std::max(res.u.l2_norm(), 1e-300);
  if (l2_grad_norm(g) > 1e-5 * scale) {
    std::vector<double> p(idx.size());
    for (size_t i = 0; i < idx.size(); ++i) p[i] = res.u.coeffs()(idx[i]);
    ceres::GradientProblem problem(new ReducedAction(action, res.u, idx));
    ceres::GradientProblemSolver::Options o;
    o.line_search_direction_type = ceres::LBFGS;
    o.max_lbfgs_rank = 20;
    o.max_num_iterations = opts.max_iterations;
    o.gradient_tolerance = 1e-14;
    o.function_tolerance = 1e-16;
    o.parameter_tolerance = 1e-16;
    o.logging_type = ceres::SILENT;
    o.minimizer_progress_to_stdout = false;
    ceres::GradientProblemSolver::Summary summary;
    ceres::Solve(o, problem, p.data(), &summary);
    for (size_t i = 0; i < idx.size(); ++i) res.u.coeffs()(idx[i]) = p[i];
    res.iterations = static_cast<int>(summary.iterations.size());
  }

  // Newton polish, carried well below grad_tol so that x_u is accurate. The
  // time-shift direction u' spans the kernel of Φ'' at a critical point;
  // small eigenvalues are dropped.
  const int m = static_cast<int>(idx.size());
  const double polish_tol = std::min(opts.grad_tol, 1e-14 * std::max(1.0, res.u.l2_norm()));
  for (int it = 0; it < opts.max_newton; ++it) {
    action.value_and_coeff_gradient(res.u, &g);
    const double gn = l2_grad_norm(g);
    if (gn <= polish_tol) break;
    const Mat full = action.coeff_hessian(res.u);
    Mat h(m, m);
    Vec gr(m);
    for (int a = 0; a < m; ++a) {
      gr(a) = g(idx[a]);
      for (int b = 0; b < m; ++b) h(a, b) = full(idx[a], idx[b]);
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
    Vec step = Vec::Zero(m);
    for (int k = 0; k < m; ++k) {
      const double lam = es.eigenvalues()(k);
      if (std::abs(lam) <= 1e-9 * lmax) continue;
      step -= (es.eigenvectors().col(k).dot(gr) / lam) * es.eigenvectors().col(k);
    }
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 12; ++ls, t *= 0.5) {
      DualLoop trial = res.u;
      for (int a = 0; a < m; ++a) trial.coeffs()(idx[a]) += t * step(a);
      Vec gt;
      action.value_and_coeff_gradient(trial, &gt);
      if (l2_grad_norm(gt) < gn) {
        res.u = trial;
        moved = true;
        break;
      }
    }
    ++res.newton_steps;
    if (!moved) break;
  }

  res.value = action.value_and_coeff_gradient(res.u, &g);
  res.grad_norm = l2_grad_norm(g);
  if (res.u.l2_norm() <= 1e-8) throw NumericalError("minimize: converged to u = 0");
  if (res.grad_norm > opts.grad_tol) {
    throw NumericalError("minimize: gradient norm " + std::to_string(res.grad_norm) +
                         " above tolerance");
  }
  if (!(res.value < 0.0)) throw NumericalError("minimize: critical value is not negative");
  return res;
}

Vec flow(const HypersurfaceModel& model, const Vec& y0, double t, double tol) {
  FlowRhs rhs{&model, standard_j_matrix(model.half_dim())};
  State x(y0.data(), y0.data() + y0.size());
  integrate(rhs, x, 0.0, t, tol);
  return Eigen::Map<const Vec>(x.data(), y0.size());
}

std::pair<Vec, Mat> flow_with_variation(const HypersurfaceModel& model, const Vec& y0, double t,
                                        double tol) {
  const int d = static_cast<int>(y0.size());
  VariationRhs rhs{&model, standard_j_matrix(model.half_dim())};
  State x = pack(y0, Mat::Identity(d, d));
  integrate(rhs, x, 0.0, t, tol);
  return {Eigen::Map<const Vec>(x.data(), d), Eigen::Map<const Mat>(x.data() + d, d, d)};
}

ClosedCharacteristic extract_orbit(std::shared_ptr<const HypersurfaceModel> model, const DualLoop& u,
                                   const OrbitSolverOptions& opts) {
  if (!model) throw DomainError("extract_orbit: null model");
  const HypersurfaceModel& hm = *model;
  const int n = hm.half_dim(), d = 2 * n;
  const double alpha = hm.alpha();
  const Mat j = standard_j_matrix(n);
  const DualAction action(hm, u.n_fourier(), opts.quad_factor * u.n_fourier());
  const int q = action.quad_points();

  const DualLoop mu = u.primitive();
  const Mat us = action.samples(u);
  const Mat mus = action.samples(mu);
  Mat f(d, q);
  for (int i = 0; i < q; ++i) f.col(i) = hm.fenchel_grad(-j * us.col(i));
  const Vec xi = (mus - f).rowwise().mean();
  const Mat xs = mus.colwise() - xi;

  double h = 0.0, hmin = std::numeric_limits<double>::infinity(), hmax = 0.0, xmax = 0.0;
  for (int i = 0; i < q; ++i) {
    const double hv = hm.hamiltonian(xs.col(i));
    h += hv;
    hmin = std::min(hmin, hv);
    hmax = std::max(hmax, hv);
    xmax = std::max(xmax, xs.col(i).norm());
  }
  h /= q;
  if (!(h > 0.0)) throw NumericalError("extract_orbit: zero energy");
  if (hmax - hmin > 1e-8 * h) {
    throw NumericalError("extract_orbit: energy varies by " + std::to_string((hmax - hmin) / h) +
                         " along x_u");
  }

  // Minimal period 1/m of x_u by trace self-matching under t ↦ t + 1/d.
  const double match = 1e-6 * 2.0 * xmax;
  std::vector<bool> matched(u.n_fourier() + 1, false);
  int m = 1;
  for (int dv = 2; dv <= u.n_fourier(); ++dv) {
    const Mat shifted = action.samples(mu.shifted(1.0 / dv));
    matched[dv] = (shifted - mus).colwise().norm().maxCoeff() <= match;
    if (matched[dv]) m = dv;
  }
  for (int dv = 2; dv <= u.n_fourier(); ++dv) {
    if (matched[dv] != (m % dv == 0)) throw NumericalError("extract_orbit: ambiguous minimal period");
  }

  double tau = std::pow(h, (alpha - 2) / alpha) / m;
  Vec y0 = std::pow(h, -1.0 / alpha) * (mu(0.0) - xi);

  // Shooting polish of (y0, τ): close the orbit, fix the energy and the phase.
  const Vec y_ref = y0;
  const Vec f_ref = j * hm.ham_grad(y_ref);
  const double ys = y0.norm();
  bool closed = false;
  for (int it = 0; it < 10; ++it) {
    const auto [yt, z] = flow_with_variation(hm, y0, tau);
    const Vec r = yt - y0;
    const double er = hm.hamiltonian(y0) - 1.0;
    if (r.norm() <= 1e-13 * ys && std::abs(er) <= 1e-14) {
      closed = true;
      break;
    }
    Mat a = Mat::Zero(d + 2, d + 1);
    a.topLeftCorner(d, d) = z - Mat::Identity(d, d);
    a.block(0, d, d, 1) = j * hm.ham_grad(yt);
    a.block(d, 0, 1, d) = hm.ham_grad(y0).transpose();
    a.block(d + 1, 0, 1, d) = f_ref.transpose();
    Vec rhs(d + 2);
    rhs.head(d) = -r;
    rhs(d) = -er;
    rhs(d + 1) = -(y0 - y_ref).dot(f_ref);
    const Vec delta = a.completeOrthogonalDecomposition().solve(rhs);
    y0 += delta.head(d);
    tau += delta(d);
    if (!(tau > 0.0)) throw NumericalError("extract_orbit: shooting produced a non-positive period");
    if (delta.norm() <= 1e-15 * (ys + tau)) {
      closed = true;
      break;
    }
  }

  ClosedCharacteristic out;
  out.model = model;
  out.tau = tau;
  out.multiplicity_m = m;
  const int k = opts.samples;
  FlowRhs rhs{&hm, j};
  State x(y0.data(), y0.data() + d);
  out.samples.push_back(y0);
  for (int i = 1; i <= k; ++i) {
    integrate(rhs, x, (i - 1) * tau / k, i * tau / k, 1e-13);
    const Vec yi = Eigen::Map<const Vec>(x.data(), d);
    if (i < k) out.samples.push_back(yi);
    else out.closure_defect = (yi - y0).norm();
  }
  const SampleDefects def = sample_defects(hm, tau, out.samples);
  out.residual = def.residual;
  out.energy_defect = def.energy;
  if (!closed && out.closure_defect > opts.tol_orbit) {
    throw NumericalError("extract_orbit: shooting did not close the orbit");
  }
  if (out.residual > opts.tol_orbit || out.closure_defect > opts.tol_orbit ||
      out.energy_defect > opts.tol_orbit) {
    throw NumericalError("extract_orbit: orbit defects above tolerance (residual " +
                         std::to_string(out.residual) + ", closure " +
                         std::to_string(out.closure_defect) + ")");
  }
  for (int dv = 2; dv <= opts.max_divisor; ++dv) {
    if ((flow(hm, y0, tau / dv) - y0).norm() <= 1e-6 * hm.diameter()) {
      throw NumericalError("extract_orbit: period is not minimal (closes at tau/" + std::to_string(dv) + ")");
    }
  }
  return out;
}

DualLoop loop_from_orbit(const ClosedCharacteristic& orbit, int m, int n_fourier) {
  if (m < 1) throw DomainError("loop_from_orbit: m must be >= 1");
  const HypersurfaceModel& hm = *orbit.model;
  const int d = 2 * hm.half_dim();
  const int k = static_cast<int>(orbit.samples.size());
  const double alpha = hm.alpha();
  const double scale = std::pow(m * orbit.tau, (1 - alpha) / (2 - alpha));
  const std::vector<Vec> dy = spectral_derivative(orbit.samples, orbit.tau);
  DualLoop u(hm.half_dim(), n_fourier);
  Eigen::FFT<double> fft;
  std::vector<double> col(k);
  std::vector<Complex> spec;
  for (int c = 0; c < d; ++c) {
    for (int i = 0; i < k; ++i) col[i] = dy[i](c);
    fft.fwd(spec, col);
    for (int f = 1; f < k / 2 && f * m <= n_fourier; ++f) {
      const Complex cf = scale * spec[f] / static_cast<double>(k);
      u.a(f * m)(c) = 2.0 * cf.real();
      u.b(f * m)(c) = -2.0 * cf.imag();
    }
  }
  return u;
}

SymplecticPath linearized_path(const ClosedCharacteristic& orbit, int m) {
  if (m < 1) throw DomainError("linearized_path: m must be >= 1");
  if (!orbit.model || orbit.samples.empty()) throw DomainError("linearized_path: invalid orbit");
  auto model = orbit.model;
  const int n = model->half_dim(), d = 2 * n;
  const double span = m * orbit.tau;
  const int nodes = 128 * m;
  const double dt = span / nodes;
  const Mat j = standard_j_matrix(n);
  const Vec y0 = orbit.samples.front();

  auto cache = std::make_shared<std::vector<State>>();
  double tol = 1e-13;
  double rate = 0.0;
  for (int attempt = 0;; ++attempt) {
    cache->assign(1, pack(y0, Mat::Identity(d, d)));
    VariationRhs rhs{model.get(), j};
    State x = cache->front();
    double worst = 0.0;
    rate = 0.0;
    for (int i = 1; i <= nodes; ++i) {
      integrate(rhs, x, (i - 1) * dt, i * dt, tol);
      cache->push_back(x);
      const Vec y = Eigen::Map<const Vec>(x.data(), d);
      const Eigen::Map<const Mat> z(x.data() + d, d, d);
      const Mat hess = model->ham_hess(y);
      if (hess.llt().info() != Eigen::Success) {
        throw NumericalError("linearized_path: Hessian not positive definite along the orbit");
      }
      rate = std::max(rate, op_norm(hess));
      worst = std::max(worst, symplectic_defect(Mat(z)) / std::max(1.0, z.squaredNorm()));
    }
    if (worst <= 1e-9) break;
    if (attempt == 2) {
      throw NumericalError("linearized_path: symplectic defect " + std::to_string(worst) +
                           " above 1e-9");
    }
    tol *= 0.1;
  }

  auto eval = [model, cache, dt, tol, d, j, nodes](double t) {
    const int i = std::clamp(static_cast<int>(std::floor(t / dt)), 0, nodes);
    State x = (*cache)[i];
    VariationRhs rhs{model.get(), j};
    integrate(rhs, x, i * dt, t, tol);
    const Vec y = Eigen::Map<const Vec>(x.data(), d);
    const Mat z = Eigen::Map<const Mat>(x.data() + d, d, d);
    return PathPoint{z, j * model->ham_hess(y) * z};
  };
  return SymplecticPath(n, span, eval, true, rate);
}

FloquetReport floquet(const SymplecticMatrix& monodromy) {
  FloquetReport r;
  r.spectrum = spectrum(monodromy);
  r.elliptic_height = elliptic_height(monodromy);
  r.hyperbolic = r.elliptic_height == 2;
  return r;
}

FloquetReport floquet(const ClosedCharacteristic& orbit) {
  const SymplecticPath path = linearized_path(orbit, 1);
  return floquet(SymplecticMatrix(path.endpoint(), SymplecticTolerances{1e-8}));
}

int default_thread_count() {
  if (const char* env = std::getenv("CLOSEDCHAR_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

OrbitSearchResult find_orbits(std::shared_ptr<const HypersurfaceModel> model,
                              const OrbitSearchOptions& opts) {
  if (!model) throw DomainError("find_orbits: null model");
  if (opts.starts < 1) throw DomainError("find_orbits: starts must be positive");
  const int n = model->half_dim();
  const int threads = std::min(opts.starts, opts.threads > 0 ? opts.threads : default_thread_count());

  struct Slot {
    std::optional<DualLoop> loop;
    std::optional<ClosedCharacteristic> orbit;
    std::string error;
  };
  auto run = [&](std::vector<Slot>& slots, auto&& job) {
    std::atomic<int> next{0};
    auto worker = [&] {
      for (int s = next++; s < static_cast<int>(slots.size()); s = next++) {
        try {
          job(s, slots[s]);
        } catch (const std::exception& e) {
          slots[s].error = e.what();
        }
      }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < std::min<int>(threads, slots.size()); ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
  };

  std::vector<Slot> slots(opts.starts);
  run(slots, [&](int s, Slot& slot) {
    std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                      static_cast<std::uint32_t>(s)};
    std::mt19937_64 rng(seq);
    const int plane = s % (n + 1) - 1;
    const DualLoop seed = random_seed(n, opts.solver.n_fourier, rng, plane);
    const MinimizeResult r = minimize(*model, seed, opts.solver, plane);
    slot.orbit = extract_orbit(model, r.u, opts.solver);
    slot.loop = r.u;
  });

  OrbitSearchResult out;
  for (int s = 0; s < opts.starts; ++s) {
    if (slots[s].orbit) {
      out.orbits.push_back(*slots[s].orbit);
      out.loops.push_back(*slots[s].loop);
    } else {
      out.diagnostics.push_back("start " + std::to_string(s) + ": " + slots[s].error);
    }
  }
  if (!opts.p_image_seeds) return out;

  // Re-seed through P for each new trace whose P-image is a different trace.
  const Mat p = model->symmetry().P.matrix();
  const double tol = 1e-4 * model->diameter();
  std::vector<Slot> images;
  std::vector<ClosedCharacteristic> distinct;
  for (size_t i = 0; i < out.orbits.size(); ++i) {
    const ClosedCharacteristic& o = out.orbits[i];
    bool seen = false;
    for (const auto& e : distinct) seen = seen || (std::abs(e.tau - o.tau) <= 1e-6 * o.tau && trace_distance(e, o) <= tol);
    if (seen) continue;
    distinct.push_back(o);
    ClosedCharacteristic po = o;
    for (Vec& y : po.samples) y = p * y;
    if (trace_distance(po, o) <= tol) continue;
    Slot slot;
    slot.loop = out.loops[i].mapped(p);
    images.push_back(std::move(slot));
  }
  run(images, [&](int, Slot& slot) {
    const MinimizeResult r = minimize(*model, *slot.loop, opts.solver, -1);
    slot.orbit = extract_orbit(model, r.u, opts.solver);
    slot.loop = r.u;
  });
  for (size_t i = 0; i < images.size(); ++i) {
    if (images[i].orbit) {
      out.orbits.push_back(*images[i].orbit);
      out.loops.push_back(*images[i].loop);
    } else {
      out.diagnostics.push_back("P-image seed " + std::to_string(i) + ": " + images[i].error);
    }
  }
  return out;
}

}  // namespace closedchar
