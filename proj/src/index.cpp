#include "closedchar/index.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <sstream>

#include "closedchar/error.hpp"

namespace closedchar {

const IndexOptions& default_index_options() {
  static const IndexOptions opt{};
  return opt;
}

namespace {

constexpr double kGolden = 0.6180339887498949;

void require_unit(Complex omega) {
  if (std::abs(std::abs(omega) - 1.0) > 1e-12) throw DomainError("ω must lie on the unit circle");
}

void require_convex(const SymplecticPath& path) {
  if (!path.convex_certified()) {
    throw DomainError("index: path is not certified convex; only convex paths are supported");
  }
}

Eigen::VectorXd singular_values(const Mat& value, const CMat& target) {
  const CMat d = value.cast<Complex>() - target;
  Eigen::JacobiSVD<CMat> svd(d);
  return svd.singularValues();
}

double smallest_sv(const SymplecticPath& path, double s, const CMat& target) {
  const Eigen::VectorXd sv = singular_values(path.value(s), target);
  return sv(sv.size() - 1);
}

struct Interval {
  double a, b, ha, hb, lip;
};

}  // namespace

std::vector<Crossing> find_crossings(const SymplecticPath& path, const CMat& target,
                                     const IndexOptions& opt) {
  const double tau = path.tau();
  const double floor = opt.floor_rel * tau;
  const double merge = opt.merge_rel * tau;
  const double lip = opt.lipschitz_safety * std::max(path.max_speed(), 1e-300);
  auto h = [&](double s) { return smallest_sv(path, s, target); };

  const std::vector<double>& grid = path.grid();
  std::vector<double> hg(grid.size()), speed(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const PathPoint pt = path.at(grid[i]);
    const Eigen::VectorXd sv = singular_values(pt.value, target);
    hg[i] = sv(sv.size() - 1);
    speed[i] = pt.velocity.norm();
  }

  // Per-cell Lipschitz bound: iterated paths speed up from period to period.
  std::vector<std::pair<double, double>> survivors;
  std::vector<Interval> stack;
  for (std::size_t i = grid.size() - 1; i-- > 0;) {
    const double cell_lip = std::min(lip, opt.lipschitz_safety * std::max(speed[i], speed[i + 1]));
    stack.push_back({grid[i], grid[i + 1], hg[i], hg[i + 1], std::max(cell_lip, 1e-300)});
  }
  while (!stack.empty()) {
    const Interval iv = stack.back();
    stack.pop_back();
    if (iv.ha + iv.hb > iv.lip * (iv.b - iv.a)) continue;
    if (iv.b - iv.a <= floor) {
      survivors.emplace_back(iv.a, iv.b);
      continue;
    }
    const double mid = 0.5 * (iv.a + iv.b);
    const double hm = h(mid);
    stack.push_back({mid, iv.b, hm, iv.hb, iv.lip});
    stack.push_back({iv.a, mid, iv.ha, hm, iv.lip});
  }
  std::sort(survivors.begin(), survivors.end());

  std::vector<std::pair<double, double>> clusters;
  for (const auto& s : survivors) {
    if (!clusters.empty() && s.first <= clusters.back().second + merge) {
      clusters.back().second = std::max(clusters.back().second, s.second);
    } else {
      clusters.push_back(s);
    }
  }

  std::vector<Crossing> out;
  const double edge = 4.0 * floor;
  for (const auto& [lo, hi] : clusters) {
    if (lo <= edge || hi >= tau - edge) continue;
    if (hi - lo > opt.unresolved_rel * tau) {
      std::ostringstream os;
      os << "unresolved crossing: degenerate stretch [" << lo << ", " << hi << "] on [0, " << tau
         << "]";
      throw NumericalError(os.str());
    }
    double a = std::max(0.0, lo - floor);
    double b = std::min(tau, hi + floor);
    double x1 = b - kGolden * (b - a);
    double x2 = a + kGolden * (b - a);
    double f1 = h(x1), f2 = h(x2);
    for (int it = 0; it < 200 && b - a > 1e-17 * tau; ++it) {
      if (f1 <= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - kGolden * (b - a);
        f1 = h(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + kGolden * (b - a);
        f2 = h(x2);
      }
    }
    const double s = (f1 <= f2) ? x1 : x2;
    const Mat value = path.value(s);
    const Eigen::VectorXd sv = singular_values(value, target);
    const double thr = std::max(opt.tol.rank_rel * std::max(1.0, op_norm(value)),
                                lip * (hi - lo + 2.0 * floor));
    const int mult = static_cast<int>((sv.array() <= thr).count());
    if (mult > 0) out.push_back({s, mult});
  }
  return out;
}

int omega_index_convex(const SymplecticPath& path, Complex omega, const IndexOptions& opt) {
  require_convex(path);
  require_unit(omega);
  const int n = path.half_dim();
  const CMat target = omega * CMat::Identity(2 * n, 2 * n);
  int total = (std::abs(omega - 1.0) <= 1e-12) ? n : 0;
  for (const auto& c : find_crossings(path, target, opt)) total += c.multiplicity;
  return total;
}

int p_omega_index_convex(const SymplecticPath& path, const SymplecticMatrix& p, Complex omega,
                         const IndexOptions& opt) {
  require_convex(path);
  require_unit(omega);
  if (p.half_dim() != path.half_dim()) throw DomainError("p_omega_index: dimension mismatch");
  const CMat target = omega * p.matrix().cast<Complex>();
  int total = nullity_omega(p.inverse(), omega, opt.tol);
  for (const auto& c : find_crossings(path, target, opt)) total += c.multiplicity;
  return total;
}

int p_nullity(const Mat& m, const SymplecticMatrix& p, Complex omega,
              const SymplecticTolerances& tol) {
  if (m.rows() != p.dim()) throw DomainError("p_nullity: dimension mismatch");
  const Eigen::VectorXd sv = singular_values(m, omega * p.matrix().cast<Complex>());
  const double cutoff = tol.rank_rel * std::max(1.0, op_norm(m));
  return static_cast<int>((sv.array() <= cutoff).count());
}

namespace {

template <class IndexAt>
SplittingNumbers sweep(IndexAt index_at, Complex omega, const std::vector<double>& eps,
                       const char* what) {
  const int base = index_at(omega);
  SplittingNumbers prev{};
  bool have_prev = false;
  std::ostringstream history;
  for (double e : eps) {
    SplittingNumbers cur{index_at(omega * std::polar(1.0, e)) - base,
                         index_at(omega * std::polar(1.0, -e)) - base};
    history << " ε=" << e << ":(" << cur.plus << "," << cur.minus << ")";
    if (have_prev && cur == prev) return cur;
    prev = cur;
    have_prev = true;
  }
  throw NumericalError(std::string(what) + ": ε sweep did not stabilise;" + history.str());
}

}  // namespace

SplittingNumbers splitting_numbers_perturbative(const SymplecticPath& path, Complex omega,
                                                const IndexOptions& opt) {
  require_convex(path);
  require_unit(omega);
  const SplittingNumbers s = sweep(
      [&](Complex w) { return omega_index_convex(path, w, opt); }, omega, opt.eps_sweep,
      "splitting numbers");
  const int nu = nullity_omega(path.endpoint(), omega, opt.tol);
  if (s.plus < 0 || s.minus < 0 || s.plus > nu || s.minus > nu) {
    std::ostringstream os;
    os << "splitting numbers (" << s.plus << "," << s.minus << ") outside [0, ν=" << nu << "]";
    throw NumericalError(os.str());
  }
  return s;
}

SplittingNumbers splitting_numbers(const SymplecticMatrix& m, Complex omega,
                                   const IndexOptions& opt) {
  return splitting_numbers_perturbative(SymplecticPath::positive_path_to(m), omega, opt);
}

SplittingNumbers p_splitting_numbers(const SymplecticPath& path, const SymplecticMatrix& p,
                                     Complex omega, const IndexOptions& opt) {
  require_convex(path);
  require_unit(omega);
  const SplittingNumbers s = sweep(
      [&](Complex w) { return p_omega_index_convex(path, p, w, opt); }, omega, opt.eps_sweep,
      "(P,ω)-splitting numbers");

  const SymplecticMatrix p_inv = p.inverse();
  const SymplecticMatrix pm(p_inv.matrix() * path.endpoint());
  const SplittingNumbers a = splitting_numbers(pm, omega, opt);
  const SplittingNumbers b = splitting_numbers(p_inv, omega, opt);
  if (s.plus != a.plus - b.plus || s.minus != a.minus - b.minus) {
    std::ostringstream os;
    os << "(P,ω)-splitting numbers (" << s.plus << "," << s.minus
       << ") disagree with S_{P^{-1}M} - S_{P^{-1}} = (" << a.plus - b.plus << ","
       << a.minus - b.minus << ")";
    throw NumericalError(os.str());
  }
  return s;
}

namespace {

std::vector<Complex> roots_of(Complex z, int m) {
  std::vector<Complex> r;
  const double base = std::arg(z) / m;
  for (int j = 0; j < m; ++j) r.push_back(std::polar(1.0, base + kTwoPi * j / m));
  return r;
}

}  // namespace

BottResult bott_check(const SymplecticPath& path, const SymplecticMatrix& p, int m, Complex z,
                      const IndexOptions& opt) {
  require_unit(z);
  const SymplecticPath iter = iterate_path(path, p, m);
  const SymplecticMatrix pm = p.power(m);
  BottResult r;
  r.lhs = p_omega_index_convex(iter, pm, z, opt);
  r.nullity_lhs = p_nullity(iter.endpoint(), pm, z, opt.tol);
  for (Complex w : roots_of(z, m)) {
    r.rhs += p_omega_index_convex(path, p, w, opt);
    r.nullity_rhs += p_nullity(path.endpoint(), p, w, opt.tol);
  }
  return r;
}

BottResult bott_check_plain(const SymplecticPath& path, int m, Complex z,
                            const IndexOptions& opt) {
  require_unit(z);
  const SymplecticPath iter = iterate_path(path, SymplecticMatrix::identity(path.half_dim()), m);
  BottResult r;
  r.lhs = omega_index_convex(iter, z, opt);
  r.nullity_lhs = nullity_omega(iter.endpoint(), z, opt.tol);
  for (Complex w : roots_of(z, m)) {
    r.rhs += omega_index_convex(path, w, opt);
    r.nullity_rhs += nullity_omega(path.endpoint(), w, opt.tol);
  }
  return r;
}

namespace {

double angle_of(Complex z) {
  double a = std::arg(z);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a -= kTwoPi;
  return a;
}

double circle_distance(double a, double b) {
  const double d = std::fmod(std::abs(a - b), kTwoPi);
  return std::min(d, kTwoPi - d);
}

}  // namespace

int IndexFunction::value(double theta) const {
  theta = std::fmod(theta, kTwoPi);
  if (theta < 0.0) theta += kTwoPi;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (circle_distance(theta, angles[i]) <= match_tol) return at_angle[i];
  }
  // angles[0] = 0, so theta lies in some arc (angles[i], angles[i+1]) or the last one.
  std::size_t i = static_cast<std::size_t>(
      std::upper_bound(angles.begin(), angles.end(), theta) - angles.begin() - 1);
  return on_arc[i];
}

int IndexFunction::nullity(double theta) const {
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (circle_distance(theta, angles[i]) <= match_tol) return nullity_at_angle[i];
  }
  return 0;
}

double IndexFunction::circle_average() const {
  double total = 0.0;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const double end = (i + 1 < angles.size()) ? angles[i + 1] : kTwoPi;
    total += (end - angles[i]) * on_arc[i];
  }
  return total / kTwoPi;
}

IndexFunction index_function(const SymplecticPath& path, const IndexOptions& opt) {
  require_convex(path);
  IndexFunction f;
  f.n = path.half_dim();
  std::vector<double> raw{0.0};
  for (const auto& e : spectrum(path.endpoint(), opt.tol).unit_circle_part) {
    raw.push_back(angle_of(e.value));
  }
  std::sort(raw.begin(), raw.end());
  for (double a : raw) {
    if (f.angles.empty() || circle_distance(a, f.angles.back()) > f.match_tol) {
      if (!f.angles.empty() && circle_distance(a, 0.0) <= f.match_tol) continue;
      f.angles.push_back(a);
    }
  }
  for (std::size_t i = 0; i < f.angles.size(); ++i) {
    const Complex w = std::polar(1.0, f.angles[i]);
    f.at_angle.push_back(omega_index_convex(path, i == 0 ? Complex(1.0, 0.0) : w, opt));
    f.nullity_at_angle.push_back(nullity_omega(path.endpoint(), i == 0 ? Complex(1.0, 0.0) : w,
                                               opt.tol));
    const double end = (i + 1 < f.angles.size()) ? f.angles[i + 1] : kTwoPi;
    f.on_arc.push_back(omega_index_convex(path, std::polar(1.0, 0.5 * (f.angles[i] + end)), opt));
  }
  return f;
}

IndexData index_iterates(const SymplecticPath& path, int m_max, const IndexOptions& opt) {
  if (m_max < 1) throw DomainError("index_iterates: m_max must be positive");
  const IndexFunction f = index_function(path, opt);
  IndexData d;
  d.n = path.half_dim();
  for (int m = 1; m <= m_max; ++m) {
    IterateIndex it;
    for (int j = 0; j < m; ++j) {
      const double theta = kTwoPi * j / m;
      it.i += f.value(theta);
      it.nu += f.nullity(theta);
    }
    d.iterates[m] = it;
  }
  d.i_1 = d.iterates[1].i;
  d.nu_1 = d.iterates[1].nu;
  const SplittingNumbers s = splitting_numbers_perturbative(path, Complex(1.0, 0.0), opt);
  d.splitting_plus = s.plus;
  d.splitting_minus = s.minus;
  d.mean_index = f.circle_average();
  d.mean_index_ratio = static_cast<double>(d.iterates[m_max].i) / m_max;
  if (m_max >= 2) {
    const int h = m_max / 2;
    d.mean_index_richardson =
        static_cast<double>(d.iterates[m_max].i - d.iterates[h].i) / (m_max - h);
  } else {
    d.mean_index_richardson = d.mean_index_ratio;
  }
  d.mean_index_flag = std::abs(d.mean_index_richardson - d.mean_index) > 0.05;
  d.elliptic_height = elliptic_height(path.monodromy(), opt.tol);
  d.hyperbolic = d.elliptic_height == 2;
  return d;
}

nlohmann::json to_json(const IndexData& d) {
  nlohmann::json it = nlohmann::json::array();
  for (const auto& [m, v] : d.iterates) {
    it.push_back({{"m", m}, {"i", v.i}, {"nu", v.nu}, {"ekeland", v.i - d.n}});
  }
  return {{"n", d.n},
          {"i_1", d.i_1},
          {"nu_1", d.nu_1},
          {"splitting_plus", d.splitting_plus},
          {"splitting_minus", d.splitting_minus},
          {"mean_index", d.mean_index},
          {"mean_index_ratio", d.mean_index_ratio},
          {"mean_index_richardson", d.mean_index_richardson},
          {"mean_index_flag", d.mean_index_flag},
          {"iterates", std::move(it)},
          {"elliptic_height", d.elliptic_height},
          {"hyperbolic", d.hyperbolic}};
}

IndexData index_data_from_json(const nlohmann::json& j) {
  IndexData d;
  d.n = j.at("n").get<int>();
  d.i_1 = j.at("i_1").get<int>();
  d.nu_1 = j.at("nu_1").get<int>();
  d.splitting_plus = j.at("splitting_plus").get<int>();
  d.splitting_minus = j.value("splitting_minus", 0);
  d.mean_index = j.at("mean_index").get<double>();
  d.mean_index_ratio = j.value("mean_index_ratio", d.mean_index);
  d.mean_index_richardson = j.value("mean_index_richardson", d.mean_index);
  d.mean_index_flag = j.value("mean_index_flag", false);
  for (const auto& e : j.value("iterates", nlohmann::json::array())) {
    d.iterates[e.at("m").get<int>()] = {e.at("i").get<int>(), e.at("nu").get<int>()};
  }
  d.elliptic_height = j.at("elliptic_height").get<int>();
  d.hyperbolic = j.value("hyperbolic", d.elliptic_height == 2);
  return d;
}

Complex parse_complex(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  }
  static const std::regex full(R"(^([+-]?[0-9.]+(?:[eE][+-]?[0-9]+)?)([+-](?:[0-9.]+(?:[eE][+-]?[0-9]+)?)?)[ij]$)");
  static const std::regex real_only(R"(^[+-]?[0-9.]+(?:[eE][+-]?[0-9]+)?$)");
  static const std::regex imag_only(R"(^([+-]?(?:[0-9.]+(?:[eE][+-]?[0-9]+)?)?)[ij]$)");
  std::smatch m;
  auto coef = [](const std::string& c) {
    if (c.empty() || c == "+") return 1.0;
    if (c == "-") return -1.0;
    return std::stod(c);
  };
  if (std::regex_match(s, m, full)) return {std::stod(m[1]), coef(m[2])};
  if (std::regex_match(s, real_only)) return {std::stod(s), 0.0};
  if (std::regex_match(s, m, imag_only)) return {0.0, coef(m[1])};
  throw DomainError("cannot parse complex number \"" + text + "\"");
}

}  // namespace closedchar
