#pragma once

// Real spectrum: values 0 < q~_1 < q~_2 < ... < 1 at which theta(q, .) has a
// double real zero. Across q~_j the two rightmost real zeros merge and leave
// the real axis as a conjugate pair.
//
// Detection counts real zeros on a window covering the first n_probe
// ansatz zeros (-q^{-1}, ..., -q^{-n_probe}); the count drops by two at each
// spectral value. A bracket is bisected on the count and polished with Newton
// on (theta, theta_x) = 0 in the variables (q, x).

#include "ptheta/errors.hpp"
#include "ptheta/numeric.hpp"
#include "ptheta/theta_eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <iomanip>
#include <string>
#include <vector>

namespace ptheta {

/// Closed interval of the negative real axis, lo < hi < 0.
struct RealWindow {
  double lo = -1.0;
  double hi = -0.5;
};

/// [-q^{-(n_probe + 1/2)}, -1/2]. The left end sits between the ansatz
/// positions of zeros n_probe and n_probe + 1. theta has no zero in
/// |x| < 1/2 for |q| < 1.
inline RealWindow ansatz_window(double q, std::size_t n_probe) {
  if (!(q > 0.0 && q < 1.0)) throw error(errc::divergence_domain, "q must lie in (0, 1)");
  return {-std::pow(q, -(static_cast<double>(n_probe) + 0.5)), -0.5};
}

struct CountOptions {
  /// Grid density in cells per unit of ln|x|.
  double cells_per_efold = 64.0;
  /// Bisection steps when locating a critical point inside a cell.
  int bisection_steps = 120;
};

template <class R = real_hp>
struct RealZeroScan {
  /// Brackets [left, right] (left < right) each holding one real zero,
  /// ordered from right (closest to 0) to left.
  std::vector<std::pair<R, R>> zeros;
  /// Critical points of theta that separate two zeros found in one cell.
  std::vector<R> close_pairs;

  [[nodiscard]] std::size_t count() const { return zeros.size(); }
};

namespace detail {

template <class R>
struct SignSample {
  R x;
  int theta_sign = 0;
  int dtheta_sign = 0;
};

template <class R>
int reliable_sign(const EvalResult<R>& e) {
  using std::abs;
  if (abs(e.value) <= e.error_bound()) return 0;
  return e.value > R(0) ? 1 : -1;
}

template <class R>
R sign_tol() {
  return epsilon<R>() * R(1e-4);
}

template <class R>
SignSample<R> sample(const R& q, const R& x) {
  SignSample<R> s;
  s.x = x;
  s.theta_sign = reliable_sign(eval_theta(q, x, sign_tol<R>()));
  s.dtheta_sign = reliable_sign(eval_dtheta_dx(q, x, sign_tol<R>()));
  return s;
}

/// Sample at -exp(t), nudging t when the sign of theta is not resolvable.
template <class R>
SignSample<R> sample_log(const R& q, const R& t, const R& nudge) {
  using std::exp;
  for (int attempt = 0; attempt < 4; ++attempt) {
    const R tt = t + nudge * R(attempt);
    SignSample<R> s = sample(q, R(-exp(tt)));
    if (s.theta_sign != 0 && s.dtheta_sign != 0) return s;
  }
  throw error(errc::inconclusive, "theta is numerically zero at a grid node");
}

/// Zero of theta_x between a and b (theta_x has opposite signs at the ends).
template <class R>
R critical_point(const R& q, R a, R b, int sign_a, int steps) {
  for (int i = 0; i < steps; ++i) {
    const R m = (a + b) / R(2);
    if (m == a || m == b) break;
    const auto d = eval_dtheta_dx(q, m, sign_tol<R>());
    const int s = d.value > R(0) ? 1 : (d.value < R(0) ? -1 : 0);
    if (s == 0) return m;
    if (s == sign_a) {
      a = m;
    } else {
      b = m;
    }
  }
  return (a + b) / R(2);
}

}  // namespace detail

/// All real zeros of theta(q, .) in the window, located to grid resolution.
/// Throws Inconclusive when a cell holds a near-double zero that cannot be
/// resolved at the working precision.
template <class R = real_hp>
RealZeroScan<R> scan_real_zeros(const R& q, const RealWindow& window,
                                const CountOptions& opts = {}) {
  using std::log;
  if (!(window.lo < window.hi && window.hi < 0.0)) {
    throw error(errc::internal, "window must satisfy lo < hi < 0");
  }
  const R t_start = log(R(-window.hi));
  const R t_end = log(R(-window.lo));
  const double span = to_double(t_end - t_start);
  const auto cells = static_cast<std::size_t>(std::ceil(span * opts.cells_per_efold));
  const R h = (t_end - t_start) / R(static_cast<double>(std::max<std::size_t>(cells, 1)));
  const R nudge = h * R(1e-3);

  RealZeroScan<R> out;
  // Walk from the right end (near 0) to the left; prev is to the right of cur.
  detail::SignSample<R> prev = detail::sample_log(q, t_start, nudge);
  for (std::size_t i = 1; i <= cells; ++i) {
    const R t = i == cells ? t_end : t_start + h * R(static_cast<double>(i));
    const detail::SignSample<R> cur = detail::sample_log(q, t, R(-1) * nudge);
    if (cur.theta_sign != prev.theta_sign) {
      out.zeros.emplace_back(cur.x, prev.x);
    } else if (cur.dtheta_sign != prev.dtheta_sign) {
      const R c = detail::critical_point(q, cur.x, prev.x, cur.dtheta_sign, opts.bisection_steps);
      const auto at_c = eval_theta(q, c, detail::sign_tol<R>());
      const int sc = detail::reliable_sign(at_c);
      if (sc == 0) {
        throw error(errc::inconclusive, "near-double zero at x = " + std::to_string(to_double(c)));
      }
      if (sc != cur.theta_sign) {
        out.zeros.emplace_back(c, prev.x);
        out.zeros.emplace_back(cur.x, c);
        out.close_pairs.push_back(c);
      }
    }
    prev = cur;
  }
  return out;
}

/// Number of real zeros of theta(q, .) inside the window.
template <class R = real_hp>
std::size_t count_real_zeros(double q, const RealWindow& window, const CountOptions& opts = {}) {
  if (!(q > 0.0 && q < 0.99)) throw error(errc::divergence_domain, "q must lie in (0, 0.99)");
  return scan_real_zeros<R>(R(q), window, opts).count();
}

/// Count on the window covering the first n_probe ansatz zeros.
template <class R = real_hp>
std::size_t count_real_zeros(double q, std::size_t n_probe, const CountOptions& opts = {}) {
  return count_real_zeros<R>(q, ansatz_window(q, n_probe), opts);
}

// ---------------------------------------------------------------------------
// Spectral points
// ---------------------------------------------------------------------------

struct SpectralPoint {
  std::size_t j = 0;
  double q_tilde = 0.0;
  /// Location of the double zero (negative).
  double x_double = 0.0;
  /// max(|theta|, |theta_x|) at the returned point.
  double newton_residual = 0.0;
  double theta = 0.0;
  double theta_x = 0.0;
  double theta_xx = 0.0;
  /// Full working-precision decimal renderings.
  std::string q_tilde_text;
  std::string x_double_text;
};

struct QBracket {
  double lo = 0.0;
  double hi = 0.0;
};

struct SpectrumOptions {
  CountOptions count;
  /// Window size is n_probe = 2 j + probe_margin ansatz zeros.
  std::size_t probe_margin = 4;
  double scan_step = 1e-3;
  /// Refinements (each dividing the step by 10) on Inconclusive or overshoot.
  int max_refinements = 3;
  double q_max = 0.95;
  /// Bisection on the count stops at this bracket width.
  double bisection_width = 1e-7;
  int newton_iterations = 60;
};

inline std::size_t probe_size(std::size_t j, const SpectrumOptions& opts) {
  return 2 * j + opts.probe_margin;
}

namespace detail {

template <class R>
std::optional<std::size_t> try_count(double q, std::size_t n_probe, const CountOptions& opts) {
  try {
    return count_real_zeros<R>(q, n_probe, opts);
  } catch (const error& e) {
    if (e.code() == errc::inconclusive) return std::nullopt;
    throw;
  }
}

template <class R>
std::string full_digits(const R& v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<R>::digits10) << v;
  return os.str();
}

template <class R>
std::optional<QBracket> scan_for_drop(std::size_t j, double from, double to, double step,
                                      int refinements_left, const SpectrumOptions& opts) {
  const std::size_t n_probe = probe_size(j, opts);
  const std::size_t before = n_probe - 2 * (j - 1);
  const std::size_t after = n_probe - 2 * j;
  std::optional<double> last_before;
  for (double q = from; q <= to + 0.5 * step; q += step) {
    const auto c = try_count<R>(q, n_probe, opts.count);
    if (c && *c == before) {
      last_before = q;
      continue;
    }
    if (c && *c == after && last_before) return QBracket{*last_before, q};
    // Inconclusive, or an unexpected count: look closer if allowed.
    if (last_before && refinements_left > 0) {
      if (auto b = scan_for_drop<R>(j, *last_before, q + step, step / 10.0, refinements_left - 1,
                                    opts)) {
        return b;
      }
    }
    if (c && *c < after) return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace detail

/// Scans q upward from q_from in steps of opts.scan_step for the drop of the
/// real-zero count that marks q~_j.
template <class R = real_hp>
QBracket bracket_spectral(std::size_t j, double q_from, const SpectrumOptions& opts = {}) {
  if (j == 0) throw error(errc::bracket_invalid, "spectral index starts at 1");
  if (auto b = detail::scan_for_drop<R>(j, q_from, opts.q_max, opts.scan_step,
                                        opts.max_refinements, opts)) {
    return *b;
  }
  throw error(errc::bracket_invalid, "no count drop for index " + std::to_string(j) +
                                         " above q = " + std::to_string(q_from));
}

/// q~_j and the double zero from a bracket straddling the count drop.
template <class R = real_hp>
SpectralPoint find_spectral(std::size_t j, QBracket bracket, double tol,
                            const SpectrumOptions& opts = {}) {
  using std::abs;
  const std::size_t n_probe = probe_size(j, opts);
  const std::size_t before = n_probe - 2 * (j - 1);
  const std::size_t after = n_probe - 2 * j;
  const auto c_lo = detail::try_count<R>(bracket.lo, n_probe, opts.count);
  const auto c_hi = detail::try_count<R>(bracket.hi, n_probe, opts.count);
  if (!(bracket.lo < bracket.hi) || !c_lo || !c_hi || *c_lo != before || *c_hi != after) {
    throw error(errc::bracket_invalid, "bracket [" + std::to_string(bracket.lo) + ", " +
                                           std::to_string(bracket.hi) +
                                           "] does not straddle the drop for index " +
                                           std::to_string(j));
  }
  while (bracket.hi - bracket.lo > opts.bisection_width) {
    const double mid = 0.5 * (bracket.lo + bracket.hi);
    const auto c = detail::try_count<R>(mid, n_probe, opts.count);
    if (!c) break;
    if (*c == before) {
      bracket.lo = mid;
    } else if (*c == after) {
      bracket.hi = mid;
    } else {
      break;
    }
  }

  // Seed x: critical point between the two rightmost real zeros just below the drop.
  const R q_seed(bracket.lo);
  const auto scan = scan_real_zeros<R>(q_seed, ansatz_window(bracket.lo, n_probe), opts.count);
  if (scan.count() < 2) throw error(errc::bracket_invalid, "fewer than two real zeros below the drop");
  R x;
  if (!scan.close_pairs.empty() && scan.zeros[0].first == scan.close_pairs.front()) {
    x = scan.close_pairs.front();
  } else {
    const R right = (scan.zeros[0].first + scan.zeros[0].second) / R(2);
    const R left = (scan.zeros[1].first + scan.zeros[1].second) / R(2);
    const auto d_left = eval_dtheta_dx(q_seed, left, detail::sign_tol<R>());
    x = detail::critical_point(q_seed, left, right, d_left.value > R(0) ? 1 : -1,
                               opts.count.bisection_steps);
  }

  // Newton on F(q, x) = (theta, theta_x).
  R q = R(0.5 * (bracket.lo + bracket.hi));
  const R eval_tol = detail::sign_tol<R>();
  auto residual = [&](const R& qq, const R& xx) {
    const R f = eval_theta(qq, xx, eval_tol).value;
    const R g = eval_dtheta_dx(qq, xx, eval_tol).value;
    return std::max(R(abs(f)), R(abs(g)));
  };
  R res = residual(q, x);
  R last_dq(1);
  const R floor = epsilon<R>() * R(64);
  for (int it = 0; it < opts.newton_iterations; ++it) {
    if (res <= floor) break;
    const R f = eval_theta(q, x, eval_tol).value;
    const R fx = eval_dtheta_dx(q, x, eval_tol).value;
    const R fq = eval_dtheta_dq(q, x, eval_tol).value;
    const R fxx = eval_d2theta_dx2(q, x, eval_tol).value;
    const R fqx = eval_d2theta_dqdx(q, x, eval_tol).value;
    const R det = fq * fxx - fx * fqx;
    if (det == R(0)) break;
    R dq = (f * fxx - fx * fx) / det;
    R dx = (fq * fx - fqx * f) / det;
    bool improved = false;
    for (int h = 0; h < 40; ++h) {
      const R qn = q - dq;
      const R xn = x - dx;
      if (qn > R(0) && qn < R(opts.q_max)) {
        const R rn = residual(qn, xn);
        if (rn < res) {
          q = qn;
          x = xn;
          res = rn;
          improved = true;
          break;
        }
      }
      dq /= R(2);
      dx /= R(2);
    }
    last_dq = abs(dq);
    if (!improved) break;
  }

  SpectralPoint p;
  p.j = j;
  const R f = eval_theta(q, x, eval_tol).value;
  const R fx = eval_dtheta_dx(q, x, eval_tol).value;
  const R fxx = eval_d2theta_dx2(q, x, eval_tol).value;
  p.q_tilde = to_double(q);
  p.x_double = to_double(x);
  p.theta = to_double(f);
  p.theta_x = to_double(fx);
  p.theta_xx = to_double(fxx);
  p.newton_residual = to_double(res);
  p.q_tilde_text = detail::full_digits(q);
  p.x_double_text = detail::full_digits(x);

  const double slack = std::max(10.0 * opts.bisection_width, tol);
  if (!(p.q_tilde >= bracket.lo - slack && p.q_tilde <= bracket.hi + slack) || !(p.x_double < 0.0)) {
    throw error(errc::newton_stall, "fold iteration left the bracket for index " + std::to_string(j));
  }
  if (p.newton_residual > 1e-10 || to_double(last_dq) > tol) {
    throw error(errc::newton_stall, "fold iteration did not converge for index " + std::to_string(j));
  }
  return p;
}

/// q~_1..q~_jmax, each bracket scanned upward from the previous value.
template <class R = real_hp>
std::vector<SpectralPoint> compute_spectrum(std::size_t jmax, double tol = 1e-12,
                                            const SpectrumOptions& opts = {}) {
  std::vector<SpectralPoint> out;
  double from = 0.2;
  for (std::size_t j = 1; j <= jmax; ++j) {
    const QBracket b = bracket_spectral<R>(j, from, opts);
    out.push_back(find_spectral<R>(j, b, tol, opts));
    from = out.back().q_tilde + opts.scan_step / 10.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Asymptotics
// ---------------------------------------------------------------------------

struct AsymptoticRow {
  std::size_t j = 0;
  double q_tilde = 0.0;
  /// j (1 - q~_j), tending to pi/2.
  double scaled_gap = 0.0;
  double scaled_gap_distance = 0.0;
  double x_double = 0.0;
  /// x_double + e^pi.
  double x_distance = 0.0;
};

struct AsymptoticReport {
  std::vector<AsymptoticRow> rows;
  static constexpr double half_pi = 1.5707963267948966;
  static constexpr double x_limit = -23.140692632779267;  // -e^pi
  /// |j(1 - q~_j) - pi/2| strictly decreasing and j(1 - q~_j) increasing.
  bool scaled_gap_monotone = false;
  /// x_double strictly decreasing.
  bool x_monotone = false;
  /// Largest overshoot of x_double past -e^pi (0 when none).
  double x_overshoot = 0.0;
};

inline AsymptoticReport asymptotic_report(const std::vector<SpectralPoint>& points) {
  if (points.size() < 3) throw error(errc::too_few_zeros, "need at least three spectral points");
  AsymptoticReport rep;
  for (const auto& p : points) {
    AsymptoticRow r;
    r.j = p.j;
    r.q_tilde = p.q_tilde;
    r.scaled_gap = static_cast<double>(p.j) * (1.0 - p.q_tilde);
    r.scaled_gap_distance = std::abs(r.scaled_gap - AsymptoticReport::half_pi);
    r.x_double = p.x_double;
    r.x_distance = p.x_double - AsymptoticReport::x_limit;
    rep.rows.push_back(r);
  }
  rep.scaled_gap_monotone = true;
  rep.x_monotone = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    const auto& a = rep.rows[i - 1];
    const auto& b = rep.rows[i];
    if (!(b.scaled_gap > a.scaled_gap && b.scaled_gap_distance < a.scaled_gap_distance)) {
      rep.scaled_gap_monotone = false;
    }
    if (!(b.x_double < a.x_double)) rep.x_monotone = false;
  }
  for (const auto& r : rep.rows) rep.x_overshoot = std::max(rep.x_overshoot, -r.x_distance);
  return rep;
}

}  // namespace ptheta
