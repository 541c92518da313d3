#pragma once

// Zeros of theta(q, .) near the geometric progression -1/(q^j Delta_j).
//
// Each zero is seeded from the truncated Delta_j(q) series and refined with
// damped Newton on theta / theta_x. The zeros grow like |q|^{-j}, and at the
// j-th zero the dominant terms of theta have modulus ~|q|^{-j(j-1)/2}, so an
// absolute residual tol needs roughly log10(|q|^{-n(n-1)/2} / tol) digits.
// find_zeros picks a working precision accordingly.

#include "ptheta/errors.hpp"
#include "ptheta/fps_delta.hpp"
#include "ptheta/numeric.hpp"
#include "ptheta/theta_eval.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace ptheta {

template <class R>
struct ZeroEntry {
  /// The zero is at x = -xi.
  complex_t<R> xi{};
  /// |theta(q, -xi)|.
  R residual{};
  /// Delta_j = 1/(q^j xi_j).
  complex_t<R> delta{};
  /// Estimated distance from -xi to the exact zero.
  R error_bound{};
  R tail_bound{};
  int iterations = 0;
};

template <class R>
struct ZeroSet {
  complex_t<R> q{};
  /// Ordered by increasing |xi|.
  std::vector<ZeroEntry<R>> entries;
  /// Smallest |xi_i - xi_k| over distinct pairs (infinite for fewer than two zeros).
  R min_pair_distance = std::numeric_limits<R>::infinity();
  /// Every pair is farther apart than twice the sum of their error bounds.
  bool pairwise_distinct = true;
  /// Working precision used for the refinement.
  int precision_bits = std::numeric_limits<R>::digits;

  [[nodiscard]] std::size_t count() const { return entries.size(); }
};

struct FindOptions {
  /// Order of the Delta_j series used for seeding.
  std::size_t delta_order = 20;
  /// Target residual |theta(q, -xi)|.
  double tol = 1e-10;
  int max_iterations = 60;
  /// Largest accepted |q|.
  double q_max = 0.9;
};

namespace detail {

template <class R>
void finalize_pairs(ZeroSet<R>& zs) {
  const auto& e = zs.entries;
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (std::size_t k = i + 1; k < e.size(); ++k) {
      const R dist = magnitude(complex_t<R>(e[i].xi - e[k].xi));
      if (dist < zs.min_pair_distance) zs.min_pair_distance = dist;
      if (!(dist > R(2) * (e[i].error_bound + e[k].error_bound))) zs.pairwise_distinct = false;
    }
  }
}

template <class R>
ZeroEntry<R> refine_zero(const complex_t<R>& q, complex_t<R> x, std::size_t j,
                         const FindOptions& opts) {
  using C = complex_t<R>;
  const R tol(opts.tol);
  const R eval_tol = tol / R(4);
  // Relative step floor: 1e-15 in double, scaled with the working epsilon.
  const R step_floor = R(1e-15) * (epsilon<R>() / R(std::numeric_limits<double>::epsilon()));

  auto residual_at = [&](const C& at) { return eval_theta(q, at, eval_tol); };

  auto f = residual_at(x);
  R r = magnitude(f.value);
  int it = 0;
  C last_step(0);
  while (r > tol && it < opts.max_iterations) {
    ++it;
    const auto fp = eval_dtheta_dx(q, x, eval_tol);
    if (magnitude(fp.value) == R(0)) break;
    const C step = f.value / fp.value;
    C scaled = step;
    bool improved = false;
    for (int halvings = 0; halvings < 40; ++halvings) {
      const C trial = x - scaled;
      auto ft = residual_at(trial);
      const R rt = magnitude(ft.value);
      if (rt < r) {
        x = trial;
        f = ft;
        r = rt;
        improved = true;
        break;
      }
      scaled *= C(R(0.5));
    }
    last_step = scaled;
    if (!improved) break;
    if (magnitude(scaled) < step_floor * magnitude(x)) break;
  }
  if (r > tol) {
    throw error(errc::newton_stall, "zero " + std::to_string(j) + ": residual " +
                                        std::to_string(to_double(r)) + " after " +
                                        std::to_string(it) + " iterations");
  }
  const auto fp = eval_dtheta_dx(q, x, eval_tol);
  ZeroEntry<R> out;
  out.xi = C(-x);
  out.residual = r;
  out.tail_bound = f.tail_bound;
  out.iterations = it;
  const R dmag = magnitude(fp.value);
  out.error_bound = (dmag > R(0) ? R(2) * r / dmag : std::numeric_limits<R>::infinity()) +
                    R(4) * epsilon<R>() * magnitude(x);
  return out;
}

}  // namespace detail

/// Zeros -xi_1, ..., -xi_n of theta(q, .) in working precision R, seeded from
/// the given Delta table (which must hold at least n rows).
template <class R>
ZeroSet<R> find(const complex_t<R>& q, std::size_t n, const DeltaTable& seeds,
                const FindOptions& opts = {}) {
  using C = complex_t<R>;
  ZeroSet<R> zs;
  zs.q = q;
  const R qa = magnitude(q);
  if (qa == R(0)) return zs;
  if (qa > R(opts.q_max)) {
    throw error(errc::divergence_domain,
                "|q| = " + std::to_string(to_double(qa)) + " is outside the zero-finding range");
  }
  if (n == 0) throw error(errc::too_few_zeros, "n must be at least 1");
  if (seeds.size() < n) throw error(errc::internal, "seed table has fewer rows than requested");

  C qpow(1);
  for (std::size_t j = 1; j <= n; ++j) {
    qpow *= q;
    const C delta_seed = seeds.delta(j).evaluate(q);
    const C x0 = C(-(C(1) / (qpow * delta_seed)));
    zs.entries.push_back(detail::refine_zero<R>(q, x0, j, opts));
  }
  std::stable_sort(zs.entries.begin(), zs.entries.end(), [](const auto& a, const auto& b) {
    return magnitude(a.xi) < magnitude(b.xi);
  });
  qpow = C(1);
  for (auto& e : zs.entries) {
    qpow *= q;
    e.delta = C(1) / (qpow * e.xi);
  }
  detail::finalize_pairs(zs);
  return zs;
}

/// As above, solving the seed table on the fly.
template <class R>
ZeroSet<R> find(const complex_t<R>& q, std::size_t n, const FindOptions& opts = {}) {
  if (n == 0) throw error(errc::too_few_zeros, "n must be at least 1");
  return find<R>(q, n, solve_delta(n, opts.delta_order), opts);
}

// ---------------------------------------------------------------------------
// Precision selection
// ---------------------------------------------------------------------------

enum class Precision { standard, high, extended, ultra };

inline int precision_bits(Precision p) {
  switch (p) {
    case Precision::standard: return std::numeric_limits<double>::digits;
    case Precision::high: return std::numeric_limits<real_hp>::digits;
    case Precision::extended: return std::numeric_limits<real_xp>::digits;
    case Precision::ultra: return std::numeric_limits<real_xxp>::digits;
  }
  return 0;
}

inline int precision_digits10(Precision p) {
  switch (p) {
    case Precision::standard: return std::numeric_limits<double>::digits10;
    case Precision::high: return std::numeric_limits<real_hp>::digits10;
    case Precision::extended: return std::numeric_limits<real_xp>::digits10;
    case Precision::ultra: return std::numeric_limits<real_xxp>::digits10;
  }
  return 0;
}

/// Smallest supported precision with at least `bits` binary digits.
inline Precision precision_for_bits(int bits) {
  for (Precision p : {Precision::standard, Precision::high, Precision::extended, Precision::ultra}) {
    if (precision_bits(p) >= bits) return p;
  }
  throw error(errc::precision_exhausted,
              std::to_string(bits) + " bits requested; at most " +
                  std::to_string(precision_bits(Precision::ultra)) + " are supported");
}

/// Decimal digits needed for residual tol on the first n zeros at |q|.
inline double required_digits(double q_abs, std::size_t n, double tol) {
  const double nn = static_cast<double>(n);
  const double scale = -0.5 * nn * (nn - 1.0) * std::log10(q_abs);
  return std::max(0.0, scale) - std::log10(tol) + 8.0;
}

inline Precision auto_precision(double q_abs, std::size_t n, double tol) {
  const double digits = required_digits(q_abs, n, tol);
  for (Precision p : {Precision::standard, Precision::high, Precision::extended, Precision::ultra}) {
    if (precision_digits10(p) >= digits) return p;
  }
  throw error(errc::precision_exhausted,
              "about " + std::to_string(static_cast<int>(digits)) +
                  " digits needed for the requested residual");
}

template <class R>
ZeroSet<double> to_double_set(const ZeroSet<R>& zs) {
  ZeroSet<double> out;
  out.q = to_complex_double(zs.q);
  out.min_pair_distance = to_double(zs.min_pair_distance);
  out.pairwise_distinct = zs.pairwise_distinct;
  out.precision_bits = zs.precision_bits;
  for (const auto& e : zs.entries) {
    ZeroEntry<double> d;
    d.xi = to_complex_double(e.xi);
    d.residual = to_double(e.residual);
    d.delta = to_complex_double(e.delta);
    d.error_bound = to_double(e.error_bound);
    d.tail_bound = to_double(e.tail_bound);
    d.iterations = e.iterations;
    out.entries.push_back(d);
  }
  return out;
}

/// Zeros computed in the given (or automatically chosen) precision, reported
/// in double.
inline ZeroSet<double> find_zeros(std::complex<double> q, std::size_t n, const DeltaTable& seeds,
                                  const FindOptions& opts = {},
                                  std::optional<Precision> precision = std::nullopt) {
  if (std::abs(q) == 0.0) {
    ZeroSet<double> empty;
    empty.q = q;
    return empty;
  }
  const Precision p = precision ? *precision : auto_precision(std::abs(q), n, opts.tol);
  switch (p) {
    case Precision::standard:
      return to_double_set(find<double>(q, n, seeds, opts));
    case Precision::high:
      return to_double_set(find<real_hp>(from_complex_double<real_hp>(q), n, seeds, opts));
    case Precision::extended:
      return to_double_set(find<real_xp>(from_complex_double<real_xp>(q), n, seeds, opts));
    case Precision::ultra:
      return to_double_set(find<real_xxp>(from_complex_double<real_xxp>(q), n, seeds, opts));
  }
  throw error(errc::internal, "unknown precision");
}

inline ZeroSet<double> find_zeros(std::complex<double> q, std::size_t n,
                                  const FindOptions& opts = {},
                                  std::optional<Precision> precision = std::nullopt) {
  if (n == 0) throw error(errc::too_few_zeros, "n must be at least 1");
  return find_zeros(q, n, solve_delta(n, opts.delta_order), opts, precision);
}

/// prod (1 + x/xi_j) over the zeros of a ZeroSet.
template <class R>
complex_t<R> eval_product(const complex_t<R>& x, const ZeroSet<R>& zs) {
  std::vector<complex_t<R>> xi;
  xi.reserve(zs.count());
  for (const auto& e : zs.entries) xi.push_back(e.xi);
  return eval_product(x, std::span<const complex_t<R>>(xi));
}

// ---------------------------------------------------------------------------
// Distinctness diagnostics
// ---------------------------------------------------------------------------

struct SeparationReport {
  /// min_j |q^{j+1} Delta_{j+1}| / |q^j Delta_j| = min_j |xi_j| / |xi_{j+1}|.
  double min_ratio = 0.0;
  /// Largest consecutive ratio; below one means the moduli strictly decrease.
  double max_ratio = 0.0;
  double min_pair_distance = 0.0;
  bool distinct = false;
};

template <class R>
SeparationReport separation_report(const ZeroSet<R>& zs) {
  if (zs.count() < 2) throw error(errc::too_few_zeros, "need at least two zeros");
  SeparationReport rep;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.max_ratio = 0.0;
  for (std::size_t j = 0; j + 1 < zs.count(); ++j) {
    const double ratio =
        to_double(magnitude(zs.entries[j].xi)) / to_double(magnitude(zs.entries[j + 1].xi));
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
  }
  rep.min_pair_distance = to_double(zs.min_pair_distance);
  rep.distinct = rep.max_ratio < 1.0 && zs.pairwise_distinct;
  return rep;
}

struct ScanRow {
  std::complex<double> q;
  std::size_t n_found = 0;
  double min_ratio = std::numeric_limits<double>::quiet_NaN();
  double max_ratio = std::numeric_limits<double>::quiet_NaN();
  double min_pair_distance = std::numeric_limits<double>::quiet_NaN();
  double max_delta_dev = std::numeric_limits<double>::quiet_NaN();
  double max_residual = std::numeric_limits<double>::quiet_NaN();
  /// Smallest and largest |Delta_j|.
  double min_delta_abs = std::numeric_limits<double>::quiet_NaN();
  double max_delta_abs = std::numeric_limits<double>::quiet_NaN();
  bool distinct = false;
  bool stalled = false;
};

/// Zero-finding over the polar grid r_i = r_max (i+1)/grid, phi_k = 2 pi k/grid.
/// Rows are ordered by (i, k). Per-point failures are recorded, not thrown.
inline std::vector<ScanRow> scan_disk(double r_max, std::size_t grid, std::size_t n,
                                      const FindOptions& opts = {}) {
  if (!(r_max > 0.0) || r_max > 0.35) {
    throw error(errc::divergence_domain, "r_max must lie in (0, 0.35]");
  }
  if (grid == 0 || grid > 512) throw error(errc::resource_cap, "grid must lie in [1, 512]");
  if (n == 0) throw error(errc::too_few_zeros, "n must be at least 1");
  const DeltaTable seeds = solve_delta(n, opts.delta_order);
  std::vector<ScanRow> rows;
  rows.reserve(grid * grid);
  for (std::size_t i = 0; i < grid; ++i) {
    const double r = r_max * static_cast<double>(i + 1) / static_cast<double>(grid);
    for (std::size_t k = 0; k < grid; ++k) {
      const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(grid);
      ScanRow row;
      row.q = std::polar(r, phi);
      try {
        const ZeroSet<double> zs = find_zeros(row.q, n, seeds, opts);
        row.n_found = zs.count();
        row.max_delta_dev = 0.0;
        row.max_residual = 0.0;
        row.min_delta_abs = std::numeric_limits<double>::infinity();
        row.max_delta_abs = 0.0;
        for (const auto& e : zs.entries) {
          row.max_delta_dev = std::max(row.max_delta_dev, std::abs(e.delta - 1.0));
          row.max_residual = std::max(row.max_residual, e.residual);
          row.min_delta_abs = std::min(row.min_delta_abs, std::abs(e.delta));
          row.max_delta_abs = std::max(row.max_delta_abs, std::abs(e.delta));
        }
        if (zs.count() >= 2) {
          const SeparationReport rep = separation_report(zs);
          row.min_ratio = rep.min_ratio;
          row.max_ratio = rep.max_ratio;
          row.min_pair_distance = rep.min_pair_distance;
          row.distinct = rep.distinct;
        } else {
          row.distinct = true;
        }
      } catch (const error&) {
        row.stalled = true;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace ptheta
