#pragma once

// Evaluation of the partial theta function
//
//   theta(q, x) = sum_{j >= 0} q^{j(j+1)/2} x^j
//
// and its partial derivatives in x and q, with a rigorous bound on the
// discarded tail.
//
// Tail majorant: the ratio of consecutive terms of d^m/dx^m d^n/dq^n theta is
//
//   r_j = w(j+1)/w(j) * |q|^{j+1} |x|,   w(j) = (e_j)_n (j)_m,  e_j = j(j+1)/2,
//
// where (.)_k is the falling factorial. Both factors are nonincreasing in j
// once w(j) > 0, so r_N <= 1/2 implies every later ratio is <= 1/2 and the
// tail from index N is bounded by 2 |t_N|.

#include "ptheta/errors.hpp"
#include "ptheta/numeric.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>

namespace ptheta {

/// Orders of differentiation in x and in q.
struct Derivative {
  unsigned dx = 0;
  unsigned dq = 0;
};

struct EvalOptions {
  /// Hard cap on |q|; the series diverges at |q| = 1.
  double q_cap = 0.99;
  /// Ceiling on the number of summed terms.
  std::size_t max_terms = 20000;
};

template <class S>
struct EvalResult {
  using real_type = real_of_t<S>;

  S value{};
  /// Upper bound on |exact - value| from the discarded tail.
  real_type tail_bound{};
  /// Number of indices j = 0..N-1 summed.
  std::size_t terms_used = 0;
  /// Sum of the moduli of the summed terms.
  real_type abs_sum{};

  /// Estimate of the accumulated floating-point error of the partial sum.
  [[nodiscard]] real_type rounding_bound() const {
    return abs_sum * epsilon<real_type>() * real_type(static_cast<double>(terms_used + 2));
  }
  /// Tail bound plus rounding estimate.
  [[nodiscard]] real_type error_bound() const { return tail_bound + rounding_bound(); }
};

namespace detail {

inline std::uint64_t triangular(std::uint64_t j) { return j * (j + 1) / 2; }

template <class R>
R falling(std::uint64_t n, unsigned k) {
  R r(1);
  for (unsigned i = 0; i < k; ++i) r *= R(static_cast<double>(n - i));
  return r;
}

/// First index whose term survives the differentiation.
inline std::uint64_t first_live_index(Derivative d) {
  std::uint64_t j = d.dx;
  while (triangular(j) < d.dq) ++j;
  return j;
}

template <class R>
R weight(std::uint64_t j, Derivative d) {
  return falling<R>(triangular(j), d.dq) * falling<R>(j, d.dx);
}

template <class S>
void check_domain(const S& q, const EvalOptions& opts) {
  using R = real_of_t<S>;
  if (!(magnitude(q) <= R(opts.q_cap))) {
    throw error(errc::divergence_domain,
                "|q| = " + std::to_string(to_double(magnitude(q))) + " exceeds the cap " +
                    std::to_string(opts.q_cap));
  }
}

/// Sums the derivative series. With fixed_terms == 0 the number of terms is
/// chosen adaptively until the tail bound drops to tol; otherwise exactly
/// fixed_terms terms are summed and the bound may be infinite.
template <class S>
EvalResult<S> sum_series(const S& q, const S& x, Derivative d, const real_of_t<S>& tol,
                         std::size_t fixed_terms, const EvalOptions& opts) {
  using R = real_of_t<S>;
  check_domain(q, opts);
  if (fixed_terms == 0 && !(tol > R(0))) {
    throw error(errc::tolerance_unreachable, "tolerance must be positive");
  }

  const R qa = magnitude(q);
  const R xa = magnitude(x);
  const std::uint64_t j0 = first_live_index(d);
  const R half(0.5);
  const R inf = std::numeric_limits<R>::infinity();

  EvalResult<S> out;
  S sum(0);
  S comp(0);  // Kahan compensation, only used above double precision

  // Power part p_j = q^{e_j - dq} x^{j - dx} of the current term and its modulus.
  S power(0);
  R power_abs(0);
  S q_step(0);  // q^{j+1}
  R q_step_abs(0);

  for (std::uint64_t j = 0;; ++j) {
    if (j == j0) {
      power = ipow(q, triangular(j0) - d.dq) * ipow(x, j0 - d.dx);
      power_abs = ipow(qa, triangular(j0) - d.dq) * ipow(xa, j0 - d.dx);
      q_step = ipow(q, j0 + 1);
      q_step_abs = ipow(qa, j0 + 1);
    } else if (j > j0) {
      power *= q_step * x;
      power_abs *= q_step_abs * xa;
      q_step *= q;
      q_step_abs *= qa;
    }

    // Index j is the candidate first discarded term once N = j terms are summed.
    const std::size_t n_summed = static_cast<std::size_t>(j);
    if (j >= j0 && n_summed >= 1) {
      const R w = weight<R>(j, d);
      const R term_abs = w * power_abs;
      const R ratio = weight<R>(j + 1, d) / w * q_step_abs * xa;
      const R bound = ratio <= half ? R(2) * term_abs : inf;
      const bool done = fixed_terms != 0 ? n_summed == fixed_terms : bound <= tol;
      if (done) {
        out.value = sum;
        out.tail_bound = bound;
        out.terms_used = n_summed;
        return out;
      }
    } else if (fixed_terms != 0 && n_summed == fixed_terms) {
      out.value = sum;
      out.tail_bound = inf;
      out.terms_used = n_summed;
      return out;
    }
    if (n_summed >= opts.max_terms) {
      throw error(errc::tolerance_unreachable,
                  "more than " + std::to_string(opts.max_terms) + " terms required");
    }

    if (j >= j0) {
      const R w = weight<R>(j, d);
      const S term = power * S(w);
      if constexpr (precision_bits<R>() > 53) {
        const S y = term - comp;
        const S t = sum + y;
        comp = (t - sum) - y;
        sum = t;
      } else {
        sum += term;
      }
      out.abs_sum += w * power_abs;
    }
  }
}

}  // namespace detail

/// theta(q, x) summed until the tail bound is at most tol.
template <class S>
EvalResult<S> eval_theta(const S& q, const S& x, const real_of_t<S>& tol,
                         const EvalOptions& opts = {}) {
  return detail::sum_series(q, x, Derivative{}, tol, 0, opts);
}

template <class S>
EvalResult<S> eval_dtheta_dx(const S& q, const S& x, const real_of_t<S>& tol,
                             const EvalOptions& opts = {}) {
  return detail::sum_series(q, x, Derivative{1, 0}, tol, 0, opts);
}

template <class S>
EvalResult<S> eval_d2theta_dx2(const S& q, const S& x, const real_of_t<S>& tol,
                               const EvalOptions& opts = {}) {
  return detail::sum_series(q, x, Derivative{2, 0}, tol, 0, opts);
}

template <class S>
EvalResult<S> eval_dtheta_dq(const S& q, const S& x, const real_of_t<S>& tol,
                             const EvalOptions& opts = {}) {
  return detail::sum_series(q, x, Derivative{0, 1}, tol, 0, opts);
}

template <class S>
EvalResult<S> eval_d2theta_dqdx(const S& q, const S& x, const real_of_t<S>& tol,
                                const EvalOptions& opts = {}) {
  return detail::sum_series(q, x, Derivative{1, 1}, tol, 0, opts);
}

/// Any mixed partial derivative d^dx/dx^dx d^dq/dq^dq theta.
template <class S>
EvalResult<S> eval_derivative(const S& q, const S& x, Derivative d, const real_of_t<S>& tol,
                              const EvalOptions& opts = {}) {
  return detail::sum_series(q, x, d, tol, 0, opts);
}

/// Partial sum over exactly n_terms indices. The tail bound is infinite when the
/// ratio majorant does not yet apply at n_terms.
template <class S>
EvalResult<S> eval_theta_terms(const S& q, const S& x, std::size_t n_terms, Derivative d = {},
                               const EvalOptions& opts = {}) {
  if (n_terms == 0) throw error(errc::tolerance_unreachable, "at least one term is required");
  return detail::sum_series(q, x, d, real_of_t<S>(0), n_terms, opts);
}

/// prod_j (1 + x / xi_j) over a finite list of zero moduli xi_j (zeros at -xi_j).
template <class S>
S eval_product(const S& x, std::span<const S> xi) {
  if (xi.empty()) throw error(errc::empty_zero_set, "no zeros supplied");
  S p(1);
  for (const S& v : xi) p *= S(1) + x / v;
  return p;
}

}  // namespace ptheta
