#pragma once

// Certificate that every zero of theta(q, .) is simple on the disk |q| <= a.
//
// With |q| <= a and |Delta_j| in [1 - beta, 1 + beta], u = 1 + beta, the chain is
//
//   (C1)  0 < a < 1/3 and 0 < a u < 1
//   (C2)  u a/(1 - a) + (u a)^2/(1 - u a) <= (u - 1)/3
//   (C3)  1 - E <= |Delta_1...Delta_s| <= 1 + E,  E = u a/(1 - a) + (u a)^2/(1 - u a),
//         and E <= beta/3 gives (1 - beta/3)/(1 + beta/3) >= 1 - beta and
//         (1 + beta/3)/(1 - beta/3) <= 1 + beta
//   (C4)  (1 + beta) a < 1 - beta, so |q^{j+1} Delta_{j+1}| < |q^j Delta_j|.
//
// Every verdict below is computed in exact rational arithmetic. Floating
// point appears only in the matrix oracles.

#include "ptheta/errors.hpp"
#include "ptheta/numeric.hpp"
#include "ptheta/rational_io.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <cmath>
#include <string>
#include <vector>

namespace ptheta {

struct CertParams {
  rational a;
  rational beta;
  rational u;

  static CertParams from_u(const rational& a, const rational& u) { return {a, u - 1, u}; }
  static CertParams from_beta(const rational& a, const rational& beta) { return {a, beta, beta + 1}; }
};

// ---------------------------------------------------------------------------
// Unipotent band factors L_s = I + N_s
// ---------------------------------------------------------------------------

/// L_s has ones on the diagonal and q^{s-1} Delta_s, ..., q Delta_s on the first
/// subdiagonal (rows 2..s, 1-based), zeros elsewhere.
template <class S>
struct BandMatrixSpec {
  std::size_t s = 1;
  S q{};
  S delta_s{};

  /// Subdiagonal entry (mu, mu - 1), 1-based.
  [[nodiscard]] S subdiagonal(std::size_t mu) const {
    if (mu < 2 || mu > s) return S(0);
    return ipow(q, s - mu + 1) * delta_s;
  }
};

/// Leading d x d block of L_s.
inline Eigen::MatrixXcd band_matrix(const BandMatrixSpec<std::complex<double>>& spec,
                                    std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  Eigen::MatrixXcd L = Eigen::MatrixXcd::Identity(n, n);
  for (std::size_t mu = 2; mu <= d; ++mu) {
    L(static_cast<Eigen::Index>(mu - 1), static_cast<Eigen::Index>(mu - 2)) = spec.subdiagonal(mu);
  }
  return L;
}

/// Closed form of (L_s^{-1})_{mu, nu}, 1-based:
/// (-1)^{mu-nu} Delta_s^{mu-nu} q^{(mu-nu)(s-mu+1) + (mu-nu)(mu-nu-1)/2} for
/// nu <= mu <= s, 1 on the diagonal, 0 elsewhere.
template <class S>
S inverse_entry(std::size_t s, std::size_t mu, std::size_t nu, const S& q, const S& delta_s) {
  if (mu == nu) return S(1);
  if (nu > mu || mu > s) return S(0);
  const std::uint64_t k = mu - nu;
  const std::uint64_t exponent = k * (s - mu + 1) + k * (k - 1) / 2;
  S v = ipow(delta_s, k) * ipow(q, exponent);
  return (k % 2 == 0) ? v : S(-v);
}

/// |L_{mu,nu}| majorant for |q| <= a, |Delta_s| <= u.
inline double inverse_entry_majorant(std::size_t s, std::size_t mu, std::size_t nu, double a,
                                     double u) {
  if (mu == nu) return 1.0;
  if (nu > mu || mu > s) return 0.0;
  const std::uint64_t k = mu - nu;
  const std::uint64_t exponent = k * (s - mu + 1) + k * (k - 1) / 2;
  return ipow(u, k) * ipow(a, exponent);
}

/// Inverts the d x d truncation of L_s numerically (unit lower triangular
/// solve) and compares every entry against inverse_entry.
inline bool inverse_oracle_check(std::size_t s, std::size_t d, std::complex<double> q,
                                 std::complex<double> delta_s, double tol) {
  if (s == 0 || d < s + 1) throw error(errc::internal, "truncation dimension must exceed s");
  const Eigen::MatrixXcd L = band_matrix({s, q, delta_s}, d);
  const auto n = static_cast<Eigen::Index>(d);
  const Eigen::MatrixXcd inv =
      L.triangularView<Eigen::UnitLower>().solve(Eigen::MatrixXcd::Identity(n, n));
  if (!inv.allFinite()) throw error(errc::internal, "triangular solve produced non-finite entries");
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto closed = inverse_entry(s, static_cast<std::size_t>(r + 1),
                                        static_cast<std::size_t>(c + 1), q, delta_s);
      if (std::abs(closed - inv(r, c)) > tol) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Product coefficients b_j
// ---------------------------------------------------------------------------

/// 1 / prod_{i=1..j} (1 - a^i).
inline rational bound_b(std::size_t j, const rational& a) {
  rational denom(1);
  rational power(1);
  for (std::size_t i = 1; i <= j; ++i) {
    power *= a;
    denom *= rational(1) - power;
  }
  return rational(1) / denom;
}

/// Coefficients b_0..b_{s-1} of the finite product
///   prod_{k=0}^{terms-1} (I + sum_{i=1}^{s-1} (a^k M)^i) = sum_j b_j M^j,
/// expanded exactly as a polynomial in the nilpotent M (M^s = 0). The powers
/// M^0..M^{s-1} of the subdiagonal model matrix are linearly independent, so
/// these are its matrix coefficients for any nonzero subdiagonal.
inline std::vector<rational> model_product_coefficients(std::size_t s, const rational& a,
                                                        std::size_t terms) {
  std::vector<rational> b(s, rational(0));
  b[0] = 1;
  rational scale(1);  // a^k
  for (std::size_t k = 0; k < terms; ++k) {
    // factor_i = scale^i for i = 0..s-1
    std::vector<rational> factor(s);
    factor[0] = 1;
    for (std::size_t i = 1; i < s; ++i) factor[i] = factor[i - 1] * scale;
    std::vector<rational> next(s, rational(0));
    for (std::size_t i = 0; i < s; ++i) {
      if (b[i] == 0) continue;
      for (std::size_t m = 0; i + m < s; ++m) next[i + m] += b[i] * factor[m];
    }
    b = std::move(next);
    scale *= a;
  }
  return b;
}

/// The s x s model matrix with a^{s-1} u, ..., a u on the first subdiagonal.
inline Eigen::MatrixXd model_matrix(std::size_t s, double a, double u) {
  const auto n = static_cast<Eigen::Index>(s);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t r = 1; r < s; ++r) {
    M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r - 1)) = ipow(a, s - r) * u;
  }
  return M;
}

struct BoundBCheck {
  rational truncated_b;
  rational bound;
  bool holds = false;
};

/// Expands `terms` factors of the product and checks b_j <= bound_b(j, a).
inline BoundBCheck bound_b_oracle(std::size_t j, std::size_t s, const rational& a,
                                  std::size_t terms) {
  if (j == 0 || j >= s) throw error(errc::internal, "bound_b_oracle needs 1 <= j < s");
  const auto b = model_product_coefficients(s, a, terms);
  BoundBCheck out;
  out.truncated_b = b[j];
  out.bound = bound_b(j, a);
  out.holds = out.truncated_b <= out.bound;
  return out;
}

/// The same check for every j = 1..s-1 from a single expansion.
inline std::vector<BoundBCheck> bound_b_oracle_row(std::size_t s, const rational& a,
                                                   std::size_t terms) {
  if (s < 2) throw error(errc::internal, "bound_b_oracle_row needs s >= 2");
  const auto b = model_product_coefficients(s, a, terms);
  std::vector<BoundBCheck> out;
  for (std::size_t j = 1; j < s; ++j) {
    BoundBCheck c;
    c.truncated_b = b[j];
    c.bound = bound_b(j, a);
    c.holds = c.truncated_b <= c.bound;
    out.push_back(std::move(c));
  }
  return out;
}

/// Factors needed for a^terms < 10^-digits.
inline std::size_t product_terms_for(const rational& a, double digits) {
  const double la = std::log10(static_cast<double>(a));
  if (!(la < 0.0)) throw error(errc::internal, "product_terms_for needs 0 < a < 1");
  return static_cast<std::size_t>(std::ceil(digits / -la)) + 1;
}

// ---------------------------------------------------------------------------
// Inequality chain
// ---------------------------------------------------------------------------

struct ConditionVerdict {
  bool a_below_third = false;
  bool au_below_one = false;
  /// Left and right sides of (C2); absent when a u >= 1 or a >= 1.
  std::optional<rational> lhs;
  std::optional<rational> rhs;
  std::optional<rational> slack;
  bool band_inequality = false;
  bool holds = false;
};

/// E = u a/(1 - a) + (u a)^2/(1 - u a).
inline rational band_excess(const rational& a, const rational& u) {
  const rational ua = u * a;
  return ua / (rational(1) - a) + ua * ua / (rational(1) - ua);
}

inline ConditionVerdict check_conditions(const rational& a, const rational& u) {
  ConditionVerdict v;
  const rational ua = a * u;
  v.a_below_third = a > 0 && a < rational(1, 3);
  v.au_below_one = ua > 0 && ua < 1;
  if (a > 0 && a < 1 && u > 1 && ua < 1) {
    v.lhs = band_excess(a, u);
    v.rhs = (u - 1) / 3;
    v.slack = *v.rhs - *v.lhs;
    v.band_inequality = *v.slack >= 0;
  }
  v.holds = v.a_below_third && v.au_below_one && v.band_inequality;
  return v;
}

struct Sandwich {
  rational excess;  // E
  rational lo;      // 1 - E
  rational hi;      // 1 + E
  rational beta_third;
  bool within_beta_third = false;
  rational quotient_lo;  // (1 - beta/3)/(1 + beta/3)
  rational quotient_hi;  // (1 + beta/3)/(1 - beta/3)
  bool quotient_ok = false;
};

/// s-independent bounds on |Delta_1...Delta_s| and the induced band on |Delta_s|.
inline Sandwich band_sandwich(const rational& a, const rational& u) {
  if (!(a > 0 && a < rational(1, 3) && a * u > 0 && a * u < 1)) {
    throw error(errc::internal, "band_sandwich requires 0 < a < 1/3 and 0 < a u < 1");
  }
  Sandwich out;
  const rational beta = u - 1;
  out.excess = band_excess(a, u);
  out.lo = rational(1) - out.excess;
  out.hi = rational(1) + out.excess;
  out.beta_third = beta / 3;
  out.within_beta_third = out.excess <= out.beta_third;
  out.quotient_lo = (rational(1) - out.beta_third) / (rational(1) + out.beta_third);
  out.quotient_hi = (rational(1) + out.beta_third) / (rational(1) - out.beta_third);
  out.quotient_ok = beta > 0 && beta < 1 && out.quotient_lo >= rational(1) - beta &&
                    out.quotient_hi <= rational(1) + beta;
  return out;
}

struct SeparationVerdict {
  rational lhs;  // (1 + beta) a
  rational rhs;  // 1 - beta
  rational margin;
  bool holds = false;
};

inline SeparationVerdict separation_margin(const rational& a, const rational& beta) {
  SeparationVerdict v;
  v.lhs = (rational(1) + beta) * a;
  v.rhs = rational(1) - beta;
  v.margin = v.rhs - v.lhs;
  v.holds = beta > 0 && beta < 1 && v.lhs < v.rhs;
  return v;
}

struct Certificate {
  CertParams params;
  ConditionVerdict conditions;
  std::optional<Sandwich> sandwich;
  SeparationVerdict separation;
  bool feasible = false;
  /// Largest (C2) slack among the examined u (for a fixed u, its slack).
  std::optional<rational> best_slack;
  std::size_t candidates_examined = 0;
};

/// Full chain at a fixed (a, u).
inline Certificate certify_with(const rational& a, const rational& u) {
  Certificate c;
  c.params = CertParams::from_u(a, u);
  c.conditions = check_conditions(a, u);
  if (c.conditions.a_below_third && c.conditions.au_below_one) c.sandwich = band_sandwich(a, u);
  c.separation = separation_margin(a, c.params.beta);
  c.feasible = c.conditions.holds && c.sandwich && c.sandwich->within_beta_third &&
               c.sandwich->quotient_ok && c.separation.holds;
  c.best_slack = c.conditions.slack;
  c.candidates_examined = 1;
  return c;
}

struct CertifySearch {
  rational coarse_step{1, 1000};
  rational fine_step{1, 1000000};
};

/// Searches u in (1, min(2, 1/a)) for a witness: a coarse grid, then one
/// refinement pass around the best coarse point.
inline Certificate certify_disk(const rational& a, const CertifySearch& search = {}) {
  if (!(a > 0)) throw error(errc::internal, "certify_disk requires a > 0");
  const rational upper = a >= rational(1, 2) ? rational(1) / a : rational(2);
  std::size_t examined = 0;

  // Prefer candidates that also separate; rank by the (C2) slack.
  struct Best {
    std::optional<rational> u;
    std::optional<rational> slack;
    bool separates = false;
  };
  auto consider = [&](Best& best, const rational& u) {
    ++examined;
    const ConditionVerdict v = check_conditions(a, u);
    if (!v.slack || !v.a_below_third || !v.au_below_one) return;
    const bool sep = separation_margin(a, u - 1).holds;
    const bool better = !best.u || (sep && !best.separates) ||
                        (sep == best.separates && *v.slack > *best.slack);
    if (better) best = {u, v.slack, sep};
  };
  auto sweep = [&](Best& best, const rational& from, const rational& to, const rational& step) {
    for (rational u = from + step; u < to; u += step) consider(best, u);
  };

  Best coarse;
  sweep(coarse, rational(1), upper, search.coarse_step);
  Best fine = coarse;
  if (coarse.u) {
    const rational from = *coarse.u - search.coarse_step > 1 ? *coarse.u - search.coarse_step
                                                             : rational(1);
    const rational to = *coarse.u + search.coarse_step < upper ? *coarse.u + search.coarse_step
                                                               : upper;
    sweep(fine, from, to, search.fine_step);
  }

  Certificate cert;
  if (fine.u) {
    cert = certify_with(a, *fine.u);
  } else {
    cert.params = CertParams::from_u(a, upper);
    cert.conditions = check_conditions(a, upper);
    cert.separation = separation_margin(a, upper - 1);
  }
  cert.best_slack = fine.slack;
  cert.candidates_examined = examined;
  return cert;
}

/// Largest a = k * grid_step (a < 1/3) for which certify_disk finds a witness.
/// Feasibility is monotone in a (the slack of (C2) decreases and the
/// separation product grows with a), so the grid is bisected.
inline rational max_certified_radius(const rational& grid_step, const CertifySearch& search = {}) {
  if (!(grid_step > 0)) throw error(errc::internal, "grid_step must be positive");
  const rational third(1, 3);
  bigint hi_k = numerator(third / grid_step) / denominator(third / grid_step);
  if (rational(hi_k) * grid_step >= third) hi_k -= 1;
  auto feasible = [&](const bigint& k) {
    return certify_disk(rational(k) * grid_step, search).feasible;
  };
  if (hi_k < 1 || !feasible(bigint(1))) return rational(0);
  bigint lo_k(1);  // feasible
  if (feasible(hi_k)) return rational(hi_k) * grid_step;
  while (hi_k - lo_k > 1) {
    const bigint mid = (lo_k + hi_k) / 2;
    if (feasible(mid)) {
      lo_k = mid;
    } else {
      hi_k = mid;
    }
  }
  return rational(lo_k) * grid_step;
}

/// Human-readable listing of every inequality with both sides as exact rationals.
inline std::string proof_transcript(const Certificate& c) {
  std::ostringstream os;
  auto num = [](const rational& r) {
    return to_fraction_string(r) + "  (~" + to_decimal_string(r, 12) + ")";
  };
  const CertParams& p = c.params;
  os << "parameters\n";
  os << "  a    = " << num(p.a) << "\n";
  os << "  u    = " << num(p.u) << "\n";
  os << "  beta = " << num(p.beta) << "\n";
  os << "condition a < 1/3: " << (c.conditions.a_below_third ? "holds" : "FAILS") << "\n";
  os << "  lhs a   = " << num(p.a) << "\n  rhs 1/3 = " << num(rational(1, 3)) << "\n";
  os << "condition a*u < 1: " << (c.conditions.au_below_one ? "holds" : "FAILS") << "\n";
  os << "  lhs a*u = " << num(p.a * p.u) << "\n  rhs     = 1\n";
  os << "condition ua/(1-a) + (ua)^2/(1-ua) <= (u-1)/3: "
     << (c.conditions.band_inequality ? "holds" : "FAILS") << "\n";
  if (c.conditions.lhs) {
    os << "  lhs   = " << num(*c.conditions.lhs) << "\n";
    os << "  rhs   = " << num(*c.conditions.rhs) << "\n";
    os << "  slack = " << num(*c.conditions.slack) << "\n";
  } else {
    os << "  undefined (a*u >= 1 or a >= 1)\n";
  }
  if (c.sandwich) {
    const Sandwich& s = *c.sandwich;
    os << "product band 1 - E <= |Delta_1...Delta_s| <= 1 + E\n";
    os << "  E     = " << num(s.excess) << "\n";
    os << "  1 - E = " << num(s.lo) << "\n";
    os << "  1 + E = " << num(s.hi) << "\n";
    os << "condition E <= beta/3: " << (s.within_beta_third ? "holds" : "FAILS") << "\n";
    os << "  lhs E      = " << num(s.excess) << "\n  rhs beta/3 = " << num(s.beta_third) << "\n";
    os << "condition (1-beta/3)/(1+beta/3) >= 1-beta and (1+beta/3)/(1-beta/3) <= 1+beta: "
       << (s.quotient_ok ? "holds" : "FAILS") << "\n";
    os << "  (1-beta/3)/(1+beta/3) = " << num(s.quotient_lo) << "\n";
    os << "  1-beta                = " << num(rational(1) - p.beta) << "\n";
    os << "  (1+beta/3)/(1-beta/3) = " << num(s.quotient_hi) << "\n";
    os << "  1+beta                = " << num(p.u) << "\n";
  }
  os << "separation (1+beta)*a < 1-beta: " << (c.separation.holds ? "holds" : "FAILS") << "\n";
  os << "  lhs    = " << num(c.separation.lhs) << "\n";
  os << "  rhs    = " << num(c.separation.rhs) << "\n";
  os << "  margin = " << num(c.separation.margin) << "\n";
  os << "verdict: " << (c.feasible ? "FEASIBLE" : "INFEASIBLE") << "\n";
  if (c.feasible) {
    os << "  all zeros of theta(q, .) are simple for |q| <= " << to_decimal_string(p.a, 6)
       << "; |Delta_j| in [" << to_decimal_string(rational(1) - p.beta, 6) << ", "
       << to_decimal_string(p.u, 6) << "]\n";
  }
  return os.str();
}

}  // namespace ptheta
