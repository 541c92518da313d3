#pragma once

// Exact power-series solution of the zero-correction factors.
//
// Writing the zeros of theta(q, .) as -1/(q^s Delta_s), the Delta_s solve the
// triangular system
//
//   e_s(Delta_1, q Delta_2, q^2 Delta_3, ...) = q^{s(s-1)/2},   s = 1, 2, ...
//
// Divided by q^{s(s-1)/2}, equation s reads sigma_s = Delta_1...Delta_s + q(...)
// = 1, so the order-k coefficient of sigma_s is sum_{i<=s} [q^k]Delta_i plus
// data of order < k. One sweep per order k therefore fixes the q^k
// coefficients of every Delta_s exactly: Delta_s[k] = R_s - R_{s-1}, with R_s
// the negated order-k residual of equation s.
//
// Only M = K + S unknowns are carried. Index t enters sigma_s with a factor
// q^{t-s} or higher, so unknowns beyond M leave Delta_1..Delta_S untouched
// through order K.

#include "ptheta/errors.hpp"
#include "ptheta/trunc_series.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ptheta {

/// q^shift * series.
struct ShiftedSeries {
  std::size_t shift = 0;
  TruncSeries series;
};

/// e_s of the given arguments, truncated after q^order. Computed with the
/// one-argument-at-a-time recurrence e_s <- e_s + v_k e_{s-1}.
inline TruncSeries elementary_symmetric(std::span<const ShiftedSeries> values, std::size_t s,
                                        std::size_t order) {
  std::vector<TruncSeries> e(s + 1, TruncSeries(order));
  e[0] = TruncSeries::constant(order, 1);
  for (std::size_t k = 0; k < values.size(); ++k) {
    const std::size_t top = std::min(k + 1, s);
    for (std::size_t j = top; j >= 1; --j) {
      TruncSeries::fused_add_shifted_product(e[j], values[k].series, e[j - 1], values[k].shift);
    }
  }
  return e[s];
}

struct DeltaTable {
  /// rows[s-1] holds Delta_s, exact through q^order, for s = 1..S.
  std::vector<TruncSeries> rows;
  /// Remaining unknowns Delta_{S+1}..Delta_M of the truncated system. They
  /// satisfy the truncated equations but are not the true Delta series.
  std::vector<TruncSeries> auxiliary;
  std::size_t order = 0;
  std::size_t variables_used = 0;

  [[nodiscard]] std::size_t size() const { return rows.size(); }

  /// Delta_s, 1-based.
  [[nodiscard]] const TruncSeries& delta(std::size_t s) const { return rows.at(s - 1); }

  /// All M unknowns of the truncated system, Delta_1..Delta_M.
  [[nodiscard]] std::vector<TruncSeries> all_unknowns() const {
    std::vector<TruncSeries> all = rows;
    all.insert(all.end(), auxiliary.begin(), auxiliary.end());
    return all;
  }
};

struct DeltaSolveOptions {
  /// Upper limit on S * K.
  std::size_t budget = 4096;
};

/// Delta_1..Delta_S through order K.
inline DeltaTable solve_delta(std::size_t S, std::size_t K, const DeltaSolveOptions& opts = {}) {
  if (S == 0) throw error(errc::resource_cap, "at least one Delta must be requested");
  if (S * K > opts.budget) {
    throw error(errc::resource_cap, "S*K = " + std::to_string(S * K) + " exceeds the budget " +
                                        std::to_string(opts.budget));
  }
  const std::size_t M = K + S;
  std::vector<TruncSeries> delta(M, TruncSeries::constant(K, 1));

  for (std::size_t k = 1; k <= K; ++k) {
    // Normalized sigma_1..sigma_M through order k with the current q^k
    // coefficients of every Delta still zero.
    std::vector<TruncSeries> e(M + 1, TruncSeries(k));
    e[0] = TruncSeries::constant(k, 1);
    for (std::size_t i = 1; i <= M; ++i) {
      for (std::size_t s = i; s >= 1; --s) {
        TruncSeries::fused_add_shifted_product(e[s], delta[i - 1], e[s - 1], i - s);
      }
    }
    bigint prev(0);
    for (std::size_t s = 1; s <= M; ++s) {
      bigint r = -e[s][k];
      delta[s - 1][k] = r - prev;
      prev = std::move(r);
    }
  }

  DeltaTable table;
  table.order = K;
  table.variables_used = M;
  table.rows.assign(delta.begin(), delta.begin() + static_cast<std::ptrdiff_t>(S));
  table.auxiliary.assign(delta.begin() + static_cast<std::ptrdiff_t>(S), delta.end());
  return table;
}

/// Smallest k >= 1 with a nonzero coefficient, or nullopt if none through the
/// series order.
inline std::optional<std::size_t> leading_gap(const TruncSeries& delta) {
  for (std::size_t k = 1; k <= delta.order(); ++k) {
    if (!delta[k].is_zero()) return k;
  }
  return std::nullopt;
}

struct SignPatternRow {
  std::size_t s = 0;
  std::optional<std::size_t> kappa;
  /// Whether (-1)^s (Delta_s - 1) has only nonnegative coefficients through the
  /// table order; nullopt when every coefficient is still zero.
  std::optional<bool> holds;
  /// First order at which the pattern fails.
  std::optional<std::size_t> first_violation;
};

/// Data on the sign pattern Delta_s = 1 + (-1)^s q^kappa_s Phi_s with Phi_s
/// having nonnegative coefficients. Exploration only.
inline std::vector<SignPatternRow> sign_pattern_probe(const DeltaTable& table) {
  std::vector<SignPatternRow> out;
  for (std::size_t s = 1; s <= table.size(); ++s) {
    const TruncSeries& d = table.delta(s);
    SignPatternRow row;
    row.s = s;
    row.kappa = leading_gap(d);
    if (row.kappa) {
      row.holds = true;
      for (std::size_t k = 1; k <= d.order(); ++k) {
        const bigint c = (s % 2 == 0) ? d[k] : bigint(-d[k]);
        if (c < 0) {
          row.holds = false;
          row.first_violation = k;
          break;
        }
      }
    }
    out.push_back(row);
  }
  return out;
}

/// First ten coefficients of Delta_1..Delta_5 as published.
inline constexpr std::array<std::array<long long, 10>, 5> published_delta_coefficients{{
    {1, -1, -1, -1, -2, -4, -10, -25, -66, -178},
    {1, 0, 0, 1, 3, 9, 24, 66, 180, 498},
    {1, 0, 0, 0, 0, 0, -1, -3, -9, -22},
    {1, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {1, 0, 0, 0, 0, 0, 0, 0, 0, 0},
}};

struct TableMismatch {
  std::size_t s = 0;
  std::size_t k = 0;
  bigint expected;
  bigint actual;
};

/// Compares the overlapping block (s <= 5, k <= 9) against the published
/// coefficients.
inline std::vector<TableMismatch> compare_with_published(const DeltaTable& table) {
  std::vector<TableMismatch> out;
  const std::size_t smax = std::min<std::size_t>(table.size(), published_delta_coefficients.size());
  const std::size_t kmax = std::min<std::size_t>(table.order, 9);
  for (std::size_t s = 1; s <= smax; ++s) {
    for (std::size_t k = 0; k <= kmax; ++k) {
      const bigint expected(published_delta_coefficients[s - 1][k]);
      if (table.delta(s)[k] != expected) out.push_back({s, k, expected, table.delta(s)[k]});
    }
  }
  return out;
}

}  // namespace ptheta
