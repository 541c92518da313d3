#pragma once

#include "ptheta/numeric.hpp"

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptheta {

/// Power series in q with exact integer coefficients, truncated after q^order.
///
/// All arithmetic truncates at the smaller of the operand orders, so every
/// stored coefficient is exact.
class TruncSeries {
 public:
  TruncSeries() : coeffs_(1, bigint(0)) {}

  /// Zero series of the given order.
  explicit TruncSeries(std::size_t order) : coeffs_(order + 1, bigint(0)) {}

  TruncSeries(std::size_t order, std::initializer_list<long long> init)
      : coeffs_(order + 1, bigint(0)) {
    std::size_t k = 0;
    for (long long c : init) {
      if (k > order) break;
      coeffs_[k++] = c;
    }
  }

  explicit TruncSeries(std::vector<bigint> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw std::invalid_argument("TruncSeries needs at least one coefficient");
  }

  static TruncSeries constant(std::size_t order, long long c) {
    TruncSeries s(order);
    s.coeffs_[0] = c;
    return s;
  }

  /// q^k truncated at order (zero if k > order).
  static TruncSeries monomial(std::size_t order, std::size_t k) {
    TruncSeries s(order);
    if (k <= order) s.coeffs_[k] = 1;
    return s;
  }

  [[nodiscard]] std::size_t order() const { return coeffs_.size() - 1; }
  [[nodiscard]] const std::vector<bigint>& coeffs() const { return coeffs_; }

  [[nodiscard]] const bigint& operator[](std::size_t k) const { return coeffs_.at(k); }
  bigint& operator[](std::size_t k) { return coeffs_.at(k); }

  /// Same series with fewer (or zero-padded more) coefficients.
  [[nodiscard]] TruncSeries truncated(std::size_t order) const {
    std::vector<bigint> c(order + 1, bigint(0));
    const std::size_t n = std::min(order, this->order());
    for (std::size_t k = 0; k <= n; ++k) c[k] = coeffs_[k];
    return TruncSeries(std::move(c));
  }

  /// Multiplication by q^k.
  [[nodiscard]] TruncSeries shifted(std::size_t k) const {
    TruncSeries s(order());
    for (std::size_t i = 0; i + k <= order(); ++i) s.coeffs_[i + k] = coeffs_[i];
    return s;
  }

  TruncSeries& operator+=(const TruncSeries& rhs) {
    shrink_to(rhs.order());
    for (std::size_t k = 0; k <= order(); ++k) coeffs_[k] += rhs.coeffs_[k];
    return *this;
  }

  TruncSeries& operator-=(const TruncSeries& rhs) {
    shrink_to(rhs.order());
    for (std::size_t k = 0; k <= order(); ++k) coeffs_[k] -= rhs.coeffs_[k];
    return *this;
  }

  friend TruncSeries operator+(TruncSeries a, const TruncSeries& b) { return a += b; }
  friend TruncSeries operator-(TruncSeries a, const TruncSeries& b) { return a -= b; }

  friend TruncSeries operator*(const TruncSeries& a, const TruncSeries& b) {
    return multiply(a, b, std::min(a.order(), b.order()));
  }

  /// Product truncated at the given order (at most the operand orders).
  static TruncSeries multiply(const TruncSeries& a, const TruncSeries& b, std::size_t order) {
    order = std::min({order, a.order(), b.order()});
    TruncSeries out(order);
    for (std::size_t i = 0; i <= order; ++i) {
      if (a.coeffs_[i].is_zero()) continue;
      for (std::size_t k = 0; i + k <= order; ++k) {
        if (!b.coeffs_[k].is_zero()) out.coeffs_[i + k] += a.coeffs_[i] * b.coeffs_[k];
      }
    }
    return out;
  }

  /// out += q^shift * a * b, truncated at out.order().
  static void fused_add_shifted_product(TruncSeries& out, const TruncSeries& a,
                                        const TruncSeries& b, std::size_t shift) {
    const std::size_t order = out.order();
    if (shift > order) return;
    const std::size_t room = order - shift;
    const std::size_t na = std::min(room, a.order());
    for (std::size_t i = 0; i <= na; ++i) {
      if (a.coeffs_[i].is_zero()) continue;
      const std::size_t nb = std::min(room - i, b.order());
      for (std::size_t k = 0; k <= nb; ++k) {
        if (!b.coeffs_[k].is_zero()) out.coeffs_[shift + i + k] += a.coeffs_[i] * b.coeffs_[k];
      }
    }
  }

  friend bool operator==(const TruncSeries& a, const TruncSeries& b) {
    return a.coeffs_ == b.coeffs_;
  }

  /// Horner evaluation of the truncated polynomial at q.
  template <class S>
  [[nodiscard]] S evaluate(const S& q) const {
    using R = real_of_t<S>;
    S acc(0);
    for (std::size_t k = coeffs_.size(); k-- > 0;) acc = acc * q + S(from_bigint<R>(coeffs_[k]));
    return acc;
  }

  /// Human-readable form such as "1 - q - q^2 + 3*q^5".
  [[nodiscard]] std::string to_string(const std::string& var = "q") const {
    std::string out;
    for (std::size_t k = 0; k <= order(); ++k) {
      const bigint& c = coeffs_[k];
      if (c.is_zero()) continue;
      const bool neg = c < 0;
      const bigint mag = neg ? bigint(-c) : c;
      if (out.empty()) {
        out += neg ? "-" : "";
      } else {
        out += neg ? " - " : " + ";
      }
      const bool unit = mag == 1;
      if (k == 0 || !unit) out += mag.str();
      if (k > 0) {
        if (!unit) out += "*";
        out += var;
        if (k > 1) out += "^" + std::to_string(k);
      }
    }
    return out.empty() ? "0" : out;
  }

 private:
  void shrink_to(std::size_t order) {
    if (order < this->order()) coeffs_.resize(order + 1);
  }

  std::vector<bigint> coeffs_;
};

}  // namespace ptheta
