#pragma once

// Scalar types and small generic helpers shared by the numerical modules.
//
// Every numerical routine is a template over a real type R; its complex
// counterpart is complex_t<R>. Four precisions are wired up:
//
//   double     53 bits   (default)
//   real_hp   113 bits   (__float128, used by the spectrum solver)
//   real_xp   ~169 bits  (50 decimal digits)
//   real_xxp  ~336 bits  (100 decimal digits)

#include <boost/multiprecision/complex128.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/float128.hpp>
#include <boost/math/constants/constants.hpp>

#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <type_traits>

namespace ptheta {

namespace bmp = boost::multiprecision;

using bigint = bmp::number<bmp::cpp_int_backend<>, bmp::et_off>;
using rational = bmp::number<bmp::rational_adaptor<bmp::cpp_int_backend<>>, bmp::et_off>;

using real_hp = bmp::float128;
using complex_hp = bmp::complex128;
using real_xp = bmp::number<bmp::cpp_bin_float<50>, bmp::et_off>;
using complex_xp = bmp::number<bmp::complex_adaptor<bmp::cpp_bin_float<50>>, bmp::et_off>;
using real_xxp = bmp::number<bmp::cpp_bin_float<100>, bmp::et_off>;
using complex_xxp = bmp::number<bmp::complex_adaptor<bmp::cpp_bin_float<100>>, bmp::et_off>;

template <class R>
struct complex_of {
  using type = std::complex<R>;
};
template <>
struct complex_of<real_hp> {
  using type = complex_hp;
};
template <>
struct complex_of<real_xp> {
  using type = complex_xp;
};
template <>
struct complex_of<real_xxp> {
  using type = complex_xxp;
};

template <class R>
using complex_t = typename complex_of<R>::type;

/// Real type underlying a real or complex scalar.
template <class S>
struct real_of {
  using type = S;
};
template <class R>
struct real_of<std::complex<R>> {
  using type = R;
};
template <>
struct real_of<complex_hp> {
  using type = real_hp;
};
template <>
struct real_of<complex_xp> {
  using type = real_xp;
};
template <>
struct real_of<complex_xxp> {
  using type = real_xxp;
};

template <class S>
using real_of_t = typename real_of<S>::type;

template <class S>
inline constexpr bool is_complex_v = !std::is_same_v<real_of_t<S>, S>;

/// Binary digits of the real type R.
template <class R>
constexpr int precision_bits() {
  return std::numeric_limits<R>::digits;
}

template <class R>
R epsilon() {
  return std::numeric_limits<R>::epsilon();
}

template <class S>
real_of_t<S> magnitude(const S& z) {
  using std::abs;
  return real_of_t<S>(abs(z));
}

/// z^e by repeated squaring; 0^0 == 1.
template <class S>
S ipow(S base, std::uint64_t e) {
  S result(1);
  while (e != 0) {
    if (e & 1U) result *= base;
    e >>= 1U;
    if (e != 0) base *= base;
  }
  return result;
}

template <class R>
complex_t<R> make_complex(const R& re, const R& im) {
  return complex_t<R>(re, im);
}

/// Lossless-enough narrowing used for reporting.
template <class S>
double to_double(const S& v) {
  return static_cast<double>(v);
}

template <class S>
std::complex<double> to_complex_double(const S& z) {
  if constexpr (is_complex_v<S>) {
    return {static_cast<double>(real(z)), static_cast<double>(imag(z))};
  } else {
    return {static_cast<double>(z), 0.0};
  }
}

template <class R>
complex_t<R> from_complex_double(const std::complex<double>& z) {
  return complex_t<R>(R(z.real()), R(z.imag()));
}

template <class R>
R from_rational(const rational& r) {
  return static_cast<R>(numerator(r)) / static_cast<R>(denominator(r));
}

template <class R>
R from_bigint(const bigint& v) {
  return static_cast<R>(v);
}

template <class R>
R pi() {
  return boost::math::constants::pi<R>();
}

}  // namespace ptheta
