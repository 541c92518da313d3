#include "ptheta/certify.hpp"
#include "ptheta/rational_io.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

using namespace ptheta;
using cd = std::complex<double>;

namespace {

const rational a_ref = parse_rational("0.108");
const rational u_ref = parse_rational("1.7882");

// The whole inequality chain in double, for an independent sweep.
bool chain_holds(double a, double u) {
  if (!(a < 1.0 / 3.0 && a * u < 1.0 && u > 1.0)) return false;
  const double beta = u - 1.0;
  const double ua = u * a;
  const double e = ua / (1.0 - a) + ua * ua / (1.0 - ua);
  if (!(e <= beta / 3.0)) return false;
  const double b3 = beta / 3.0;
  if (!((1.0 - b3) / (1.0 + b3) >= 1.0 - beta && (1.0 + b3) / (1.0 - b3) <= 1.0 + beta)) return false;
  return (1.0 + beta) * a < 1.0 - beta;
}

}  // namespace

TEST_CASE("rational parsing is exact") {
  CHECK(a_ref == rational(27, 250));
  CHECK(u_ref == rational(8941, 5000));
  CHECK(parse_rational("-3/4") == rational(-3, 4));
  CHECK(parse_rational("1.5e-3") == rational(3, 2000));
  CHECK(parse_rational("007") == rational(7));
  CHECK_THROWS_AS(parse_rational("1..2"), error);
  CHECK_THROWS_AS(parse_rational("1/0"), error);
  CHECK(to_decimal_string(rational(2, 3), 4) == "0.6666");
  CHECK(to_decimal_string(rational(-1, 8), 2) == "-0.12");
  CHECK(to_fraction_string(rational(10, 4)) == "5/2");
}

TEST_CASE("closed-form inverse of the band factor against a triangular solve") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> s_dist(1, 8), extra(1, 4);
  const double two_pi = 2.0 * std::acos(-1.0);
  int passed = 0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t s = static_cast<std::size_t>(s_dist(rng));
    const std::size_t d = s + static_cast<std::size_t>(extra(rng));
    const cd q = std::polar(0.33 * unit(rng), two_pi * unit(rng));
    const cd delta = std::polar(0.2 + 1.6 * unit(rng), two_pi * unit(rng));
    if (inverse_oracle_check(s, d, q, delta, 1e-10)) ++passed;
  }
  CHECK(passed == 200);
}

TEST_CASE("closed form lower triangle and entries beyond s") {
  const cd q(0.2, 0.1), delta(1.1, -0.3);
  CHECK(inverse_entry(4, 2, 3, q, delta) == cd(0.0));
  CHECK(inverse_entry(4, 5, 4, q, delta) == cd(0.0));
  CHECK(inverse_entry(4, 3, 3, q, delta) == cd(1.0));
  // (mu, nu) = (2, 1): -q^{s-1} Delta_s.
  CHECK(std::abs(inverse_entry(4, 2, 1, q, delta) + q * q * q * delta) < 1e-15);
}

TEST_CASE("entrywise majorant") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double a = 0.108, u = 1.7882;
  for (int i = 0; i < 500; ++i) {
    const cd q = std::polar(a * unit(rng), 6.283 * unit(rng));
    const cd delta = std::polar(u * unit(rng), 6.283 * unit(rng));
    for (std::size_t mu = 1; mu <= 6; ++mu) {
      for (std::size_t nu = 1; nu <= mu; ++nu) {
        CHECK(std::abs(inverse_entry(6, mu, nu, q, delta)) <=
              inverse_entry_majorant(6, mu, nu, a, u) * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("product coefficients stay below 1/prod(1 - a^i) and approach it") {
  for (const char* a_text : {"0.05", "0.108", "0.2", "0.3"}) {
    const rational a = parse_rational(a_text);
    const std::size_t terms = product_terms_for(a, 30.0);
    for (std::size_t s = 2; s <= 8; ++s) {
      const auto row = bound_b_oracle_row(s, a, terms);
      for (std::size_t j = 1; j < s; ++j) {
        const BoundBCheck& c = row[j - 1];
        INFO("a = " << a_text << ", s = " << s << ", j = " << j);
        CHECK(c.holds);
        CHECK(static_cast<double>((c.bound - c.truncated_b) / c.bound) < 1e-25);
      }
    }
  }
  const BoundBCheck single = bound_b_oracle(2, 5, parse_rational("0.2"), 40);
  CHECK(single.holds);
  CHECK(single.bound == bound_b(2, parse_rational("0.2")));
}

TEST_CASE("product coefficients match the model matrix product") {
  const std::size_t s = 6;
  const double a = 0.2, u = 1.5;
  const std::size_t terms = 40;
  const Eigen::MatrixXd M = model_matrix(s, a, u);
  const auto n = static_cast<Eigen::Index>(s);
  Eigen::MatrixXd product = Eigen::MatrixXd::Identity(n, n);
  double scale = 1.0;
  for (std::size_t k = 0; k < terms; ++k) {
    Eigen::MatrixXd factor = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t i = 1; i < s; ++i) {
      power = power * (scale * M);
      factor += power;
    }
    product = product * factor;
    scale *= a;
  }
  const auto b = model_product_coefficients(s, parse_rational("0.2"), terms);
  Eigen::MatrixXd series = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
  for (std::size_t j = 0; j < s; ++j) {
    series += static_cast<double>(b[j]) * power;
    power = power * M;
  }
  CHECK((product - series).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("inequality chain at a = 0.108, u = 1.7882") {
  const ConditionVerdict v = check_conditions(a_ref, u_ref);
  CHECK(v.a_below_third);
  CHECK(v.au_below_one);
  CHECK(v.band_inequality);
  CHECK(v.holds);
  REQUIRE(v.slack);
  CHECK(*v.slack == rational(bigint(126486319), bigint("843435896250000")));

  const Sandwich s = band_sandwich(a_ref, u_ref);
  CHECK(s.within_beta_third);
  CHECK(s.quotient_ok);
  CHECK(s.quotient_lo == rational(11059, 18941));
  CHECK(s.lo == rational(1) - s.excess);
  CHECK(static_cast<double>(s.excess) == Catch::Approx(0.262733183367).epsilon(1e-11));

  const SeparationVerdict sep = separation_margin(a_ref, u_ref - 1);
  CHECK(sep.holds);
  CHECK(sep.lhs == parse_rational("0.1931256"));
  CHECK(sep.rhs == parse_rational("0.2118"));
  CHECK(sep.margin == rational(23343, 1250000));

  const Certificate c = certify_with(a_ref, u_ref);
  CHECK(c.feasible);
  const std::string t = proof_transcript(c);
  CHECK(t.find("verdict: FEASIBLE") != std::string::npos);
  CHECK(t.find("126486319/843435896250000") != std::string::npos);
}

TEST_CASE("failing certificates") {
  CHECK_FALSE(certify_disk(parse_rational("0.31")).feasible);
  CHECK_FALSE(certify_with(a_ref, parse_rational("1.2")).feasible);
  CHECK_FALSE(check_conditions(parse_rational("0.4"), parse_rational("1.5")).a_below_third);
  CHECK_THROWS_AS(band_sandwich(parse_rational("0.4"), parse_rational("1.5")), error);
  CHECK(certify_disk(a_ref).feasible);
}

TEST_CASE("slack decreases with the radius") {
  std::optional<rational> prev;
  for (int k = 50; k <= 110; ++k) {
    const auto v = check_conditions(rational(k, 1000), u_ref);
    REQUIRE(v.slack);
    if (prev) CHECK(*v.slack < *prev);
    prev = v.slack;
  }
}

TEST_CASE("certified reach agrees with a floating-point sweep") {
  double oracle = 0.0;
  for (int k = 1000; k <= 1200; ++k) {
    const double a = k * 1e-4;
    bool any = false;
    for (int m = 1; m < 100000 && !any; ++m) any = chain_holds(a, 1.0 + m * 1e-5);
    if (any) oracle = a;
  }
  const rational reach = max_certified_radius(rational(1, 10000));
  CHECK(static_cast<double>(reach) == Catch::Approx(oracle).margin(1.5e-4));
  CHECK(reach >= a_ref);
  CHECK(max_certified_radius(rational(1, 100000)) == rational(10874, 100000));
}
