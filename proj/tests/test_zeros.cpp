#include "ptheta/zeros.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

using namespace ptheta;
using cd = std::complex<double>;

TEST_CASE("q = 0 has no zeros") {
  const auto zs = find_zeros(cd(0.0), 4);
  CHECK(zs.count() == 0);
  CHECK_THROWS_AS(eval_product(cd(1.0), zs), error);
}

TEST_CASE("first five zeros at q = 0.05") {
  const auto zs = find_zeros(cd(0.05), 5);
  REQUIRE(zs.count() == 5);
  CHECK(zs.entries[0].xi.real() == Catch::Approx(21.1112748953).epsilon(1e-10));
  CHECK(zs.entries[0].delta.real() == Catch::Approx(0.947361071237).epsilon(1e-10));
  for (const auto& e : zs.entries) {
    CHECK(e.residual <= 1e-10);
    CHECK(std::abs(e.xi.imag()) < 1e-9 * std::abs(e.xi));
  }
  // 0.05^{-10} far exceeds double range for an absolute residual of 1e-10.
  CHECK(zs.precision_bits > 53);
  const auto rep = separation_report(zs);
  CHECK(rep.distinct);
  CHECK(rep.max_ratio < 1.0);
}

TEST_CASE("six zeros inside the certified disk") {
  const cd q = std::polar(0.108, std::numbers::pi / 3);
  const auto zs = find_zeros(q, 6);
  REQUIRE(zs.count() == 6);
  for (const auto& e : zs.entries) {
    CHECK(e.residual <= 1e-10);
    CHECK(std::abs(e.delta) >= 0.2118);
    CHECK(std::abs(e.delta) <= 1.7882);
  }
  const auto rep = separation_report(zs);
  CHECK(rep.distinct);
  CHECK(zs.pairwise_distinct);
}

TEST_CASE("finite product over the zeros reconstructs theta near the origin") {
  const cd q(0.04, 0.03);
  const auto zs = find_zeros(q, 9);
  const cd x(0.5, 0.3);
  const auto theta = eval_theta(q, x, 1e-16);
  CHECK(std::abs(theta.value - eval_product(x, zs)) < 1e-12);
}

TEST_CASE("zeros agree with the Delta series") {
  const double q = 0.07;
  const DeltaTable t = solve_delta(6, 20);
  const auto zs = find_zeros(cd(q), 6, t);
  for (std::size_t j = 1; j <= 6; ++j) {
    const double series = t.delta(j).evaluate(q);
    CHECK(std::abs(zs.entries[j - 1].delta - series) < 1e-9);
  }
}

TEST_CASE("conjugate q gives conjugate zeros") {
  const cd q(0.06, 0.08);
  const auto a = find_zeros(q, 5);
  const auto b = find_zeros(std::conj(q), 5);
  for (std::size_t j = 0; j < 5; ++j) {
    CHECK(std::abs(std::conj(a.entries[j].xi) - b.entries[j].xi) <= 1e-9 * std::abs(a.entries[j].xi));
  }
}

TEST_CASE("explicit precision and precision selection") {
  CHECK(precision_for_bits(53) == Precision::standard);
  CHECK(precision_for_bits(100) == Precision::high);
  CHECK(precision_for_bits(150) == Precision::extended);
  CHECK_THROWS_AS(precision_for_bits(100000), error);
  CHECK(auto_precision(0.3, 2, 1e-6) == Precision::standard);
  CHECK(auto_precision(0.3, 2, 1e-10) == Precision::high);
  const auto zs = find_zeros(cd(0.1, 0.02), 4, FindOptions{}, Precision::extended);
  CHECK(zs.precision_bits == precision_bits(Precision::extended));
  for (const auto& e : zs.entries) CHECK(e.residual <= 1e-10);
}

TEST_CASE("errors") {
  const auto one = find_zeros(cd(0.05), 1);
  CHECK_THROWS_AS(separation_report(one), error);
  try {
    separation_report(one);
  } catch (const error& e) {
    CHECK(e.code() == errc::too_few_zeros);
  }
  try {
    find_zeros(cd(0.95), 3);
    FAIL("expected DivergenceDomain");
  } catch (const error& e) {
    CHECK(e.code() == errc::divergence_domain);
  }
  CHECK_THROWS_AS(find_zeros(cd(0.05), 0), error);
}

TEST_CASE("disk scan inside |q| <= 0.108") {
  const auto rows = scan_disk(0.108, 10, 6);
  REQUIRE(rows.size() == 100);
  for (const auto& r : rows) {
    CHECK_FALSE(r.stalled);
    CHECK(r.n_found == 6);
    CHECK(r.distinct);
    CHECK(r.max_residual <= 1e-10);
    CHECK(r.min_delta_abs >= 0.2118);
    CHECK(r.max_delta_abs <= 1.7882);
    CHECK(std::abs(r.q) <= 0.108 + 1e-15);
  }
  CHECK_THROWS_AS(scan_disk(0.5, 10, 6), error);
  CHECK_THROWS_AS(scan_disk(0.1, 1000, 6), error);
}
