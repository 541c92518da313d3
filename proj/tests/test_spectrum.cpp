#include "ptheta/spectrum.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace ptheta;

namespace {

const SpectralPoint& first_point() {
  static const SpectralPoint p = [] {
    const QBracket b = bracket_spectral<real_hp>(1, 0.2);
    return find_spectral<real_hp>(1, b, 1e-12);
  }();
  return p;
}

}  // namespace

TEST_CASE("all zeros in the window are real below the first spectral value") {
  for (double q : {0.1, 0.2, 0.3}) {
    INFO("q = " << q);
    CHECK(count_real_zeros(q, 6) == 6);
  }
}

TEST_CASE("one complex pair just above the first spectral value") {
  CHECK(count_real_zeros(0.32, 6) == 4);
  CHECK(count_real_zeros(0.5, 6) == 4);
  CHECK(count_real_zeros(0.52, 6) == 2);
}

TEST_CASE("real zeros are sign changes of theta") {
  const auto scan = scan_real_zeros<real_hp>(real_hp(0.25), ansatz_window(0.25, 5));
  REQUIRE(scan.count() == 5);
  for (const auto& [left, right] : scan.zeros) {
    const auto fl = eval_theta(real_hp(0.25), left, real_hp("1e-30")).value;
    const auto fr = eval_theta(real_hp(0.25), right, real_hp("1e-30")).value;
    CHECK(fl * fr <= 0);
  }
}

TEST_CASE("first spectral value") {
  const SpectralPoint& p = first_point();
  CHECK(std::abs(p.q_tilde - 0.3092493386) < 1e-8);
  CHECK(std::abs(p.x_double + 7.50325596424419) < 1e-8);
  CHECK(std::abs(p.theta) <= 1e-10);
  CHECK(std::abs(p.theta_x) <= 1e-10);
  CHECK(std::abs(p.theta_xx) > 1e-3);
  CHECK(p.q_tilde_text.rfind("0.30924933860007", 0) == 0);
}

TEST_CASE("the double zero is where the two rightmost real zeros meet") {
  const SpectralPoint& p = first_point();
  const double q = p.q_tilde - 1e-5;
  const auto scan = scan_real_zeros<real_hp>(real_hp(q), ansatz_window(q, 6));
  REQUIRE(scan.count() >= 2);
  const double z1 = to_double(scan.zeros[0].second);
  const double z2 = to_double(scan.zeros[1].first);
  CHECK(z2 < p.x_double);
  CHECK(p.x_double < z1);
  CHECK(z1 - z2 < 0.5);
}

TEST_CASE("count drops by two across the first spectral value") {
  const SpectralPoint& p = first_point();
  CHECK(count_real_zeros(p.q_tilde - 1e-6, 6) == 6);
  CHECK(count_real_zeros(p.q_tilde + 1e-6, 6) == 4);
}

TEST_CASE("bracket validation") {
  CHECK_THROWS_AS(find_spectral<real_hp>(1, QBracket{0.35, 0.4}, 1e-12), error);
}

TEST_CASE("asymptotic report on reference values") {
  const double q[] = {0.309249338600077, 0.516959359788052, 0.630628316063174,
                      0.701265070082661, 0.749268931635615, 0.783984457838718};
  const double x[] = {-7.50325596424419, -11.7131682189242, -14.0685129325399,
                      -15.5781689972591, -16.6333767382063, -17.4154148716022};
  std::vector<SpectralPoint> pts;
  for (std::size_t j = 0; j < 6; ++j) {
    SpectralPoint p;
    p.j = j + 1;
    p.q_tilde = q[j];
    p.x_double = x[j];
    pts.push_back(p);
  }
  const auto rep = asymptotic_report(pts);
  CHECK(rep.scaled_gap_monotone);
  CHECK(rep.x_monotone);
  CHECK(rep.x_overshoot == 0.0);
  pts[3].x_double = -30.0;
  CHECK(asymptotic_report(pts).x_overshoot > 6.0);
  pts.resize(2);
  CHECK_THROWS_AS(asymptotic_report(pts), error);
}
