#include "ptheta/cli.hpp"

#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ptheta;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("complex literals") {
  auto z = cli::parse_complex("3+4i");
  CHECK(z.re == 3);
  CHECK(z.im == 4);
  z = cli::parse_complex("-0.5-2.25i");
  CHECK(z.re == rational(-1, 2));
  CHECK(z.im == rational(-9, 4));
  z = cli::parse_complex("1e-3+2e+1i");
  CHECK(z.re == rational(1, 1000));
  CHECK(z.im == 20);
  z = cli::parse_complex("-i");
  CHECK(z.re == 0);
  CHECK(z.im == -1);
  z = cli::parse_complex("0.1");
  CHECK(z.im == 0);
  CHECK_THROWS_AS(cli::parse_complex("1+2j"), error);
  CHECK_THROWS_AS(cli::parse_complex("1/2+i"), error);
}

TEST_CASE("eval") {
  auto r = run({"eval", "--q", "0", "--x", "3+4i"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "value       = 1+0i"));
  r = run({"eval", "--q", "0.1", "--x", "1"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "1.10100100010000"));
  CHECK(contains(r.out, "tail_bound"));
  r = run({"eval", "--q", "1.5", "--x", "1"});
  CHECK(r.code == 3);
  CHECK(contains(r.err, "DivergenceDomain"));
  r = run({"eval", "--q", "0.1", "--x", "1+"});
  CHECK(r.code == 2);
  r = run({"eval", "--x", "1"});
  CHECK(r.code == 2);
}

TEST_CASE("precision from the environment") {
  ::setenv("THETA_PRECISION_BITS", "113", 1);
  auto r = run({"eval", "--q", "0.1", "--x", "1", "--format", "json"});
  ::unsetenv("THETA_PRECISION_BITS");
  CHECK(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["precision_bits"] == 113);
  CHECK(j["value"].get<std::string>().rfind("1.10100100010000100000100000", 0) == 0);
  r = run({"eval", "--q", "0.1", "--x", "1", "--precision-bits", "20"});
  CHECK(r.code == 2);
}

TEST_CASE("delta") {
  auto r = run({"delta", "--s", "5", "--k", "9", "--check-table"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "table check: PASS"));
  r = run({"delta", "--s", "1", "--k", "0"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("Δ₁ = 1\n", 0) == 0);
  r = run({"delta", "--s", "3", "--k", "15", "--format", "json"});
  CHECK(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["rows"][2]["kappa"] == 6);
  CHECK(j["rows"][0]["coeffs"][15] == "-93542");
  const auto rows = delta_rows_from_json(j);
  CHECK(rows[1] == solve_delta(3, 15).delta(2));
  r = run({"delta", "--s", "2", "--k", "3", "--format", "csv"});
  CHECK(r.out.rfind("s,k,coefficient\n1,0,1\n1,1,-1\n", 0) == 0);
  r = run({"delta", "--s", "200", "--k", "200"});
  CHECK(r.code == 3);
  CHECK(contains(r.err, "ResourceCap"));
}

TEST_CASE("certify") {
  auto r = run({"certify", "--a", "0.108", "--u", "1.7882", "--transcript"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "126486319/843435896250000"));
  CHECK(contains(r.out, "23343/1250000"));
  CHECK(contains(r.out, "verdict: FEASIBLE"));
  r = run({"certify", "--a", "27/250", "--u", "8941/5000", "--format", "json"});
  CHECK(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["feasible"] == true);
  CHECK(j["separation"]["margin"]["num"] == "23343");
  CHECK(j["separation"]["margin"]["den"] == "1250000");
  r = run({"certify", "--a", "0.31"});
  CHECK(r.code == 1);
  CHECK(contains(r.out, "INFEASIBLE"));
  r = run({"certify", "--max-radius", "--grid-step", "1/1000"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "0.108"));
  r = run({"certify"});
  CHECK(r.code == 2);
  r = run({"certify", "--a", "0.1", "--format", "csv"});
  CHECK(r.code == 2);
}

TEST_CASE("zeros and scan") {
  auto r = run({"zeros", "--q", "0.05", "--n", "5", "--format", "json"});
  CHECK(r.code == 0);
  const auto j = json::parse(r.out);
  REQUIRE(j["entries"].size() == 5);
  for (const auto& e : j["entries"]) CHECK(std::stod(e["residual"].get<std::string>()) <= 1e-10);
  CHECK(j["separation"]["distinct"] == true);
  const auto again = run({"zeros", "--q", "0.05", "--n", "5", "--format", "json"});
  CHECK(again.out == r.out);

  r = run({"scan", "--rmax", "0.108", "--grid", "4", "--n", "6"});
  CHECK(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "re_q,im_q,n_found,min_ratio,min_pair_distance,max_delta_dev,stalled");
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    CHECK(line.substr(line.size() - 2) == ",0");
  }
  CHECK(rows == 16);
}

TEST_CASE("output file") {
  const auto path = std::filesystem::temp_directory_path() / "ptheta_cli_test.csv";
  const auto r = run({"zeros", "--q", "0.1", "--n", "3", "--format", "csv", "--output", path.string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("j,re_xi,im_xi", 0) == 0);
  std::filesystem::remove(path);
}

TEST_CASE("spectrum") {
  auto r = run({"spectrum", "--jmax", "1", "--format", "json"});
  CHECK(r.code == 0);
  const auto j = json::parse(r.out);
  REQUIRE(j.size() == 1);
  CHECK(std::abs(std::stod(j[0]["q_tilde"].get<std::string>()) - 0.3092493386) < 1e-8);
  r = run({"spectrum", "--jmax", "0"});
  CHECK(r.code == 2);
}

TEST_CASE("help") {
  const auto r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "certify"));
}
