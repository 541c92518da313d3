#pragma once

// JSON and CSV renderings. Numbers are formatted without locale dependence:
// doubles in shortest round-trip form, big integers and rationals as decimal
// strings.

#include "ptheta/certify.hpp"
#include "ptheta/fps_delta.hpp"
#include "ptheta/numeric.hpp"
#include "ptheta/rational_io.hpp"
#include "ptheta/spectrum.hpp"
#include "ptheta/theta_eval.hpp"
#include "ptheta/zeros.hpp"

#include <json.hpp>

#include <charconv>
#include <complex>
#include <cmath>
#include <iomanip>
#include <limits>
#include <locale>
#include <sstream>
#include <string>
#include <vector>

namespace ptheta {

using json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// All significant digits of a multiprecision (or builtin) real.
template <class R>
std::string format_real(const R& v) {
  if constexpr (std::is_same_v<R, double>) {
    return format_double(v);
  } else {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(std::numeric_limits<R>::digits10) << v;
    return os.str();
  }
}

/// "a+bi" / "a-bi", the same grammar the CLI accepts.
template <class R>
std::string format_complex(const R& re, const R& im) {
  std::string s = format_real(re);
  const std::string i = format_real(im);
  if (!i.empty() && i[0] == '-') {
    s += i;
  } else {
    s += "+" + i;
  }
  return s + "i";
}

inline std::string format_complex(std::complex<double> z) { return format_complex(z.real(), z.imag()); }

inline json rational_json(const rational& r) {
  return json{{"num", numerator(r).str()}, {"den", denominator(r).str()}};
}

inline json optional_rational_json(const std::optional<rational>& r) {
  return r ? rational_json(*r) : json(nullptr);
}

// ---------------------------------------------------------------------------

inline json delta_table_json(const DeltaTable& table) {
  json rows = json::array();
  for (std::size_t s = 1; s <= table.size(); ++s) {
    json coeffs = json::array();
    for (const auto& c : table.delta(s).coeffs()) coeffs.push_back(c.str());
    const auto gap = leading_gap(table.delta(s));
    rows.push_back(json{{"s", s}, {"coeffs", coeffs}, {"kappa", gap ? json(*gap) : json(nullptr)}});
  }
  json probe = json::array();
  for (const auto& r : sign_pattern_probe(table)) {
    probe.push_back(json{{"s", r.s},
                         {"holds", r.holds ? json(*r.holds) : json(nullptr)},
                         {"first_violation", r.first_violation ? json(*r.first_violation)
                                                               : json(nullptr)}});
  }
  return json{{"order", table.order},
              {"variables_used", table.variables_used},
              {"rows", rows},
              {"sign_pattern", probe}};
}

/// Reads the "rows" of delta_table_json back into exact series.
inline std::vector<TruncSeries> delta_rows_from_json(const json& j) {
  std::vector<TruncSeries> out;
  for (const auto& row : j.at("rows")) {
    std::vector<bigint> c;
    for (const auto& v : row.at("coeffs")) c.emplace_back(v.get<std::string>());
    out.emplace_back(std::move(c));
  }
  return out;
}

inline json certificate_json(const Certificate& c) {
  const auto& v = c.conditions;
  json out{{"a", rational_json(c.params.a)},
           {"u", rational_json(c.params.u)},
           {"beta", rational_json(c.params.beta)},
           {"feasible", c.feasible},
           {"conditions",
            {{"a_below_third", v.a_below_third},
             {"au_below_one", v.au_below_one},
             {"band_inequality", v.band_inequality},
             {"lhs", optional_rational_json(v.lhs)},
             {"rhs", optional_rational_json(v.rhs)},
             {"slack", optional_rational_json(v.slack)}}},
           {"separation",
            {{"holds", c.separation.holds},
             {"lhs", rational_json(c.separation.lhs)},
             {"rhs", rational_json(c.separation.rhs)},
             {"margin", rational_json(c.separation.margin)}}},
           {"best_slack", optional_rational_json(c.best_slack)},
           {"candidates_examined", c.candidates_examined}};
  if (c.sandwich) {
    const Sandwich& s = *c.sandwich;
    out["sandwich"] = {{"excess", rational_json(s.excess)},
                       {"lo", rational_json(s.lo)},
                       {"hi", rational_json(s.hi)},
                       {"beta_third", rational_json(s.beta_third)},
                       {"within_beta_third", s.within_beta_third},
                       {"quotient_lo", rational_json(s.quotient_lo)},
                       {"quotient_hi", rational_json(s.quotient_hi)},
                       {"quotient_ok", s.quotient_ok}};
  } else {
    out["sandwich"] = nullptr;
  }
  return out;
}

// ---------------------------------------------------------------------------

inline json zero_set_json(const ZeroSet<double>& zs) {
  json entries = json::array();
  for (std::size_t i = 0; i < zs.count(); ++i) {
    const auto& e = zs.entries[i];
    entries.push_back(json{{"j", i + 1},
                           {"xi", format_complex(e.xi)},
                           {"zero", format_complex(-e.xi)},
                           {"delta", format_complex(e.delta)},
                           {"residual", format_double(e.residual)},
                           {"error_bound", format_double(e.error_bound)},
                           {"iterations", e.iterations}});
  }
  json out{{"q", format_complex(zs.q)},
           {"count", zs.count()},
           {"precision_bits", zs.precision_bits},
           {"entries", entries}};
  if (zs.count() >= 2) {
    const auto rep = separation_report(zs);
    out["separation"] = {{"min_ratio", format_double(rep.min_ratio)},
                         {"max_ratio", format_double(rep.max_ratio)},
                         {"min_pair_distance", format_double(rep.min_pair_distance)},
                         {"distinct", rep.distinct}};
  }
  return out;
}

inline std::string zero_set_csv(const ZeroSet<double>& zs) {
  std::string s = "j,re_xi,im_xi,re_zero,im_zero,re_delta,im_delta,residual,error_bound,iterations\n";
  for (std::size_t i = 0; i < zs.count(); ++i) {
    const auto& e = zs.entries[i];
    s += std::to_string(i + 1) + "," + format_double(e.xi.real()) + "," +
         format_double(e.xi.imag()) + "," + format_double(-e.xi.real()) + "," +
         format_double(-e.xi.imag()) + "," + format_double(e.delta.real()) + "," +
         format_double(e.delta.imag()) + "," + format_double(e.residual) + "," +
         format_double(e.error_bound) + "," + std::to_string(e.iterations) + "\n";
  }
  return s;
}

inline std::string scan_csv(const std::vector<ScanRow>& rows) {
  std::string s = "re_q,im_q,n_found,min_ratio,min_pair_distance,max_delta_dev,stalled\n";
  for (const auto& r : rows) {
    s += format_double(r.q.real()) + "," + format_double(r.q.imag()) + "," +
         std::to_string(r.n_found) + "," + format_double(r.min_ratio) + "," +
         format_double(r.min_pair_distance) + "," + format_double(r.max_delta_dev) + "," +
         (r.stalled ? "1" : "0") + "\n";
  }
  return s;
}

// ---------------------------------------------------------------------------

inline json spectral_points_json(const std::vector<SpectralPoint>& points) {
  json arr = json::array();
  for (const auto& p : points) {
    arr.push_back(json{{"j", p.j},
                       {"q_tilde", p.q_tilde_text},
                       {"x_double", p.x_double_text},
                       {"newton_residual", format_double(p.newton_residual)},
                       {"theta_xx", format_double(p.theta_xx)}});
  }
  return arr;
}

inline std::string asymptotics_csv(const std::vector<SpectralPoint>& points) {
  std::string s = "j,q_tilde,j*(1-q_tilde),x_double\n";
  for (const auto& p : points) {
    s += std::to_string(p.j) + "," + format_double(p.q_tilde) + "," +
         format_double(static_cast<double>(p.j) * (1.0 - p.q_tilde)) + "," +
         format_double(p.x_double) + "\n";
  }
  return s;
}

}  // namespace ptheta
