#pragma once

// Command-line front end. run() is the whole program minus process setup, so
// it can be driven in-process by tests.
//
// Exit codes: 0 success or feasible, 1 infeasible or failed check, 2 usage
// error, 3 numeric failure.

#include "ptheta/certify.hpp"
#include "ptheta/errors.hpp"
#include "ptheta/fps_delta.hpp"
#include "ptheta/numeric.hpp"
#include "ptheta/rational_io.hpp"
#include "ptheta/serialize.hpp"
#include "ptheta/spectrum.hpp"
#include "ptheta/theta_eval.hpp"
#include "ptheta/zeros.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace ptheta::cli {

enum exit_code : int { ok = 0, negative = 1, usage = 2, numeric = 3 };

struct ComplexLiteral {
  rational re;
  rational im;
};

/// "RE", "IMi", "RE+IMi", "RE-IMi", with "i" alone meaning 1i.
inline ComplexLiteral parse_complex(std::string_view text) {
  auto fail = [&]() -> ComplexLiteral {
    throw error(errc::parse_error, "invalid complex literal '" + std::string(text) + "'");
  };
  if (text.empty()) return fail();
  if (text.find('/') != std::string_view::npos) return fail();
  if (text.back() != 'i') return {parse_rational(text), rational(0)};
  std::string_view body = text.substr(0, text.size() - 1);
  std::size_t split = std::string_view::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  const std::string_view re_part = split == std::string_view::npos ? std::string_view{} : body.substr(0, split);
  std::string_view im_part = split == std::string_view::npos ? body : body.substr(split);
  rational im;
  if (im_part.empty() || im_part == "+") {
    im = 1;
  } else if (im_part == "-") {
    im = -1;
  } else {
    im = parse_rational(im_part);
  }
  return {re_part.empty() ? rational(0) : parse_rational(re_part), im};
}

template <class R>
complex_t<R> to_complex(const ComplexLiteral& z) {
  return complex_t<R>(from_rational<R>(z.re), from_rational<R>(z.im));
}

inline std::complex<double> to_complex_double(const ComplexLiteral& z) {
  return to_complex<double>(z);
}

namespace detail {

struct Shared {
  std::string format;
  std::string output;
  std::optional<int> precision_bits;
};

inline void require_format(const std::string& format, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (format == a) return;
  }
  throw CLI::ValidationError("--format", "'" + format + "' is not supported by this command");
}

inline std::string subscript(std::size_t n) {
  static const char* digits[] = {"₀", "₁", "₂", "₃", "₄", "₅", "₆", "₇", "₈", "₉"};
  const std::string dec = std::to_string(n);
  std::string out;
  for (char c : dec) out += digits[c - '0'];
  return out;
}

template <class R>
std::string eval_report(const ComplexLiteral& ql, const ComplexLiteral& xl, const rational& tol,
                        Derivative d, const std::string& format) {
  using C = complex_t<R>;
  const EvalResult<C> r = eval_derivative(to_complex<R>(ql), to_complex<R>(xl), d, from_rational<R>(tol));
  const std::string value = format_complex(R(real(r.value)), R(imag(r.value)));
  const std::string tail = format_real(R(r.tail_bound));
  const std::string bound = format_real(R(r.error_bound()));
  const std::string q = format_complex(from_rational<R>(ql.re), from_rational<R>(ql.im));
  const std::string x = format_complex(from_rational<R>(xl.re), from_rational<R>(xl.im));
  const int bits = precision_bits<R>();
  if (format == "json") {
    return json{{"q", q},
                {"x", x},
                {"dx", d.dx},
                {"dq", d.dq},
                {"value", value},
                {"tail_bound", tail},
                {"error_bound", bound},
                {"terms_used", r.terms_used},
                {"precision_bits", bits}}
               .dump(2) +
           "\n";
  }
  if (format == "csv") {
    return "q,x,dx,dq,value,tail_bound,error_bound,terms_used,precision_bits\n" + q + "," + x +
           "," + std::to_string(d.dx) + "," + std::to_string(d.dq) + "," + value + "," + tail +
           "," + bound + "," + std::to_string(r.terms_used) + "," + std::to_string(bits) + "\n";
  }
  std::ostringstream os;
  os << "value       = " << value << "\n"
     << "tail_bound  = " << tail << "\n"
     << "error_bound = " << bound << "\n"
     << "terms_used  = " << r.terms_used << "\n"
     << "precision   = " << bits << " bits\n";
  return os.str();
}

inline std::string delta_text(const DeltaTable& t) {
  std::ostringstream os;
  for (std::size_t s = 1; s <= t.size(); ++s) {
    os << "Δ" << subscript(s) << " = " << t.delta(s).to_string("q");
    if (t.order > 0) os << " + O(q^" << t.order + 1 << ")";
    os << "\n";
  }
  os << "gaps:";
  for (std::size_t s = 1; s <= t.size(); ++s) {
    const auto gap = leading_gap(t.delta(s));
    os << (s == 1 ? " " : ", ") << "κ" << subscript(s)
       << (gap ? " = " + std::to_string(*gap) : " > " + std::to_string(t.order));
  }
  os << "\n";
  return os.str();
}

inline std::string delta_csv(const DeltaTable& t) {
  std::string s = "s,k,coefficient\n";
  for (std::size_t r = 1; r <= t.size(); ++r) {
    for (std::size_t k = 0; k <= t.order; ++k) {
      s += std::to_string(r) + "," + std::to_string(k) + "," + t.delta(r)[k].str() + "\n";
    }
  }
  return s;
}

inline std::string certificate_summary(const Certificate& c) {
  std::ostringstream os;
  os << "a     = " << to_fraction_string(c.params.a) << "\n"
     << "u     = " << to_fraction_string(c.params.u) << "\n"
     << "beta  = " << to_fraction_string(c.params.beta) << "\n";
  if (c.best_slack) os << "slack = " << to_decimal_string(*c.best_slack, 15) << "\n";
  os << "margin = " << to_decimal_string(c.separation.margin, 15) << "\n"
     << "verdict: " << (c.feasible ? "FEASIBLE" : "INFEASIBLE") << "\n";
  return os.str();
}

inline std::string zeros_text(const ZeroSet<double>& zs) {
  std::ostringstream os;
  os << "q = " << format_complex(zs.q) << ", " << zs.count() << " zeros, " << zs.precision_bits
     << "-bit refinement\n";
  os << "j,xi,Delta_j,residual,error_bound\n";
  for (std::size_t i = 0; i < zs.count(); ++i) {
    const auto& e = zs.entries[i];
    os << i + 1 << "," << format_complex(e.xi) << "," << format_complex(e.delta) << ","
       << format_double(e.residual) << "," << format_double(e.error_bound) << "\n";
  }
  if (zs.count() >= 2) {
    const auto rep = separation_report(zs);
    os << "ratio |xi_j/xi_{j+1}| in [" << format_double(rep.min_ratio) << ", "
       << format_double(rep.max_ratio) << "], min pair distance "
       << format_double(rep.min_pair_distance) << ", distinct: " << (rep.distinct ? "yes" : "no")
       << "\n";
  }
  return os.str();
}

inline std::string spectrum_text(const std::vector<SpectralPoint>& pts) {
  std::ostringstream os;
  os << "j,q_tilde,x_double,residual,theta_xx\n";
  for (const auto& p : pts) {
    os << p.j << "," << p.q_tilde_text << "," << p.x_double_text << ","
       << format_double(p.newton_residual) << "," << format_double(p.theta_xx) << "\n";
  }
  return os.str();
}

template <class R>
std::vector<SpectralPoint> spectrum_in(std::size_t jmax, double tol) {
  return compute_spectrum<R>(jmax, tol);
}

}  // namespace detail

/// Runs one command line. args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Partial theta function: evaluation, Delta series, certificates, zeros, spectrum",
               "ptheta"};
  app.require_subcommand(1);
  app.fallthrough();

  detail::Shared shared;
  app.add_option("--format", shared.format, "Output format: text, json or csv");
  app.add_option("--output,-o", shared.output, "Write output to this file instead of stdout");
  app.add_option("--precision-bits", shared.precision_bits,
                 "Working precision in bits (53, 113, 166 or 333 are native)")
      ->envname("THETA_PRECISION_BITS")
      ->check(CLI::Range(53, 100000));

  std::string q_text, x_text, tol_text;
  unsigned dx = 0, dq = 0;
  auto* eval = app.add_subcommand("eval", "Evaluate theta or a partial derivative");
  eval->add_option("--q", q_text, "q, as RE[+-]IMi")->required();
  eval->add_option("--x", x_text, "x, as RE[+-]IMi")->required();
  eval->add_option("--tol", tol_text, "Tail tolerance");
  eval->add_option("--dx", dx, "Order of x-derivative")->check(CLI::Range(0, 8));
  eval->add_option("--dq", dq, "Order of q-derivative")->check(CLI::Range(0, 8));

  std::size_t s_rows = 0, k_order = 0;
  bool check_table = false;
  auto* delta = app.add_subcommand("delta", "Exact power series Delta_1..Delta_S through q^K");
  delta->add_option("--s", s_rows, "Number of series")->required();
  delta->add_option("--k", k_order, "Truncation order")->required();
  delta->add_flag("--check-table", check_table, "Compare with the published 5x10 block");

  std::string a_text, u_text, grid_text = "1/100000";
  bool max_radius = false, transcript = false;
  auto* certify = app.add_subcommand("certify", "Exact-rational simplicity certificate");
  certify->add_option("--a", a_text, "Disk radius, p/q or decimal");
  certify->add_option("--u", u_text, "Fixed u; searched when omitted");
  certify->add_flag("--max-radius", max_radius, "Largest certifiable radius on a grid");
  certify->add_option("--grid-step", grid_text, "Grid for --max-radius");
  certify->add_flag("--transcript", transcript, "Print every inequality");

  std::size_t n_zeros = 0, order = 20;
  std::string zeros_tol = "1e-10";
  auto* zeros = app.add_subcommand("zeros", "First n zeros of theta(q, .)");
  zeros->add_option("--q", q_text, "q, as RE[+-]IMi")->required();
  zeros->add_option("--n", n_zeros, "Number of zeros")->required();
  zeros->add_option("--tol", zeros_tol, "Residual tolerance");
  zeros->add_option("--order", order, "Order of the seeding series");

  double rmax = 0.0;
  std::size_t grid = 0;
  auto* scan = app.add_subcommand("scan", "Zero distinctness over a polar grid in |q| <= rmax");
  scan->add_option("--rmax", rmax, "Largest |q|")->required();
  scan->add_option("--grid", grid, "Grid points per axis")->required();
  scan->add_option("--n", n_zeros, "Zeros per point")->required();
  scan->add_option("--tol", zeros_tol, "Residual tolerance");

  std::size_t jmax = 0;
  std::string spectrum_tol = "1e-12";
  auto* spectrum = app.add_subcommand("spectrum", "Real spectral values q~_1..q~_jmax");
  spectrum->add_option("--jmax", jmax, "Largest index")->required()->check(CLI::Range(1, 40));
  spectrum->add_option("--tol", spectrum_tol, "Newton tolerance");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return usage;
  }

  auto positive = [](const std::string& text, const char* name) {
    const rational r = parse_rational(text);
    if (r <= 0) throw CLI::ValidationError(name, "must be positive");
    return r;
  };

  std::string body;
  int code = ok;
  try {
    if (*eval) {
      if (shared.format.empty()) shared.format = "text";
      detail::require_format(shared.format, {"text", "json", "csv"});
      const ComplexLiteral ql = parse_complex(q_text);
      const ComplexLiteral xl = parse_complex(x_text);
      const Precision p = precision_for_bits(shared.precision_bits.value_or(53));
      const rational tol = tol_text.empty()
                               ? (p == Precision::standard ? rational(1, 1000000000000000LL)
                                                           : rational(1, 1) / bmp::pow(bigint(10), precision_digits10(p)))
                               : positive(tol_text, "--tol");
      const Derivative d{dx, dq};
      switch (p) {
        case Precision::standard: body = detail::eval_report<double>(ql, xl, tol, d, shared.format); break;
        case Precision::high: body = detail::eval_report<real_hp>(ql, xl, tol, d, shared.format); break;
        case Precision::extended: body = detail::eval_report<real_xp>(ql, xl, tol, d, shared.format); break;
        case Precision::ultra: body = detail::eval_report<real_xxp>(ql, xl, tol, d, shared.format); break;
      }
    } else if (*delta) {
      if (shared.format.empty()) shared.format = "text";
      detail::require_format(shared.format, {"text", "json", "csv"});
      const DeltaTable table = solve_delta(s_rows, k_order);
      std::vector<TableMismatch> mismatches;
      if (check_table) {
        mismatches = compare_with_published(table);
        if (!mismatches.empty()) code = negative;
      }
      if (shared.format == "json") {
        json j = delta_table_json(table);
        if (check_table) {
          json mm = json::array();
          for (const auto& m : mismatches) {
            mm.push_back({{"s", m.s}, {"k", m.k}, {"expected", m.expected.str()}, {"actual", m.actual.str()}});
          }
          j["table_check"] = {{"pass", mismatches.empty()}, {"mismatches", mm}};
        }
        body = j.dump(2) + "\n";
      } else if (shared.format == "csv") {
        body = detail::delta_csv(table);
      } else {
        body = detail::delta_text(table);
        if (check_table) {
          for (const auto& m : mismatches) {
            body += "mismatch s=" + std::to_string(m.s) + " k=" + std::to_string(m.k) +
                    ": expected " + m.expected.str() + ", got " + m.actual.str() + "\n";
          }
          body += std::string("table check: ") + (mismatches.empty() ? "PASS" : "FAIL") + "\n";
        }
      }
    } else if (*certify) {
      if (shared.format.empty()) shared.format = "text";
      detail::require_format(shared.format, {"text", "json"});
      if (max_radius) {
        const rational step = positive(grid_text, "--grid-step");
        const rational r = max_certified_radius(step);
        if (shared.format == "json") {
          body = json{{"grid_step", rational_json(step)},
                      {"max_certified_radius", rational_json(r)},
                      {"decimal", to_decimal_string(r, 8)}}
                     .dump(2) +
                 "\n";
        } else {
          body = "max certified radius = " + to_decimal_string(r, 8) + " (" + to_fraction_string(r) +
                 ", grid step " + to_fraction_string(step) + ")\n";
        }
      } else {
        if (a_text.empty()) throw CLI::RequiredError("--a or --max-radius");
        const rational a = positive(a_text, "--a");
        const Certificate c = u_text.empty() ? certify_disk(a) : certify_with(a, positive(u_text, "--u"));
        code = c.feasible ? ok : negative;
        if (shared.format == "json") {
          body = certificate_json(c).dump(2) + "\n";
        } else {
          body = transcript ? proof_transcript(c) : detail::certificate_summary(c);
        }
      }
    } else if (*zeros) {
      if (shared.format.empty()) shared.format = "text";
      detail::require_format(shared.format, {"text", "json", "csv"});
      FindOptions opts;
      opts.tol = to_double(positive(zeros_tol, "--tol"));
      opts.delta_order = order;
      std::optional<Precision> p;
      if (shared.precision_bits) p = precision_for_bits(*shared.precision_bits);
      const ZeroSet<double> zs = find_zeros(to_complex_double(parse_complex(q_text)), n_zeros, opts, p);
      if (shared.format == "json") {
        body = zero_set_json(zs).dump(2) + "\n";
      } else if (shared.format == "csv") {
        body = zero_set_csv(zs);
      } else {
        body = detail::zeros_text(zs);
      }
    } else if (*scan) {
      if (shared.format.empty()) shared.format = "csv";
      detail::require_format(shared.format, {"csv", "json"});
      FindOptions opts;
      opts.tol = to_double(positive(zeros_tol, "--tol"));
      const auto rows = scan_disk(rmax, grid, n_zeros, opts);
      if (shared.format == "json") {
        json arr = json::array();
        for (const auto& r : rows) {
          arr.push_back({{"re_q", format_double(r.q.real())},
                         {"im_q", format_double(r.q.imag())},
                         {"n_found", r.n_found},
                         {"min_ratio", format_double(r.min_ratio)},
                         {"min_pair_distance", format_double(r.min_pair_distance)},
                         {"max_delta_dev", format_double(r.max_delta_dev)},
                         {"stalled", r.stalled}});
        }
        body = arr.dump(2) + "\n";
      } else {
        body = scan_csv(rows);
      }
    } else if (*spectrum) {
      if (shared.format.empty()) shared.format = "text";
      detail::require_format(shared.format, {"text", "json", "csv"});
      const double tol = to_double(positive(spectrum_tol, "--tol"));
      const int bits = std::max(shared.precision_bits.value_or(113), 113);
      const auto pts = bits <= 113 ? detail::spectrum_in<real_hp>(jmax, tol)
                                   : detail::spectrum_in<real_xp>(jmax, tol);
      if (shared.format == "json") {
        body = spectral_points_json(pts).dump(2) + "\n";
      } else if (shared.format == "csv") {
        body = asymptotics_csv(pts);
      } else {
        body = detail::spectrum_text(pts);
      }
    }
  } catch (const CLI::Error& e) {
    err << "usage error: " << e.what() << "\n";
    return usage;
  } catch (const error& e) {
    err << e.what() << "\n";
    return e.code() == errc::parse_error ? usage : numeric;
  } catch (const std::exception& e) {
    err << "Internal: " << e.what() << "\n";
    return numeric;
  }

  if (shared.output.empty()) {
    out << body;
  } else {
    std::ofstream file(shared.output, std::ios::binary);
    if (!file || !(file << body)) {
      err << "cannot write " << shared.output << "\n";
      return numeric;
    }
  }
  return code;
}

}  // namespace ptheta::cli
