#pragma once

#include <stdexcept>
#include <string>

namespace ptheta {

/// Failure categories surfaced by the library. The CLI maps them onto exit codes.
enum class errc {
  divergence_domain,
  tolerance_unreachable,
  empty_zero_set,
  resource_cap,
  newton_stall,
  too_few_zeros,
  bracket_invalid,
  inconclusive,
  precision_exhausted,
  parse_error,
  internal,
};

inline const char* to_string(errc code) noexcept {
  switch (code) {
    case errc::divergence_domain: return "DivergenceDomain";
    case errc::tolerance_unreachable: return "ToleranceUnreachable";
    case errc::empty_zero_set: return "EmptyZeroSet";
    case errc::resource_cap: return "ResourceCap";
    case errc::newton_stall: return "NewtonStall";
    case errc::too_few_zeros: return "TooFewZeros";
    case errc::bracket_invalid: return "BracketInvalid";
    case errc::inconclusive: return "Inconclusive";
    case errc::precision_exhausted: return "PrecisionExhausted";
    case errc::parse_error: return "ParseError";
    case errc::internal: return "InternalError";
  }
  return "Unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace ptheta
