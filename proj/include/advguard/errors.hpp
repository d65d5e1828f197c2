#pragma once

#include <stdexcept>
#include <string>

namespace advguard {

// Stable error codes. The snake_case names double as machine-readable
// reason codes in detection reports.
enum class Errc {
  invalid_argument,
  shape_mismatch,
  non_finite,
  bad_format,
  version_mismatch,
  truncated_blob,
  shape_inconsistency,
  io_error,
  no_usable_input,
  all_zero_saliency,
  degenerate_spectrum,
  empty_union,
  constant_distribution,
  missing_profile,
  divergence,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::shape_mismatch: return "shape_mismatch";
    case Errc::non_finite: return "non_finite";
    case Errc::bad_format: return "bad_format";
    case Errc::version_mismatch: return "version_mismatch";
    case Errc::truncated_blob: return "truncated_blob";
    case Errc::shape_inconsistency: return "shape_inconsistency";
    case Errc::io_error: return "io_error";
    case Errc::no_usable_input: return "no_usable_input";
    case Errc::all_zero_saliency: return "all_zero_saliency";
    case Errc::degenerate_spectrum: return "degenerate_spectrum";
    case Errc::empty_union: return "empty_union";
    case Errc::constant_distribution: return "constant_distribution";
    case Errc::missing_profile: return "missing_profile";
    case Errc::divergence: return "divergence";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc c, const std::string& msg) {
  throw Error(c, std::string(errc_name(c)) + ": " + msg);
}

}  // namespace advguard
