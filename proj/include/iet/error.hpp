#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace iet {

enum class Errc {
  non_positive_length,
  not_admissible,
  alphabet_mismatch,
  out_of_domain,
  precision_exhausted,
  float_mode_uncertifiable,
  field_mismatch,
  division_by_zero,
  bad_argument,
  tied_lengths,
  depth_exceeded,
  bad_level,
  cap_exceeded,
  zero_entry,
  certificate_mismatch,
  not_primitive,
  bad_index,
  at_singularity,
  orbit_hits_singularity,
  asymmetric_roof,
  not_normalized,
  bad_inputs,
  pair_too_far,
  same_orbit,
  not_found,
  no_branch_in_p,
  drift_not_kept,
  parse_error,
};

std::string_view errc_name(Errc code);

/// Every failure raised by the library. `index()` carries the step, iterate
/// or orbit position when the error is tied to one (e.g. the step at which
/// Rauzy induction hit tied lengths).
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, std::optional<std::int64_t> index = {});

  Errc code() const noexcept { return code_; }
  std::optional<std::int64_t> index() const noexcept { return index_; }

 private:
  Errc code_;
  std::optional<std::int64_t> index_;
};

}  // namespace iet
