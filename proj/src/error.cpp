#include "iet/error.hpp"

namespace iet {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::non_positive_length: return "NonPositiveLength";
    case Errc::not_admissible: return "NotAdmissible";
    case Errc::alphabet_mismatch: return "AlphabetMismatch";
    case Errc::out_of_domain: return "OutOfDomain";
    case Errc::precision_exhausted: return "PrecisionExhausted";
    case Errc::float_mode_uncertifiable: return "FloatModeUncertifiable";
    case Errc::field_mismatch: return "FieldMismatch";
    case Errc::division_by_zero: return "DivisionByZero";
    case Errc::bad_argument: return "BadArgument";
    case Errc::tied_lengths: return "TiedLengths";
    case Errc::depth_exceeded: return "DepthExceeded";
    case Errc::bad_level: return "BadLevel";
    case Errc::cap_exceeded: return "CapExceeded";
    case Errc::zero_entry: return "ZeroEntry";
    case Errc::certificate_mismatch: return "CertificateMismatch";
    case Errc::not_primitive: return "NotPrimitive";
    case Errc::bad_index: return "BadIndex";
    case Errc::at_singularity: return "AtSingularity";
    case Errc::orbit_hits_singularity: return "OrbitHitsSingularity";
    case Errc::asymmetric_roof: return "AsymmetricRoof";
    case Errc::not_normalized: return "NotNormalized";
    case Errc::bad_inputs: return "BadInputs";
    case Errc::pair_too_far: return "PairTooFar";
    case Errc::same_orbit: return "SameOrbit";
    case Errc::not_found: return "NotFound";
    case Errc::no_branch_in_p: return "NoBranchInP";
    case Errc::drift_not_kept: return "DriftNotKept";
    case Errc::parse_error: return "ParseError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what, std::optional<std::int64_t> index)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code), index_(index) {}

}  // namespace iet
