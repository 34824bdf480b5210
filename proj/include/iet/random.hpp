#pragma once

#include <cstdint>
#include <random>

#include "iet/scalar.hpp"

namespace iet {

/// Independent, reproducible stream for work item `index` under `seed`.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

/// Exact dyadic rational k / 2^53, uniform in [0, 1).
inline Scalar dyadic_unit(std::mt19937_64& rng) {
  const mpz_class k(static_cast<unsigned long>(rng() >> 11));
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 2, 53);
  return Scalar::rational(k, den);
}

inline double unit_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n).
inline std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) {
  // Rejection sampling keeps the result independent of the library.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % n;
}

}  // namespace iet
