#pragma once

#include <cstddef>
#include <string>

#include "xmbcr/error.hpp"
#include "xmbcr/gf256.hpp"

namespace xmbcr {

/// Validated code parameters with the derived per-device quantities.
///
/// n devices, any k of which reconstruct the file; t simultaneous failures are
/// repaired from the d = n - t survivors. With the coordination exchange fixed
/// at one block per newcomer pair:
///   alpha       = 2d + t - 1   blocks stored per device
///   beta        = 2            blocks each helper sends to each newcomer
///   beta_prime  = 1            blocks each newcomer sends to each other newcomer
///   file_blocks = k(2d - k + t) = kn + k(d - k)
struct CodeParams {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t d = 0;
  std::size_t t = 0;
  std::size_t alpha = 0;
  std::size_t beta = 0;
  std::size_t beta_prime = 0;
  std::size_t file_blocks = 0;

  /// Number of b-sequences; zero when d == k.
  std::size_t coded_sequences() const noexcept { return d - k; }
  std::size_t secondary_slots() const noexcept { return n - 1; }

  friend bool operator==(const CodeParams&, const CodeParams&) = default;
};

inline CodeParams derive_params(std::size_t n, std::size_t k, std::size_t d, std::size_t t) {
  auto fail = [&](const std::string& why) -> CodeParams {
    throw Error(Errc::InvalidParams, "(n=" + std::to_string(n) + ", k=" + std::to_string(k) +
                                         ", d=" + std::to_string(d) + ", t=" + std::to_string(t) +
                                         "): " + why);
  };
  if (k < 1) return fail("k must be at least 1");
  if (t < 1) return fail("t must be at least 1");
  if (d < k) return fail("d must be at least k");
  if (n != d + t) return fail("n must equal d + t");
  if (d + n - 1 > gf256::kFieldSize) return fail("d + n - 1 exceeds the field size 256");

  CodeParams p;
  p.n = n;
  p.k = k;
  p.d = d;
  p.t = t;
  p.alpha = 2 * d + t - 1;
  p.beta = 2;
  p.beta_prime = 1;
  p.file_blocks = k * (2 * d - k + t);
  return p;
}

}  // namespace xmbcr
