#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "xmbcr/error.hpp"

namespace xmbcr {

/// A block is s bytes; every byte lane is an independent GF(2^8) symbol.
using Block = std::vector<std::uint8_t>;

namespace gf256 {

/// Reduction polynomial x^8 + x^4 + x^3 + x^2 + 1.
inline constexpr unsigned kPolynomial = 0x11D;
inline constexpr unsigned kGenerator = 0x02;
inline constexpr std::size_t kFieldSize = 256;

struct Element {
  std::uint8_t value = 0;

  constexpr Element() = default;
  constexpr explicit Element(std::uint8_t v) : value(v) {}

  constexpr bool is_zero() const noexcept { return value == 0; }
  friend constexpr bool operator==(Element, Element) = default;
};

namespace detail {

struct Tables {
  // exp is doubled so log[a] + log[b] indexes without a modulo.
  std::array<std::uint8_t, 512> exp{};
  std::array<std::uint8_t, 256> log{};
};

constexpr Tables make_tables() {
  Tables t{};
  unsigned x = 1;
  for (unsigned i = 0; i < 255; ++i) {
    t.exp[i] = static_cast<std::uint8_t>(x);
    t.log[x] = static_cast<std::uint8_t>(i);
    x <<= 1;
    if (x & 0x100) x ^= kPolynomial;
  }
  for (unsigned i = 255; i < 512; ++i) t.exp[i] = t.exp[i - 255];
  return t;
}

inline constexpr Tables kTables = make_tables();

}  // namespace detail

constexpr Element add(Element a, Element b) noexcept {
  return Element(static_cast<std::uint8_t>(a.value ^ b.value));
}

constexpr Element mul(Element a, Element b) noexcept {
  if (a.is_zero() || b.is_zero()) return Element{};
  return Element(detail::kTables.exp[detail::kTables.log[a.value] + detail::kTables.log[b.value]]);
}

inline Element inv(Element a) {
  if (a.is_zero()) throw Error(Errc::ZeroInverse, "zero has no multiplicative inverse");
  return Element(detail::kTables.exp[255 - detail::kTables.log[a.value]]);
}

constexpr Element pow(Element base, unsigned exponent) noexcept {
  if (exponent == 0) return Element(1);
  if (base.is_zero()) return Element{};
  const unsigned e = (detail::kTables.log[base.value] * (exponent % 255)) % 255;
  return Element(detail::kTables.exp[e]);
}

/// Discrete log base 0x02; `a` must be nonzero.
constexpr unsigned log(Element a) noexcept { return detail::kTables.log[a.value]; }
constexpr Element exp(unsigned e) noexcept { return Element(detail::kTables.exp[e % 255]); }

constexpr Element operator+(Element a, Element b) noexcept { return add(a, b); }
constexpr Element operator*(Element a, Element b) noexcept { return mul(a, b); }

/// accumulator[j] ^= coefficient * source[j], in place.
inline void axpy_inplace(std::span<std::uint8_t> accumulator, Element coefficient,
                         std::span<const std::uint8_t> source) {
  if (accumulator.size() != source.size()) {
    throw Error(Errc::LengthMismatch, "axpy over blocks of " + std::to_string(accumulator.size()) +
                                          " and " + std::to_string(source.size()) + " bytes");
  }
  if (coefficient.is_zero()) return;
  if (coefficient.value == 1) {
    for (std::size_t j = 0; j < source.size(); ++j) accumulator[j] ^= source[j];
    return;
  }
  std::array<std::uint8_t, 256> row{};
  for (unsigned v = 1; v < 256; ++v) row[v] = mul(coefficient, Element(static_cast<std::uint8_t>(v))).value;
  for (std::size_t j = 0; j < source.size(); ++j) accumulator[j] ^= row[source[j]];
}

inline Block block_axpy(Block accumulator, Element coefficient, const Block& source) {
  axpy_inplace(accumulator, coefficient, source);
  return accumulator;
}

}  // namespace gf256
}  // namespace xmbcr
