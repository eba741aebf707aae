#pragma once

#include <array>
#include <cstdint>

namespace contentcast::gf256 {

// GF(2^8) generated by the primitive polynomial x^8 + x^4 + x^3 + x^2 + 1
// (0x11d) with generator alpha = 2. Addition is XOR; multiplication goes
// through log/antilog tables built at compile time.

namespace detail {

struct Tables {
  std::array<std::uint8_t, 512> exp{};
  std::array<std::uint8_t, 256> log{};
};

constexpr Tables make_tables() {
  Tables t{};
  std::uint32_t x = 1;
  for (int i = 0; i < 255; ++i) {
    t.exp[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(x);
    t.log[x] = static_cast<std::uint8_t>(i);
    x <<= 1;
    if (x & 0x100u) x ^= 0x11du;
  }
  // Mirror so exp[log[a] + log[b]] never needs a modulo.
  for (int i = 255; i < 512; ++i) t.exp[static_cast<std::size_t>(i)] = t.exp[static_cast<std::size_t>(i - 255)];
  return t;
}

inline constexpr Tables tables = make_tables();

}  // namespace detail

inline constexpr std::uint8_t add(std::uint8_t a, std::uint8_t b) { return a ^ b; }
inline constexpr std::uint8_t sub(std::uint8_t a, std::uint8_t b) { return a ^ b; }

inline constexpr std::uint8_t mul(std::uint8_t a, std::uint8_t b) {
  if (a == 0 || b == 0) return 0;
  return detail::tables.exp[static_cast<std::size_t>(detail::tables.log[a]) + detail::tables.log[b]];
}

// Multiplicative inverse; a must be nonzero.
inline constexpr std::uint8_t inv(std::uint8_t a) {
  return detail::tables.exp[255u - detail::tables.log[a]];
}

inline constexpr std::uint8_t div(std::uint8_t a, std::uint8_t b) { return mul(a, inv(b)); }

// a^e with 0^0 = 1 (Vandermonde rows need that convention).
inline constexpr std::uint8_t pow(std::uint8_t base, std::uint32_t e) {
  if (e == 0) return 1;
  if (base == 0) return 0;
  const std::uint32_t l = (static_cast<std::uint32_t>(detail::tables.log[base]) * (e % 255u)) % 255u;
  return detail::tables.exp[l];
}

}  // namespace contentcast::gf256
