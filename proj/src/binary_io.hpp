#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

// Little-endian scalar encoding independent of host byte order.
namespace dopfocus::binio {

template <typename U>
void put_uint(std::ostream& out, U v) {
  char b[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, sizeof(U));
}

template <typename U>
U get_uint(std::istream& in) {
  unsigned char b[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(b), sizeof(U)))
    throw std::runtime_error("unexpected end of file");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(b[i]) << (8 * i);
  return v;
}

inline void put_f64(std::ostream& out, double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, sizeof u);
  put_uint(out, u);
}
inline double get_f64(std::istream& in) {
  auto u = get_uint<std::uint64_t>(in);
  double v;
  std::memcpy(&v, &u, sizeof v);
  return v;
}
inline void put_f32(std::ostream& out, float v) {
  std::uint32_t u;
  std::memcpy(&u, &v, sizeof u);
  put_uint(out, u);
}
inline float get_f32(std::istream& in) {
  auto u = get_uint<std::uint32_t>(in);
  float v;
  std::memcpy(&v, &u, sizeof v);
  return v;
}
inline void put_i32(std::ostream& out, std::int32_t v) {
  put_uint(out, static_cast<std::uint32_t>(v));
}
inline std::int32_t get_i32(std::istream& in) {
  return static_cast<std::int32_t>(get_uint<std::uint32_t>(in));
}

inline void expect_magic(std::istream& in, const char (&magic)[5], const std::string& what) {
  char b[4];
  if (!in.read(b, 4) || std::memcmp(b, magic, 4) != 0)
    throw std::runtime_error(what + ": bad magic, expected " + std::string(magic, 4));
}

}  // namespace dopfocus::binio
