#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hdbench/error.hpp"

namespace hdbench::bytes {

using Buffer = std::vector<std::uint8_t>;

template <class UInt>
void put_be(Buffer& out, UInt v) {
  for (int shift = static_cast<int>(sizeof(UInt) * 8) - 8; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

inline void put_f64_le(Buffer& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

// Bounds-checked cursor over a received payload. Every read past the end
// raises ProtocolError rather than touching memory.
class Reader {
public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  template <class UInt>
  UInt be() {
    need(sizeof(UInt));
    UInt v = 0;
    for (std::size_t i = 0; i < sizeof(UInt); ++i) v = static_cast<UInt>((v << 8) | data_[pos_ + i]);
    pos_ += sizeof(UInt);
    return v;
  }

  std::uint8_t u8() { return be<std::uint8_t>(); }

  double f64_le() {
    need(8);
    std::uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) bits = (bits << 8) | data_[pos_ + static_cast<std::size_t>(i)];
    pos_ += 8;
    return std::bit_cast<double>(bits);
  }

  std::string rest_as_string() {
    std::string s(reinterpret_cast<const char*>(data_.data() + pos_), data_.size() - pos_);
    pos_ = data_.size();
    return s;
  }

  std::size_t remaining() const { return data_.size() - pos_; }

  void expect_end() const {
    if (pos_ != data_.size()) throw ProtocolError("trailing bytes in payload");
  }

private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw ProtocolError("truncated payload");
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

namespace detail {
inline constexpr std::string_view kAlphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

inline int decode_char(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}
}  // namespace detail

inline std::string base64_encode(std::span<const std::uint8_t> in) {
  std::string out;
  out.reserve((in.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= in.size(); i += 3) {
    const std::uint32_t n = (std::uint32_t{in[i]} << 16) | (std::uint32_t{in[i + 1]} << 8) | in[i + 2];
    out += detail::kAlphabet[(n >> 18) & 63];
    out += detail::kAlphabet[(n >> 12) & 63];
    out += detail::kAlphabet[(n >> 6) & 63];
    out += detail::kAlphabet[n & 63];
  }
  const std::size_t rest = in.size() - i;
  if (rest == 1) {
    const std::uint32_t n = std::uint32_t{in[i]} << 16;
    out += detail::kAlphabet[(n >> 18) & 63];
    out += detail::kAlphabet[(n >> 12) & 63];
    out += "==";
  } else if (rest == 2) {
    const std::uint32_t n = (std::uint32_t{in[i]} << 16) | (std::uint32_t{in[i + 1]} << 8);
    out += detail::kAlphabet[(n >> 18) & 63];
    out += detail::kAlphabet[(n >> 12) & 63];
    out += detail::kAlphabet[(n >> 6) & 63];
    out += '=';
  }
  return out;
}

inline Buffer base64_decode(std::string_view in) {
  if (in.size() % 4 != 0) throw DataError("base64 length is not a multiple of 4");
  Buffer out;
  out.reserve(in.size() / 4 * 3);
  for (std::size_t i = 0; i < in.size(); i += 4) {
    std::array<int, 4> v{};
    int pad = 0;
    for (int j = 0; j < 4; ++j) {
      const char c = in[i + static_cast<std::size_t>(j)];
      if (c == '=' && i + 4 == in.size() && j >= 2) {
        v[static_cast<std::size_t>(j)] = 0;
        ++pad;
      } else {
        if (pad > 0) throw DataError("base64 padding in the middle of a quantum");
        v[static_cast<std::size_t>(j)] = detail::decode_char(c);
        if (v[static_cast<std::size_t>(j)] < 0) throw DataError("invalid base64 character");
      }
    }
    const std::uint32_t n = (static_cast<std::uint32_t>(v[0]) << 18) | (static_cast<std::uint32_t>(v[1]) << 12) |
                            (static_cast<std::uint32_t>(v[2]) << 6) | static_cast<std::uint32_t>(v[3]);
    out.push_back(static_cast<std::uint8_t>(n >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>(n >> 8));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(n));
  }
  return out;
}

// Little-endian 8-byte floats, base64 encoded. Used for weight vectors in
// model artifacts.
inline std::string f64_vector_to_base64(std::span<const double> values) {
  Buffer raw;
  raw.reserve(values.size() * 8);
  for (double v : values) put_f64_le(raw, v);
  return base64_encode(raw);
}

inline std::vector<double> f64_vector_from_base64(std::string_view text) {
  const Buffer raw = base64_decode(text);
  if (raw.size() % 8 != 0) throw DataError("weight payload is not a whole number of f64 values");
  Reader r(raw);
  std::vector<double> out(raw.size() / 8);
  for (auto& v : out) v = r.f64_le();
  return out;
}

}  // namespace hdbench::bytes
