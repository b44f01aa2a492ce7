#ifndef SCV_IO_BINARY_HPP
#define SCV_IO_BINARY_HPP

// Little-endian byte helpers shared by the file formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "scv/error.hpp"

namespace scv::io {

using Bytes = std::vector<unsigned char>;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

namespace detail {
template <class T> T byteswap_if_big(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
      std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}
} // namespace detail

/// Bounds-checked cursor over an in-memory buffer.
class ByteReader {
public:
  explicit ByteReader(std::span<const unsigned char> bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }

  template <class T> T read() {
    static_assert(std::is_trivially_copyable_v<T>);
    if (remaining() < sizeof(T))
      throw FormatError("unexpected end of data");
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return detail::byteswap_if_big(v);
  }

  void expect_magic(std::string_view magic) {
    if (remaining() < magic.size() || std::memcmp(bytes_.data() + pos_, magic.data(), magic.size()) != 0)
      throw FormatError("bad magic, expected \"" + std::string(magic) + "\"");
    pos_ += magic.size();
  }

  /// Throws unless exactly `n` bytes are left.
  void expect_exact(std::uint64_t n) const {
    if (remaining() != n)
      throw FormatError("payload length mismatch: expected " + std::to_string(n) + " bytes, found " +
                        std::to_string(remaining()));
  }

private:
  std::span<const unsigned char> bytes_;
  std::size_t pos_ = 0;
};

class ByteWriter {
public:
  template <class T> void write(T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    v = detail::byteswap_if_big(v);
    const auto *p = reinterpret_cast<const unsigned char *>(&v);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void write_magic(std::string_view magic) { bytes_.insert(bytes_.end(), magic.begin(), magic.end()); }
  void reserve(std::size_t n) { bytes_.reserve(n); }

  Bytes take() { return std::move(bytes_); }

private:
  Bytes bytes_;
};

/// Multiplies dims, throwing FormatError when the product exceeds `limit`.
inline std::uint64_t checked_product(std::initializer_list<std::uint64_t> factors, std::uint64_t limit) {
  std::uint64_t acc = 1;
  for (std::uint64_t f : factors) {
    if (f != 0 && acc > limit / f)
      throw FormatError("dimensions overflow the payload");
    acc *= f;
  }
  if (acc > limit)
    throw FormatError("dimensions overflow the payload");
  return acc;
}

inline Bytes read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw FormatError("cannot open " + path);
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::string &path, std::span<const unsigned char> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw FormatError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out)
    throw FormatError("write failed: " + path);
}

} // namespace scv::io

#endif // SCV_IO_BINARY_HPP
