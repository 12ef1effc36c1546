#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace oiekit {

// One real vector per token of a sentence, row-major.
struct EmbeddingMatrix {
  std::string sentence_id;
  std::size_t dim = 0;
  std::vector<float> data;

  std::size_t tokens() const { return dim == 0 ? 0 : data.size() / dim; }

  std::span<const float> row(std::size_t i) const {
    return std::span<const float>(data.data() + i * dim, dim);
  }
};

using EmbeddingBundle = std::map<std::string, EmbeddingMatrix>;

class EmbeddingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void put_u16(std::ostream& out, std::uint16_t v) {
  char bytes[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
  out.write(bytes, 2);
}

inline void put_u32(std::ostream& out, std::uint32_t v) {
  char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes, 4);
}

inline void put_f32(std::ostream& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}

inline std::uint16_t get_u16(std::istream& in) {
  unsigned char bytes[2];
  in.read(reinterpret_cast<char*>(bytes), 2);
  if (!in) throw EmbeddingError("embedding bundle truncated");
  return static_cast<std::uint16_t>(bytes[0] | (bytes[1] << 8));
}

inline std::uint32_t get_u32(std::istream& in) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  if (!in) throw EmbeddingError("embedding bundle truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
  return v;
}

inline float get_f32(std::istream& in) {
  std::uint32_t bits = get_u32(in);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

}  // namespace detail

// Bundle layout: magic "EMB1"; u32 entry count; per entry: u16 id length,
// id bytes, u32 token count, u32 dim, then token_count * dim IEEE-754
// little-endian 32-bit floats.
inline void write_embedding_bundle(std::ostream& out, const EmbeddingBundle& bundle) {
  out.write("EMB1", 4);
  detail::put_u32(out, static_cast<std::uint32_t>(bundle.size()));
  for (const auto& [id, matrix] : bundle) {
    if (id.size() > 0xffff) throw EmbeddingError("sentence id too long: " + id);
    detail::put_u16(out, static_cast<std::uint16_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
    detail::put_u32(out, static_cast<std::uint32_t>(matrix.tokens()));
    detail::put_u32(out, static_cast<std::uint32_t>(matrix.dim));
    for (float v : matrix.data) detail::put_f32(out, v);
  }
}

// Reads a bundle, checking the magic, finiteness of every value, and that
// the dimension is uniform across entries.
inline EmbeddingBundle read_embedding_bundle(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "EMB1", 4) != 0) {
    throw EmbeddingError("bad embedding bundle magic (expected EMB1)");
  }
  std::uint32_t entries = detail::get_u32(in);
  EmbeddingBundle bundle;
  std::size_t bundle_dim = 0;
  for (std::uint32_t e = 0; e < entries; ++e) {
    std::uint16_t id_len = detail::get_u16(in);
    std::string id(id_len, '\0');
    in.read(id.data(), id_len);
    if (!in) throw EmbeddingError("embedding bundle truncated in id");
    std::uint32_t tokens = detail::get_u32(in);
    std::uint32_t dim = detail::get_u32(in);
    if (dim == 0) throw EmbeddingError("zero embedding dimension for '" + id + "'");
    if (bundle_dim == 0) {
      bundle_dim = dim;
    } else if (dim != bundle_dim) {
      throw EmbeddingError("embedding dimension mismatch for '" + id + "': " +
                           std::to_string(dim) + " vs " + std::to_string(bundle_dim));
    }
    EmbeddingMatrix matrix;
    matrix.sentence_id = id;
    matrix.dim = dim;
    matrix.data.resize(static_cast<std::size_t>(tokens) * dim);
    for (float& v : matrix.data) {
      v = detail::get_f32(in);
      if (!std::isfinite(v)) throw EmbeddingError("non-finite embedding value for '" + id + "'");
    }
    if (bundle.count(id)) throw EmbeddingError("duplicate sentence id '" + id + "'");
    bundle.emplace(id, std::move(matrix));
  }
  return bundle;
}

}  // namespace oiekit
