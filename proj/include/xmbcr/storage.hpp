#pragma once

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xmbcr/codec.hpp"
#include "xmbcr/error.hpp"
#include "xmbcr/matrix.hpp"
#include "xmbcr/params.hpp"

namespace xmbcr::storage {

namespace fs = std::filesystem;

inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::size_t kDefaultBlockSize = 4096;
inline constexpr std::string_view kManifestName = "manifest.json";

// ---------------------------------------------------------------------------
// SHA-256

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw Error(Errc::IoError, "cannot initialise SHA-256");
    }
  }

  void update(std::span<const std::uint8_t> bytes) {
    if (!bytes.empty()) EVP_DigestUpdate(ctx_.get(), bytes.data(), bytes.size());
  }

  std::string hex_digest() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), md.data(), &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
      out.push_back(kHex[md[i] >> 4]);
      out.push_back(kHex[md[i] & 0xF]);
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

inline std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  Sha256 h;
  h.update(bytes);
  return h.hex_digest();
}

inline std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  Sha256 h;
  std::vector<std::uint8_t> buf(1 << 16);
  while (in) {
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    h.update(std::span(buf).first(static_cast<std::size_t>(in.gcount())));
  }
  return h.hex_digest();
}

// ---------------------------------------------------------------------------
// Manifest

struct Manifest {
  std::uint32_t format_version = kFormatVersion;
  std::size_t n = 0, k = 0, d = 0, t = 0;
  std::size_t block_size = 0;
  std::uint64_t stripe_count = 0;
  std::uint64_t original_length = 0;
  std::vector<unsigned> psi_points;
  std::vector<unsigned> phi_x_points;
  std::vector<unsigned> phi_y_points;
  std::string payload_checksum;

  CodeParams params() const { return derive_params(n, k, d, t); }

  MatrixPoints points() const {
    auto conv = [](const std::vector<unsigned>& v) {
      std::vector<Element> out;
      for (unsigned x : v) {
        if (x > 255) throw Error(Errc::ManifestError, "point " + std::to_string(x) + " is not a field element");
        out.emplace_back(static_cast<std::uint8_t>(x));
      }
      return out;
    };
    return {conv(psi_points), conv(phi_x_points), conv(phi_y_points)};
  }

  std::uint64_t stripe_bytes() const { return static_cast<std::uint64_t>(params().file_blocks) * block_size; }

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

inline std::uint64_t stripes_for(std::uint64_t length, std::uint64_t stripe_bytes) {
  return (length + stripe_bytes - 1) / stripe_bytes;
}

inline void to_json(nlohmann::json& j, const Manifest& m) {
  j = nlohmann::json{{"format_version", m.format_version},
                     {"n", m.n},
                     {"k", m.k},
                     {"d", m.d},
                     {"t", m.t},
                     {"block_size", m.block_size},
                     {"stripe_count", m.stripe_count},
                     {"original_length", m.original_length},
                     {"psi_points", m.psi_points},
                     {"phi_x_points", m.phi_x_points},
                     {"phi_y_points", m.phi_y_points},
                     {"payload_checksum", m.payload_checksum}};
}

inline void from_json(const nlohmann::json& j, Manifest& m) {
  j.at("format_version").get_to(m.format_version);
  j.at("n").get_to(m.n);
  j.at("k").get_to(m.k);
  j.at("d").get_to(m.d);
  j.at("t").get_to(m.t);
  j.at("block_size").get_to(m.block_size);
  j.at("stripe_count").get_to(m.stripe_count);
  j.at("original_length").get_to(m.original_length);
  j.at("psi_points").get_to(m.psi_points);
  j.at("phi_x_points").get_to(m.phi_x_points);
  j.at("phi_y_points").get_to(m.phi_y_points);
  j.at("payload_checksum").get_to(m.payload_checksum);
}

/// Checks the manifest invariants; returns the params and matrices it implies.
inline std::pair<CodeParams, CodeMatrices> validate(const Manifest& m) {
  if (m.format_version != kFormatVersion) {
    throw Error(Errc::ManifestError, "unsupported format version " + std::to_string(m.format_version));
  }
  if (m.block_size < 1) throw Error(Errc::ManifestError, "block_size must be at least 1");
  CodeParams p = m.params();
  CodeMatrices mx = build_code_matrices(p, m.points());
  if (m.stripe_count != stripes_for(m.original_length, m.stripe_bytes())) {
    throw Error(Errc::ManifestError, "stripe_count does not match original_length");
  }
  return {p, std::move(mx)};
}

inline void write_manifest(const fs::path& dir, const Manifest& m) {
  std::ofstream out(dir / kManifestName, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write manifest in " + dir.string());
  out << nlohmann::json(m).dump(2) << '\n';
  if (!out) throw Error(Errc::IoError, "short write on manifest");
}

inline Manifest read_manifest(const fs::path& dir) {
  const fs::path path = dir / kManifestName;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in).get<Manifest>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ManifestError, path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Share files
//
// Header, little-endian, fixed offsets:
//   0  magic "XMBC"        16 k               32 stripe_count (u64)
//   4  format_version      20 d
//   8  device_id           24 t
//   12 n                   28 block_size
// followed by stripe_count records of d primary then n-1 secondary blocks.

inline constexpr std::size_t kHeaderSize = 40;
inline constexpr std::array<std::uint8_t, 4> kMagic{'X', 'M', 'B', 'C'};

struct ShareHeader {
  std::uint32_t format_version = kFormatVersion;
  std::uint32_t device_id = 0;
  std::uint32_t n = 0, k = 0, d = 0, t = 0;
  std::uint32_t block_size = 0;
  std::uint64_t stripe_count = 0;

  friend bool operator==(const ShareHeader&, const ShareHeader&) = default;
};

inline std::array<std::uint8_t, kHeaderSize> encode_header(const ShareHeader& h) {
  std::array<std::uint8_t, kHeaderSize> out{};
  std::copy(kMagic.begin(), kMagic.end(), out.begin());
  auto put = [&](std::size_t off, std::uint64_t v, std::size_t width) {
    for (std::size_t i = 0; i < width; ++i) out[off + i] = static_cast<std::uint8_t>(v >> (8 * i));
  };
  put(4, h.format_version, 4);
  put(8, h.device_id, 4);
  put(12, h.n, 4);
  put(16, h.k, 4);
  put(20, h.d, 4);
  put(24, h.t, 4);
  put(28, h.block_size, 4);
  put(32, h.stripe_count, 8);
  return out;
}

inline ShareHeader decode_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize) throw Error(Errc::CorruptShare, "truncated header");
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) throw Error(Errc::CorruptShare, "bad magic");
  auto get = [&](std::size_t off, std::size_t width) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(bytes[off + i]) << (8 * i);
    return v;
  };
  ShareHeader h;
  h.format_version = static_cast<std::uint32_t>(get(4, 4));
  h.device_id = static_cast<std::uint32_t>(get(8, 4));
  h.n = static_cast<std::uint32_t>(get(12, 4));
  h.k = static_cast<std::uint32_t>(get(16, 4));
  h.d = static_cast<std::uint32_t>(get(20, 4));
  h.t = static_cast<std::uint32_t>(get(24, 4));
  h.block_size = static_cast<std::uint32_t>(get(28, 4));
  h.stripe_count = get(32, 8);
  return h;
}

inline ShareHeader header_for(const Manifest& m, DeviceId id) {
  ShareHeader h;
  h.device_id = static_cast<std::uint32_t>(id);
  h.n = static_cast<std::uint32_t>(m.n);
  h.k = static_cast<std::uint32_t>(m.k);
  h.d = static_cast<std::uint32_t>(m.d);
  h.t = static_cast<std::uint32_t>(m.t);
  h.block_size = static_cast<std::uint32_t>(m.block_size);
  h.stripe_count = m.stripe_count;
  return h;
}

inline fs::path share_path(const fs::path& dir, DeviceId id) {
  return dir / ("share_" + std::to_string(id) + ".xmbc");
}

inline std::uint64_t share_file_size(const Manifest& m) {
  return kHeaderSize + m.stripe_count * m.params().alpha * m.block_size;
}

/// Random access to the stripes of one share file, validated against the manifest.
class ShareReader {
 public:
  ShareReader(const fs::path& path, const Manifest& manifest, DeviceId expected_id)
      : in_(path, std::ios::binary), manifest_(manifest), params_(manifest.params()) {
    if (!in_) throw Error(Errc::IoError, "cannot open " + path.string());
    std::array<std::uint8_t, kHeaderSize> raw{};
    in_.read(reinterpret_cast<char*>(raw.data()), raw.size());
    if (in_.gcount() != static_cast<std::streamsize>(raw.size())) {
      throw Error(Errc::CorruptShare, path.string() + ": truncated header");
    }
    const ShareHeader h = decode_header(raw);
    if (h.device_id != expected_id) {
      throw Error(Errc::CorruptShare, path.string() + ": header names device " + std::to_string(h.device_id));
    }
    if (h != header_for(manifest, expected_id)) {
      throw Error(Errc::CorruptShare, path.string() + ": header disagrees with manifest");
    }
    if (fs::file_size(path) != share_file_size(manifest)) {
      throw Error(Errc::CorruptShare, path.string() + ": unexpected file length");
    }
    id_ = expected_id;
  }

  DeviceShare read_stripe(std::uint64_t stripe) {
    const std::size_t bs = manifest_.block_size;
    in_.seekg(static_cast<std::streamoff>(kHeaderSize + stripe * params_.alpha * bs));
    DeviceShare s;
    s.device_id = id_;
    auto read_block = [&] {
      Block b(bs);
      in_.read(reinterpret_cast<char*>(b.data()), static_cast<std::streamsize>(bs));
      if (in_.gcount() != static_cast<std::streamsize>(bs)) throw Error(Errc::CorruptShare, "short read");
      return b;
    };
    for (std::size_t i = 0; i < params_.d; ++i) s.primary.push_back(read_block());
    for (std::size_t m = 1; m < params_.n; ++m) s.secondary.push_back(read_block());
    return s;
  }

 private:
  std::ifstream in_;
  Manifest manifest_;
  CodeParams params_;
  DeviceId id_ = 0;
};

class ShareWriter {
 public:
  ShareWriter(const fs::path& path, const ShareHeader& header) : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw Error(Errc::IoError, "cannot create " + path.string());
    const auto raw = encode_header(header);
    out_.write(reinterpret_cast<const char*>(raw.data()), raw.size());
  }

  void append(const DeviceShare& s) {
    for (const Block& b : s.primary) write(b);
    for (const Block& b : s.secondary) write(b);
  }

  void close() {
    out_.close();
    if (!out_) throw Error(Errc::IoError, "write failed");
  }

 private:
  void write(const Block& b) {
    out_.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
    if (!out_) throw Error(Errc::IoError, "write failed");
  }

  std::ofstream out_;
};

}  // namespace xmbcr::storage
