#pragma once

#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>

#include "cfh/error.hpp"
#include "cfh/io.hpp"

namespace cfh::ingestion {

namespace detail {

inline std::string inflate_stream(std::string_view data, int window_bits, const std::string& origin) {
  z_stream zs{};
  if (inflateInit2(&zs, window_bits) != Z_OK) throw Error(ErrorKind::UnreadableStream, "zlib init failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  std::string out;
  char buf[1 << 16];
  int rc = Z_OK;
  while (true) {
    zs.next_out = reinterpret_cast<Bytef*>(buf);
    zs.avail_out = sizeof buf;
    rc = inflate(&zs, Z_NO_FLUSH);
    out.append(buf, sizeof buf - zs.avail_out);
    if (rc == Z_STREAM_END) {
      // Concatenated gzip members.
      if (window_bits > MAX_WBITS && zs.avail_in > 0) {
        inflateReset(&zs);
        continue;
      }
      break;
    }
    if (rc != Z_OK) break;
    if (zs.avail_in == 0 && zs.avail_out != 0) break;
  }
  inflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error(ErrorKind::UnreadableStream, "corrupt compressed data in " + origin);
  return out;
}

inline std::uint32_t le32(const char* p) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  return v;
}
inline std::uint16_t le16(const char* p) {
  std::uint16_t v;
  std::memcpy(&v, p, 2);
  return v;
}

}  // namespace detail

inline std::string gunzip(std::string_view data, const std::string& origin = "<memory>") {
  return detail::inflate_stream(data, MAX_WBITS + 16, origin);
}

/// Extracts the first member of a zip archive (GDELT ships one CSV per zip).
inline std::string unzip_first(std::string_view data, const std::string& origin = "<memory>") {
  constexpr std::uint32_t kLocalHeader = 0x04034b50;
  if (data.size() < 30 || detail::le32(data.data()) != kLocalHeader)
    throw Error(ErrorKind::UnreadableStream, "not a zip archive: " + origin);
  const char* h = data.data();
  const auto method = detail::le16(h + 8);
  const auto compressed_size = detail::le32(h + 18);
  const auto name_len = detail::le16(h + 26);
  const auto extra_len = detail::le16(h + 28);
  const std::size_t offset = 30u + name_len + extra_len;
  if (offset > data.size()) throw Error(ErrorKind::UnreadableStream, "truncated zip header: " + origin);
  auto payload = data.substr(offset);
  if (method == 0) return std::string(payload.substr(0, compressed_size));
  if (method == 8) return detail::inflate_stream(payload, -MAX_WBITS, origin);
  throw Error(ErrorKind::UnreadableStream, "unsupported zip compression method in " + origin);
}

/// Reads a file, transparently decompressing `.gz` and `.zip` by magic bytes.
inline std::string read_maybe_compressed(const std::filesystem::path& path) {
  std::string raw;
  try {
    raw = io::read_file(path);
  } catch (const Error&) {
    throw Error(ErrorKind::UnreadableStream, "cannot read " + path.string());
  }
  if (raw.size() >= 2 && static_cast<unsigned char>(raw[0]) == 0x1f && static_cast<unsigned char>(raw[1]) == 0x8b)
    return gunzip(raw, path.string());
  if (raw.size() >= 4 && detail::le32(raw.data()) == 0x04034b50) return unzip_first(raw, path.string());
  return raw;
}

}  // namespace cfh::ingestion
