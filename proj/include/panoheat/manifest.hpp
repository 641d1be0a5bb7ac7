#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "panoheat/errors.hpp"

namespace panoheat {

// FNV-1a 64-bit over raw bytes. Integrity marker for run manifests, not a
// cryptographic digest.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string digest_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for digest: " + path.string());
  char buf[1 << 16];
  std::uint64_t h = 0xcbf29ce484222325ull;
  while (is) {
    is.read(buf, sizeof buf);
    h = fnv1a64(buf, static_cast<std::size_t>(is.gcount()), h);
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx",
                static_cast<unsigned long long>(h));
  return out;
}

// Write-then-rename so a manifest is either absent or complete.
inline void write_json_atomic(const std::filesystem::path& path,
                              const nlohmann::json& j) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp);
    if (!os) throw IoError("cannot open for writing: " + tmp.string());
    os << j.dump(2) << "\n";
    if (!os) throw IoError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace panoheat
