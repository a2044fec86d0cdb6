// SPDX-License-Identifier: Apache-2.0
#include "rblab/manifest.hpp"

#include <cstdio>
#include <stdexcept>

namespace rblab {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

RunManifest::RunManifest(std::string_view command) {
  add("tool", std::string("rblab ") + std::string(kToolVersion));
  add("command", command);
}

void RunManifest::add(std::string_view key, std::string_view value) {
  if (value.find('\n') != std::string_view::npos)
    throw std::invalid_argument("manifest value for '" + std::string(key) +
                                "' contains a newline");
  entries_.emplace_back(std::string(key), std::string(value));
}

void RunManifest::add(std::string_view key, long long value) {
  add(key, std::to_string(value));
}

void RunManifest::add_u64(std::string_view key, std::uint64_t value) {
  add(key, std::to_string(value));
}

void RunManifest::add_hash(std::string_view key, std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(value));
  add(key, buf);
}

void RunManifest::write(std::ostream& os) const {
  for (const auto& [key, value] : entries_) {
    os << "# " << key << "=" << value << "\n";
  }
}

}  // namespace rblab
