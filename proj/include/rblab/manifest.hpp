// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rblab {

inline constexpr std::string_view kToolVersion = "0.1.0";

// 64-bit FNV-1a fingerprint of a byte string; used to tie every output
// table to the exact config file that produced it.
std::uint64_t fnv1a64(std::string_view bytes);

// Provenance header stamped ahead of every table the tool writes, one
// '# key=value' line per entry, in insertion order. Values must be free of
// newlines. Wall-clock timing is reported on stderr rather than here so
// that reruns with identical inputs emit byte-identical files.
class RunManifest {
 public:
  explicit RunManifest(std::string_view command);

  void add(std::string_view key, std::string_view value);
  void add(std::string_view key, long long value);
  void add_u64(std::string_view key, std::uint64_t value);
  // 16 lowercase hex digits, zero padded.
  void add_hash(std::string_view key, std::uint64_t value);

  void write(std::ostream& os) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace rblab
