// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

// Shared Philox4x32-10 constants (Salmon et al. 2011). Private to the kernel
// translation units; everything else goes through rblab::kern.
namespace rblab::kern::detail {

inline constexpr uint32_t philox_m0 = 0xD2511F53u;
inline constexpr uint32_t philox_m1 = 0xCD9E8D57u;
inline constexpr uint32_t weyl0 = 0x9E3779B9u;
inline constexpr uint32_t weyl1 = 0xBB67AE85u;
inline constexpr int philox_rounds = 10;

}  // namespace rblab::kern::detail
