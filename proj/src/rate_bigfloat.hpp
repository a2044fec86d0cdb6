// SPDX-License-Identifier: Apache-2.0
//
// Internal interface to the multiple-precision evaluation of the
// closed-form rate sum. Kept out of the public headers so nothing else
// picks up a dependency on the big-float machinery.

#pragma once

#include "rblab/analytic.hpp"

namespace rblab::detail {

// Evaluates the closed-form individual sum rate in adaptive multiple
// precision and returns it in bits per channel use. The caller has already
// validated the distribution and checked k0 against the closed-form cap.
// The evaluation raises its working precision until the measured
// cancellation of every partial sum leaves at least eighteen significant
// digits in the result, so the conversion to double is exact for all
// practical purposes.
double closed_rate_mpfr(const SinrDistribution& d, long long k0);

}  // namespace rblab::detail
