// Copyright 2026 The HESIM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Standard normal tail probability and its inverse.

namespace hesim::numerics {

/// Q(x) = P(Z > x) for a standard normal Z, computed as erfc(x / sqrt(2)) / 2.
/// Throws DomainError for non-finite x.
double q_function(double x);

/// Inverse of q_function on the open interval (0, 1).
///
/// Starts from a rational approximation of the normal quantile and refines it
/// with Newton steps on q_function itself, so the round trip error is limited
/// by erfc rather than by the approximation. Throws DomainError for p outside
/// (0, 1); callers clip empirical frequencies before inverting.
double q_inverse(double p);

/// Standard normal density.
double normal_pdf(double x);

}  // namespace hesim::numerics
