// Copyright 2026 The casimir-mc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>

namespace casimir::formula {

/// 185000 a^5 + 779750 a^4 + 1289125 a^3 + 1042015 a^2 + 410694 a + 63000.
double q_poly(double alpha) noexcept;

/// Telescoping term f(alpha) = P(alpha) - P(alpha + 1):
///
///   q(a) 2^(-4a-6) G(3a+5/2) G(5a+2) / (3 G(a+1) G(2a+3) G(5a+13/2))
///
/// with every Gamma factor taken in log space. Throws DomainError for
/// alpha <= 0.
double f_term(double alpha);

struct SeriesValue {
    double value = 0.0;
    std::size_t terms = 0;
};

inline constexpr double kDefaultSeriesTolerance = 1e-16;

/// P(alpha) = sum_{i>=0} f(alpha + i), stopping after the first term smaller
/// than tol times the running sum. Throws DomainError for alpha <= 0 or
/// tol <= 0.
SeriesValue p_alpha(double alpha, double tol = kDefaultSeriesTolerance);

}  // namespace casimir::formula
