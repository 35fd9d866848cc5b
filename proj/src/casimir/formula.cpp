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

#include "casimir/formula.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "casimir/error.hpp"

namespace casimir::formula {

namespace {

constexpr std::size_t kMaxTerms = 100000;

// Positive arguments only, so the sign output of lgamma_r is always +1.
double log_gamma(double x) {
    int sign = 0;
    return ::lgamma_r(x, &sign);
}

}  // namespace

double q_poly(double alpha) noexcept {
    return ((((185000.0 * alpha + 779750.0) * alpha + 1289125.0) * alpha + 1042015.0) * alpha + 410694.0) * alpha +
           63000.0;
}

double f_term(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw Error(ErrorCode::DomainError, "f_term needs a finite alpha > 0, got " + std::to_string(alpha));
    }
    const double log_ratio = (-4.0 * alpha - 6.0) * std::numbers::ln2 + log_gamma(3.0 * alpha + 2.5) +
                             log_gamma(5.0 * alpha + 2.0) - std::log(3.0) - log_gamma(alpha + 1.0) -
                             log_gamma(2.0 * alpha + 3.0) - log_gamma(5.0 * alpha + 6.5);
    return q_poly(alpha) * std::exp(log_ratio);
}

SeriesValue p_alpha(double alpha, double tol) {
    if (!(tol > 0.0)) {
        throw Error(ErrorCode::DomainError, "p_alpha needs tol > 0");
    }
    SeriesValue out;
    for (std::size_t i = 0; i < kMaxTerms; ++i) {
        const double term = f_term(alpha + static_cast<double>(i));
        out.value += term;
        ++out.terms;
        if (term < tol * out.value) {
            break;
        }
    }
    return out;
}

}  // namespace casimir::formula
