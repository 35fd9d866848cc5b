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

#include "casimir/random_states.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "casimir/error.hpp"

namespace casimir {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t &hi, std::uint32_t &lo) noexcept {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

// Uniform on the open interval (0, 1) from 53 random bits.
inline double to_unit_open(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Block Philox4x32::generate(Block ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return ctr;
}

void MeasureSpec::validate() const {
    if (n == 0 || k == 0) {
        throw Error(ErrorCode::Validation, "measure dimensions must be >= 1");
    }
    if (label == MeasureLabel::HilbertSchmidt && k != n) {
        throw Error(ErrorCode::Validation,
                    "Hilbert-Schmidt measure requires k == n (got n=" + std::to_string(n) + ", k=" + std::to_string(k) + ")");
    }
}

KeyedNormalSource::KeyedNormalSource(SampleStream stream, std::uint32_t attempt) noexcept
    : key_{static_cast<std::uint32_t>(stream.master_seed), static_cast<std::uint32_t>(stream.master_seed >> 32)},
      counter_{static_cast<std::uint32_t>(stream.sample_index), static_cast<std::uint32_t>(stream.sample_index >> 32), 0u,
               attempt} {
}

std::array<double, 2> KeyedNormalSource::next_pair() noexcept {
    const Philox4x32::Block bits = Philox4x32::generate(counter_, key_);
    ++counter_[2];
    const double u1 = to_unit_open(bits[0], bits[1]);
    const double u2 = to_unit_open(bits[2], bits[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

ComplexMatrix sample_ginibre(std::size_t n, std::size_t k, SampleStream stream, std::uint32_t attempt) {
    ComplexMatrix g(n, k);
    KeyedNormalSource source(stream, attempt);
    for (auto &entry : g.data()) {
        const auto [re, im] = source.next_pair();
        entry = Complex(re, im);
    }
    return g;
}

DensityMatrix sample_state(const MeasureSpec &measure, SampleStream stream) {
    for (std::uint32_t attempt = 0; attempt < 2; ++attempt) {
        ComplexMatrix rho = gram(sample_ginibre(measure.n, measure.k, stream, attempt));
        const double tr = rho.trace().real();
        if (tr > 0.0 && std::isfinite(tr)) {
            rho *= 1.0 / tr;
            return DensityMatrix::trusted(std::move(rho));
        }
    }
    throw Error(ErrorCode::DegenerateSample, "Ginibre draw has zero trace after one redraw");
}

}  // namespace casimir
