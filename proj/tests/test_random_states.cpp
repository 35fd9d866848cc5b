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

#include <algorithm>
#include <cmath>

#include "gtest/gtest.h"

#include "casimir/error.hpp"
#include "casimir/statistics.hpp"

using namespace casimir;

TEST(philox, known_answers) {
    using B = Philox4x32::Block;
    EXPECT_EQ(Philox4x32::generate({0, 0, 0, 0}, {0, 0}), (B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(Philox4x32::generate({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}),
              (B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(Philox4x32::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
              (B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(measure_spec, validation) {
    EXPECT_NO_THROW(MeasureSpec::hilbert_schmidt(6).validate());
    EXPECT_EQ(MeasureSpec::induced(6, 6).label, MeasureLabel::HilbertSchmidt);
    EXPECT_EQ(MeasureSpec::induced(6, 9).label, MeasureLabel::Induced);
    EXPECT_THROW((MeasureSpec{0, 1, MeasureLabel::Induced}).validate(), Error);
    EXPECT_THROW((MeasureSpec{3, 0, MeasureLabel::Induced}).validate(), Error);
}

TEST(random_states, gaussian_entry_moments) {
    constexpr int kSamples = 200000;
    double sum_re = 0, sum_im = 0, sum_abs2 = 0, sum_abs4 = 0;
    for (std::uint64_t i = 0; i < kSamples; ++i) {
        const Complex z = sample_ginibre(1, 1, {99, i})(0, 0);
        sum_re += z.real();
        sum_im += z.imag();
        const double a2 = std::norm(z);
        sum_abs2 += a2;
        sum_abs4 += a2 * a2;
    }
    // Each part is N(0, 1); |z|^2 has mean 2 and variance 4.
    const double se_mean = 1.0 / std::sqrt(double(kSamples));
    EXPECT_LT(std::abs(sum_re / kSamples), 4 * se_mean);
    EXPECT_LT(std::abs(sum_im / kSamples), 4 * se_mean);
    EXPECT_NEAR(sum_abs2 / kSamples, 2.0, 0.02);
    EXPECT_NEAR(sum_abs4 / kSamples, 8.0, 0.2);
}

TEST(random_states, ginibre_entry_variance_6x9) {
    double sum = 0;
    std::size_t count = 0;
    for (std::uint64_t i = 0; i < 2000; ++i) {
        const auto g = sample_ginibre(6, 9, {123, i});
        ASSERT_EQ(g.rows(), 6u);
        ASSERT_EQ(g.cols(), 9u);
        for (const auto &z : g.data()) {
            sum += std::norm(z);
            ++count;
        }
    }
    // Var |z|^2 = 4, so the standard error is 2 / sqrt(count).
    EXPECT_LT(std::abs(sum / double(count) - 2.0), 4 * 2.0 / std::sqrt(double(count)));
}

TEST(random_states, deterministic_per_index) {
    const auto measure = MeasureSpec::hilbert_schmidt(6);
    EXPECT_EQ(sample_state(measure, {5, 17}).matrix(), sample_state(measure, {5, 17}).matrix());
    EXPECT_NE(sample_state(measure, {5, 17}).matrix(), sample_state(measure, {5, 18}).matrix());
    EXPECT_NE(sample_state(measure, {6, 17}).matrix(), sample_state(measure, {5, 17}).matrix());
}

TEST(random_states, states_are_valid) {
    for (std::uint64_t i = 0; i < 500; ++i) {
        const std::size_t n = 2 + i % 7;
        const auto rho = sample_state(MeasureSpec::induced(n, 1 + i % 10), {8, i});
        EXPECT_NO_THROW(DensityMatrix::from_matrix(rho.matrix()));
    }
}

TEST(random_states, induced_rank) {
    // K < N gives rank K.
    const auto rho = sample_state(MeasureSpec::induced(6, 2), {1, 1});
    const auto spectrum = hermitian_eigenvalues(rho.matrix());
    std::size_t nonzero = 0;
    for (double v : spectrum.values) {
        nonzero += v > 1e-12;
    }
    EXPECT_EQ(nonzero, 2u);
    EXPECT_NEAR(purity(sample_state(MeasureSpec::induced(6, 1), {1, 2})), 1.0, 1e-13);
}

TEST(random_states, mean_purity_hs_6) {
    // E tr rho^2 = (N + K) / (N K + 1) = 12 / 37 for N = K = 6.
    constexpr std::uint64_t kSamples = 1'000'000;
    double sum = 0, sum2 = 0;
    const auto measure = MeasureSpec::hilbert_schmidt(6);
    for (std::uint64_t i = 0; i < kSamples; ++i) {
        const double p = purity(sample_state(measure, {2024, i}));
        sum += p;
        sum2 += p * p;
    }
    const double mean = sum / kSamples;
    const double se = std::sqrt((sum2 / kSamples - mean * mean) / kSamples);
    EXPECT_LT(std::abs(mean - 12.0 / 37.0), 3 * se) << "mean=" << mean << " se=" << se;
}

TEST(random_states, unitary_invariance) {
    // Conjugating HS states by a fixed unitary leaves the distribution of rho_00 and Re rho_01 unchanged.
    const auto u_gen = sample_ginibre(3, 3, {777, 0});
    // Gram-Schmidt on the columns.
    ComplexMatrix u(3);
    for (std::size_t c = 0; c < 3; ++c) {
        std::vector<Complex> v(3);
        for (std::size_t r = 0; r < 3; ++r) {
            v[r] = u_gen(r, c);
        }
        for (std::size_t p = 0; p < c; ++p) {
            Complex dot = 0;
            for (std::size_t r = 0; r < 3; ++r) {
                dot += std::conj(u(r, p)) * v[r];
            }
            for (std::size_t r = 0; r < 3; ++r) {
                v[r] -= dot * u(r, p);
            }
        }
        double norm = 0;
        for (auto &z : v) {
            norm += std::norm(z);
        }
        for (std::size_t r = 0; r < 3; ++r) {
            u(r, c) = v[r] / std::sqrt(norm);
        }
    }
    ASSERT_LT((u * u.adjoint()).max_abs_diff(ComplexMatrix::identity(3)), 1e-14);

    // Two independent samples binned into one histogram each; hits mark the rotated sample.
    const auto measure = MeasureSpec::hilbert_schmidt(3);
    HistogramPair diag(Axis{AxisLabel::r_A, 0.0, 1.0, 20});
    HistogramPair offdiag(Axis{AxisLabel::r_A, -0.5, 0.5, 20});
    constexpr std::uint64_t kSamples = 100000;
    for (std::uint64_t i = 0; i < kSamples; ++i) {
        const auto plain = sample_state(measure, {31, i}).matrix();
        const auto rotated = u * sample_state(measure, {32, i}).matrix() * u.adjoint();
        diag.accumulate(plain(0, 0).real(), false);
        diag.accumulate(rotated(0, 0).real(), true);
        offdiag.accumulate(plain(0, 1).real(), false);
        offdiag.accumulate(rotated(0, 1).real(), true);
    }
    const auto d = flatness_test(diag, 50, false);
    const auto o = flatness_test(offdiag, 50, false);
    EXPECT_GT(d.p_value, 0.01) << "chi2=" << d.chi2;
    EXPECT_GT(o.p_value, 0.01) << "chi2=" << o.chi2;
}
