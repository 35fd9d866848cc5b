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

#include <array>
#include <cstddef>
#include <cstdint>

#include "casimir/matrix_core.hpp"

namespace casimir {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Pure
/// function of (key, counter); no internal state.
struct Philox4x32 {
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Block generate(Block counter, Key key) noexcept;
};

/// Identifies one random sample: the state for (master_seed, sample_index)
/// is the same no matter which worker draws it.
struct SampleStream {
    std::uint64_t master_seed = 0;
    std::uint64_t sample_index = 0;
};

enum class MeasureLabel { HilbertSchmidt, Induced };

/// Induced measure on n x n states with an ancilla of dimension k;
/// Hilbert-Schmidt is the k == n case.
struct MeasureSpec {
    std::size_t n = 1;
    std::size_t k = 1;
    MeasureLabel label = MeasureLabel::HilbertSchmidt;

    static MeasureSpec hilbert_schmidt(std::size_t n) {
        return {n, n, MeasureLabel::HilbertSchmidt};
    }
    static MeasureSpec induced(std::size_t n, std::size_t k) {
        return {n, k, k == n ? MeasureLabel::HilbertSchmidt : MeasureLabel::Induced};
    }

    /// Throws Validation if n or k is zero, or the label is HilbertSchmidt
    /// with k != n.
    void validate() const;
    bool operator==(const MeasureSpec &) const = default;
};

/// Stream of standard normal deviates keyed on a SampleStream. Each Philox
/// block yields two uniforms and, via Box-Muller, two normals.
class KeyedNormalSource {
   public:
    explicit KeyedNormalSource(SampleStream stream, std::uint32_t attempt = 0) noexcept;

    /// Two independent N(0, 1) deviates.
    std::array<double, 2> next_pair() noexcept;

   private:
    Philox4x32::Key key_;
    Philox4x32::Block counter_;
};

/// n x k matrix of independent complex Gaussians with N(0, 1) real and
/// imaginary parts. Deterministic in (stream, attempt).
ComplexMatrix sample_ginibre(std::size_t n, std::size_t k, SampleStream stream, std::uint32_t attempt = 0);

/// rho = G G^dagger / tr(G G^dagger) with G = sample_ginibre(n, k). Redraws
/// once on a zero trace, then throws DegenerateSample.
DensityMatrix sample_state(const MeasureSpec &measure, SampleStream stream);

}  // namespace casimir
