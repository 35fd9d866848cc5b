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
#include <map>
#include <optional>
#include <vector>

#include "casimir/matrix_core.hpp"

namespace casimir {

/// Generalized Gell-Mann basis of su(d), normalized tr(l_a l_b) = 2 delta_ab.
///
/// Order is frozen: the d(d-1)/2 symmetric generators E_jk + E_kj for
/// j < k in lexicographic order, then the antisymmetric -i E_jk + i E_kj in
/// the same pair order, then the d-1 diagonal generators
/// sqrt(2/(l(l+1))) diag(1, ..., 1, -l, 0, ...) for l = 1..d-1.
class GeneratorBasis {
   public:
    enum class Kind { Symmetric, Antisymmetric, Diagonal };

    struct Entry {
        std::uint16_t row;
        std::uint16_t col;
        Complex value;
    };

    std::size_t d() const noexcept {
        return d_;
    }
    std::size_t size() const noexcept {
        return generators_.size();
    }
    const ComplexMatrix &operator[](std::size_t a) const {
        return generators_[a];
    }
    Kind kind(std::size_t a) const {
        return kinds_[a];
    }
    /// Nonzero entries of generator a.
    const std::vector<Entry> &sparse(std::size_t a) const {
        return sparse_[a];
    }

   private:
    friend GeneratorBasis su_basis(std::size_t d);

    std::size_t d_ = 0;
    std::vector<ComplexMatrix> generators_;
    std::vector<Kind> kinds_;
    std::vector<std::vector<Entry>> sparse_;
};

/// Throws UnsupportedDimension unless 2 <= d <= 8.
GeneratorBasis su_basis(std::size_t d);

/// Position in su_basis(3) of the textbook Gell-Mann matrix lambda_label,
/// label in 1..8.
std::size_t gell_mann_position(std::size_t label);

/// Generalized Bloch vector n_a = tr(rho l_a) with its normalized radius.
struct CoherenceVector {
    std::size_t d = 0;
    std::vector<double> n;
    double radius = 0.0;

    /// Quadratic Casimir on the pure-state-normalized scale: radius^2.
    double c2() const noexcept {
        return radius * radius;
    }
    /// n / sqrt(2(d-1)/d); unit length for pure states.
    std::vector<double> unit_scaled() const;
};

/// Norm of a pure-state coherence vector, sqrt(2(d-1)/d).
double pure_state_norm(std::size_t d);

/// Throws ShapeMismatch when rho.dim() != basis.d().
CoherenceVector coherence_vector(const DensityMatrix &rho, const GeneratorBasis &basis);

/// Totally symmetric structure constants d_abc = tr({l_a, l_b} l_c) / 4,
/// stored sparsely under the sorted index triple.
class DTensor {
   public:
    using Index = std::array<std::uint16_t, 3>;

    std::size_t d() const noexcept {
        return d_;
    }
    /// Any index order; symmetric lookup.
    double at(std::size_t a, std::size_t b, std::size_t c) const;
    const std::map<Index, double> &entries() const noexcept {
        return entries_;
    }

   private:
    friend DTensor d_tensor(const GeneratorBasis &basis);

    std::size_t d_ = 0;
    std::map<Index, double> entries_;
    // Flattened (value * permutation multiplicity, a, b, c) for the cubic form.
    struct Term {
        double weight;
        std::uint16_t a, b, c;
    };
    std::vector<Term> terms_;

    friend double cubic_casimir(const CoherenceVector &v, const DTensor &dt);
};

DTensor d_tensor(const GeneratorBasis &basis);

/// sum_abc d_abc u_a u_b u_c on the unit-scaled vector u (pure qutrit
/// states give |c3| = 1/sqrt(3)). Throws ShapeMismatch on a dimension
/// mismatch.
double cubic_casimir(const CoherenceVector &v, const DTensor &dt);

/// sum_ij c_ij^2 with c_ij = tr(rho sigma_i (x) sigma_j); requires a 4x4 state.
double fano_correlation_invariant(const DensityMatrix &rho);

/// Per-sample invariants of a bipartite state.
struct InvariantRecord {
    double r_a = 0.0;
    double r_b = 0.0;
    double c2_a = 0.0;
    double c2_b = 0.0;
    std::optional<double> c3_b;  // dim_b == 3
    std::optional<double> c002;  // shape (2, 2)
    bool ppt = false;
};

/// Bases and d-tensor for one bipartition, built once and shared read-only
/// across workers.
class RecordContext {
   public:
    explicit RecordContext(Bipartition part);

    Bipartition partition() const noexcept {
        return part_;
    }

    /// Radii, Casimirs and PPT flag of rho. The flag uses the Cholesky test
    /// with tolerance tol.
    InvariantRecord record(const DensityMatrix &rho, double tol = kPptTolerance) const;

   private:
    Bipartition part_;
    std::optional<GeneratorBasis> basis_a_;
    std::optional<GeneratorBasis> basis_b_;
    std::optional<DTensor> dtensor_b_;
};

InvariantRecord record(const DensityMatrix &rho, Bipartition part, double tol = kPptTolerance);

}  // namespace casimir
