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

// Dense complex-matrix kernel for small bipartite density matrices.
//
// Composite index convention: the row/column index of an (m, n) bipartite
// space is i_A * n + i_B, so subsystem A is the slow index everywhere.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <vector>

namespace casimir {

using Complex = std::complex<double>;

/// PPT classification tolerance: a partial transpose is "nonnegative" when
/// its smallest eigenvalue is at least -kPptTolerance.
inline constexpr double kPptTolerance = 1e-13;

/// Row-major dense complex matrix.
class ComplexMatrix {
   public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {
    }
    explicit ComplexMatrix(std::size_t dim) : ComplexMatrix(dim, dim) {
    }

    static ComplexMatrix identity(std::size_t dim);
    static ComplexMatrix diagonal(std::span<const double> values);
    static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);

    std::size_t rows() const noexcept {
        return rows_;
    }
    std::size_t cols() const noexcept {
        return cols_;
    }
    bool is_square() const noexcept {
        return rows_ == cols_;
    }
    /// Side length of a square matrix.
    std::size_t dim() const noexcept {
        return rows_;
    }

    Complex &operator()(std::size_t r, std::size_t c) noexcept {
        return data_[r * cols_ + c];
    }
    const Complex &operator()(std::size_t r, std::size_t c) const noexcept {
        return data_[r * cols_ + c];
    }

    std::span<Complex> data() noexcept {
        return data_;
    }
    std::span<const Complex> data() const noexcept {
        return data_;
    }

    ComplexMatrix adjoint() const;
    ComplexMatrix transpose() const;
    Complex trace() const;
    double frobenius_norm() const;
    /// Largest |a_ij - b_ij|; matrices must have equal shape.
    double max_abs_diff(const ComplexMatrix &other) const;
    /// Largest |a_ij - conj(a_ji)|.
    double hermiticity_defect() const;

    ComplexMatrix &operator+=(const ComplexMatrix &rhs);
    ComplexMatrix &operator-=(const ComplexMatrix &rhs);
    ComplexMatrix &operator*=(Complex scale);

    friend ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix &rhs) {
        return lhs += rhs;
    }
    friend ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix &rhs) {
        return lhs -= rhs;
    }
    friend ComplexMatrix operator*(ComplexMatrix lhs, Complex scale) {
        return lhs *= scale;
    }
    friend ComplexMatrix operator*(Complex scale, ComplexMatrix rhs) {
        return rhs *= scale;
    }
    friend ComplexMatrix operator*(const ComplexMatrix &lhs, const ComplexMatrix &rhs);

    bool operator==(const ComplexMatrix &) const = default;

   private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b);

/// G * G^dagger, exploiting Hermitian symmetry of the result.
ComplexMatrix gram(const ComplexMatrix &g);

/// Hermitian, unit-trace, positive-semidefinite state.
class DensityMatrix {
   public:
    /// Validates Hermiticity (1e-12), unit trace (1e-12) and numerical PSD
    /// (minimum eigenvalue >= -1e-10). Throws Validation on failure.
    static DensityMatrix from_matrix(ComplexMatrix m);
    /// Skips validation; for states produced by construction (sampling,
    /// partial traces of valid states).
    static DensityMatrix trusted(ComplexMatrix m) noexcept {
        return DensityMatrix(std::move(m));
    }
    static DensityMatrix maximally_mixed(std::size_t dim);
    /// |psi><psi| / <psi|psi>.
    static DensityMatrix pure(std::span<const Complex> psi);

    std::size_t dim() const noexcept {
        return m_.dim();
    }
    const ComplexMatrix &matrix() const noexcept {
        return m_;
    }
    const Complex &operator()(std::size_t r, std::size_t c) const noexcept {
        return m_(r, c);
    }

   private:
    explicit DensityMatrix(ComplexMatrix m) noexcept : m_(std::move(m)) {
    }
    ComplexMatrix m_;
};

/// (m, n) factorization of a composite dimension.
struct Bipartition {
    std::size_t dim_a = 1;
    std::size_t dim_b = 1;

    std::size_t dim() const noexcept {
        return dim_a * dim_b;
    }
    bool operator==(const Bipartition &) const = default;
};

enum class Subsystem { A, B };

/// Real eigenvalues in ascending order.
struct Spectrum {
    std::vector<double> values;

    double min() const {
        return values.front();
    }
    double max() const {
        return values.back();
    }
    double sum() const;
};

/// All eigenvalues of a Hermitian matrix via cyclic complex Jacobi rotations.
/// Throws NonHermitianInput when |m_ij - conj(m_ji)| exceeds
/// 1e-10 * max(1, max|m_ij|).
Spectrum hermitian_eigenvalues(const ComplexMatrix &m);

/// Partial transpose on the given subsystem. Throws ShapeMismatch when
/// part.dim() differs from the matrix side.
ComplexMatrix partial_transpose(const ComplexMatrix &rho, Bipartition part, Subsystem sub);
inline ComplexMatrix partial_transpose(const DensityMatrix &rho, Bipartition part, Subsystem sub = Subsystem::B) {
    return partial_transpose(rho.matrix(), part, sub);
}

ComplexMatrix partial_trace(const ComplexMatrix &rho, Bipartition part, Subsystem keep);
DensityMatrix partial_trace(const DensityMatrix &rho, Bipartition part, Subsystem keep);

/// tr(M^2) for Hermitian M, i.e. the squared Frobenius norm.
double trace_of_square(const ComplexMatrix &m);
inline double purity(const DensityMatrix &rho) {
    return trace_of_square(rho.matrix());
}

struct PptResult {
    bool ppt = false;
    double min_eig = 0.0;
};

/// Smallest eigenvalue of rho^{T_B} and whether it is >= -tol.
PptResult is_ppt(const DensityMatrix &rho, Bipartition part, double tol = kPptTolerance);

/// True iff m + shift*I admits a Cholesky factorization with strictly positive
/// pivots, i.e. min_eig(m) > -shift. m must be Hermitian.
bool is_positive_definite(const ComplexMatrix &m, double shift);

/// Same decision as is_ppt(...).ppt, computed by a Cholesky attempt on the
/// shifted partial transpose instead of a full eigensolve.
bool ppt_flag(const DensityMatrix &rho, Bipartition part, double tol = kPptTolerance);

/// Text fixture format: first line dim, then dim^2 lines "re im", row-major.
ComplexMatrix read_matrix_text(std::istream &in);
void write_matrix_text(std::ostream &out, const ComplexMatrix &m);

}  // namespace casimir
