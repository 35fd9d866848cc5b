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

#include "casimir/matrix_core.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "casimir/error.hpp"

namespace casimir {

namespace {

void require_square(const ComplexMatrix &m, const char *what) {
    if (!m.is_square()) {
        throw Error(ErrorCode::ShapeMismatch, std::string(what) + " requires a square matrix");
    }
}

void require_partition(const ComplexMatrix &m, Bipartition part) {
    require_square(m, "bipartite operation");
    if (part.dim_a == 0 || part.dim_b == 0 || part.dim() != m.dim()) {
        std::ostringstream msg;
        msg << "bipartition " << part.dim_a << "x" << part.dim_b << " does not match matrix dimension " << m.dim();
        throw Error(ErrorCode::ShapeMismatch, msg.str());
    }
}

}  // namespace

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
    ComplexMatrix m(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        m(i, i) = values[i];
    }
    return m;
}

ComplexMatrix ComplexMatrix::from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
    std::size_t n_rows = rows.size();
    std::size_t n_cols = n_rows == 0 ? 0 : rows.begin()->size();
    ComplexMatrix m(n_rows, n_cols);
    std::size_t r = 0;
    for (const auto &row : rows) {
        if (row.size() != n_cols) {
            throw Error(ErrorCode::ShapeMismatch, "ragged row list");
        }
        std::size_t c = 0;
        for (const auto &v : row) {
            m(r, c++) = v;
        }
        ++r;
    }
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            out(c, r) = std::conj((*this)(r, c));
        }
    }
    return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            out(c, r) = (*this)(r, c);
        }
    }
    return out;
}

Complex ComplexMatrix::trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) {
        t += (*this)(i, i);
    }
    return t;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto &v : data_) {
        s += std::norm(v);
    }
    return std::sqrt(s);
}

double ComplexMatrix::max_abs_diff(const ComplexMatrix &other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw Error(ErrorCode::ShapeMismatch, "max_abs_diff on matrices of different shape");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) {
        worst = std::max(worst, std::abs(data_[i] - other.data_[i]));
    }
    return worst;
}

double ComplexMatrix::hermiticity_defect() const {
    require_square(*this, "hermiticity_defect");
    double worst = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = r; c < cols_; ++c) {
            worst = std::max(worst, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
        }
    }
    return worst;
}

ComplexMatrix &ComplexMatrix::operator+=(const ComplexMatrix &rhs) {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) {
        throw Error(ErrorCode::ShapeMismatch, "matrix sum of different shapes");
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] += rhs.data_[i];
    }
    return *this;
}

ComplexMatrix &ComplexMatrix::operator-=(const ComplexMatrix &rhs) {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) {
        throw Error(ErrorCode::ShapeMismatch, "matrix difference of different shapes");
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] -= rhs.data_[i];
    }
    return *this;
}

ComplexMatrix &ComplexMatrix::operator*=(Complex scale) {
    for (auto &v : data_) {
        v *= scale;
    }
    return *this;
}

ComplexMatrix operator*(const ComplexMatrix &lhs, const ComplexMatrix &rhs) {
    if (lhs.cols() != rhs.rows()) {
        throw Error(ErrorCode::ShapeMismatch, "matrix product with incompatible inner dimensions");
    }
    ComplexMatrix out(lhs.rows(), rhs.cols());
    for (std::size_t r = 0; r < lhs.rows(); ++r) {
        for (std::size_t k = 0; k < lhs.cols(); ++k) {
            Complex a = lhs(r, k);
            for (std::size_t c = 0; c < rhs.cols(); ++c) {
                out(r, c) += a * rhs(k, c);
            }
        }
    }
    return out;
}

ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            for (std::size_t k = 0; k < b.rows(); ++k) {
                for (std::size_t l = 0; l < b.cols(); ++l) {
                    out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
                }
            }
        }
    }
    return out;
}

ComplexMatrix gram(const ComplexMatrix &g) {
    const std::size_t n = g.rows();
    const std::size_t k = g.cols();
    ComplexMatrix out(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = r; c < n; ++c) {
            double re = 0.0;
            double im = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                const Complex x = g(r, j);
                const Complex y = g(c, j);
                // x * conj(y)
                re += x.real() * y.real() + x.imag() * y.imag();
                im += x.imag() * y.real() - x.real() * y.imag();
            }
            out(r, c) = Complex(re, im);
            out(c, r) = Complex(re, -im);
        }
        out(r, r) = Complex(out(r, r).real(), 0.0);
    }
    return out;
}

DensityMatrix DensityMatrix::from_matrix(ComplexMatrix m) {
    if (!m.is_square() || m.dim() == 0) {
        throw Error(ErrorCode::Validation, "density matrix must be square and non-empty");
    }
    if (m.hermiticity_defect() > 1e-12) {
        throw Error(ErrorCode::Validation, "density matrix is not Hermitian within 1e-12");
    }
    if (std::abs(m.trace() - 1.0) > 1e-12) {
        throw Error(ErrorCode::Validation, "density matrix trace differs from 1 by more than 1e-12");
    }
    if (hermitian_eigenvalues(m).min() < -1e-10) {
        throw Error(ErrorCode::Validation, "density matrix has an eigenvalue below -1e-10");
    }
    return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
    ComplexMatrix m = ComplexMatrix::identity(dim);
    m *= 1.0 / static_cast<double>(dim);
    return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::pure(std::span<const Complex> psi) {
    double norm2 = 0.0;
    for (const auto &v : psi) {
        norm2 += std::norm(v);
    }
    if (!(norm2 > 0.0)) {
        throw Error(ErrorCode::Validation, "pure state vector has zero norm");
    }
    ComplexMatrix m(psi.size());
    for (std::size_t r = 0; r < psi.size(); ++r) {
        for (std::size_t c = 0; c < psi.size(); ++c) {
            m(r, c) = psi[r] * std::conj(psi[c]) / norm2;
        }
    }
    return DensityMatrix(std::move(m));
}

double Spectrum::sum() const {
    double s = 0.0;
    for (double v : values) {
        s += v;
    }
    return s;
}

Spectrum hermitian_eigenvalues(const ComplexMatrix &m) {
    require_square(m, "hermitian_eigenvalues");
    const std::size_t n = m.dim();
    double scale = 1.0;
    for (const auto &v : m.data()) {
        scale = std::max(scale, std::abs(v));
    }
    if (m.hermiticity_defect() > 1e-10 * scale) {
        throw Error(ErrorCode::NonHermitianInput, "matrix is not Hermitian within tolerance");
    }

    // Work on a symmetrized copy so rounding in the input cannot leak an
    // anti-Hermitian part into the rotations.
    ComplexMatrix a(n);
    for (std::size_t r = 0; r < n; ++r) {
        a(r, r) = m(r, r).real();
        for (std::size_t c = r + 1; c < n; ++c) {
            Complex v = 0.5 * (m(r, c) + std::conj(m(c, r)));
            a(r, c) = v;
            a(c, r) = std::conj(v);
        }
    }

    const double total = a.frobenius_norm();
    const double threshold = 1e-14 * total;
    constexpr int kMaxSweeps = 100;

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += 2.0 * std::norm(a(p, q));
            }
        }
        if (std::sqrt(off) < threshold || off == 0.0) {
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag == 0.0) {
                    continue;
                }
                // Rephase column q so the pivot is real, then apply a real
                // Jacobi rotation.
                const Complex phase = std::conj(apq) / mag;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double theta = (aqq - app) / (2.0 * mag);
                double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta < 0.0) {
                    t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) {
                        continue;
                    }
                    const Complex bkp = a(k, p);
                    const Complex bkq = a(k, q) * phase;
                    const Complex nkp = c * bkp - s * bkq;
                    const Complex nkq = s * bkp + c * bkq;
                    a(k, p) = nkp;
                    a(k, q) = nkq;
                    a(p, k) = std::conj(nkp);
                    a(q, k) = std::conj(nkq);
                }
                a(p, p) = app - t * mag;
                a(q, q) = aqq + t * mag;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
            }
        }
    }

    Spectrum out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.values[i] = a(i, i).real();
    }
    std::sort(out.values.begin(), out.values.end());
    return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix &rho, Bipartition part, Subsystem sub) {
    require_partition(rho, part);
    const std::size_t na = part.dim_a;
    const std::size_t nb = part.dim_b;
    ComplexMatrix out(rho.dim());
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
            for (std::size_t k = 0; k < na; ++k) {
                for (std::size_t l = 0; l < nb; ++l) {
                    if (sub == Subsystem::B) {
                        out(i * nb + j, k * nb + l) = rho(i * nb + l, k * nb + j);
                    } else {
                        out(i * nb + j, k * nb + l) = rho(k * nb + j, i * nb + l);
                    }
                }
            }
        }
    }
    return out;
}

ComplexMatrix partial_trace(const ComplexMatrix &rho, Bipartition part, Subsystem keep) {
    require_partition(rho, part);
    const std::size_t na = part.dim_a;
    const std::size_t nb = part.dim_b;
    if (keep == Subsystem::A) {
        ComplexMatrix out(na);
        for (std::size_t i = 0; i < na; ++i) {
            for (std::size_t k = 0; k < na; ++k) {
                Complex s = 0.0;
                for (std::size_t j = 0; j < nb; ++j) {
                    s += rho(i * nb + j, k * nb + j);
                }
                out(i, k) = s;
            }
        }
        return out;
    }
    ComplexMatrix out(nb);
    for (std::size_t j = 0; j < nb; ++j) {
        for (std::size_t l = 0; l < nb; ++l) {
            Complex s = 0.0;
            for (std::size_t i = 0; i < na; ++i) {
                s += rho(i * nb + j, i * nb + l);
            }
            out(j, l) = s;
        }
    }
    return out;
}

DensityMatrix partial_trace(const DensityMatrix &rho, Bipartition part, Subsystem keep) {
    return DensityMatrix::trusted(partial_trace(rho.matrix(), part, keep));
}

double trace_of_square(const ComplexMatrix &m) {
    require_square(m, "trace_of_square");
    double s = 0.0;
    for (const auto &v : m.data()) {
        s += std::norm(v);
    }
    return s;
}

PptResult is_ppt(const DensityMatrix &rho, Bipartition part, double tol) {
    if (tol < 0.0) {
        throw Error(ErrorCode::Validation, "PPT tolerance must be nonnegative");
    }
    const double min_eig = hermitian_eigenvalues(partial_transpose(rho.matrix(), part, Subsystem::B)).min();
    return {min_eig >= -tol, min_eig};
}

bool is_positive_definite(const ComplexMatrix &m, double shift) {
    require_square(m, "is_positive_definite");
    const std::size_t n = m.dim();
    // In-place lower Cholesky on a local copy; only the lower triangle is read.
    std::vector<Complex> l(n * n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = m(j, j).real() + shift;
        for (std::size_t k = 0; k < j; ++k) {
            diag -= std::norm(l[j * n + k]);
        }
        if (!(diag > 0.0)) {
            return false;
        }
        const double ljj = std::sqrt(diag);
        l[j * n + j] = ljj;
        const double inv = 1.0 / ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            Complex s = m(i, j);
            for (std::size_t k = 0; k < j; ++k) {
                s -= l[i * n + k] * std::conj(l[j * n + k]);
            }
            l[i * n + j] = s * inv;
        }
    }
    return true;
}

bool ppt_flag(const DensityMatrix &rho, Bipartition part, double tol) {
    return is_positive_definite(partial_transpose(rho.matrix(), part, Subsystem::B), tol);
}

ComplexMatrix read_matrix_text(std::istream &in) {
    std::size_t dim = 0;
    if (!(in >> dim) || dim == 0) {
        throw Error(ErrorCode::Validation, "matrix fixture: missing or zero dimension");
    }
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim * dim; ++i) {
        double re = 0.0;
        double im = 0.0;
        if (!(in >> re >> im)) {
            throw Error(ErrorCode::Validation, "matrix fixture: expected " + std::to_string(dim * dim) + " entries");
        }
        m.data()[i] = Complex(re, im);
    }
    return m;
}

void write_matrix_text(std::ostream &out, const ComplexMatrix &m) {
    require_square(m, "write_matrix_text");
    const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
    out << m.dim() << '\n';
    for (const auto &v : m.data()) {
        out << v.real() << ' ' << v.imag() << '\n';
    }
    out.precision(old_precision);
}

}  // namespace casimir
