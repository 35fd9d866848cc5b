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

#include "casimir/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "casimir/error.hpp"

namespace casimir {

namespace {

// tr(rho M) using the sparse entries of M: sum over (r, c) of rho(c, r) M(r, c).
double real_trace_product(const DensityMatrix &rho, const std::vector<GeneratorBasis::Entry> &entries) {
    double s = 0.0;
    for (const auto &e : entries) {
        const Complex v = rho(e.col, e.row) * e.value;
        s += v.real();
    }
    return s;
}

std::vector<GeneratorBasis::Entry> sparsify(const ComplexMatrix &m) {
    std::vector<GeneratorBasis::Entry> out;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (m(r, c) != Complex(0.0, 0.0)) {
                out.push_back({static_cast<std::uint16_t>(r), static_cast<std::uint16_t>(c), m(r, c)});
            }
        }
    }
    return out;
}

}  // namespace

GeneratorBasis su_basis(std::size_t d) {
    if (d < 2 || d > 8) {
        throw Error(ErrorCode::UnsupportedDimension, "su_basis supports 2 <= d <= 8, got d=" + std::to_string(d));
    }
    GeneratorBasis basis;
    basis.d_ = d;
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = j + 1; k < d; ++k) {
            ComplexMatrix m(d);
            m(j, k) = 1.0;
            m(k, j) = 1.0;
            basis.generators_.push_back(std::move(m));
            basis.kinds_.push_back(GeneratorBasis::Kind::Symmetric);
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = j + 1; k < d; ++k) {
            ComplexMatrix m(d);
            m(j, k) = Complex(0.0, -1.0);
            m(k, j) = Complex(0.0, 1.0);
            basis.generators_.push_back(std::move(m));
            basis.kinds_.push_back(GeneratorBasis::Kind::Antisymmetric);
        }
    }
    for (std::size_t l = 1; l < d; ++l) {
        ComplexMatrix m(d);
        const double scale = std::sqrt(2.0 / static_cast<double>(l * (l + 1)));
        for (std::size_t j = 0; j < l; ++j) {
            m(j, j) = scale;
        }
        m(l, l) = -static_cast<double>(l) * scale;
        basis.generators_.push_back(std::move(m));
        basis.kinds_.push_back(GeneratorBasis::Kind::Diagonal);
    }
    for (const auto &g : basis.generators_) {
        basis.sparse_.push_back(sparsify(g));
    }
    return basis;
}

std::size_t gell_mann_position(std::size_t label) {
    // lambda_1..lambda_8 -> (sym 01, anti 01, diag 1, sym 02, anti 02, sym 12, anti 12, diag 2)
    static constexpr std::array<std::size_t, 8> kPositions = {0, 3, 6, 1, 4, 2, 5, 7};
    if (label < 1 || label > 8) {
        throw Error(ErrorCode::Validation, "Gell-Mann label must be in 1..8");
    }
    return kPositions[label - 1];
}

double pure_state_norm(std::size_t d) {
    return std::sqrt(2.0 * static_cast<double>(d - 1) / static_cast<double>(d));
}

std::vector<double> CoherenceVector::unit_scaled() const {
    std::vector<double> u(n);
    if (d < 2) {
        return u;
    }
    const double inv = 1.0 / pure_state_norm(d);
    for (auto &x : u) {
        x *= inv;
    }
    return u;
}

CoherenceVector coherence_vector(const DensityMatrix &rho, const GeneratorBasis &basis) {
    if (rho.dim() != basis.d()) {
        throw Error(ErrorCode::ShapeMismatch, "coherence_vector: state dimension " + std::to_string(rho.dim()) +
                                                  " does not match basis dimension " + std::to_string(basis.d()));
    }
    CoherenceVector v;
    v.d = basis.d();
    v.n.resize(basis.size());
    double norm2 = 0.0;
    for (std::size_t a = 0; a < basis.size(); ++a) {
        v.n[a] = real_trace_product(rho, basis.sparse(a));
        norm2 += v.n[a] * v.n[a];
    }
    v.radius = std::sqrt(norm2) / pure_state_norm(v.d);
    return v;
}

double DTensor::at(std::size_t a, std::size_t b, std::size_t c) const {
    Index key = {static_cast<std::uint16_t>(a), static_cast<std::uint16_t>(b), static_cast<std::uint16_t>(c)};
    std::sort(key.begin(), key.end());
    auto it = entries_.find(key);
    return it == entries_.end() ? 0.0 : it->second;
}

DTensor d_tensor(const GeneratorBasis &basis) {
    DTensor dt;
    dt.d_ = basis.d();
    const std::size_t count = basis.size();
    for (std::size_t a = 0; a < count; ++a) {
        for (std::size_t b = a; b < count; ++b) {
            const ComplexMatrix anti = basis[a] * basis[b] + basis[b] * basis[a];
            for (std::size_t c = b; c < count; ++c) {
                // tr(anti * l_c) over the sparse entries of l_c.
                Complex tr = 0.0;
                for (const auto &e : basis.sparse(c)) {
                    tr += anti(e.col, e.row) * e.value;
                }
                const double value = 0.25 * tr.real();
                if (std::abs(value) > 1e-14) {
                    dt.entries_[{static_cast<std::uint16_t>(a), static_cast<std::uint16_t>(b),
                                 static_cast<std::uint16_t>(c)}] = value;
                }
            }
        }
    }
    for (const auto &[key, value] : dt.entries_) {
        double multiplicity = 6.0;
        if (key[0] == key[1] && key[1] == key[2]) {
            multiplicity = 1.0;
        } else if (key[0] == key[1] || key[1] == key[2]) {
            multiplicity = 3.0;
        }
        dt.terms_.push_back({value * multiplicity, key[0], key[1], key[2]});
    }
    return dt;
}

double cubic_casimir(const CoherenceVector &v, const DTensor &dt) {
    if (v.d != dt.d()) {
        throw Error(ErrorCode::ShapeMismatch, "cubic_casimir: coherence vector and d-tensor dimensions differ");
    }
    const double inv = 1.0 / pure_state_norm(v.d);
    double s = 0.0;
    for (const auto &t : dt.terms_) {
        s += t.weight * v.n[t.a] * v.n[t.b] * v.n[t.c];
    }
    return s * inv * inv * inv;
}

double fano_correlation_invariant(const DensityMatrix &rho) {
    if (rho.dim() != 4) {
        throw Error(ErrorCode::ShapeMismatch, "fano_correlation_invariant requires a 4x4 two-qubit state");
    }
    static const std::vector<std::vector<GeneratorBasis::Entry>> kProducts = [] {
        const GeneratorBasis pauli = su_basis(2);
        std::vector<std::vector<GeneratorBasis::Entry>> out;
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                out.push_back(sparsify(kron(pauli[i], pauli[j])));
            }
        }
        return out;
    }();
    double s = 0.0;
    for (const auto &entries : kProducts) {
        const double c = real_trace_product(rho, entries);
        s += c * c;
    }
    return s;
}

RecordContext::RecordContext(Bipartition part) : part_(part) {
    if (part.dim_a == 0 || part.dim_b == 0) {
        throw Error(ErrorCode::Validation, "bipartition dimensions must be >= 1");
    }
    if (part.dim_a >= 2) {
        basis_a_ = su_basis(part.dim_a);
    }
    if (part.dim_b >= 2) {
        basis_b_ = su_basis(part.dim_b);
    }
    if (part.dim_b == 3) {
        dtensor_b_ = d_tensor(*basis_b_);
    }
}

InvariantRecord RecordContext::record(const DensityMatrix &rho, double tol) const {
    InvariantRecord rec;
    const DensityMatrix rho_a = partial_trace(rho, part_, Subsystem::A);
    const DensityMatrix rho_b = partial_trace(rho, part_, Subsystem::B);
    if (basis_a_) {
        const CoherenceVector va = coherence_vector(rho_a, *basis_a_);
        rec.r_a = va.radius;
        rec.c2_a = va.c2();
    }
    if (basis_b_) {
        const CoherenceVector vb = coherence_vector(rho_b, *basis_b_);
        rec.r_b = vb.radius;
        rec.c2_b = vb.c2();
        if (dtensor_b_) {
            rec.c3_b = cubic_casimir(vb, *dtensor_b_);
        }
    }
    if (part_.dim_a == 2 && part_.dim_b == 2) {
        rec.c002 = fano_correlation_invariant(rho);
    }
    rec.ppt = ppt_flag(rho, part_, tol);
    return rec;
}

InvariantRecord record(const DensityMatrix &rho, Bipartition part, double tol) {
    return RecordContext(part).record(rho, tol);
}

}  // namespace casimir
