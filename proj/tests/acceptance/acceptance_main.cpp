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

// Acceptance suite. Prints one PASS/FAIL line per criterion.
// Usage: casimir_acceptance [criterion numbers...]  (default: all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "casimir/experiment.hpp"
#include "casimir/formula.hpp"
#include "casimir/invariants.hpp"
#include "casimir/matrix_core.hpp"
#include "casimir/random_states.hpp"
#include "casimir/statistics.hpp"

using namespace casimir;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char *format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), format, args...);
    return buf;
}

std::size_t worker_count() {
    const auto n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

ExperimentReport run(std::size_t m, std::size_t n, std::uint64_t samples, std::uint64_t seed, std::size_t k = 0) {
    ExperimentConfig cfg;
    cfg.shape = {m, n};
    cfg.measure = k == 0 ? MeasureSpec::hilbert_schmidt(m * n) : MeasureSpec::induced(m * n, k);
    cfg.samples = samples;
    cfg.seed = seed;
    cfg.workers = worker_count();
    const auto t0 = std::chrono::steady_clock::now();
    auto rep = run_experiment(cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::fprintf(stderr, "  run %zux%zu%s n=%llu seed=%llu: %.1f s\n", m, n, k == 0 ? "" : " induced",
                 static_cast<unsigned long long>(samples), static_cast<unsigned long long>(seed), secs);
    return rep;
}

double p_hat(const ExperimentReport &rep) {
    return static_cast<double>(rep.state.n_ppt) / static_cast<double>(rep.state.n_total);
}

// The 10^7-sample qubit-qutrit run is shared by criteria 3, 7 and 9.
const ExperimentReport &qubit_qutrit_run() {
    static const ExperimentReport rep = run(2, 3, 10'000'000, 3003);
    return rep;
}

Outcome band(double value, double center, double half_width) {
    return {std::abs(value - center) <= half_width, fmt("p_hat=%.7g expected %.7g +- %.3g", value, center, half_width)};
}

Outcome criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    const double p1 = formula::p_alpha(1.0).value;
    const double ph = formula::p_alpha(0.5).value;
    const double p2 = formula::p_alpha(2.0).value;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double e1 = std::abs(p1 - 8.0 / 33.0);
    const double eh = std::abs(ph - 29.0 / 64.0);
    const double e2 = std::abs(p2 - 26.0 / 323.0);
    const bool ok = e1 < 1e-10 && eh < 1e-10 && e2 < 1e-10 && secs < 1.0;
    return {ok, fmt("|dP(1)|=%.2g |dP(1/2)|=%.2g |dP(2)|=%.2g time=%.3g s", e1, eh, e2, secs)};
}

Outcome criterion_2() {
    return band(p_hat(run(2, 2, 1'000'000, 2002)), 0.2424, 0.0018);
}

Outcome criterion_3() {
    const double p = p_hat(qubit_qutrit_run());
    const double center = 0.02700;
    const double half = 0.00021;
    const double alt = 32.0 / 1199.0;
    Outcome out = band(p, center, half);
    const bool alt_outside = std::abs(alt - center) > half;
    out.pass = out.pass && alt_outside;
    out.detail += fmt("; 32/1199=%.6g outside band: %s", alt, alt_outside ? "yes" : "no");
    return out;
}

Outcome criterion_4() {
    return band(p_hat(run(3, 3, 10'000'000, 4004)), 1.022e-4, 0.41e-4);
}

Outcome criterion_5() {
    return band(p_hat(run(2, 4, 10'000'000, 5005)), 1.292e-3, 0.15e-3);
}

Outcome criterion_6() {
    return band(p_hat(run(2, 3, 1'000'000, 6006, 9)), 0.2605, 0.0018);
}

Outcome criterion_7() {
    const auto &rep = qubit_qutrit_run();
    Outcome out{true, ""};
    for (const auto label : {AxisLabel::r_A, AxisLabel::R_B, AxisLabel::c2_B, AxisLabel::c3_B}) {
        const auto r = flatness_test(*rep.histogram(label), 1000, true);
        out.pass = out.pass && r.p_value > 0.001;
        out.detail += fmt("%s: chi2=%.4g dof=%zu p=%.3g; ", std::string(axis_name(label)).c_str(), r.chi2, r.dof,
                          r.p_value);
    }
    return out;
}

Outcome criterion_8() {
    const auto rep = run(2, 2, 2'000'000, 8008);
    const auto c = flatness_test(*rep.histogram(AxisLabel::C002), 1000, true);
    const auto r = flatness_test(*rep.histogram(AxisLabel::r_A), 1000, true);
    const double p = p_hat(rep);
    const bool ok = c.p_value < 1e-6 && r.p_value > 0.001 && std::abs(p - 0.2422) <= 0.0013;
    return {ok, fmt("C002: chi2=%.4g p=%.3g; r_A: chi2=%.4g p=%.3g; p_hat=%.7g expected 0.2422 +- 0.0013", c.chi2,
                    c.p_value, r.chi2, r.p_value, p)};
}

Outcome criterion_9() {
    const auto &rep = qubit_qutrit_run();
    const auto qubit = fit_scale(*rep.histogram(AxisLabel::r_A), 2, 16, 0.0, 1.0, 10'000);
    const auto qutrit = fit_scale(*rep.histogram(AxisLabel::R_B), 7, 32, 0.0, 0.5, 10'000);
    const bool ok = qubit.bins_checked > 0 && qutrit.bins_checked > 0 && qubit.max_rel_residual < 0.05 &&
                    qutrit.max_rel_residual < 0.10;
    return {ok, fmt("qubit (2,16): max residual=%.4g over %zu bins; qutrit (7,32) on [0,0.5]: max residual=%.4g over "
                    "%zu bins",
                    qubit.max_rel_residual, qubit.bins_checked, qutrit.max_rel_residual, qutrit.bins_checked)};
}

Outcome criterion_10() {
    const auto a = ratio_with_ci(2699590, 100'000'000, 0.999, CiMethod::Wald);
    const auto b = ratio_with_ci(10218, 100'000'000, 0.95, CiMethod::Wald);
    const double ea = std::max(std::abs(a.ci_lo - 0.0269426), std::abs(a.ci_hi - 0.0270492));
    const double eb = std::max(std::abs(b.ci_lo - 0.000100199), std::abs(b.ci_hi - 0.000104161));
    return {ea < 1e-6 && eb < 1e-7, fmt("[%.9g, %.9g] err=%.2g; [%.9g, %.9g] err=%.2g", a.ci_lo, a.ci_hi, ea, b.ci_lo,
                                        b.ci_hi, eb)};
}

// d_abc from the trace formula with dense matrices.
double d_direct(const GeneratorBasis &basis, std::size_t a, std::size_t b, std::size_t c) {
    const auto &la = basis[a];
    const auto &lb = basis[b];
    const auto anti = la * lb + lb * la;
    return 0.25 * (anti * basis[c]).trace().real();
}

Outcome criterion_11() {
    const auto su3 = su_basis(3);
    const auto dt3 = d_tensor(su3);
    const std::size_t g1 = gell_mann_position(1);
    const std::size_t g8 = gell_mann_position(8);
    const double d118 = dt3.at(g1, g1, g8);
    const double d888 = dt3.at(g8, g8, g8);
    bool ok = std::abs(d118 - 1.0 / std::sqrt(3.0)) < 1e-12 && std::abs(d888 + 1.0 / std::sqrt(3.0)) < 1e-12;

    // Full table against the trace formula, plus the standard nonzero count.
    double worst3 = 0.0;
    std::size_t nonzero = 0;
    for (std::size_t a = 0; a < 8; ++a) {
        for (std::size_t b = a; b < 8; ++b) {
            for (std::size_t c = b; c < 8; ++c) {
                const double direct = d_direct(su3, a, b, c);
                worst3 = std::max(worst3, std::abs(direct - dt3.at(a, b, c)));
                nonzero += std::abs(direct) > 1e-12;
            }
        }
    }
    ok = ok && worst3 < 1e-12 && nonzero == 16 && dt3.entries().size() == 16;

    const auto dt2 = d_tensor(su_basis(2));
    double worst2 = 0.0;
    for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t b = 0; b < 3; ++b) {
            for (std::size_t c = 0; c < 3; ++c) {
                worst2 = std::max(worst2, std::abs(dt2.at(a, b, c)));
            }
        }
    }
    ok = ok && dt2.entries().empty() && worst2 == 0.0;

    double worst_orth = 0.0;
    for (std::size_t d : {2, 3, 4}) {
        const auto basis = su_basis(d);
        for (std::size_t a = 0; a < basis.size(); ++a) {
            for (std::size_t b = 0; b < basis.size(); ++b) {
                const Complex t = (basis[a] * basis[b]).trace();
                worst_orth = std::max(worst_orth, std::abs(t - Complex(a == b ? 2.0 : 0.0)));
            }
        }
    }
    ok = ok && worst_orth < 1e-12;
    return {ok, fmt("d118=%.15g d888=%.15g table err=%.2g nonzero=%zu su2 max|d|=%.2g orthonormality err=%.2g", d118,
                    d888, worst3, nonzero, worst2, worst_orth)};
}

Outcome criterion_12() {
    constexpr std::uint64_t kInstances = 10'000;
    const std::vector<Bipartition> shapes{{2, 2}, {2, 3}, {3, 3}, {2, 4}};
    std::size_t involution = 0, purity_pt = 0, reduced = 0, radius = 0;
    const std::map<std::size_t, GeneratorBasis> bases{{2, su_basis(2)}, {3, su_basis(3)}, {4, su_basis(4)}};
    const auto d3 = d_tensor(bases.at(3));
    for (std::uint64_t i = 0; i < kInstances; ++i) {
        const auto part = shapes[i % shapes.size()];
        const auto rho = sample_state(MeasureSpec::hilbert_schmidt(part.dim()), {12012, i});
        for (const auto sub : {Subsystem::A, Subsystem::B}) {
            const auto pt = partial_transpose(rho.matrix(), part, sub);
            involution += partial_transpose(pt, part, sub) != rho.matrix();
            purity_pt += std::abs(trace_of_square(pt) - purity(rho)) > 1e-12;
            for (const auto keep : {Subsystem::A, Subsystem::B}) {
                const auto before = partial_trace(rho, part, keep);
                const auto after = DensityMatrix::trusted(partial_trace(pt, part, keep));
                const auto &basis = bases.at(before.dim());
                const auto v0 = coherence_vector(before, basis);
                const auto v1 = coherence_vector(after, basis);
                bool same = std::abs(v0.c2() - v1.c2()) < 1e-12;
                if (before.dim() == 3) {
                    same = same && std::abs(cubic_casimir(v0, d3) - cubic_casimir(v1, d3)) < 1e-12;
                }
                reduced += !same;
            }
        }
        for (const auto keep : {Subsystem::A, Subsystem::B}) {
            const auto red = partial_trace(rho, part, keep);
            const std::size_t d = red.dim();
            const auto v = coherence_vector(red, bases.at(d));
            const double expected = 1.0 / double(d) + v.c2() * double(d - 1) / double(d);
            radius += std::abs(purity(red) - expected) > 1e-12;
        }
    }

    std::size_t mismatched_runs = 0;
    ExperimentConfig cfg;
    cfg.shape = {2, 3};
    cfg.measure = MeasureSpec::hilbert_schmidt(6);
    cfg.samples = kInstances;
    cfg.seed = 12012;
    cfg.workers = 1;
    const auto reference = run_experiment(cfg).state;
    for (std::size_t w : {2, 3, 8}) {
        cfg.workers = w;
        mismatched_runs += !(run_experiment(cfg).state == reference);
    }
    const bool ok = involution == 0 && purity_pt == 0 && reduced == 0 && radius == 0 && mismatched_runs == 0;
    return {ok, fmt("%llu instances: involution failures=%zu, PT purity failures=%zu, reduced-state failures=%zu, "
                    "radius-purity failures=%zu, worker-count mismatches=%zu",
                    static_cast<unsigned long long>(kInstances), involution, purity_pt, reduced, radius,
                    mismatched_runs)};
}

}  // namespace

int main(int argc, char **argv) {
    const std::vector<std::function<Outcome()>> criteria{criterion_1, criterion_2,  criterion_3,  criterion_4,
                                                         criterion_5, criterion_6,  criterion_7,  criterion_8,
                                                         criterion_9, criterion_10, criterion_11, criterion_12};
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        selected.insert(std::stoi(argv[i]));
    }
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int number = static_cast<int>(i + 1);
        if (!selected.empty() && selected.count(number) == 0) {
            continue;
        }
        Outcome out;
        try {
            out = criteria[i]();
        } catch (const std::exception &e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        failures += !out.pass;
        std::printf("CRITERION %2d: %s  %s\n", number, out.pass ? "PASS" : "FAIL", out.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
