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

#include "casimir/casimir.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <string>

#include "casimir/error.hpp"
#include "casimir/experiment.hpp"
#include "casimir/formula.hpp"
#include "casimir/invariants.hpp"
#include "casimir/random_states.hpp"
#include "casimir/statistics.hpp"

struct casimir_config {
    casimir::ExperimentConfig cfg;
    casimir_progress_fn progress = nullptr;
    void *progress_user = nullptr;
};

struct casimir_report {
    casimir::ExperimentReport report;
};

namespace {

thread_local std::string g_last_error;

casimir_status status_for(casimir::ErrorCode code) {
    using casimir::ErrorCode;
    switch (code) {
        case ErrorCode::Validation:
            return CASIMIR_ERR_VALIDATION;
        case ErrorCode::Io:
            return CASIMIR_ERR_IO;
        case ErrorCode::ShapeMismatch:
            return CASIMIR_ERR_SHAPE_MISMATCH;
        case ErrorCode::NonHermitianInput:
            return CASIMIR_ERR_NON_HERMITIAN;
        case ErrorCode::DegenerateSample:
            return CASIMIR_ERR_DEGENERATE_SAMPLE;
        case ErrorCode::UnsupportedDimension:
            return CASIMIR_ERR_UNSUPPORTED_DIMENSION;
        case ErrorCode::AxisMismatch:
            return CASIMIR_ERR_AXIS_MISMATCH;
        case ErrorCode::EmptyCell:
            return CASIMIR_ERR_EMPTY_CELL;
        case ErrorCode::InsufficientData:
            return CASIMIR_ERR_INSUFFICIENT_DATA;
        case ErrorCode::DomainError:
            return CASIMIR_ERR_DOMAIN;
        case ErrorCode::ConfigHashMismatch:
            return CASIMIR_ERR_CONFIG_HASH_MISMATCH;
        case ErrorCode::CorruptCheckpoint:
            return CASIMIR_ERR_CORRUPT_CHECKPOINT;
    }
    return CASIMIR_ERR_INTERNAL;
}

casimir_status fail(casimir_status status, const std::string &message) {
    g_last_error = message;
    return status;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
casimir_status guarded(Fn &&fn) noexcept {
    try {
        fn();
        g_last_error.clear();
        return CASIMIR_OK;
    } catch (const casimir::Error &e) {
        return fail(status_for(e.code()), e.what());
    } catch (const std::bad_alloc &) {
        return fail(CASIMIR_ERR_INTERNAL, "out of memory");
    } catch (const std::exception &e) {
        return fail(CASIMIR_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(CASIMIR_ERR_INTERNAL, "unknown exception");
    }
}

#define CASIMIR_REQUIRE(ptr)                                                     \
    do {                                                                         \
        if ((ptr) == nullptr) {                                                  \
            return fail(CASIMIR_ERR_NULL_ARGUMENT, "null argument: " #ptr);      \
        }                                                                        \
    } while (0)

char *dup_string(const std::string &s) {
    char *out = static_cast<char *>(std::malloc(s.size() + 1));
    if (out == nullptr) {
        throw std::bad_alloc();
    }
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

casimir::ComplexMatrix matrix_from_interleaved(const double *data, std::size_t dim) {
    casimir::ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim * dim; ++i) {
        m.data()[i] = casimir::Complex(data[2 * i], data[2 * i + 1]);
    }
    return m;
}

casimir::CiMethod to_method(casimir_ci_method m) {
    return m == CASIMIR_CI_WALD ? casimir::CiMethod::Wald : casimir::CiMethod::Wilson;
}

casimir_ratio to_c(const casimir::RatioEstimate &r) {
    return {r.p_hat, r.ci_lo, r.ci_hi, r.level, r.method == casimir::CiMethod::Wald ? CASIMIR_CI_WALD : CASIMIR_CI_WILSON};
}

}  // namespace

extern "C" {

const char *casimir_version(void) {
    return "1.0.0";
}

const char *casimir_last_error(void) {
    return g_last_error.c_str();
}

const char *casimir_status_name(casimir_status status) {
    switch (status) {
        case CASIMIR_OK:
            return "ok";
        case CASIMIR_ERR_VALIDATION:
            return "ValidationError";
        case CASIMIR_ERR_IO:
            return "IoError";
        case CASIMIR_ERR_SHAPE_MISMATCH:
            return "ShapeMismatch";
        case CASIMIR_ERR_NON_HERMITIAN:
            return "NonHermitianInput";
        case CASIMIR_ERR_DEGENERATE_SAMPLE:
            return "DegenerateSample";
        case CASIMIR_ERR_UNSUPPORTED_DIMENSION:
            return "UnsupportedDimension";
        case CASIMIR_ERR_AXIS_MISMATCH:
            return "AxisMismatch";
        case CASIMIR_ERR_EMPTY_CELL:
            return "EmptyCell";
        case CASIMIR_ERR_INSUFFICIENT_DATA:
            return "InsufficientData";
        case CASIMIR_ERR_DOMAIN:
            return "DomainError";
        case CASIMIR_ERR_CONFIG_HASH_MISMATCH:
            return "ConfigHashMismatch";
        case CASIMIR_ERR_CORRUPT_CHECKPOINT:
            return "CorruptCheckpoint";
        case CASIMIR_ERR_NULL_ARGUMENT:
            return "NullArgument";
        case CASIMIR_ERR_INTERNAL:
            return "InternalError";
    }
    return "UnknownStatus";
}

void casimir_string_free(char *s) {
    std::free(s);
}

casimir_status casimir_config_new(casimir_config **out) {
    CASIMIR_REQUIRE(out);
    return guarded([&] { *out = new casimir_config(); });
}

void casimir_config_free(casimir_config *cfg) {
    delete cfg;
}

casimir_status casimir_config_load_file(casimir_config *cfg, const char *path) {
    CASIMIR_REQUIRE(cfg);
    CASIMIR_REQUIRE(path);
    return guarded([&] { cfg->cfg.merge_file(path); });
}

casimir_status casimir_config_merge_json(casimir_config *cfg, const char *json_text) {
    CASIMIR_REQUIRE(cfg);
    CASIMIR_REQUIRE(json_text);
    return guarded([&] {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(json_text);
        } catch (const nlohmann::json::exception &e) {
            throw casimir::Error(casimir::ErrorCode::Validation, std::string("config JSON: ") + e.what());
        }
        cfg->cfg.merge_json(j);
    });
}

casimir_status casimir_config_set_shape(casimir_config *cfg, uint32_t dim_a, uint32_t dim_b) {
    CASIMIR_REQUIRE(cfg);
    return guarded([&] {
        cfg->cfg.merge_json({{"shape", {dim_a, dim_b}}});
    });
}

casimir_status casimir_config_set_measure(casimir_config *cfg, const char *measure) {
    CASIMIR_REQUIRE(cfg);
    CASIMIR_REQUIRE(measure);
    return guarded([&] { cfg->cfg.measure = casimir::parse_measure(measure, cfg->cfg.shape.dim()); });
}

casimir_status casimir_config_set_samples(casimir_config *cfg, uint64_t samples) {
    CASIMIR_REQUIRE(cfg);
    cfg->cfg.samples = samples;
    return CASIMIR_OK;
}

casimir_status casimir_config_set_seed(casimir_config *cfg, uint64_t seed) {
    CASIMIR_REQUIRE(cfg);
    cfg->cfg.seed = seed;
    return CASIMIR_OK;
}

casimir_status casimir_config_set_bins(casimir_config *cfg, uint32_t bins) {
    CASIMIR_REQUIRE(cfg);
    cfg->cfg.bins = bins;
    return CASIMIR_OK;
}

casimir_status casimir_config_set_workers(casimir_config *cfg, uint32_t workers) {
    CASIMIR_REQUIRE(cfg);
    cfg->cfg.workers = workers;
    return CASIMIR_OK;
}

casimir_status casimir_config_set_checkpoint_every(casimir_config *cfg, uint64_t every) {
    CASIMIR_REQUIRE(cfg);
    cfg->cfg.checkpoint_every = every;
    return CASIMIR_OK;
}

casimir_status casimir_config_set_out_dir(casimir_config *cfg, const char *dir) {
    CASIMIR_REQUIRE(cfg);
    CASIMIR_REQUIRE(dir);
    return guarded([&] { cfg->cfg.out_dir = dir; });
}

casimir_status casimir_config_set_symmetrize(casimir_config *cfg, int enabled) {
    CASIMIR_REQUIRE(cfg);
    cfg->cfg.symmetrize = enabled != 0;
    return CASIMIR_OK;
}

casimir_status casimir_config_set_flatness_min_total(casimir_config *cfg, uint64_t min_total) {
    CASIMIR_REQUIRE(cfg);
    cfg->cfg.flatness_min_total = min_total;
    return CASIMIR_OK;
}

casimir_status casimir_config_set_resume(casimir_config *cfg, int enabled) {
    CASIMIR_REQUIRE(cfg);
    cfg->cfg.resume = enabled != 0;
    return CASIMIR_OK;
}

casimir_status casimir_config_set_stop_after(casimir_config *cfg, uint64_t samples) {
    CASIMIR_REQUIRE(cfg);
    cfg->cfg.stop_after = samples;
    return CASIMIR_OK;
}

casimir_status casimir_config_set_progress(casimir_config *cfg, casimir_progress_fn fn, void *user) {
    CASIMIR_REQUIRE(cfg);
    cfg->progress = fn;
    cfg->progress_user = user;
    return CASIMIR_OK;
}

casimir_status casimir_config_validate(const casimir_config *cfg) {
    CASIMIR_REQUIRE(cfg);
    return guarded([&] { cfg->cfg.validate(); });
}

casimir_status casimir_config_to_json(const casimir_config *cfg, char **out) {
    CASIMIR_REQUIRE(cfg);
    CASIMIR_REQUIRE(out);
    return guarded([&] { *out = dup_string(cfg->cfg.to_json().dump(2)); });
}

casimir_status casimir_run(const casimir_config *cfg, casimir_report **out) {
    CASIMIR_REQUIRE(cfg);
    CASIMIR_REQUIRE(out);
    return guarded([&] {
        casimir::ProgressCallback progress;
        if (cfg->progress != nullptr) {
            progress = [cfg](std::uint64_t done, std::uint64_t total) { cfg->progress(done, total, cfg->progress_user); };
        }
        auto rep = std::make_unique<casimir_report>();
        rep->report = casimir::run_experiment(cfg->cfg, progress);
        *out = rep.release();
    });
}

casimir_status casimir_report_from_checkpoint(const char *path, casimir_report **out) {
    CASIMIR_REQUIRE(path);
    CASIMIR_REQUIRE(out);
    return guarded([&] {
        auto rep = std::make_unique<casimir_report>();
        rep->report = casimir::report_from_checkpoint(path);
        *out = rep.release();
    });
}

void casimir_report_free(casimir_report *report) {
    delete report;
}

uint64_t casimir_report_n_total(const casimir_report *report) {
    return report == nullptr ? 0 : report->report.state.n_total;
}

uint64_t casimir_report_n_ppt(const casimir_report *report) {
    return report == nullptr ? 0 : report->report.state.n_ppt;
}

int casimir_report_complete(const casimir_report *report) {
    return report != nullptr && report->report.complete ? 1 : 0;
}

casimir_status casimir_report_overall(const casimir_report *report, double level, casimir_ci_method method,
                                      casimir_ratio *out) {
    CASIMIR_REQUIRE(report);
    CASIMIR_REQUIRE(out);
    return guarded([&] {
        *out = to_c(casimir::ratio_with_ci(report->report.state.n_ppt, report->report.state.n_total, level,
                                           to_method(method)));
    });
}

casimir_status casimir_report_flatness(const casimir_report *report, const char *axis, double *chi2, uint64_t *dof,
                                       double *p_value) {
    CASIMIR_REQUIRE(report);
    CASIMIR_REQUIRE(axis);
    return guarded([&] {
        const auto label = casimir::parse_axis_name(axis);
        if (!label) {
            throw casimir::Error(casimir::ErrorCode::Validation, std::string("unknown axis '") + axis + "'");
        }
        for (const auto &f : report->report.flatness) {
            if (f.axis != *label) {
                continue;
            }
            if (!f.result) {
                throw casimir::Error(casimir::ErrorCode::InsufficientData, f.error);
            }
            if (chi2 != nullptr) {
                *chi2 = f.result->chi2;
            }
            if (dof != nullptr) {
                *dof = f.result->dof;
            }
            if (p_value != nullptr) {
                *p_value = f.result->p_value;
            }
            return;
        }
        throw casimir::Error(casimir::ErrorCode::Validation, std::string("axis '") + axis + "' not recorded");
    });
}

casimir_status casimir_report_to_json(const casimir_report *report, int include_timing, char **out) {
    CASIMIR_REQUIRE(report);
    CASIMIR_REQUIRE(out);
    return guarded([&] { *out = dup_string(report->report.to_json(include_timing != 0).dump(2)); });
}

casimir_status casimir_report_export(const casimir_report *report, const char *out_dir) {
    CASIMIR_REQUIRE(report);
    CASIMIR_REQUIRE(out_dir);
    return guarded([&] { casimir::export_report(report->report, out_dir); });
}

casimir_status casimir_analyze_dir(const char *in_dir, uint64_t min_total, const casimir_fit_request *fits,
                                   size_t n_fits, char **json_out) {
    CASIMIR_REQUIRE(in_dir);
    CASIMIR_REQUIRE(json_out);
    if (n_fits > 0) {
        CASIMIR_REQUIRE(fits);
    }
    return guarded([&] {
        std::vector<casimir::FitSpec> specs;
        for (size_t i = 0; i < n_fits; ++i) {
            const char *name = fits[i].axis != nullptr ? fits[i].axis : "r_A";
            const auto label = casimir::parse_axis_name(name);
            if (!label) {
                throw casimir::Error(casimir::ErrorCode::Validation, std::string("unknown fit axis '") + name + "'");
            }
            if (!(fits[i].lo < fits[i].hi)) {
                throw casimir::Error(casimir::ErrorCode::Validation, "fit range needs lo < hi");
            }
            specs.push_back({*label, fits[i].a, fits[i].b, fits[i].lo, fits[i].hi, fits[i].min_total});
        }
        *json_out = dup_string(casimir::analyze_directory(in_dir, min_total, specs).dump(2));
    });
}

casimir_status casimir_ratio_with_ci(uint64_t hits, uint64_t total, double level, casimir_ci_method method,
                                     casimir_ratio *out) {
    CASIMIR_REQUIRE(out);
    return guarded([&] { *out = to_c(casimir::ratio_with_ci(hits, total, level, to_method(method))); });
}

casimir_status casimir_formula_p_alpha(double alpha, double tol, double *value, uint64_t *terms) {
    CASIMIR_REQUIRE(value);
    return guarded([&] {
        const auto series = casimir::formula::p_alpha(alpha, tol);
        *value = series.value;
        if (terms != nullptr) {
            *terms = series.terms;
        }
    });
}

casimir_status casimir_formula_f_term(double alpha, double *value) {
    CASIMIR_REQUIRE(value);
    return guarded([&] { *value = casimir::formula::f_term(alpha); });
}

casimir_status casimir_sample_state(uint32_t n, uint32_t k, uint64_t seed, uint64_t index, double *rho_out) {
    CASIMIR_REQUIRE(rho_out);
    return guarded([&] {
        const casimir::MeasureSpec measure = casimir::MeasureSpec::induced(n, k);
        measure.validate();
        const casimir::DensityMatrix rho = casimir::sample_state(measure, {seed, index});
        const auto data = rho.matrix().data();
        for (std::size_t i = 0; i < data.size(); ++i) {
            rho_out[2 * i] = data[i].real();
            rho_out[2 * i + 1] = data[i].imag();
        }
    });
}

casimir_status casimir_is_ppt(const double *rho, uint32_t dim_a, uint32_t dim_b, double tol, int *ppt,
                              double *min_eig) {
    CASIMIR_REQUIRE(rho);
    CASIMIR_REQUIRE(ppt);
    return guarded([&] {
        const std::size_t dim = static_cast<std::size_t>(dim_a) * dim_b;
        const auto state = casimir::DensityMatrix::from_matrix(matrix_from_interleaved(rho, dim));
        const auto res = casimir::is_ppt(state, {dim_a, dim_b}, tol);
        *ppt = res.ppt ? 1 : 0;
        if (min_eig != nullptr) {
            *min_eig = res.min_eig;
        }
    });
}

casimir_status casimir_invariants(const double *rho, uint32_t dim_a, uint32_t dim_b, double *r_a, double *r_b,
                                  double *c3_b, double *c002, int *ppt) {
    CASIMIR_REQUIRE(rho);
    return guarded([&] {
        const std::size_t dim = static_cast<std::size_t>(dim_a) * dim_b;
        const auto state = casimir::DensityMatrix::from_matrix(matrix_from_interleaved(rho, dim));
        const auto rec = casimir::record(state, {dim_a, dim_b});
        const double nan = std::numeric_limits<double>::quiet_NaN();
        if (r_a != nullptr) {
            *r_a = rec.r_a;
        }
        if (r_b != nullptr) {
            *r_b = rec.r_b;
        }
        if (c3_b != nullptr) {
            *c3_b = rec.c3_b.value_or(nan);
        }
        if (c002 != nullptr) {
            *c002 = rec.c002.value_or(nan);
        }
        if (ppt != nullptr) {
            *ppt = rec.ppt ? 1 : 0;
        }
    });
}

}  // extern "C"
