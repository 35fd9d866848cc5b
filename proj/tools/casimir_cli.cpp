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

// Command-line front end. Talks to the library only through the C API.

#include <cinttypes>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "casimir/casimir.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

int exit_code_for(casimir_status status) {
    switch (status) {
        case CASIMIR_OK:
            return kExitOk;
        case CASIMIR_ERR_IO:
        case CASIMIR_ERR_CORRUPT_CHECKPOINT:
            return kExitIo;
        default:
            return kExitValidation;
    }
}

int report_failure(casimir_status status) {
    std::fprintf(stderr, "error: %s\n", casimir_last_error());
    return exit_code_for(status);
}

// Owns a char* handed out by the library.
struct LibString {
    char *ptr = nullptr;
    ~LibString() {
        casimir_string_free(ptr);
    }
};

struct ConfigHandle {
    casimir_config *ptr = nullptr;
    ~ConfigHandle() {
        casimir_config_free(ptr);
    }
};

struct ReportHandle {
    casimir_report *ptr = nullptr;
    ~ReportHandle() {
        casimir_report_free(ptr);
    }
};

void print_progress(uint64_t done, uint64_t total, void *) {
    std::fprintf(stderr, "progress: %" PRIu64 "/%" PRIu64 " (%.1f%%)\n", done, total,
                 total > 0 ? 100.0 * static_cast<double>(done) / static_cast<double>(total) : 100.0);
}

void print_summary(const casimir_report *rep) {
    casimir_ratio wilson{};
    const uint64_t n_total = casimir_report_n_total(rep);
    const uint64_t n_ppt = casimir_report_n_ppt(rep);
    std::printf("n_total=%" PRIu64 " n_ppt=%" PRIu64 " complete=%d\n", n_total, n_ppt, casimir_report_complete(rep));
    if (n_total > 0 && casimir_report_overall(rep, 0.95, CASIMIR_CI_WILSON, &wilson) == CASIMIR_OK) {
        std::printf("p_hat=%.9g wilson95=[%.9g, %.9g]\n", wilson.p_hat, wilson.ci_lo, wilson.ci_hi);
    }
}

struct FitArg {
    std::string axis = "r_A";
    double a = 0.0;
    double b = 0.0;
    double lo = 0.0;
    double hi = 1.0;
};

// "[AXIS:]a,b,lo,hi"
std::optional<FitArg> parse_fit(const std::string &text) {
    FitArg fit;
    std::string numbers = text;
    if (const auto colon = text.find(':'); colon != std::string::npos) {
        fit.axis = text.substr(0, colon);
        numbers = text.substr(colon + 1);
    }
    std::vector<double> values;
    std::stringstream s(numbers);
    std::string field;
    while (std::getline(s, field, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(field, &used));
            if (used != field.size()) {
                return std::nullopt;
            }
        } catch (const std::exception &) {
            return std::nullopt;
        }
    }
    if (values.size() != 4) {
        return std::nullopt;
    }
    fit.a = values[0];
    fit.b = values[1];
    fit.lo = values[2];
    fit.hi = values[3];
    return fit;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Monte Carlo separability and PPT probabilities over Casimir invariants"};
    app.require_subcommand(1);
    app.set_version_flag("--version", casimir_version());

    // sample
    auto *sample = app.add_subcommand("sample", "Run (or resume) an experiment");
    std::string config_path;
    std::string shape;
    std::string measure;
    uint64_t samples = 0;
    uint64_t seed = 0;
    uint32_t workers = 1;
    uint32_t bins = 100;
    uint64_t checkpoint_every = 0;
    uint64_t stop_after = 0;
    uint64_t sample_min_total = 1000;
    std::string out_dir;
    bool symmetrize = false;
    bool resume = false;
    bool quiet = false;
    sample->add_option("--config", config_path, "JSON config file; flags override its values");
    auto *opt_shape = sample->add_option("--shape", shape, "Bipartition MxN, e.g. 2x3");
    auto *opt_measure = sample->add_option("--measure", measure, "hs | induced:K");
    auto *opt_samples = sample->add_option("--samples", samples, "Number of random states");
    auto *opt_seed = sample->add_option("--seed", seed, "Master seed");
    auto *opt_workers = sample->add_option("--workers", workers, "Worker threads");
    auto *opt_bins = sample->add_option("--bins", bins, "Bins per invariant axis");
    auto *opt_ckpt = sample->add_option("--checkpoint-every", checkpoint_every, "Samples between checkpoints");
    auto *opt_out = sample->add_option("--out", out_dir, "Output directory");
    auto *opt_min_total = sample->add_option("--flatness-min-total", sample_min_total, "Minimum bin total for flatness");
    auto *opt_sym = sample->add_flag("--symmetrize", symmetrize, "Symmetrize the joint radius histogram");
    sample->add_flag("--resume", resume, "Continue from the checkpoint in --out");
    sample->add_option("--stop-after", stop_after, "Stop this session after N new samples");
    sample->add_flag("--quiet", quiet, "No progress lines");

    // analyze
    auto *analyze = app.add_subcommand("analyze", "Flatness tests and model fits on exported CSVs");
    std::string in_dir;
    uint64_t min_total = 1000;
    std::vector<std::string> fit_args;
    analyze->add_option("--in", in_dir, "Directory with exported axis CSVs")->required();
    analyze->add_option("--flatness-min-total", min_total, "Minimum bin total for flatness");
    analyze->add_option("--fit", fit_args, "[AXIS:]a,b,lo,hi fit of x^a(1-x^2)^b (axis defaults to r_A)");

    // formula
    auto *formula = app.add_subcommand("formula", "Evaluate the P(alpha) summation");
    double alpha = 1.0;
    double tol = 1e-16;
    formula->add_option("--alpha", alpha, "Dyson-index-like parameter alpha > 0")->required();
    formula->add_option("--tol", tol, "Relative truncation tolerance");

    // report
    auto *report = app.add_subcommand("report", "Re-emit a report from a checkpoint");
    std::string report_in;
    std::string report_out;
    report->add_option("--in", report_in, "Run directory or checkpoint file")->required();
    report->add_option("--out", report_out, "Export directory (default: the run directory)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitValidation;
    }

    if (*sample) {
        ConfigHandle cfg;
        casimir_status st = casimir_config_new(&cfg.ptr);
        if (st == CASIMIR_OK && !config_path.empty()) {
            st = casimir_config_load_file(cfg.ptr, config_path.c_str());
        }
        if (st == CASIMIR_OK && opt_shape->count() > 0) {
            unsigned m = 0;
            unsigned n = 0;
            char tail = 0;
            if (std::sscanf(shape.c_str(), "%ux%u%c", &m, &n, &tail) != 2) {
                std::fprintf(stderr, "error: --shape must look like MxN\n");
                return kExitValidation;
            }
            st = casimir_config_set_shape(cfg.ptr, m, n);
        }
        if (st == CASIMIR_OK && opt_measure->count() > 0) {
            st = casimir_config_set_measure(cfg.ptr, measure.c_str());
        }
        if (st == CASIMIR_OK && opt_samples->count() > 0) {
            st = casimir_config_set_samples(cfg.ptr, samples);
        }
        if (st == CASIMIR_OK && opt_seed->count() > 0) {
            st = casimir_config_set_seed(cfg.ptr, seed);
        }
        if (st == CASIMIR_OK && opt_workers->count() > 0) {
            st = casimir_config_set_workers(cfg.ptr, workers);
        }
        if (st == CASIMIR_OK && opt_bins->count() > 0) {
            st = casimir_config_set_bins(cfg.ptr, bins);
        }
        if (st == CASIMIR_OK && opt_ckpt->count() > 0) {
            st = casimir_config_set_checkpoint_every(cfg.ptr, checkpoint_every);
        }
        if (st == CASIMIR_OK && opt_out->count() > 0) {
            st = casimir_config_set_out_dir(cfg.ptr, out_dir.c_str());
        }
        if (st == CASIMIR_OK && opt_min_total->count() > 0) {
            st = casimir_config_set_flatness_min_total(cfg.ptr, sample_min_total);
        }
        if (st == CASIMIR_OK && opt_sym->count() > 0) {
            st = casimir_config_set_symmetrize(cfg.ptr, symmetrize ? 1 : 0);
        }
        if (st == CASIMIR_OK) {
            st = casimir_config_set_resume(cfg.ptr, resume ? 1 : 0);
        }
        if (st == CASIMIR_OK) {
            st = casimir_config_set_stop_after(cfg.ptr, stop_after);
        }
        if (st == CASIMIR_OK && !quiet) {
            st = casimir_config_set_progress(cfg.ptr, print_progress, nullptr);
        }
        if (st == CASIMIR_OK) {
            st = casimir_config_validate(cfg.ptr);
        }
        if (st != CASIMIR_OK) {
            return report_failure(st);
        }
        ReportHandle rep;
        st = casimir_run(cfg.ptr, &rep.ptr);
        if (st != CASIMIR_OK) {
            return report_failure(st);
        }
        print_summary(rep.ptr);
        return kExitOk;
    }

    if (*analyze) {
        std::vector<FitArg> parsed;
        for (const auto &f : fit_args) {
            auto fit = parse_fit(f);
            if (!fit) {
                std::fprintf(stderr, "error: --fit expects [AXIS:]a,b,lo,hi, got '%s'\n", f.c_str());
                return kExitValidation;
            }
            parsed.push_back(*fit);
        }
        std::vector<casimir_fit_request> requests;
        for (const auto &f : parsed) {
            requests.push_back({f.axis.c_str(), f.a, f.b, f.lo, f.hi, 100});
        }
        LibString out;
        const casimir_status st =
            casimir_analyze_dir(in_dir.c_str(), min_total, requests.data(), requests.size(), &out.ptr);
        if (st != CASIMIR_OK) {
            return report_failure(st);
        }
        const std::string target = in_dir + "/analysis.json";
        std::FILE *f = std::fopen(target.c_str(), "w");
        if (f == nullptr) {
            std::fprintf(stderr, "error: cannot write %s\n", target.c_str());
            return kExitIo;
        }
        std::fprintf(f, "%s\n", out.ptr);
        std::fclose(f);
        std::printf("%s\n", out.ptr);
        return kExitOk;
    }

    if (*formula) {
        double value = 0.0;
        uint64_t terms = 0;
        const casimir_status st = casimir_formula_p_alpha(alpha, tol, &value, &terms);
        if (st != CASIMIR_OK) {
            return report_failure(st);
        }
        std::printf("alpha=%.17g P=%.17g terms=%" PRIu64 "\n", alpha, value, terms);
        return kExitOk;
    }

    if (*report) {
        std::string path = report_in;
        std::string target = report_out;
        const bool is_dir = path.size() < 5 || path.compare(path.size() - 5, 5, ".json") != 0;
        if (is_dir) {
            if (target.empty()) {
                target = path;
            }
            path += "/checkpoint.json";
        }
        ReportHandle rep;
        casimir_status st = casimir_report_from_checkpoint(path.c_str(), &rep.ptr);
        if (st == CASIMIR_OK && !target.empty()) {
            st = casimir_report_export(rep.ptr, target.c_str());
        }
        if (st != CASIMIR_OK) {
            return report_failure(st);
        }
        print_summary(rep.ptr);
        return kExitOk;
    }
    return kExitValidation;
}
