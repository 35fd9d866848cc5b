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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "casimir/invariants.hpp"
#include "casimir/matrix_core.hpp"
#include "casimir/random_states.hpp"
#include "casimir/statistics.hpp"

namespace casimir {

/// Radial-density model x^a (1 - x^2)^b fitted to one axis over [lo, hi].
struct FitSpec {
    AxisLabel axis = AxisLabel::r_A;
    double a = 0.0;
    double b = 0.0;
    double lo = 0.0;
    double hi = 1.0;
    std::uint64_t min_total = 100;

    bool operator==(const FitSpec &) const = default;
};

/// Run description. Config files are JSON objects whose keys mirror the
/// fields below; any key may be omitted to keep its default:
///
///   {"shape": [2, 3], "measure": "hs" | "induced:K", "samples": N,
///    "seed": S, "bins": 100, "workers": W, "checkpoint_every": C,
///    "out_dir": "DIR", "symmetrize": false, "ppt_tolerance": 1e-13,
///    "flatness_min_total": 1000,
///    "axes": [{"label": "c3_B", "lo": -1, "hi": 1, "bins": 100}],
///    "fits": [{"axis": "r_A", "a": 2, "b": 16, "lo": 0, "hi": 1}]}
struct ExperimentConfig {
    Bipartition shape{2, 3};
    MeasureSpec measure = MeasureSpec::hilbert_schmidt(6);
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::size_t bins = 100;
    std::vector<Axis> axes;  // overrides for individual axes
    std::size_t workers = 1;
    std::uint64_t checkpoint_every = 0;  // 0: checkpoint only at the end
    std::string out_dir;
    bool symmetrize = false;
    double ppt_tolerance = kPptTolerance;
    std::uint64_t flatness_min_total = 1000;
    std::vector<FitSpec> fits;  // empty: defaults for the shape

    // Session controls; not part of the config hash.
    bool resume = false;
    std::uint64_t stop_after = 0;  // stop this session after N samples (0: run to completion)

    /// Throws Validation with a description of the first violated rule.
    void validate() const;

    /// Axes recorded for this shape, with per-axis overrides applied.
    std::vector<Axis> effective_axes() const;
    std::vector<FitSpec> effective_fits() const;
    /// True for m*n <= 6, where PPT coincides with separability.
    bool ppt_is_separability() const noexcept {
        return shape.dim() <= 6;
    }

    nlohmann::json to_json() const;
    /// Overlays the keys present in j onto *this.
    void merge_json(const nlohmann::json &j);
    static ExperimentConfig from_json(const nlohmann::json &j);
    /// Overlays the keys of a JSON config file.
    void merge_file(const std::filesystem::path &path);
    static ExperimentConfig load_file(const std::filesystem::path &path);

    /// FNV-1a 64 of the canonical sampling-relevant subset: shape, measure,
    /// samples, seed, axes, symmetrize, tolerance.
    std::uint64_t hash() const;
};

/// "2x3" -> {2, 3}.
Bipartition parse_shape(const std::string &text);
/// "hs" or "induced:K" for a system of dimension n.
MeasureSpec parse_measure(const std::string &text, std::size_t n);
std::string measure_to_string(const MeasureSpec &m);

/// Merge-only counters of one run: everything a checkpoint has to carry.
struct ExperimentState {
    std::uint64_t next_index = 0;
    std::uint64_t n_total = 0;
    std::uint64_t n_ppt = 0;
    std::vector<HistogramPair> histograms;  // same order as effective_axes()
    std::optional<JointHistogram> joint;    // (r_A, R_B) when both subsystems have dim >= 2

    static ExperimentState empty_for(const ExperimentConfig &cfg);
    void add(const InvariantRecord &rec);
    void merge(const ExperimentState &other);
    bool operator==(const ExperimentState &) const = default;
};

struct FlatnessEntry {
    AxisLabel axis = AxisLabel::r_A;
    std::uint64_t min_total = 0;
    std::optional<FlatnessResult> result;
    std::string error;
};

struct FitEntry {
    FitSpec spec;
    std::optional<FitResult> result;
    std::string error;
};

struct ExperimentReport {
    ExperimentConfig config;
    ExperimentState state;
    bool complete = false;
    std::optional<RatioEstimate> overall;       // Wilson, 95%
    std::optional<RatioEstimate> overall_wald;  // Wald, 95%
    std::vector<FlatnessEntry> flatness;
    std::vector<FitEntry> fits;
    std::optional<JointHistogram> symmetrized_joint;
    double wall_seconds = 0.0;
    std::uint64_t session_samples = 0;

    const HistogramPair *histogram(AxisLabel label) const;
    /// Report body; timing goes under "timing" so it can be dropped for
    /// comparisons between runs.
    nlohmann::json to_json(bool include_timing = true) const;
};

/// Fills flatness, fits, overall estimates from a state.
ExperimentReport build_report(const ExperimentConfig &cfg, ExperimentState state);

using ProgressCallback = std::function<void(std::uint64_t done, std::uint64_t total)>;

/// Samples indices [next, samples) in checkpoint-sized segments spread over
/// cfg.workers threads. With cfg.out_dir set, a checkpoint is written after
/// every segment and the report is exported on completion.
ExperimentReport run_experiment(const ExperimentConfig &cfg, const ProgressCallback &progress = {});

std::filesystem::path checkpoint_path(const std::filesystem::path &out_dir);
void write_checkpoint(const std::filesystem::path &path, const ExperimentConfig &cfg, const ExperimentState &state);
/// Throws CorruptCheckpoint on checksum or structure errors and Io when the
/// file cannot be read.
std::pair<ExperimentConfig, ExperimentState> read_checkpoint(const std::filesystem::path &path);

/// Rebuilds the report stored in a checkpoint without sampling.
ExperimentReport report_from_checkpoint(const std::filesystem::path &path);

/// report.json, one CSV per axis, joint_r_R.csv, R_sym.csv when symmetrized,
/// and a MANIFEST of "checksum  file" lines. Creates out_dir if needed.
void export_report(const ExperimentReport &report, const std::filesystem::path &out_dir);

/// Flatness over every "<axis>.csv" in dir plus the requested fits.
nlohmann::json analyze_directory(const std::filesystem::path &dir, std::uint64_t min_total,
                                 const std::vector<FitSpec> &fits);

/// FNV-1a 64 over bytes.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::string hex64(std::uint64_t v);

}  // namespace casimir
