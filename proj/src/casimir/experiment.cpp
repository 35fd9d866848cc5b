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

#include "casimir/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "casimir/error.hpp"

namespace casimir {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kCheckpointVersion = 1;
constexpr std::size_t kMaxSubsystemDim = 8;

bool axis_applies(AxisLabel label, Bipartition shape) {
    switch (label) {
        case AxisLabel::r_A:
        case AxisLabel::c2_A:
            return shape.dim_a >= 2;
        case AxisLabel::R_B:
        case AxisLabel::c2_B:
            return shape.dim_b >= 2;
        case AxisLabel::c3_B:
            return shape.dim_b == 3;
        case AxisLabel::C002:
            return shape.dim_a == 2 && shape.dim_b == 2;
    }
    return false;
}

double axis_value(AxisLabel label, const InvariantRecord &rec) {
    switch (label) {
        case AxisLabel::r_A:
            return rec.r_a;
        case AxisLabel::R_B:
            return rec.r_b;
        case AxisLabel::c2_A:
            return rec.c2_a;
        case AxisLabel::c2_B:
            return rec.c2_b;
        case AxisLabel::c3_B:
            return rec.c3_b.value_or(0.0);
        case AxisLabel::C002:
            return rec.c002.value_or(0.0);
    }
    return 0.0;
}

AxisLabel require_axis(const std::string &name) {
    auto label = parse_axis_name(name);
    if (!label) {
        throw Error(ErrorCode::Validation, "unknown axis label '" + name + "'");
    }
    return *label;
}

json axis_to_json(const Axis &a) {
    return {{"label", std::string(axis_name(a.label))}, {"lo", a.lo}, {"hi", a.hi}, {"bins", a.bins}};
}

Axis axis_from_json(const json &j) {
    Axis a = Axis::default_for(require_axis(j.at("label").get<std::string>()));
    a.lo = j.value("lo", a.lo);
    a.hi = j.value("hi", a.hi);
    a.bins = j.value("bins", a.bins);
    return a;
}

json fit_to_json(const FitSpec &f) {
    return {{"axis", std::string(axis_name(f.axis))}, {"a", f.a}, {"b", f.b},
            {"lo", f.lo}, {"hi", f.hi}, {"min_total", f.min_total}};
}

FitSpec fit_from_json(const json &j) {
    FitSpec f;
    f.axis = require_axis(j.at("axis").get<std::string>());
    f.a = j.at("a").get<double>();
    f.b = j.at("b").get<double>();
    f.lo = j.value("lo", 0.0);
    f.hi = j.value("hi", 1.0);
    f.min_total = j.value("min_total", std::uint64_t{100});
    return f;
}

json ratio_to_json(const RatioEstimate &r) {
    return {{"p_hat", r.p_hat},
            {"ci_lo", r.ci_lo},
            {"ci_hi", r.ci_hi},
            {"level", r.level},
            {"method", r.method == CiMethod::Wald ? "wald" : "wilson"}};
}

json flatness_to_json(const FlatnessEntry &e) {
    json j = {{"axis", std::string(axis_name(e.axis))}, {"min_total", e.min_total}};
    if (e.result) {
        j["chi2"] = e.result->chi2;
        j["dof"] = e.result->dof;
        j["p_value"] = e.result->p_value;
        j["bins_used"] = e.result->bins_used;
    } else {
        j["error"] = e.error;
    }
    return j;
}

json fit_entry_to_json(const FitEntry &e) {
    json j = fit_to_json(e.spec);
    if (e.result) {
        j["scale"] = e.result->scale;
        j["max_rel_residual"] = e.result->max_rel_residual;
        j["bins_fitted"] = e.result->bins_fitted;
        j["bins_checked"] = e.result->bins_checked;
    } else {
        j["error"] = e.error;
    }
    return j;
}

json histogram_to_json(const HistogramPair &h) {
    json j = axis_to_json(h.axis());
    j["total"] = std::vector<std::uint64_t>(h.total().begin(), h.total().end());
    j["hits"] = std::vector<std::uint64_t>(h.hits().begin(), h.hits().end());
    j["underflow"] = h.underflow();
    j["overflow"] = h.overflow();
    j["out_of_range_hits"] = h.out_of_range_hits();
    return j;
}

FlatnessEntry run_flatness(const HistogramPair &h, std::uint64_t min_total) {
    FlatnessEntry e;
    e.axis = h.axis().label;
    e.min_total = min_total;
    try {
        e.result = flatness_test(h, min_total, true);
    } catch (const Error &err) {
        e.error = err.what();
    }
    return e;
}

FitEntry run_fit(const FitSpec &spec, const HistogramPair *h) {
    FitEntry e;
    e.spec = spec;
    if (h == nullptr) {
        e.error = "axis " + std::string(axis_name(spec.axis)) + " not recorded";
        return e;
    }
    try {
        e.result = fit_scale(*h, spec.a, spec.b, spec.lo, spec.hi, spec.min_total);
    } catch (const Error &err) {
        e.error = err.what();
    }
    return e;
}

std::string read_file(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file_atomic(const fs::path &path, const std::string &content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorCode::Io, "cannot write " + tmp.string());
        }
        out << content;
        out.flush();
        if (!out) {
            throw Error(ErrorCode::Io, "write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        throw Error(ErrorCode::Io, "cannot move " + tmp.string() + " into place: " + ec.message());
    }
}

void ensure_dir(const fs::path &dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw Error(ErrorCode::Io, "cannot create directory " + dir.string());
    }
}

void set_shape_keep_measure(ExperimentConfig &cfg, Bipartition shape) {
    cfg.shape = shape;
    if (cfg.measure.label == MeasureLabel::HilbertSchmidt) {
        cfg.measure = MeasureSpec::hilbert_schmidt(shape.dim());
    } else {
        cfg.measure = MeasureSpec::induced(shape.dim(), cfg.measure.k);
    }
}

// Processes sample indices [begin, end) across workers; each worker owns a
// private state and the results are summed afterwards.
ExperimentState process_range(const ExperimentConfig &cfg, const RecordContext &ctx, std::uint64_t begin,
                              std::uint64_t end) {
    const std::size_t workers = std::max<std::size_t>(1, cfg.workers);
    std::vector<ExperimentState> local(workers, ExperimentState::empty_for(cfg));
    const std::uint64_t span = end - begin;
    const std::uint64_t chunk = std::clamp<std::uint64_t>(span / (workers * 8), 1, 4096);
    std::atomic<std::uint64_t> cursor{begin};

    auto body = [&](std::size_t w) {
        ExperimentState &st = local[w];
        for (;;) {
            const std::uint64_t lo = cursor.fetch_add(chunk);
            if (lo >= end) {
                break;
            }
            const std::uint64_t hi = std::min(end, lo + chunk);
            for (std::uint64_t i = lo; i < hi; ++i) {
                const DensityMatrix rho = sample_state(cfg.measure, {cfg.seed, i});
                st.add(ctx.record(rho, cfg.ppt_tolerance));
            }
        }
    };

    if (workers == 1) {
        body(0);
    } else {
        std::vector<std::thread> threads;
        std::vector<std::exception_ptr> errors(workers);
        threads.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            threads.emplace_back([&, w] {
                try {
                    body(w);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto &t : threads) {
            t.join();
        }
        for (const auto &e : errors) {
            if (e) {
                std::rethrow_exception(e);
            }
        }
    }

    ExperimentState merged = ExperimentState::empty_for(cfg);
    for (const auto &st : local) {
        merged.merge(st);
    }
    return merged;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

Bipartition parse_shape(const std::string &text) {
    const auto x = text.find_first_of("xX");
    if (x == std::string::npos) {
        throw Error(ErrorCode::Validation, "shape must look like MxN, got '" + text + "'");
    }
    try {
        std::size_t used_a = 0;
        std::size_t used_b = 0;
        const std::string a = text.substr(0, x);
        const std::string b = text.substr(x + 1);
        const unsigned long m = std::stoul(a, &used_a);
        const unsigned long n = std::stoul(b, &used_b);
        if (used_a != a.size() || used_b != b.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return {m, n};
    } catch (const std::exception &) {
        throw Error(ErrorCode::Validation, "shape must look like MxN, got '" + text + "'");
    }
}

MeasureSpec parse_measure(const std::string &text, std::size_t n) {
    if (text == "hs") {
        return MeasureSpec::hilbert_schmidt(n);
    }
    const std::string prefix = "induced:";
    if (text.rfind(prefix, 0) == 0) {
        try {
            std::size_t used = 0;
            const std::string tail = text.substr(prefix.size());
            const unsigned long k = std::stoul(tail, &used);
            if (used == tail.size() && k >= 1) {
                return MeasureSpec::induced(n, k);
            }
        } catch (const std::exception &) {
        }
    }
    throw Error(ErrorCode::Validation, "measure must be 'hs' or 'induced:K', got '" + text + "'");
}

std::string measure_to_string(const MeasureSpec &m) {
    if (m.label == MeasureLabel::HilbertSchmidt) {
        return "hs";
    }
    return "induced:" + std::to_string(m.k);
}

void ExperimentConfig::validate() const {
    if (shape.dim_a < 1 || shape.dim_b < 1 || shape.dim_a > kMaxSubsystemDim || shape.dim_b > kMaxSubsystemDim) {
        throw Error(ErrorCode::Validation, "subsystem dimensions must lie in 1..8");
    }
    if (shape.dim() < 2) {
        throw Error(ErrorCode::Validation, "shape 1x1 has nothing to sample");
    }
    measure.validate();
    if (measure.n != shape.dim()) {
        throw Error(ErrorCode::Validation, "measure dimension " + std::to_string(measure.n) +
                                               " does not match shape dimension " + std::to_string(shape.dim()));
    }
    if (samples < 1) {
        throw Error(ErrorCode::Validation, "samples must be >= 1");
    }
    if (workers < 1) {
        throw Error(ErrorCode::Validation, "workers must be >= 1");
    }
    if (bins < 1) {
        throw Error(ErrorCode::Validation, "bins must be >= 1");
    }
    if (!(ppt_tolerance >= 0.0)) {
        throw Error(ErrorCode::Validation, "ppt_tolerance must be >= 0");
    }
    for (const auto &a : axes) {
        a.validate();
        if (!axis_applies(a.label, shape)) {
            throw Error(ErrorCode::Validation, "axis " + std::string(axis_name(a.label)) + " does not apply to shape " +
                                                   std::to_string(shape.dim_a) + "x" + std::to_string(shape.dim_b));
        }
    }
    for (const auto &f : fits) {
        if (!axis_applies(f.axis, shape)) {
            throw Error(ErrorCode::Validation, "fit axis " + std::string(axis_name(f.axis)) + " is not recorded");
        }
        if (!(f.lo < f.hi)) {
            throw Error(ErrorCode::Validation, "fit range needs lo < hi");
        }
    }
    if (symmetrize) {
        if (shape.dim_a != shape.dim_b) {
            throw Error(ErrorCode::Validation, "symmetrize needs equal subsystem dimensions");
        }
        const auto eff = effective_axes();
        const auto find = [&](AxisLabel l) {
            return *std::find_if(eff.begin(), eff.end(), [&](const Axis &a) { return a.label == l; });
        };
        const Axis x = find(AxisLabel::r_A);
        const Axis y = find(AxisLabel::R_B);
        if (x.lo != y.lo || x.hi != y.hi || x.bins != y.bins) {
            throw Error(ErrorCode::Validation, "symmetrize needs identical r_A and R_B axes");
        }
    }
}

std::vector<Axis> ExperimentConfig::effective_axes() const {
    std::vector<Axis> out;
    for (AxisLabel label : {AxisLabel::r_A, AxisLabel::R_B, AxisLabel::c2_A, AxisLabel::c2_B, AxisLabel::c3_B,
                            AxisLabel::C002}) {
        if (!axis_applies(label, shape)) {
            continue;
        }
        Axis a = Axis::default_for(label, bins);
        for (const auto &o : axes) {
            if (o.label == label) {
                a = o;
            }
        }
        out.push_back(a);
    }
    return out;
}

std::vector<FitSpec> ExperimentConfig::effective_fits() const {
    if (!fits.empty()) {
        return fits;
    }
    // A qubit factor of an induced (N, K) state is itself induced with
    // ancilla (other dim) * K, whose Bloch-radius density is
    // r^2 (1 - r^2)^(ancilla - 2).
    std::vector<FitSpec> out;
    const double k = static_cast<double>(measure.k);
    if (shape.dim_a == 2) {
        out.push_back({AxisLabel::r_A, 2.0, static_cast<double>(shape.dim_b) * k - 2.0, 0.0, 1.0, 100});
    }
    if (shape.dim_b == 2) {
        out.push_back({AxisLabel::R_B, 2.0, static_cast<double>(shape.dim_a) * k - 2.0, 0.0, 1.0, 100});
    }
    if (shape == Bipartition{2, 3} && measure.label == MeasureLabel::HilbertSchmidt) {
        // Empirical qutrit model, good on the lower half of the radius range.
        out.push_back({AxisLabel::R_B, 7.0, 32.0, 0.0, 0.5, 100});
    }
    return out;
}

json ExperimentConfig::to_json() const {
    json axes_json = json::array();
    for (const auto &a : axes) {
        axes_json.push_back(axis_to_json(a));
    }
    json fits_json = json::array();
    for (const auto &f : fits) {
        fits_json.push_back(fit_to_json(f));
    }
    return {{"shape", {shape.dim_a, shape.dim_b}},
            {"measure", measure_to_string(measure)},
            {"samples", samples},
            {"seed", seed},
            {"bins", bins},
            {"axes", axes_json},
            {"workers", workers},
            {"checkpoint_every", checkpoint_every},
            {"out_dir", out_dir},
            {"symmetrize", symmetrize},
            {"ppt_tolerance", ppt_tolerance},
            {"flatness_min_total", flatness_min_total},
            {"fits", fits_json}};
}

void ExperimentConfig::merge_json(const json &j) {
    if (!j.is_object()) {
        throw Error(ErrorCode::Validation, "config must be a JSON object");
    }
    static const std::vector<std::string> kKnown = {
        "shape", "measure", "samples", "seed", "bins", "axes", "workers", "checkpoint_every",
        "out_dir", "symmetrize", "ppt_tolerance", "flatness_min_total", "fits"};
    for (const auto &[key, _] : j.items()) {
        if (std::find(kKnown.begin(), kKnown.end(), key) == kKnown.end()) {
            throw Error(ErrorCode::Validation, "unknown config key '" + key + "'");
        }
    }
    try {
        if (j.contains("shape")) {
            const auto &s = j.at("shape");
            Bipartition shape = s.is_string() ? parse_shape(s.get<std::string>())
                                              : Bipartition{s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()};
            set_shape_keep_measure(*this, shape);
        }
        if (j.contains("measure")) {
            measure = parse_measure(j.at("measure").get<std::string>(), shape.dim());
        }
        samples = j.value("samples", samples);
        seed = j.value("seed", seed);
        bins = j.value("bins", bins);
        workers = j.value("workers", workers);
        checkpoint_every = j.value("checkpoint_every", checkpoint_every);
        out_dir = j.value("out_dir", out_dir);
        symmetrize = j.value("symmetrize", symmetrize);
        ppt_tolerance = j.value("ppt_tolerance", ppt_tolerance);
        flatness_min_total = j.value("flatness_min_total", flatness_min_total);
        if (j.contains("axes")) {
            axes.clear();
            for (const auto &a : j.at("axes")) {
                axes.push_back(axis_from_json(a));
            }
        }
        if (j.contains("fits")) {
            fits.clear();
            for (const auto &f : j.at("fits")) {
                fits.push_back(fit_from_json(f));
            }
        }
    } catch (const json::exception &e) {
        throw Error(ErrorCode::Validation, std::string("config: ") + e.what());
    }
}

ExperimentConfig ExperimentConfig::from_json(const json &j) {
    ExperimentConfig cfg;
    cfg.merge_json(j);
    return cfg;
}

void ExperimentConfig::merge_file(const fs::path &path) {
    const std::string text = read_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception &e) {
        throw Error(ErrorCode::Validation, "config file " + path.string() + " is not valid JSON: " + e.what());
    }
    merge_json(j);
}

ExperimentConfig ExperimentConfig::load_file(const fs::path &path) {
    ExperimentConfig cfg;
    cfg.merge_file(path);
    return cfg;
}

std::uint64_t ExperimentConfig::hash() const {
    json axes_json = json::array();
    for (const auto &a : effective_axes()) {
        axes_json.push_back(axis_to_json(a));
    }
    const json canonical = {{"shape", {shape.dim_a, shape.dim_b}},
                            {"measure", {{"n", measure.n}, {"k", measure.k}}},
                            {"samples", samples},
                            {"seed", seed},
                            {"axes", axes_json},
                            {"symmetrize", symmetrize},
                            {"ppt_tolerance", ppt_tolerance}};
    return fnv1a64(canonical.dump());
}

ExperimentState ExperimentState::empty_for(const ExperimentConfig &cfg) {
    ExperimentState st;
    const auto axes = cfg.effective_axes();
    for (const auto &a : axes) {
        st.histograms.emplace_back(a);
    }
    if (cfg.shape.dim_a >= 2 && cfg.shape.dim_b >= 2) {
        const auto find = [&](AxisLabel l) {
            return *std::find_if(axes.begin(), axes.end(), [&](const Axis &a) { return a.label == l; });
        };
        st.joint = JointHistogram(find(AxisLabel::r_A), find(AxisLabel::R_B));
    }
    return st;
}

void ExperimentState::add(const InvariantRecord &rec) {
    ++n_total;
    n_ppt += rec.ppt ? 1 : 0;
    for (auto &h : histograms) {
        h.accumulate(axis_value(h.axis().label, rec), rec.ppt);
    }
    if (joint) {
        joint->accumulate(rec.r_a, rec.r_b, rec.ppt);
    }
}

void ExperimentState::merge(const ExperimentState &other) {
    if (histograms.size() != other.histograms.size() || joint.has_value() != other.joint.has_value()) {
        throw Error(ErrorCode::AxisMismatch, "experiment states record different axes");
    }
    n_total += other.n_total;
    n_ppt += other.n_ppt;
    for (std::size_t i = 0; i < histograms.size(); ++i) {
        histograms[i].merge(other.histograms[i]);
    }
    if (joint) {
        joint->merge(*other.joint);
    }
}

const HistogramPair *ExperimentReport::histogram(AxisLabel label) const {
    for (const auto &h : state.histograms) {
        if (h.axis().label == label) {
            return &h;
        }
    }
    return nullptr;
}

json ExperimentReport::to_json(bool include_timing) const {
    json j;
    j["config"] = config.to_json();
    j["config_hash"] = hex64(config.hash());
    j["complete"] = complete;
    j["criterion"] = config.ppt_is_separability() ? "separable" : "ppt";
    j["n_total"] = state.n_total;
    j["n_ppt"] = state.n_ppt;
    j["next_index"] = state.next_index;
    j["overall"] = overall ? ratio_to_json(*overall) : json(nullptr);
    j["overall_wald"] = overall_wald ? ratio_to_json(*overall_wald) : json(nullptr);
    json axes_json = json::array();
    for (const auto &h : state.histograms) {
        json a = axis_to_json(h.axis());
        a["file"] = std::string(axis_name(h.axis().label)) + ".csv";
        a["in_range_total"] = h.in_range_total();
        a["underflow"] = h.underflow();
        a["overflow"] = h.overflow();
        axes_json.push_back(a);
    }
    j["axes"] = axes_json;
    if (state.joint) {
        j["joint"] = {{"file", "joint_r_R.csv"}, {"x", "r_A"}, {"y", "R_B"}, {"overflow", state.joint->overflow()}};
    } else {
        j["joint"] = nullptr;
    }
    if (symmetrized_joint) {
        j["symmetrized"] = {{"file", "R_sym.csv"}};
    }
    json flat = json::array();
    for (const auto &f : flatness) {
        flat.push_back(flatness_to_json(f));
    }
    j["flatness"] = flat;
    json fit_json = json::array();
    for (const auto &f : fits) {
        fit_json.push_back(fit_entry_to_json(f));
    }
    j["fits"] = fit_json;
    if (include_timing) {
        j["timing"] = {{"wall_seconds", wall_seconds},
                       {"session_samples", session_samples},
                       {"samples_per_second",
                        wall_seconds > 0.0 ? static_cast<double>(session_samples) / wall_seconds : 0.0}};
    }
    return j;
}

ExperimentReport build_report(const ExperimentConfig &cfg, ExperimentState state) {
    ExperimentReport rep;
    rep.config = cfg;
    rep.state = std::move(state);
    rep.complete = rep.state.next_index >= cfg.samples;
    if (rep.state.n_total > 0) {
        rep.overall = ratio_with_ci(rep.state.n_ppt, rep.state.n_total, 0.95, CiMethod::Wilson);
        rep.overall_wald = ratio_with_ci(rep.state.n_ppt, rep.state.n_total, 0.95, CiMethod::Wald);
    }
    for (const auto &h : rep.state.histograms) {
        rep.flatness.push_back(run_flatness(h, cfg.flatness_min_total));
    }
    for (const auto &spec : cfg.effective_fits()) {
        rep.fits.push_back(run_fit(spec, rep.histogram(spec.axis)));
    }
    if (cfg.symmetrize && rep.state.joint) {
        rep.symmetrized_joint = rep.state.joint->symmetrized();
    }
    return rep;
}

fs::path checkpoint_path(const fs::path &out_dir) {
    return out_dir / "checkpoint.json";
}

void write_checkpoint(const fs::path &path, const ExperimentConfig &cfg, const ExperimentState &state) {
    json j;
    j["format"] = "casimir-checkpoint";
    j["version"] = kCheckpointVersion;
    j["config"] = cfg.to_json();
    j["config_hash"] = hex64(cfg.hash());
    j["next_index"] = state.next_index;
    j["n_total"] = state.n_total;
    j["n_ppt"] = state.n_ppt;
    json hists = json::array();
    for (const auto &h : state.histograms) {
        hists.push_back(histogram_to_json(h));
    }
    j["histograms"] = hists;
    if (state.joint) {
        j["joint"] = {{"total", std::vector<std::uint64_t>(state.joint->total().begin(), state.joint->total().end())},
                      {"hits", std::vector<std::uint64_t>(state.joint->hits().begin(), state.joint->hits().end())},
                      {"overflow", state.joint->overflow()}};
    } else {
        j["joint"] = nullptr;
    }
    j["checksum"] = hex64(fnv1a64(j.dump()));
    if (path.has_parent_path()) {
        ensure_dir(path.parent_path());
    }
    write_file_atomic(path, j.dump(1) + "\n");
}

std::pair<ExperimentConfig, ExperimentState> read_checkpoint(const fs::path &path) {
    const std::string text = read_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception &e) {
        throw Error(ErrorCode::CorruptCheckpoint, path.string() + ": not valid JSON");
    }
    try {
        if (j.value("format", std::string()) != "casimir-checkpoint" || j.value("version", 0) != kCheckpointVersion) {
            throw Error(ErrorCode::CorruptCheckpoint, path.string() + ": unknown format or version");
        }
        const std::string stored = j.at("checksum").get<std::string>();
        json body = j;
        body.erase("checksum");
        if (hex64(fnv1a64(body.dump())) != stored) {
            throw Error(ErrorCode::CorruptCheckpoint, path.string() + ": checksum mismatch");
        }
        ExperimentConfig cfg = ExperimentConfig::from_json(j.at("config"));
        if (hex64(cfg.hash()) != j.at("config_hash").get<std::string>()) {
            throw Error(ErrorCode::CorruptCheckpoint, path.string() + ": embedded config does not match its hash");
        }
        ExperimentState st = ExperimentState::empty_for(cfg);
        st.next_index = j.at("next_index").get<std::uint64_t>();
        st.n_total = j.at("n_total").get<std::uint64_t>();
        st.n_ppt = j.at("n_ppt").get<std::uint64_t>();
        const auto &hists = j.at("histograms");
        if (hists.size() != st.histograms.size()) {
            throw Error(ErrorCode::CorruptCheckpoint, path.string() + ": histogram count does not match config");
        }
        for (std::size_t i = 0; i < hists.size(); ++i) {
            const auto &hj = hists[i];
            if (!(axis_from_json(hj) == st.histograms[i].axis())) {
                throw Error(ErrorCode::CorruptCheckpoint, path.string() + ": histogram axis does not match config");
            }
            st.histograms[i].set_counts(hj.at("total").get<std::vector<std::uint64_t>>(),
                                        hj.at("hits").get<std::vector<std::uint64_t>>(),
                                        hj.at("underflow").get<std::uint64_t>(), hj.at("overflow").get<std::uint64_t>(),
                                        hj.at("out_of_range_hits").get<std::uint64_t>());
        }
        if (st.joint) {
            const auto &jj = j.at("joint");
            st.joint->set_counts(jj.at("total").get<std::vector<std::uint64_t>>(),
                                 jj.at("hits").get<std::vector<std::uint64_t>>(), jj.at("overflow").get<std::uint64_t>());
        }
        if (st.n_ppt > st.n_total || st.n_total != st.next_index) {
            throw Error(ErrorCode::CorruptCheckpoint, path.string() + ": inconsistent counters");
        }
        return {cfg, st};
    } catch (const json::exception &e) {
        throw Error(ErrorCode::CorruptCheckpoint, path.string() + ": " + e.what());
    } catch (const Error &e) {
        if (e.code() == ErrorCode::CorruptCheckpoint) {
            throw;
        }
        throw Error(ErrorCode::CorruptCheckpoint, path.string() + ": " + e.what());
    }
}

ExperimentReport report_from_checkpoint(const fs::path &path) {
    auto [cfg, state] = read_checkpoint(path);
    return build_report(cfg, std::move(state));
}

ExperimentReport run_experiment(const ExperimentConfig &cfg, const ProgressCallback &progress) {
    cfg.validate();
    const auto started = std::chrono::steady_clock::now();
    ExperimentState state = ExperimentState::empty_for(cfg);
    const bool persist = !cfg.out_dir.empty();
    const fs::path ckpt = persist ? checkpoint_path(cfg.out_dir) : fs::path();
    if (persist && cfg.resume && fs::exists(ckpt)) {
        auto [stored_cfg, stored_state] = read_checkpoint(ckpt);
        if (stored_cfg.hash() != cfg.hash()) {
            throw Error(ErrorCode::ConfigHashMismatch, "checkpoint " + ckpt.string() + " was written by a different config (" +
                                                           hex64(stored_cfg.hash()) + " vs " + hex64(cfg.hash()) + ")");
        }
        state = std::move(stored_state);
    }

    const RecordContext ctx(cfg.shape);
    const std::uint64_t session_begin = state.next_index;
    const std::uint64_t session_end =
        cfg.stop_after > 0 ? std::min(cfg.samples, session_begin + cfg.stop_after) : cfg.samples;
    const std::uint64_t segment = cfg.checkpoint_every > 0 ? cfg.checkpoint_every : cfg.samples;

    while (state.next_index < session_end) {
        const std::uint64_t begin = state.next_index;
        const std::uint64_t end = std::min(session_end, begin + segment);
        state.merge(process_range(cfg, ctx, begin, end));
        state.next_index = end;
        if (persist) {
            write_checkpoint(ckpt, cfg, state);
        }
        if (progress) {
            progress(state.next_index, cfg.samples);
        }
    }
    if (persist && state.next_index == session_begin && !fs::exists(ckpt)) {
        write_checkpoint(ckpt, cfg, state);
    }

    ExperimentReport rep = build_report(cfg, std::move(state));
    rep.session_samples = rep.state.next_index - session_begin;
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (persist && rep.complete) {
        export_report(rep, cfg.out_dir);
    }
    return rep;
}

void export_report(const ExperimentReport &report, const fs::path &out_dir) {
    ensure_dir(out_dir);
    std::vector<std::pair<std::string, std::string>> files;
    files.emplace_back("report.json", report.to_json(true).dump(2) + "\n");
    for (const auto &h : report.state.histograms) {
        std::ostringstream csv;
        write_histogram_csv(csv, h);
        files.emplace_back(std::string(axis_name(h.axis().label)) + ".csv", csv.str());
    }
    if (report.state.joint) {
        std::ostringstream csv;
        write_joint_csv(csv, *report.state.joint);
        files.emplace_back("joint_r_R.csv", csv.str());
    }
    if (report.symmetrized_joint) {
        std::ostringstream csv;
        write_histogram_csv(csv, report.symmetrized_joint->marginal_x());
        files.emplace_back("R_sym.csv", csv.str());
    }
    std::ostringstream manifest;
    for (const auto &[name, content] : files) {
        write_file_atomic(out_dir / name, content);
        manifest << "fnv1a64:" << hex64(fnv1a64(content)) << "  " << content.size() << "  " << name << '\n';
    }
    write_file_atomic(out_dir / "MANIFEST", manifest.str());
}

json analyze_directory(const fs::path &dir, std::uint64_t min_total, const std::vector<FitSpec> &fits) {
    if (!fs::is_directory(dir)) {
        throw Error(ErrorCode::Io, "not a directory: " + dir.string());
    }
    std::map<std::string, HistogramPair> loaded;
    for (const auto &entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".csv") {
            continue;
        }
        const auto label = parse_axis_name(entry.path().stem().string());
        if (!label) {
            continue;
        }
        std::istringstream in(read_file(entry.path()));
        loaded.emplace(std::string(axis_name(*label)), read_histogram_csv(in, *label));
    }
    if (loaded.empty()) {
        throw Error(ErrorCode::Io, "no axis CSV files found in " + dir.string());
    }
    json out;
    out["in"] = dir.string();
    json flat = json::array();
    for (const auto &[name, h] : loaded) {
        FlatnessEntry e = run_flatness(h, min_total);
        json fj = flatness_to_json(e);
        fj["n_total"] = h.in_range_total();
        std::uint64_t hits = 0;
        for (auto v : h.hits()) {
            hits += v;
        }
        fj["n_ppt"] = hits;
        flat.push_back(fj);
    }
    out["flatness"] = flat;
    json fit_json = json::array();
    for (const auto &spec : fits) {
        auto it = loaded.find(std::string(axis_name(spec.axis)));
        fit_json.push_back(fit_entry_to_json(run_fit(spec, it == loaded.end() ? nullptr : &it->second)));
    }
    out["fits"] = fit_json;
    return out;
}

}  // namespace casimir
