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

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <unistd.h>

#include "gtest/gtest.h"

#include "casimir/error.hpp"

using namespace casimir;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string &name) {
    const fs::path dir = fs::temp_directory_path() / ("casimir_test_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

ExperimentConfig small_config(std::uint64_t samples = 3000) {
    ExperimentConfig cfg;
    cfg.shape = {2, 3};
    cfg.measure = MeasureSpec::hilbert_schmidt(6);
    cfg.samples = samples;
    cfg.seed = 77;
    cfg.bins = 20;
    return cfg;
}

// Report body without settings that only affect how a run executes.
nlohmann::json outcome(const ExperimentReport &rep) {
    auto j = rep.to_json(false);
    for (const char *key : {"workers", "checkpoint_every", "out_dir"}) {
        j["config"].erase(key);
    }
    return j;
}

ErrorCode code_of(const std::function<void()> &fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::Validation;
}

}  // namespace

TEST(config, validation) {
    auto cfg = small_config();
    EXPECT_NO_THROW(cfg.validate());
    cfg.samples = 0;
    EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::Validation);
    cfg = small_config();
    cfg.workers = 0;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = small_config();
    cfg.measure = MeasureSpec::hilbert_schmidt(4);
    EXPECT_THROW(cfg.validate(), Error);
    cfg = small_config();
    cfg.symmetrize = true;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = small_config();
    cfg.axes.push_back(Axis::default_for(AxisLabel::C002));
    EXPECT_THROW(cfg.validate(), Error);
}

TEST(config, parsing) {
    EXPECT_EQ(parse_shape("2x3"), (Bipartition{2, 3}));
    EXPECT_EQ(parse_shape("3x3"), (Bipartition{3, 3}));
    EXPECT_THROW(parse_shape("2by3"), Error);
    EXPECT_THROW(parse_shape("2x"), Error);
    EXPECT_EQ(parse_measure("hs", 6), MeasureSpec::hilbert_schmidt(6));
    EXPECT_EQ(parse_measure("induced:9", 6), MeasureSpec::induced(6, 9));
    EXPECT_THROW(parse_measure("bures", 6), Error);
    EXPECT_EQ(measure_to_string(MeasureSpec::induced(6, 9)), "induced:9");
}

TEST(config, json_round_trip_and_hash) {
    auto cfg = small_config();
    cfg.fits.push_back({AxisLabel::R_B, 7, 32, 0.0, 0.5, 100});
    const auto back = ExperimentConfig::from_json(cfg.to_json());
    EXPECT_EQ(back.to_json(), cfg.to_json());
    EXPECT_EQ(back.hash(), cfg.hash());
    auto other = cfg;
    other.seed = 78;
    EXPECT_NE(other.hash(), cfg.hash());
    other = cfg;
    other.workers = 8;
    other.checkpoint_every = 100;
    EXPECT_EQ(other.hash(), cfg.hash());
    EXPECT_THROW(cfg.merge_json(nlohmann::json{{"sampels", 5}}), Error);
    cfg.merge_json(nlohmann::json{{"shape", "3x3"}});
    EXPECT_EQ(cfg.shape, (Bipartition{3, 3}));
    EXPECT_EQ(cfg.measure.n, 9u);
}

TEST(experiment, counts_are_consistent) {
    const auto rep = run_experiment(small_config());
    EXPECT_TRUE(rep.complete);
    EXPECT_EQ(rep.state.n_total, 3000u);
    EXPECT_EQ(rep.state.next_index, 3000u);
    for (const auto &h : rep.state.histograms) {
        EXPECT_EQ(h.count(), 3000u) << axis_name(h.axis().label);
        std::uint64_t hits = h.out_of_range_hits();
        for (auto v : h.hits()) {
            hits += v;
        }
        EXPECT_EQ(hits, rep.state.n_ppt);
    }
    ASSERT_TRUE(rep.overall.has_value());
    EXPECT_LE(rep.overall->ci_lo, rep.overall->p_hat);
    EXPECT_GE(rep.overall->ci_hi, rep.overall->p_hat);
}

TEST(experiment, worker_count_does_not_change_results) {
    auto cfg = small_config(5000);
    cfg.workers = 1;
    const auto one = run_experiment(cfg);
    for (std::size_t w : {2, 8}) {
        cfg.workers = w;
        const auto many = run_experiment(cfg);
        EXPECT_EQ(many.state, one.state) << w;
        EXPECT_EQ(outcome(many), outcome(one)) << w;
    }
}

TEST(experiment, stop_and_resume_is_bit_identical) {
    const auto straight_dir = fresh_dir("straight");
    const auto resumed_dir = fresh_dir("resumed");
    auto cfg = small_config(4000);
    cfg.checkpoint_every = 700;
    cfg.out_dir = straight_dir.string();
    const auto straight = run_experiment(cfg);

    cfg.out_dir = resumed_dir.string();
    cfg.stop_after = 1500;
    cfg.resume = true;
    cfg.workers = 3;
    const auto partial = run_experiment(cfg);
    EXPECT_FALSE(partial.complete);
    EXPECT_EQ(partial.state.next_index, 1500u);
    EXPECT_FALSE(fs::exists(resumed_dir / "report.json"));
    const auto mid = run_experiment(cfg);
    EXPECT_EQ(mid.state.next_index, 3000u);
    cfg.stop_after = 0;
    cfg.workers = 2;
    const auto finished = run_experiment(cfg);
    EXPECT_TRUE(finished.complete);
    EXPECT_EQ(finished.session_samples, 1000u);
    EXPECT_EQ(finished.state, straight.state);
    EXPECT_EQ(outcome(finished), outcome(straight));
    for (const auto &entry : fs::directory_iterator(straight_dir)) {
        const auto name = entry.path().filename().string();
        if (entry.path().extension() == ".csv") {
            EXPECT_EQ(slurp(entry.path()), slurp(resumed_dir / name)) << name;
        }
    }
    EXPECT_EQ(read_checkpoint(checkpoint_path(straight_dir)).second, read_checkpoint(checkpoint_path(resumed_dir)).second);

    // Resuming a finished run samples nothing.
    const auto again = run_experiment(cfg);
    EXPECT_EQ(again.session_samples, 0u);
    EXPECT_EQ(again.state, straight.state);
    fs::remove_all(straight_dir);
    fs::remove_all(resumed_dir);
}

TEST(experiment, resume_rejects_changed_config) {
    const auto dir = fresh_dir("hash");
    auto cfg = small_config(1000);
    cfg.out_dir = dir.string();
    cfg.stop_after = 400;
    run_experiment(cfg);
    cfg.resume = true;
    cfg.seed += 1;
    EXPECT_EQ(code_of([&] { run_experiment(cfg); }), ErrorCode::ConfigHashMismatch);
    cfg.seed -= 1;
    cfg.workers = 4;
    EXPECT_NO_THROW(run_experiment(cfg));
    fs::remove_all(dir);
}

TEST(experiment, corrupt_checkpoint_is_detected) {
    const auto dir = fresh_dir("corrupt");
    auto cfg = small_config(500);
    cfg.out_dir = dir.string();
    run_experiment(cfg);
    const auto ckpt = checkpoint_path(dir);
    std::string text = slurp(ckpt);
    const auto pos = text.find("\"n_ppt\"");
    ASSERT_NE(pos, std::string::npos);
    const auto digit = text.find_first_of("0123456789", pos);
    text[digit] = text[digit] == '9' ? '8' : static_cast<char>(text[digit] + 1);
    std::ofstream(ckpt, std::ios::binary) << text;
    EXPECT_EQ(code_of([&] { read_checkpoint(ckpt); }), ErrorCode::CorruptCheckpoint);
    std::ofstream(ckpt, std::ios::binary) << "{not json";
    EXPECT_EQ(code_of([&] { read_checkpoint(ckpt); }), ErrorCode::CorruptCheckpoint);
    cfg.resume = true;
    EXPECT_EQ(code_of([&] { run_experiment(cfg); }), ErrorCode::CorruptCheckpoint);
    fs::remove_all(dir);
}

TEST(experiment, export_layout) {
    const auto dir = fresh_dir("export") / "nested" / "out";
    auto cfg = small_config(800);
    cfg.out_dir = dir.string();
    run_experiment(cfg);
    for (const char *name : {"report.json", "checkpoint.json", "MANIFEST", "r_A.csv", "R_B.csv", "c2_A.csv",
                             "c2_B.csv", "c3_B.csv", "joint_r_R.csv"}) {
        EXPECT_TRUE(fs::exists(dir / name)) << name;
    }
    EXPECT_FALSE(fs::exists(dir / "R_sym.csv"));
    EXPECT_FALSE(fs::exists(dir / "C002.csv"));
    const auto manifest = slurp(dir / "MANIFEST");
    EXPECT_NE(manifest.find("  r_A.csv\n"), std::string::npos);
    const auto r_a = slurp(dir / "r_A.csv");
    EXPECT_NE(manifest.find("fnv1a64:" + hex64(fnv1a64(r_a)) + "  " + std::to_string(r_a.size()) + "  r_A.csv"),
              std::string::npos);

    const auto rep = report_from_checkpoint(checkpoint_path(dir));
    EXPECT_EQ(rep.state.n_total, 800u);
    EXPECT_TRUE(rep.complete);
    fs::remove_all(fresh_dir("export"));
}

TEST(experiment, symmetrized_export) {
    const auto dir = fresh_dir("sym");
    ExperimentConfig cfg;
    cfg.shape = {2, 2};
    cfg.measure = MeasureSpec::hilbert_schmidt(4);
    cfg.samples = 2000;
    cfg.seed = 5;
    cfg.bins = 10;
    cfg.symmetrize = true;
    cfg.out_dir = dir.string();
    const auto rep = run_experiment(cfg);
    ASSERT_TRUE(rep.symmetrized_joint.has_value());
    EXPECT_TRUE(fs::exists(dir / "R_sym.csv"));
    EXPECT_TRUE(fs::exists(dir / "C002.csv"));
    const auto marginal = rep.symmetrized_joint->marginal_x();
    EXPECT_EQ(marginal.in_range_total(), 2 * rep.state.joint->marginal_x().in_range_total());
    fs::remove_all(dir);
}

TEST(experiment, analyze_directory_reads_exports) {
    const auto dir = fresh_dir("analyze");
    auto cfg = small_config(20000);
    cfg.out_dir = dir.string();
    run_experiment(cfg);
    const auto out = analyze_directory(dir, 100, {{AxisLabel::r_A, 2, 16, 0.0, 1.0, 100}});
    ASSERT_EQ(out["flatness"].size(), 5u);
    ASSERT_EQ(out["fits"].size(), 1u);
    EXPECT_TRUE(out["fits"][0].contains("scale"));
    EXPECT_EQ(code_of([&] { analyze_directory(dir / "missing", 100, {}); }), ErrorCode::Io);
    fs::remove_all(dir);
}
