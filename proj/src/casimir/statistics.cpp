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

#include "casimir/statistics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <utility>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "casimir/error.hpp"

namespace casimir {

namespace {

constexpr std::array<std::pair<AxisLabel, std::string_view>, 6> kAxisNames = {{
    {AxisLabel::r_A, "r_A"},
    {AxisLabel::R_B, "R_B"},
    {AxisLabel::c2_A, "c2_A"},
    {AxisLabel::c2_B, "c2_B"},
    {AxisLabel::c3_B, "c3_B"},
    {AxisLabel::C002, "C002"},
}};

std::string fmt_double(double v) {
    std::ostringstream s;
    s.precision(std::numeric_limits<double>::max_digits10);
    s << v;
    return s.str();
}

std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream s(line);
    while (std::getline(s, field, ',')) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

void require_same_axis(const Axis &a, const Axis &b) {
    if (!(a == b)) {
        throw Error(ErrorCode::AxisMismatch, "histograms have different axes");
    }
}

}  // namespace

std::string_view axis_name(AxisLabel label) {
    for (const auto &[l, name] : kAxisNames) {
        if (l == label) {
            return name;
        }
    }
    return "?";
}

std::optional<AxisLabel> parse_axis_name(std::string_view name) {
    for (const auto &[l, n] : kAxisNames) {
        if (n == name) {
            return l;
        }
    }
    return std::nullopt;
}

Axis Axis::default_for(AxisLabel label, std::size_t bins) {
    switch (label) {
        case AxisLabel::c3_B:
            return {label, -1.0, 1.0, bins};
        case AxisLabel::C002:
            return {label, 0.0, 3.0, bins};
        default:
            return {label, 0.0, 1.0, bins};
    }
}

void Axis::validate() const {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw Error(ErrorCode::Validation, std::string("axis ") + std::string(axis_name(label)) + " needs lo < hi");
    }
    if (bins == 0) {
        throw Error(ErrorCode::Validation, std::string("axis ") + std::string(axis_name(label)) + " needs bins >= 1");
    }
}

std::optional<std::size_t> Axis::bin_index(double value) const noexcept {
    if (!(value >= lo && value <= hi)) {
        return std::nullopt;
    }
    const double scaled = (value - lo) / (hi - lo) * static_cast<double>(bins);
    const auto idx = static_cast<std::size_t>(scaled);
    return std::min(idx, bins - 1);
}

HistogramPair::HistogramPair(Axis axis) : axis_(axis), total_(axis.bins, 0), hits_(axis.bins, 0) {
    axis_.validate();
}

std::uint64_t HistogramPair::in_range_total() const noexcept {
    std::uint64_t s = 0;
    for (auto t : total_) {
        s += t;
    }
    return s;
}

void HistogramPair::accumulate(double value, bool ppt) noexcept {
    if (auto idx = axis_.bin_index(value)) {
        ++total_[*idx];
        hits_[*idx] += ppt ? 1 : 0;
        return;
    }
    if (value < axis_.lo) {
        ++underflow_;
    } else {
        ++overflow_;
    }
    out_of_range_hits_ += ppt ? 1 : 0;
}

void HistogramPair::set_counts(std::vector<std::uint64_t> total, std::vector<std::uint64_t> hits,
                               std::uint64_t underflow, std::uint64_t overflow, std::uint64_t out_of_range_hits) {
    if (total.size() != axis_.bins || hits.size() != axis_.bins) {
        throw Error(ErrorCode::Validation, "histogram counts do not match the axis bin count");
    }
    for (std::size_t i = 0; i < total.size(); ++i) {
        if (hits[i] > total[i]) {
            throw Error(ErrorCode::Validation, "histogram hits exceed totals");
        }
    }
    if (out_of_range_hits > underflow + overflow) {
        throw Error(ErrorCode::Validation, "out-of-range hits exceed out-of-range totals");
    }
    total_ = std::move(total);
    hits_ = std::move(hits);
    underflow_ = underflow;
    overflow_ = overflow;
    out_of_range_hits_ = out_of_range_hits;
}

HistogramPair &HistogramPair::merge(const HistogramPair &other) {
    require_same_axis(axis_, other.axis_);
    for (std::size_t i = 0; i < total_.size(); ++i) {
        total_[i] += other.total_[i];
        hits_[i] += other.hits_[i];
    }
    underflow_ += other.underflow_;
    overflow_ += other.overflow_;
    out_of_range_hits_ += other.out_of_range_hits_;
    return *this;
}

HistogramPair merge(HistogramPair a, const HistogramPair &b) {
    a.merge(b);
    return a;
}

double normal_critical_value(double level) {
    if (!(level > 0.0 && level < 1.0)) {
        throw Error(ErrorCode::Validation, "confidence level must lie in (0, 1)");
    }
    return boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + 0.5 * level);
}

RatioEstimate ratio_with_ci(std::uint64_t hits, std::uint64_t total, double level, CiMethod method) {
    if (total == 0) {
        throw Error(ErrorCode::EmptyCell, "ratio of an empty cell");
    }
    if (hits > total) {
        throw Error(ErrorCode::Validation, "hits exceed total");
    }
    const double z = normal_critical_value(level);
    const double n = static_cast<double>(total);
    const double p = static_cast<double>(hits) / n;
    RatioEstimate est;
    est.p_hat = p;
    est.level = level;
    est.method = method;
    if (method == CiMethod::Wald) {
        const double half = z * std::sqrt(p * (1.0 - p) / n);
        est.ci_lo = p - half;
        est.ci_hi = p + half;
        return est;
    }
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    est.ci_lo = std::clamp(center - half, 0.0, p);
    est.ci_hi = std::clamp(center + half, p, 1.0);
    return est;
}

double chi_square_upper_tail(double chi2, double dof) {
    if (!(dof > 0.0)) {
        throw Error(ErrorCode::Validation, "chi-square needs dof > 0");
    }
    if (chi2 <= 0.0) {
        return 1.0;
    }
    return boost::math::gamma_q(0.5 * dof, 0.5 * chi2);
}

FlatnessResult flatness_test(const HistogramPair &h, std::uint64_t min_total, bool exclude_last_bin) {
    const auto total = h.total();
    const auto hits = h.hits();
    std::size_t end = total.size();
    if (exclude_last_bin && end > 0) {
        --end;
    }
    std::vector<std::size_t> used;
    double all = 0.0;
    double all_hits = 0.0;
    for (std::size_t i = 0; i < end; ++i) {
        if (total[i] > 0 && total[i] >= min_total) {
            used.push_back(i);
            all += static_cast<double>(total[i]);
            all_hits += static_cast<double>(hits[i]);
        }
    }
    if (used.size() < 2) {
        throw Error(ErrorCode::InsufficientData, "flatness test needs at least two bins with total >= " +
                                                     std::to_string(min_total) + " on axis " +
                                                     std::string(axis_name(h.axis().label)));
    }
    FlatnessResult res;
    res.bins_used = used.size();
    res.dof = used.size() - 1;
    const double pooled = all_hits / all;
    if (pooled <= 0.0 || pooled >= 1.0) {
        // Every bin has the same degenerate proportion.
        res.chi2 = 0.0;
        res.p_value = 1.0;
        return res;
    }
    double chi2 = 0.0;
    for (std::size_t i : used) {
        const double t = static_cast<double>(total[i]);
        const double obs_hit = static_cast<double>(hits[i]);
        const double obs_miss = t - obs_hit;
        const double exp_hit = t * pooled;
        const double exp_miss = t - exp_hit;
        chi2 += (obs_hit - exp_hit) * (obs_hit - exp_hit) / exp_hit;
        chi2 += (obs_miss - exp_miss) * (obs_miss - exp_miss) / exp_miss;
    }
    res.chi2 = chi2;
    res.p_value = chi_square_upper_tail(chi2, static_cast<double>(res.dof));
    return res;
}

double radial_model_mass(double a, double b, double bin_lo, double bin_hi) {
    const double x = 0.5 * (bin_lo + bin_hi);
    const double one_minus = 1.0 - x * x;
    if (one_minus <= 0.0 || x < 0.0) {
        return 0.0;
    }
    return std::pow(x, a) * std::pow(one_minus, b) * (bin_hi - bin_lo);
}

FitResult fit_scale(const HistogramPair &h, double a, double b, double lo, double hi, std::uint64_t min_total) {
    const Axis &axis = h.axis();
    if (!(lo < hi) || lo < axis.lo - 1e-12 || hi > axis.hi + 1e-12) {
        throw Error(ErrorCode::Validation, "fit range must be a sub-interval of the axis");
    }
    const double eps = 1e-9 * axis.width();
    const auto total = h.total();
    std::vector<std::pair<std::size_t, double>> cells;
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < axis.bins; ++i) {
        const double blo = axis.bin_lo(i);
        const double bhi = axis.bin_hi(i);
        if (blo < lo - eps || bhi > hi + eps) {
            continue;
        }
        const double m = radial_model_mass(a, b, blo, bhi);
        if (!(m > 0.0)) {
            continue;
        }
        cells.emplace_back(i, m);
        num += static_cast<double>(total[i]) * m;
        den += m * m;
    }
    if (cells.empty() || !(den > 0.0)) {
        throw Error(ErrorCode::InsufficientData, "no bins with positive model mass inside the fit range");
    }
    FitResult res;
    res.scale = num / den;
    res.bins_fitted = cells.size();
    for (const auto &[i, m] : cells) {
        if (total[i] < min_total) {
            continue;
        }
        const double expected = res.scale * m;
        res.max_rel_residual =
            std::max(res.max_rel_residual, std::abs(static_cast<double>(total[i]) - expected) / expected);
        ++res.bins_checked;
    }
    if (res.bins_checked == 0) {
        throw Error(ErrorCode::InsufficientData,
                    "no bins inside the fit range reach total >= " + std::to_string(min_total));
    }
    return res;
}

JointHistogram::JointHistogram(Axis axis_x, Axis axis_y)
    : axis_x_(axis_x), axis_y_(axis_y), total_(axis_x.bins * axis_y.bins, 0), hits_(axis_x.bins * axis_y.bins, 0) {
    axis_x_.validate();
    axis_y_.validate();
}

void JointHistogram::accumulate(double x, double y, bool ppt) noexcept {
    const auto ix = axis_x_.bin_index(x);
    const auto iy = axis_y_.bin_index(y);
    if (!ix || !iy) {
        ++overflow_;
        return;
    }
    const std::size_t cell = *ix * axis_y_.bins + *iy;
    ++total_[cell];
    hits_[cell] += ppt ? 1 : 0;
}

void JointHistogram::set_counts(std::vector<std::uint64_t> total, std::vector<std::uint64_t> hits,
                                std::uint64_t overflow) {
    if (total.size() != total_.size() || hits.size() != hits_.size()) {
        throw Error(ErrorCode::Validation, "joint histogram counts do not match the axes");
    }
    for (std::size_t i = 0; i < total.size(); ++i) {
        if (hits[i] > total[i]) {
            throw Error(ErrorCode::Validation, "joint histogram hits exceed totals");
        }
    }
    total_ = std::move(total);
    hits_ = std::move(hits);
    overflow_ = overflow;
}

JointHistogram &JointHistogram::merge(const JointHistogram &other) {
    require_same_axis(axis_x_, other.axis_x_);
    require_same_axis(axis_y_, other.axis_y_);
    for (std::size_t i = 0; i < total_.size(); ++i) {
        total_[i] += other.total_[i];
        hits_[i] += other.hits_[i];
    }
    overflow_ += other.overflow_;
    return *this;
}

JointHistogram JointHistogram::symmetrized() const {
    if (axis_x_.lo != axis_y_.lo || axis_x_.hi != axis_y_.hi || axis_x_.bins != axis_y_.bins) {
        throw Error(ErrorCode::AxisMismatch, "symmetrize needs identical x and y axes");
    }
    JointHistogram out = *this;
    const std::size_t n = axis_x_.bins;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            out.total_[i * n + j] = total_[i * n + j] + total_[j * n + i];
            out.hits_[i * n + j] = hits_[i * n + j] + hits_[j * n + i];
        }
    }
    out.overflow_ = 2 * overflow_;
    return out;
}

HistogramPair JointHistogram::marginal_x() const {
    std::vector<std::uint64_t> t(axis_x_.bins, 0);
    std::vector<std::uint64_t> h(axis_x_.bins, 0);
    for (std::size_t i = 0; i < axis_x_.bins; ++i) {
        for (std::size_t j = 0; j < axis_y_.bins; ++j) {
            t[i] += total(i, j);
            h[i] += hits(i, j);
        }
    }
    HistogramPair out(axis_x_);
    out.set_counts(std::move(t), std::move(h));
    return out;
}

HistogramPair JointHistogram::marginal_y() const {
    std::vector<std::uint64_t> t(axis_y_.bins, 0);
    std::vector<std::uint64_t> h(axis_y_.bins, 0);
    for (std::size_t i = 0; i < axis_x_.bins; ++i) {
        for (std::size_t j = 0; j < axis_y_.bins; ++j) {
            t[j] += total(i, j);
            h[j] += hits(i, j);
        }
    }
    HistogramPair out(axis_y_);
    out.set_counts(std::move(t), std::move(h));
    return out;
}

RatioEstimate JointHistogram::ratio(std::size_t ix, std::size_t iy, double level, CiMethod method) const {
    return ratio_with_ci(hits(ix, iy), total(ix, iy), level, method);
}

std::vector<std::optional<RatioEstimate>> JointHistogram::ratios(double level, CiMethod method) const {
    std::vector<std::optional<RatioEstimate>> out(total_.size());
    for (std::size_t c = 0; c < total_.size(); ++c) {
        if (total_[c] > 0) {
            out[c] = ratio_with_ci(hits_[c], total_[c], level, method);
        }
    }
    return out;
}

void write_histogram_csv(std::ostream &out, const HistogramPair &h, double level, CiMethod method) {
    const Axis &axis = h.axis();
    out << "bin_lo,bin_hi,total,hits,p_hat,ci_lo,ci_hi\n";
    for (std::size_t i = 0; i < axis.bins; ++i) {
        out << fmt_double(axis.bin_lo(i)) << ',' << fmt_double(axis.bin_hi(i)) << ',' << h.total()[i] << ','
            << h.hits()[i] << ',';
        if (h.total()[i] > 0) {
            const RatioEstimate est = ratio_with_ci(h.hits()[i], h.total()[i], level, method);
            out << fmt_double(est.p_hat) << ',' << fmt_double(est.ci_lo) << ',' << fmt_double(est.ci_hi);
        } else {
            out << ",,";
        }
        out << '\n';
    }
}

HistogramPair read_histogram_csv(std::istream &in, AxisLabel label) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("bin_lo,bin_hi,total,hits", 0) != 0) {
        throw Error(ErrorCode::Validation, "histogram CSV: missing header");
    }
    std::vector<double> edges_lo;
    std::vector<double> edges_hi;
    std::vector<std::uint64_t> total;
    std::vector<std::uint64_t> hits;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() < 4) {
            throw Error(ErrorCode::Validation, "histogram CSV: short row '" + line + "'");
        }
        try {
            edges_lo.push_back(std::stod(fields[0]));
            edges_hi.push_back(std::stod(fields[1]));
            total.push_back(std::stoull(fields[2]));
            hits.push_back(std::stoull(fields[3]));
        } catch (const std::exception &) {
            throw Error(ErrorCode::Validation, "histogram CSV: malformed row '" + line + "'");
        }
    }
    if (total.empty()) {
        throw Error(ErrorCode::Validation, "histogram CSV: no rows");
    }
    Axis axis{label, edges_lo.front(), edges_hi.back(), total.size()};
    HistogramPair h(axis);
    h.set_counts(std::move(total), std::move(hits));
    return h;
}

void write_joint_csv(std::ostream &out, const JointHistogram &j) {
    out << "xbin,ybin,total,hits\n";
    for (std::size_t ix = 0; ix < j.axis_x().bins; ++ix) {
        for (std::size_t iy = 0; iy < j.axis_y().bins; ++iy) {
            if (j.total(ix, iy) > 0) {
                out << ix << ',' << iy << ',' << j.total(ix, iy) << ',' << j.hits(ix, iy) << '\n';
            }
        }
    }
}

}  // namespace casimir
