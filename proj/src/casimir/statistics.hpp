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

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace casimir {

enum class AxisLabel { r_A, R_B, c2_A, c2_B, c3_B, C002 };

std::string_view axis_name(AxisLabel label);
std::optional<AxisLabel> parse_axis_name(std::string_view name);

/// Uniform binning of [lo, hi] into `bins` cells. Cells are half-open
/// [lo + i w, lo + (i+1) w) except the last, which is closed so that hi
/// itself (e.g. radius 1 for pure states) is representable.
struct Axis {
    AxisLabel label = AxisLabel::r_A;
    double lo = 0.0;
    double hi = 1.0;
    std::size_t bins = 100;

    /// (0, 1) for radii and quadratic Casimirs, (-1, 1) for c3, (0, 3) for C002.
    static Axis default_for(AxisLabel label, std::size_t bins = 100);

    void validate() const;
    double width() const noexcept {
        return (hi - lo) / static_cast<double>(bins);
    }
    double bin_lo(std::size_t i) const noexcept {
        return lo + static_cast<double>(i) * width();
    }
    double bin_hi(std::size_t i) const noexcept {
        return i + 1 == bins ? hi : lo + static_cast<double>(i + 1) * width();
    }
    /// nullopt for values outside [lo, hi] and NaN.
    std::optional<std::size_t> bin_index(double value) const noexcept;

    bool operator==(const Axis &) const = default;
};

/// Paired counts of all samples and PPT-positive samples per bin.
class HistogramPair {
   public:
    HistogramPair() = default;
    explicit HistogramPair(Axis axis);

    const Axis &axis() const noexcept {
        return axis_;
    }
    std::span<const std::uint64_t> total() const noexcept {
        return total_;
    }
    std::span<const std::uint64_t> hits() const noexcept {
        return hits_;
    }
    std::uint64_t underflow() const noexcept {
        return underflow_;
    }
    /// Values above hi and NaN.
    std::uint64_t overflow() const noexcept {
        return overflow_;
    }
    std::uint64_t out_of_range_hits() const noexcept {
        return out_of_range_hits_;
    }
    std::uint64_t in_range_total() const noexcept;
    /// Number of accumulate calls absorbed, in range or not.
    std::uint64_t count() const noexcept {
        return in_range_total() + underflow_ + overflow_;
    }

    void accumulate(double value, bool ppt) noexcept;
    /// Adds raw counts; used when reloading checkpoints and CSV exports.
    void set_counts(std::vector<std::uint64_t> total, std::vector<std::uint64_t> hits, std::uint64_t underflow = 0,
                    std::uint64_t overflow = 0, std::uint64_t out_of_range_hits = 0);
    /// Throws AxisMismatch when the axes differ.
    HistogramPair &merge(const HistogramPair &other);

    bool operator==(const HistogramPair &) const = default;

   private:
    Axis axis_;
    std::vector<std::uint64_t> total_;
    std::vector<std::uint64_t> hits_;
    std::uint64_t underflow_ = 0;
    std::uint64_t overflow_ = 0;
    std::uint64_t out_of_range_hits_ = 0;
};

HistogramPair merge(HistogramPair a, const HistogramPair &b);

enum class CiMethod { Wald, Wilson };

struct RatioEstimate {
    double p_hat = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double level = 0.95;
    CiMethod method = CiMethod::Wilson;
};

/// Two-sided standard-normal critical value for a confidence level.
double normal_critical_value(double level);

/// hits/total with a Wald or Wilson score interval. Throws EmptyCell when
/// total == 0 and Validation when hits > total or level is not in (0, 1).
RatioEstimate ratio_with_ci(std::uint64_t hits, std::uint64_t total, double level = 0.95,
                            CiMethod method = CiMethod::Wilson);

/// Upper tail P(X >= chi2) of a chi-square variable with dof degrees of freedom.
double chi_square_upper_tail(double chi2, double dof);

struct FlatnessResult {
    double chi2 = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
    std::size_t bins_used = 0;
};

/// Pearson chi-square homogeneity test of the per-bin PPT proportions over
/// bins with total >= min_total. The closed top bin (pure-state boundary for
/// radius axes) is skipped when exclude_last_bin is set. Throws
/// InsufficientData if fewer than two bins qualify.
FlatnessResult flatness_test(const HistogramPair &h, std::uint64_t min_total = 1000, bool exclude_last_bin = true);

struct FitResult {
    double scale = 0.0;
    double max_rel_residual = 0.0;
    std::size_t bins_fitted = 0;
    std::size_t bins_checked = 0;
};

/// Model count per bin: x^a (1 - x^2)^b at the bin midpoint times the bin width.
double radial_model_mass(double a, double b, double bin_lo, double bin_hi);

/// Least-squares scale s minimizing sum (total_i - s m_i)^2 over bins lying
/// within [lo, hi]; the residual is max |total_i - s m_i| / (s m_i) over those
/// bins with total >= min_total. Throws InsufficientData when nothing
/// qualifies.
FitResult fit_scale(const HistogramPair &h, double a, double b, double lo, double hi, std::uint64_t min_total = 100);

/// Two-axis counts stored row-major: cell (ix, iy) at ix * y_bins + iy.
class JointHistogram {
   public:
    JointHistogram() = default;
    JointHistogram(Axis axis_x, Axis axis_y);

    const Axis &axis_x() const noexcept {
        return axis_x_;
    }
    const Axis &axis_y() const noexcept {
        return axis_y_;
    }
    std::uint64_t total(std::size_t ix, std::size_t iy) const noexcept {
        return total_[ix * axis_y_.bins + iy];
    }
    std::uint64_t hits(std::size_t ix, std::size_t iy) const noexcept {
        return hits_[ix * axis_y_.bins + iy];
    }
    std::span<const std::uint64_t> total() const noexcept {
        return total_;
    }
    std::span<const std::uint64_t> hits() const noexcept {
        return hits_;
    }
    /// Samples with either coordinate out of range.
    std::uint64_t overflow() const noexcept {
        return overflow_;
    }

    void accumulate(double x, double y, bool ppt) noexcept;
    void set_counts(std::vector<std::uint64_t> total, std::vector<std::uint64_t> hits, std::uint64_t overflow = 0);
    JointHistogram &merge(const JointHistogram &other);

    /// j + j^T on both layers. Throws AxisMismatch unless both axes have
    /// identical bounds and bin counts.
    JointHistogram symmetrized() const;

    /// Row and column sums as 1-D histograms (in-range cells only).
    HistogramPair marginal_x() const;
    HistogramPair marginal_y() const;

    /// Throws EmptyCell for a cell with zero total.
    RatioEstimate ratio(std::size_t ix, std::size_t iy, double level = 0.95, CiMethod method = CiMethod::Wilson) const;
    /// Every cell in row-major order; nullopt where the cell is empty.
    std::vector<std::optional<RatioEstimate>> ratios(double level = 0.95, CiMethod method = CiMethod::Wilson) const;

    bool operator==(const JointHistogram &) const = default;

   private:
    Axis axis_x_;
    Axis axis_y_;
    std::vector<std::uint64_t> total_;
    std::vector<std::uint64_t> hits_;
    std::uint64_t overflow_ = 0;
};

/// Header "bin_lo,bin_hi,total,hits,p_hat,ci_lo,ci_hi"; empty bins leave the
/// three estimate columns blank.
void write_histogram_csv(std::ostream &out, const HistogramPair &h, double level = 0.95,
                         CiMethod method = CiMethod::Wilson);
/// Rebuilds a histogram (without overflow tallies) from its CSV export.
HistogramPair read_histogram_csv(std::istream &in, AxisLabel label);

/// Triplet form "xbin,ybin,total,hits", nonzero cells only.
void write_joint_csv(std::ostream &out, const JointHistogram &j);

}  // namespace casimir
