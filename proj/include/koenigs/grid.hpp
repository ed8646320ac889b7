#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "koenigs/error.hpp"
#include "koenigs/jet.hpp"

namespace koenigs {

/// Polar sample set of the open unit disk: circles of radius r_j with a
/// fixed number of equally spaced angles each, starting at angle 0.
///
/// A level of radius 0 contributes the single point z = 0 whatever its count.
class DiskGrid {
  public:
    DiskGrid(std::vector<double> levels, std::vector<int> counts)
        : levels_(std::move(levels)), counts_(std::move(counts)) {
        if (levels_.empty() || levels_.size() != counts_.size()) {
            throw RangeError("grid needs one angular count per radial level");
        }
        for (std::size_t j = 0; j < levels_.size(); ++j) {
            if (!(levels_[j] >= 0.0 && levels_[j] < 1.0)) {
                throw RangeError("grid radii must lie in [0, 1)");
            }
            if (j > 0 && !(levels_[j] > levels_[j - 1])) {
                throw RangeError("grid radii must be strictly increasing");
            }
            if (counts_[j] < 1) {
                throw RangeError("angular counts must be positive");
            }
            if (levels_[j] == 0.0) {
                counts_[j] = 1;
            }
        }
        points_.reserve(size());
        for (std::size_t j = 0; j < levels_.size(); ++j) {
            for (int m = 0; m < counts_[j]; ++m) {
                const double angle = 2.0 * std::numbers::pi * static_cast<double>(m) / counts_[j];
                points_.push_back(std::polar(levels_[j], angle));
            }
        }
    }

    /// Angular count used at ladder level j: base * 2^ceil(j/2), capped.
    static int ladder_count(int j, int base, int cap) {
        const int doublings = (j + 1) / 2;
        const double n = std::ldexp(static_cast<double>(base), doublings);
        return static_cast<int>(std::min<double>(n, cap));
    }

    /// Origin plus the geometric ladder r_j = 1 - 2^-j, j = 1..depth. Radii
    /// above `r_max` are replaced by `r_max` (once).
    static DiskGrid ladder(int depth, int angular_base = 64, int angular_cap = 8192, double r_max = 1.0) {
        if (depth < 1) {
            throw RangeError("ladder depth must be at least 1");
        }
        std::vector<double> levels{0.0};
        std::vector<int> counts{1};
        for (int j = 1; j <= depth; ++j) {
            const double r = std::min(1.0 - std::ldexp(1.0, -j), r_max);
            if (r <= levels.back()) {
                break;
            }
            levels.push_back(r);
            counts.push_back(ladder_count(j, angular_base, angular_cap));
        }
        return DiskGrid(std::move(levels), std::move(counts));
    }

    /// The standard grid used by validation and the condition checkers.
    static DiskGrid standard(int depth = 10, double r_max = 1.0) { return ladder(depth, 64, 8192, r_max); }

    /// The standard ladder plus `rings - 1` equally spaced circles inside
    /// |z| < 1/2, which the ladder skips. Suits integrands with interior extrema.
    static DiskGrid standard_with_interior(int depth = 10, double r_max = 1.0, int rings = 8) {
        const DiskGrid base = standard(depth, r_max);
        std::vector<double> levels{0.0};
        std::vector<int> counts{1};
        for (int k = 1; k < rings; ++k) {
            const double r = std::min(0.5 * k / rings, r_max);
            if (r <= levels.back()) {
                break;
            }
            levels.push_back(r);
            counts.push_back(64);
        }
        for (std::size_t j = 1; j < base.levels().size(); ++j) {
            if (base.levels()[j] > levels.back()) {
                levels.push_back(base.levels()[j]);
                counts.push_back(base.counts()[j]);
            }
        }
        return DiskGrid(std::move(levels), std::move(counts));
    }

    /// Filled disk |z| <= radius: `rings` equally spaced circles plus the origin.
    static DiskGrid filled(double radius, int rings = 16, int angles = 128) {
        if (!(radius > 0.0 && radius < 1.0) || rings < 1) {
            throw RangeError("filled grid needs 0 < radius < 1 and at least one ring");
        }
        std::vector<double> levels{0.0};
        std::vector<int> counts{1};
        for (int k = 1; k <= rings; ++k) {
            levels.push_back(radius * k / rings);
            counts.push_back(angles);
        }
        return DiskGrid(std::move(levels), std::move(counts));
    }

    /// A single circle.
    static DiskGrid circle(double radius, int angles) { return DiskGrid({radius}, {angles}); }

    const std::vector<double>& levels() const noexcept { return levels_; }
    const std::vector<int>& counts() const noexcept { return counts_; }
    const std::vector<cplx>& points() const noexcept { return points_; }

    std::size_t size() const noexcept {
        std::size_t n = 0;
        for (int c : counts_) {
            n += static_cast<std::size_t>(c);
        }
        return n;
    }

  private:
    std::vector<double> levels_;
    std::vector<int> counts_;
    std::vector<cplx> points_;
};

}  // namespace koenigs
