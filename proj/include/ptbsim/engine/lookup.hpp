#pragma once

#include <algorithm>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ptbsim::engine {

struct LookupPoint {
    double x;
    double y;
};

/// Piecewise-linear tabulated function. Evaluation outside the breakpoint
/// range clamps to the nearest endpoint.
class LookupTable {
public:
    LookupTable() = default;

    explicit LookupTable(std::vector<LookupPoint> points) : points_(std::move(points)) {
        if (points_.size() < 2) {
            throw std::invalid_argument("lookup table needs at least 2 points, got " +
                                        std::to_string(points_.size()));
        }
        for (std::size_t i = 1; i < points_.size(); ++i) {
            if (!(points_[i].x > points_[i - 1].x)) {
                throw std::invalid_argument("lookup table x values must be strictly increasing (index " +
                                            std::to_string(i) + ")");
            }
        }
    }

    LookupTable(std::initializer_list<LookupPoint> points)
        : LookupTable(std::vector<LookupPoint>(points)) {}

    [[nodiscard]] double operator()(double x) const noexcept {
        if (points_.empty()) {
            return 0.0;
        }
        if (x <= points_.front().x) {
            return points_.front().y;
        }
        if (x >= points_.back().x) {
            return points_.back().y;
        }
        auto hi = std::upper_bound(points_.begin(), points_.end(), x,
                                   [](double v, const LookupPoint& p) { return v < p.x; });
        auto lo = hi - 1;
        if (x == lo->x) {
            return lo->y;
        }
        const double w = (x - lo->x) / (hi->x - lo->x);
        return lo->y + w * (hi->y - lo->y);
    }

    [[nodiscard]] std::span<const LookupPoint> points() const noexcept { return points_; }

private:
    std::vector<LookupPoint> points_;
};

[[nodiscard]] inline double lookup_eval(const LookupTable& table, double x) noexcept {
    return table(x);
}

}  // namespace ptbsim::engine
