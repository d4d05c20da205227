#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace ptbsim::calibration {

struct OptimizerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SimplexOptions {
    std::size_t max_evaluations = 2000;
    double relative_tolerance = 1e-8;  // on the spread of simplex objective values
    double size_tolerance = 1e-10;     // on the simplex diameter, in box-normalized units
    double initial_step = 0.1;         // fraction of each box side
    std::size_t max_restarts = 4;
};

struct SimplexResult {
    std::vector<double> x;
    double value = std::numeric_limits<double>::infinity();
    std::size_t evaluations = 0;
    std::size_t restarts = 0;
};

/// Derivative-free minimization over the box [lower, upper] by the
/// Nelder-Mead simplex (reflect / expand / contract / shrink). Trial points
/// are clipped to the box. Non-finite objective values are treated as +inf.
/// After convergence the simplex is rebuilt around the best point while it
/// keeps improving and budget remains.
class NelderMead {
public:
    using Objective = std::function<double(const std::vector<double>&)>;

    explicit NelderMead(SimplexOptions options = {}) : opt_(options) {}

    SimplexResult minimize(const Objective& f, std::vector<double> x0, const std::vector<double>& lower,
                           const std::vector<double>& upper) const {
        const std::size_t n = x0.size();
        if (n == 0) throw std::invalid_argument("simplex needs at least one dimension");
        if (lower.size() != n || upper.size() != n) throw std::invalid_argument("bound sizes do not match x0");
        for (std::size_t i = 0; i < n; ++i) {
            if (!(lower[i] <= upper[i])) throw std::invalid_argument("lower bound exceeds upper bound");
        }

        // Work in the unit cube so each coordinate has comparable scale.
        auto to_box = [&](const std::vector<double>& u) {
            std::vector<double> x(n);
            for (std::size_t i = 0; i < n; ++i) x[i] = lower[i] + u[i] * (upper[i] - lower[i]);
            return x;
        };
        std::vector<double> u0(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double w = upper[i] - lower[i];
            u0[i] = w > 0.0 ? std::clamp((x0[i] - lower[i]) / w, 0.0, 1.0) : 0.0;
        }

        SimplexResult best;
        std::size_t evals = 0;
        bool any_finite = false;
        auto eval = [&](std::vector<double>& u) {
            for (double& v : u) v = std::clamp(v, 0.0, 1.0);
            double y = f(to_box(u));
            ++evals;
            if (!std::isfinite(y)) {
                y = std::numeric_limits<double>::infinity();
            } else {
                any_finite = true;
            }
            return y;
        };

        std::vector<double> u_best = u0;
        double f_best = eval(u_best);
        std::size_t restarts = 0;

        while (true) {
            const double before = f_best;
            run_simplex(eval, evals, u_best, f_best);
            if (evals >= opt_.max_evaluations || restarts >= opt_.max_restarts) break;
            const bool improved =
                before - f_best > opt_.relative_tolerance * std::max(std::abs(f_best), 1e-300);
            if (!improved) break;
            ++restarts;
        }

        if (!any_finite) throw OptimizerError("every objective evaluation was non-finite");
        best.x = to_box(u_best);
        best.value = f_best;
        best.evaluations = evals;
        best.restarts = restarts;
        return best;
    }

private:
    template <class Eval>
    void run_simplex(Eval& eval, std::size_t& evals, std::vector<double>& u_best, double& f_best) const {
        const std::size_t n = u_best.size();
        std::vector<std::vector<double>> pts(n + 1, u_best);
        std::vector<double> fv(n + 1, f_best);
        for (std::size_t i = 0; i < n && evals < opt_.max_evaluations; ++i) {
            double step = opt_.initial_step;
            if (pts[i + 1][i] + step > 1.0) step = -step;
            pts[i + 1][i] += step;
            fv[i + 1] = eval(pts[i + 1]);
        }

        std::vector<std::size_t> order(n + 1);
        std::vector<double> centroid(n), xr(n), xe(n), xc(n);

        while (evals < opt_.max_evaluations) {
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
            const std::size_t ib = order.front(), iw = order.back(), isw = order[n - 1];

            const double spread = fv[iw] - fv[ib];
            double diameter = 0.0;
            for (std::size_t k = 0; k <= n; ++k) {
                for (std::size_t i = 0; i < n; ++i) diameter = std::max(diameter, std::abs(pts[k][i] - pts[ib][i]));
            }
            if (std::isfinite(spread) &&
                (spread <= opt_.relative_tolerance * std::abs(fv[ib]) || fv[ib] == 0.0)) {
                break;
            }
            if (diameter < opt_.size_tolerance) break;

            std::fill(centroid.begin(), centroid.end(), 0.0);
            for (std::size_t k = 0; k <= n; ++k) {
                if (k == iw) continue;
                for (std::size_t i = 0; i < n; ++i) centroid[i] += pts[k][i] / static_cast<double>(n);
            }

            for (std::size_t i = 0; i < n; ++i) xr[i] = centroid[i] + (centroid[i] - pts[iw][i]);
            const double fr = eval(xr);

            if (fr < fv[ib]) {
                for (std::size_t i = 0; i < n; ++i) xe[i] = centroid[i] + 2.0 * (centroid[i] - pts[iw][i]);
                const double fe = evals < opt_.max_evaluations ? eval(xe) : std::numeric_limits<double>::infinity();
                if (fe < fr) {
                    pts[iw] = xe;
                    fv[iw] = fe;
                } else {
                    pts[iw] = xr;
                    fv[iw] = fr;
                }
                continue;
            }
            if (fr < fv[isw]) {
                pts[iw] = xr;
                fv[iw] = fr;
                continue;
            }

            const bool outside = fr < fv[iw];
            for (std::size_t i = 0; i < n; ++i) {
                xc[i] = outside ? centroid[i] + 0.5 * (xr[i] - centroid[i])
                                : centroid[i] + 0.5 * (pts[iw][i] - centroid[i]);
            }
            if (evals >= opt_.max_evaluations) break;
            const double fc = eval(xc);
            if (fc < (outside ? fr : fv[iw])) {
                pts[iw] = xc;
                fv[iw] = fc;
                continue;
            }

            for (std::size_t k = 0; k <= n && evals < opt_.max_evaluations; ++k) {
                if (k == ib) continue;
                for (std::size_t i = 0; i < n; ++i) pts[k][i] = pts[ib][i] + 0.5 * (pts[k][i] - pts[ib][i]);
                fv[k] = eval(pts[k]);
            }
        }

        for (std::size_t k = 0; k <= n; ++k) {
            if (fv[k] < f_best) {
                f_best = fv[k];
                u_best = pts[k];
            }
        }
    }

    SimplexOptions opt_;
};

}  // namespace ptbsim::calibration
