#pragma once

// Subplex: Nelder-Mead simplex searches run on a sequence of low-dimensional
// subspaces, re-chosen every cycle from the coordinates that moved the most.
//
// Rowan, T. (1990). Functional Stability Analysis of Numerical Algorithms.
// Coefficients below follow that thesis' recommended defaults.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace gasrank {

struct SubplexOptions {
    double ftol_rel = 1e-9;      // stop when a full cycle improves f by less than this (relative)
    double xtol_rel = 1e-10;     // Rowan's step-size test
    std::size_t max_evaluations = 100000;
    std::vector<double> initial_step;  // per coordinate; empty -> 0.1 * max(|x0|, 1)
};

struct SubplexResult {
    std::vector<double> x;
    double value = std::numeric_limits<double>::infinity();
    std::size_t evaluations = 0;
    std::size_t cycles = 0;
    bool converged = false;
    double final_tolerance = std::numeric_limits<double>::infinity();  // last relative cycle improvement
};

namespace detail {

struct SubplexCoefficients {
    static constexpr double reflect = 1.0;
    static constexpr double contract = 0.5;
    static constexpr double expand = 2.0;
    static constexpr double shrink = 0.5;
    static constexpr double psi = 0.25;    // inner simplex reduction target
    static constexpr double omega = 0.1;   // step rescaling bounds
};

// Splits coordinates (sorted by |progress| descending) into subspaces of
// 1..5 dimensions, each maximizing the mean |progress| inside minus the
// mean outside.
inline std::vector<std::vector<std::size_t>> partition_subspaces(const std::vector<double>& progress) {
    const std::size_t n = progress.size();
    const std::size_t ns_min = std::min<std::size_t>(2, n);
    const std::size_t ns_max = std::min<std::size_t>(5, n);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(progress[a]) > std::abs(progress[b]); });

    std::vector<std::vector<std::size_t>> out;
    std::size_t pos = 0;
    while (pos < n) {
        const std::size_t left = n - pos;
        std::size_t best_k = left;
        double best_goodness = -std::numeric_limits<double>::infinity();
        double remaining_total = 0.0;
        for (std::size_t i = pos; i < n; ++i) remaining_total += std::abs(progress[idx[i]]);
        double head = 0.0;
        for (std::size_t k = 1; k <= std::min(ns_max, left); ++k) {
            head += std::abs(progress[idx[pos + k - 1]]);
            if (k < ns_min) continue;
            const std::size_t rest = left - k;
            if (rest != 0 && rest < ns_min) continue;
            const double goodness = head / static_cast<double>(k) -
                                    (rest > 0 ? (remaining_total - head) / static_cast<double>(rest) : 0.0);
            if (goodness > best_goodness) {
                best_goodness = goodness;
                best_k = k;
            }
        }
        if (best_goodness == -std::numeric_limits<double>::infinity()) best_k = left;
        out.emplace_back(idx.begin() + static_cast<std::ptrdiff_t>(pos),
                         idx.begin() + static_cast<std::ptrdiff_t>(pos + best_k));
        pos += best_k;
    }
    return out;
}

}  // namespace detail

// Minimizes f: const std::vector<double>& -> double. Non-finite values are
// treated as +infinity.
template <class Objective>
SubplexResult subplex_minimize(Objective&& objective, std::vector<double> x0, const SubplexOptions& options = {}) {
    using C = detail::SubplexCoefficients;
    const std::size_t n = x0.size();
    SubplexResult result;
    auto eval = [&](const std::vector<double>& x) {
        ++result.evaluations;
        const double v = objective(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    std::vector<double> x = std::move(x0);
    double fx = eval(x);
    if (n == 0) {
        result.x = x;
        result.value = fx;
        result.converged = true;
        result.final_tolerance = 0.0;
        return result;
    }

    std::vector<double> step = options.initial_step;
    if (step.size() != n) {
        step.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) step[i] = 0.1 * std::max(std::abs(x[i]), 1.0);
    }
    std::vector<double> progress = step;
    std::size_t quiet_cycles = 0;

    while (result.evaluations < options.max_evaluations) {
        const std::vector<double> x_prev = x;
        const double f_prev = fx;
        const auto subspaces = detail::partition_subspaces(progress);

        for (const auto& sub : subspaces) {
            const std::size_t ns = sub.size();
            // Simplex vertices in subspace coordinates.
            std::vector<std::vector<double>> v(ns + 1, std::vector<double>(ns));
            std::vector<double> fv(ns + 1);
            for (std::size_t j = 0; j < ns; ++j) v[0][j] = x[sub[j]];
            fv[0] = fx;
            std::vector<double> full = x;
            auto eval_sub = [&](const std::vector<double>& p) {
                for (std::size_t j = 0; j < ns; ++j) full[sub[j]] = p[j];
                return eval(full);
            };
            for (std::size_t k = 1; k <= ns; ++k) {
                v[k] = v[0];
                v[k][k - 1] += step[sub[k - 1]];
                fv[k] = eval_sub(v[k]);
            }
            auto simplex_size = [&]() {
                double s = 0.0;
                for (std::size_t k = 1; k <= ns; ++k) {
                    double d = 0.0;
                    for (std::size_t j = 0; j < ns; ++j) d += std::abs(v[k][j] - v[0][j]);
                    s += d;
                }
                return s;
            };
            std::vector<std::size_t> order(ns + 1);
            auto sort_vertices = [&]() {
                std::iota(order.begin(), order.end(), 0);
                std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
                std::vector<std::vector<double>> nv(ns + 1);
                std::vector<double> nf(ns + 1);
                for (std::size_t k = 0; k <= ns; ++k) {
                    nv[k] = std::move(v[order[k]]);
                    nf[k] = fv[order[k]];
                }
                v = std::move(nv);
                fv = std::move(nf);
            };
            sort_vertices();
            const double size0 = simplex_size();
            std::vector<double> centroid(ns), trial(ns), trial2(ns);
            while (result.evaluations < options.max_evaluations) {
                if (simplex_size() <= C::psi * size0) break;
                std::fill(centroid.begin(), centroid.end(), 0.0);
                for (std::size_t k = 0; k < ns; ++k)
                    for (std::size_t j = 0; j < ns; ++j) centroid[j] += v[k][j];
                for (double& c : centroid) c /= static_cast<double>(ns);
                auto& worst = v[ns];
                for (std::size_t j = 0; j < ns; ++j) trial[j] = centroid[j] + C::reflect * (centroid[j] - worst[j]);
                const double fr = eval_sub(trial);
                if (fr < fv[0]) {
                    for (std::size_t j = 0; j < ns; ++j) trial2[j] = centroid[j] + C::expand * (trial[j] - centroid[j]);
                    const double fe = eval_sub(trial2);
                    if (fe < fr) {
                        worst = trial2;
                        fv[ns] = fe;
                    } else {
                        worst = trial;
                        fv[ns] = fr;
                    }
                } else if (fr < fv[ns - 1]) {
                    worst = trial;
                    fv[ns] = fr;
                } else {
                    const bool outside = fr < fv[ns];
                    for (std::size_t j = 0; j < ns; ++j)
                        trial2[j] = outside ? centroid[j] + C::contract * (trial[j] - centroid[j])
                                            : centroid[j] + C::contract * (worst[j] - centroid[j]);
                    const double fc = eval_sub(trial2);
                    if (fc < std::min(fr, fv[ns])) {
                        worst = trial2;
                        fv[ns] = fc;
                    } else if (outside && fr < fv[ns]) {
                        worst = trial;
                        fv[ns] = fr;
                    } else {
                        for (std::size_t k = 1; k <= ns; ++k) {
                            for (std::size_t j = 0; j < ns; ++j) v[k][j] = v[0][j] + C::shrink * (v[k][j] - v[0][j]);
                            fv[k] = eval_sub(v[k]);
                        }
                    }
                }
                sort_vertices();
            }
            if (fv[0] <= fx) {
                for (std::size_t j = 0; j < ns; ++j) x[sub[j]] = v[0][j];
                fx = fv[0];
            }
        }

        ++result.cycles;
        std::vector<double> dx(n);
        for (std::size_t i = 0; i < n; ++i) dx[i] = x[i] - x_prev[i];

        // Rowan's termination test on the step vector.
        bool x_converged = true;
        for (std::size_t i = 0; i < n; ++i) {
            const double scale = std::max(std::abs(x[i]), 1.0);
            if (std::max(std::abs(dx[i]), std::abs(step[i]) * C::psi) / scale > options.xtol_rel) {
                x_converged = false;
                break;
            }
        }
        const double improvement = (std::isfinite(f_prev) && std::isfinite(fx))
                                       ? std::abs(f_prev - fx) / std::max(std::abs(fx), 1e-300)
                                       : std::numeric_limits<double>::infinity();
        result.final_tolerance = improvement;
        // Steps shrink after every quiet cycle, so a run of them means the
        // simplex searches stopped finding descent at ever finer scales.
        quiet_cycles = (improvement <= options.ftol_rel) ? quiet_cycles + 1 : 0;
        if (x_converged || quiet_cycles >= 3) {
            result.converged = true;
            break;
        }

        // Rescale and reorient steps.
        double dx_norm = 0.0, step_norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            dx_norm += std::abs(dx[i]);
            step_norm += std::abs(step[i]);
        }
        double scale = C::psi;
        if (subspaces.size() > 1)
            scale = std::clamp(dx_norm / step_norm, C::omega, 1.0 / C::omega);
        for (std::size_t i = 0; i < n; ++i) {
            const double mag = std::abs(step[i]) * scale;
            if (dx[i] > 0.0) step[i] = mag;
            else if (dx[i] < 0.0) step[i] = -mag;
            else step[i] = -std::copysign(mag, step[i]);
        }
        progress = dx;
        bool any_progress = false;
        for (double d : dx) any_progress = any_progress || d != 0.0;
        if (!any_progress) progress = step;
    }
    result.x = std::move(x);
    result.value = fx;
    return result;
}

}  // namespace gasrank
