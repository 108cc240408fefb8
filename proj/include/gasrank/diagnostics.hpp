#pragma once

// Rank correlations across editions and tournaments, and between ranks
// and predictors, with percentile bootstrap bands.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gasrank/errors.hpp"
#include "gasrank/panel.hpp"
#include "gasrank/parallel.hpp"
#include "gasrank/random.hpp"

namespace gasrank {

enum class CorrelationMethod { pearson, spearman };

inline const char* to_string(CorrelationMethod m) { return m == CorrelationMethod::pearson ? "pearson" : "spearman"; }

inline CorrelationMethod parse_correlation_method(const std::string& s) {
    if (s == "pearson") return CorrelationMethod::pearson;
    if (s == "spearman") return CorrelationMethod::spearman;
    throw UsageError("unknown correlation method '" + s + "' (expected pearson or spearman)");
}

// Empty when either column has zero variance or fewer than two values.
inline std::optional<double> pearson_correlation(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size()) throw DomainError("correlation of columns with different lengths");
    if (n < 2) return std::nullopt;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) return std::nullopt;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// Mid-ranks (ties share their average position).
inline std::vector<double> mid_ranks(std::span<const double> x) {
    std::vector<std::size_t> idx(x.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

inline std::optional<double> correlation(std::span<const double> x, std::span<const double> y, CorrelationMethod method) {
    if (method == CorrelationMethod::pearson) return pearson_correlation(x, y);
    const auto rx = mid_ranks(x), ry = mid_ranks(y);
    return pearson_correlation(rx, ry);
}

struct CorrelationOptions {
    std::size_t replications = 2000;
    std::uint64_t seed = 20240515;
    CorrelationMethod method = CorrelationMethod::pearson;
    double level = 0.95;
    std::size_t workers = 1;
};

struct LagCorrelation {
    int lag = 0;
    std::size_t pairs = 0;
    std::optional<double> estimate;
    std::optional<double> lo;
    std::optional<double> hi;
    std::string note;
};

struct CorrelationReport {
    std::string pairing_rule;
    std::string method;
    std::size_t replications = 0;
    std::uint64_t seed = 0;
    double level = 0.95;
    std::vector<LagCorrelation> lags;
};

namespace detail {

// Linear interpolation between order statistics of sorted v.
inline double sorted_quantile(const std::vector<double>& v, double p) {
    const double h = p * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// Resamples (x, y) pairs with replacement; band is clamped so it always
// contains the point estimate.
inline void bootstrap_band(LagCorrelation& out, const std::vector<double>& x, const std::vector<double>& y,
                           const CorrelationOptions& options, std::uint64_t stream) {
    if (!out.estimate || options.replications == 0) return;
    const RandomSource master = RandomSource(options.seed).spawn(stream);
    std::vector<std::optional<double>> reps(options.replications);
    parallel_for(options.replications, options.workers, [&](std::size_t r) {
        RandomSource rng = master.spawn(r);
        const std::size_t n = x.size();
        std::vector<double> bx(n), by(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t k = static_cast<std::size_t>(rng.below(n));
            bx[i] = x[k];
            by[i] = y[k];
        }
        reps[r] = correlation(bx, by, options.method);
    });
    std::vector<double> v;
    for (const auto& r : reps)
        if (r) v.push_back(*r);
    if (v.size() < 2) {
        out.note = "bootstrap replications degenerate; band omitted";
        return;
    }
    std::sort(v.begin(), v.end());
    const double a = 0.5 * (1.0 - options.level);
    out.lo = std::min(sorted_quantile(v, a), *out.estimate);
    out.hi = std::max(sorted_quantile(v, 1.0 - a), *out.estimate);
    if (v.size() < options.replications)
        out.note = std::to_string(options.replications - v.size()) + " degenerate replications dropped";
}

inline std::map<int, const Edition*> ranked_by_year(const PanelDataset& p) {
    std::map<int, const Edition*> out;
    for (const auto& e : p.editions) {
        if (!e.ranking) continue;
        int year = 0;
        try {
            std::size_t used = 0;
            year = std::stoi(e.label, &used);
            if (used != e.label.size()) throw std::invalid_argument("label");
        } catch (const std::exception&) {
            throw DataError("edition label '" + e.label + "' is not an integer year");
        }
        out[year] = &e;
    }
    return out;
}

}  // namespace detail

inline constexpr const char* year_pairing_rule =
    "edition of year y in the first panel paired with year y - lag in the second; teams matched by name, "
    "pairs missing either rank dropped";

// Correlation of ranks in panel_a at year y with ranks in panel_b at year
// y - lag, pooled over all years and matched teams.
inline CorrelationReport cross_correlation(const PanelDataset& panel_a, const PanelDataset& panel_b,
                                           const std::vector<int>& lags, const CorrelationOptions& options = {}) {
    if (options.level <= 0.0 || options.level >= 1.0) throw UsageError("confidence level must lie in (0, 1)");
    const auto ya = detail::ranked_by_year(panel_a);
    const auto yb = detail::ranked_by_year(panel_b);
    CorrelationReport report;
    report.pairing_rule = year_pairing_rule;
    report.method = to_string(options.method);
    report.replications = options.replications;
    report.seed = options.seed;
    report.level = options.level;
    for (std::size_t li = 0; li < lags.size(); ++li) {
        const int lag = lags[li];
        LagCorrelation row;
        row.lag = lag;
        std::vector<double> x, y;
        for (const auto& [year, ea] : ya) {
            auto it = yb.find(year - lag);
            if (it == yb.end()) continue;
            const Edition* eb = it->second;
            for (TeamId ta : ea->participants) {
                auto tb = panel_b.find_team(panel_a.teams[ta]);
                if (!tb || !eb->participates(*tb)) continue;
                x.push_back(static_cast<double>(ea->ranking->rank_of(ta)));
                y.push_back(static_cast<double>(eb->ranking->rank_of(*tb)));
            }
        }
        row.pairs = x.size();
        row.estimate = correlation(x, y, options.method);
        if (x.empty()) {
            row.note = "no valid pairs at this lag; band omitted";
        } else if (!row.estimate) {
            row.note = "ranks have zero variance at this lag; correlation undefined";
        }
        detail::bootstrap_band(row, x, y, options, li);
        report.lags.push_back(std::move(row));
    }
    return report;
}

inline CorrelationReport rank_autocorrelation(const PanelDataset& panel, const std::vector<int>& lags,
                                              const CorrelationOptions& options = {}) {
    for (int l : lags)
        if (l < 1) throw UsageError("autocorrelation lags must be >= 1");
    return cross_correlation(panel, panel, lags, options);
}

struct CorrelationMatrix {
    std::vector<std::string> names;  // "rank" first, then the predictors
    std::vector<std::vector<std::optional<double>>> values;
    std::size_t cells = 0;
    std::string method;
};

// Pairwise correlations among the rank and every predictor over
// participating cells of ranked editions.
inline CorrelationMatrix predictor_rank_correlations(const PanelDataset& panel,
                                                     CorrelationMethod method = CorrelationMethod::pearson) {
    const std::size_t m = panel.variable_count();
    std::vector<std::vector<double>> cols(m + 1);
    for (const auto& e : panel.editions) {
        if (!e.ranking) continue;
        for (std::size_t r = 0; r < e.participants.size(); ++r) {
            cols[0].push_back(static_cast<double>(e.ranking->rank_of(e.participants[r])));
            for (std::size_t j = 0; j < m; ++j) cols[j + 1].push_back(e.predictors[r * m + j]);
        }
    }
    CorrelationMatrix out;
    out.method = to_string(method);
    out.names.push_back("rank");
    out.names.insert(out.names.end(), panel.variables.begin(), panel.variables.end());
    out.cells = cols[0].size();
    out.values.assign(m + 1, std::vector<std::optional<double>>(m + 1));
    for (std::size_t a = 0; a <= m; ++a) {
        const bool defined = correlation(cols[a], cols[a], method).has_value();
        if (defined) out.values[a][a] = 1.0;
        for (std::size_t b = a + 1; b <= m; ++b) out.values[a][b] = out.values[b][a] = correlation(cols[a], cols[b], method);
    }
    return out;
}

}  // namespace gasrank
