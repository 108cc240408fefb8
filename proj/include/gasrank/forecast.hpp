#pragma once

// One-step-ahead forecasts, their evaluation against the realized ranking
// and rolling re-estimation over a holdout window.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gasrank/errors.hpp"
#include "gasrank/estimation.hpp"
#include "gasrank/filter.hpp"
#include "gasrank/panel.hpp"
#include "gasrank/parallel.hpp"
#include "gasrank/plackett_luce.hpp"
#include "gasrank/random.hpp"

namespace gasrank {

// Strengths for the edition following the last one in `dataset`. The
// dynamic part is the filtered state one step past the data; the realized
// outcome of the forecast edition is never consulted. predictors_next maps
// each participant to its values in dataset.variables order.
inline StrengthVector one_step_forecast(const PanelDataset& dataset, const Coefficients& coef,
                                        const std::vector<TeamId>& participants,
                                        const std::map<TeamId, std::vector<double>>& predictors_next) {
    const FilterOutput filtered = run_filter(dataset, coef);
    const std::size_t m = dataset.variable_count();
    StrengthVector f;
    for (TeamId team : participants) {
        if (team >= dataset.team_count()) throw DataError("unknown team id " + std::to_string(team));
        auto it = predictors_next.find(team);
        for (std::size_t j = 0; j < m; ++j)
            if (it == predictors_next.end() || it->second.size() <= j || !std::isfinite(it->second[j]))
                throw DataError("missing predictor value for team " + dataset.teams[team] + ", variable " +
                                dataset.variables[j]);
        double v = coef.omega[team] + filtered.u_next[team];
        for (std::size_t j = 0; j < m; ++j) v += coef.beta[j] * it->second[j];
        f[team] = v;
    }
    if (f.size() != participants.size()) throw DataError("participant listed twice");
    return f;
}

inline std::size_t default_playoff_k(std::size_t n) {
    if (n == 16) return 8;
    if (n == 8) return 4;
    return std::max<std::size_t>(3, (n + 1) / 2);
}

struct EditionForecast {
    std::string label;
    std::size_t participants = 0;
    std::size_t k_playoff = 0;
    StrengthVector strengths;
    Ranking realized;
    Ranking modal;
    double loglik = 0.0;
    double p_champion = 0.0;
    double p_medals = 0.0;
    double p_playoffs = 0.0;
    ProbabilityMethod playoff_method = ProbabilityMethod::exact;
    std::map<TeamId, std::size_t> abs_rank_error;
    double mae = 0.0;
    double rmse = 0.0;
    bool champion_hit = false;
    bool medals_hit = false;
    bool playoffs_hit = false;
};

struct EvaluationOptions {
    std::size_t mc_draws = 1000000;
    std::size_t exact_cap = default_exact_cap;
};

namespace detail {

inline std::vector<TeamId> top_set(const Ranking& r, std::size_t k) {
    std::vector<TeamId> s(r.ordering().begin(), r.ordering().begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(s.begin(), s.end());
    return s;
}

}  // namespace detail

inline EditionForecast evaluate_edition(const StrengthVector& forecast, const Ranking& realized, std::size_t k_playoff,
                                        RandomSource& rng, const EvaluationOptions& options = {}) {
    const std::size_t n = realized.size();
    std::vector<TeamId> set = realized.team_set();
    if (forecast.size() != n || !std::all_of(set.begin(), set.end(), [&](TeamId t) { return forecast.contains(t); }))
        throw DataError("realized ranking does not cover exactly the forecast participants");
    if (n < 3) throw DomainError("evaluation needs at least three participants");
    if (k_playoff < 3 || k_playoff > n)
        throw DomainError("playoff size " + std::to_string(k_playoff) + " outside [3, " + std::to_string(n) + "]");

    EditionForecast row;
    row.participants = n;
    row.k_playoff = k_playoff;
    row.strengths = forecast;
    row.realized = realized;
    row.loglik = log_pmf(realized, forecast);
    row.p_champion = champion_probability(forecast, realized.at_rank(1));
    const auto medals = detail::top_set(realized, 3);
    row.p_medals = top_k_set_probability(forecast, medals, ProbabilityMethod::exact);
    const auto playoffs = detail::top_set(realized, k_playoff);
    if (factorial_capped(k_playoff, options.exact_cap) <= options.exact_cap) {
        row.p_playoffs = top_k_set_probability(forecast, playoffs, ProbabilityMethod::exact, nullptr, 0, options.exact_cap);
    } else {
        row.playoff_method = ProbabilityMethod::monte_carlo;
        row.p_playoffs = top_k_set_probability(forecast, playoffs, ProbabilityMethod::monte_carlo, &rng,
                                               options.mc_draws, options.exact_cap);
    }

    row.modal = modal_ranking(forecast);
    const auto predicted = row.modal.ranks();
    const auto actual = realized.ranks();
    double abs_sum = 0.0, sq_sum = 0.0;
    for (const auto& [team, r] : actual) {
        const std::size_t p = predicted.at(team);
        const std::size_t e = p > r ? p - r : r - p;
        row.abs_rank_error[team] = e;
        abs_sum += static_cast<double>(e);
        sq_sum += static_cast<double>(e * e);
    }
    row.mae = abs_sum / static_cast<double>(n);
    row.rmse = std::sqrt(sq_sum / static_cast<double>(n));
    row.champion_hit = row.modal.at_rank(1) == realized.at_rank(1);
    row.medals_hit = detail::top_set(row.modal, 3) == medals;
    row.playoffs_hit = detail::top_set(row.modal, k_playoff) == playoffs;
    return row;
}

inline constexpr const char* modal_error_caveat =
    "MAE and RMSE compare the modal (most likely) ranking with the realized one and should be interpreted with caution";

struct ForecastAggregate {
    double loglik = 0.0;
    double p_champion = 0.0;
    double p_medals = 0.0;
    double p_playoffs = 0.0;
    double mae = 0.0;
    double rmse = 0.0;
    double champion_hits = 0.0;
    double medals_hits = 0.0;
    double playoffs_hits = 0.0;
};

inline ForecastAggregate aggregate(const std::vector<EditionForecast>& rows) {
    ForecastAggregate a;
    if (rows.empty()) return a;
    for (const auto& r : rows) {
        a.loglik += r.loglik;
        a.p_champion += r.p_champion;
        a.p_medals += r.p_medals;
        a.p_playoffs += r.p_playoffs;
        a.mae += r.mae;
        a.rmse += r.rmse;
        a.champion_hits += r.champion_hit;
        a.medals_hits += r.medals_hit;
        a.playoffs_hits += r.playoffs_hit;
    }
    const double n = static_cast<double>(rows.size());
    for (double* v : {&a.loglik, &a.p_champion, &a.p_medals, &a.p_playoffs, &a.mae, &a.rmse, &a.champion_hits,
                      &a.medals_hits, &a.playoffs_hits})
        *v /= n;
    return a;
}

struct ForecastReport {
    ModelSpec spec;
    std::vector<std::string> teams;
    std::vector<EditionForecast> rows;
    ForecastAggregate aggregate;
    std::uint64_t seed = 0;
    std::size_t mc_draws = 0;
    std::string tie_break_rule = modal_tie_break_rule;
    std::string caveat = modal_error_caveat;
};

struct ForecastOptions {
    FitOptions fit;
    EvaluationOptions evaluation;
    std::optional<std::size_t> k_playoff;  // default_playoff_k(n) when empty
};

// For each of the last `holdout` ranked editions: fit on every earlier
// edition, forecast, evaluate. Windows are independent and may run on
// separate workers; each fit uses the configured seed.
inline ForecastReport rolling_evaluation(const PanelDataset& dataset, const ModelSpec& spec, std::size_t holdout,
                                         const ForecastOptions& options = {}) {
    dataset.validate();
    spec.validate(dataset);
    std::vector<std::size_t> ranked;
    for (std::size_t t = 0; t < dataset.edition_count(); ++t)
        if (dataset.editions[t].ranking) ranked.push_back(t);
    if (holdout == 0) throw UsageError("holdout must be at least 1");
    if (holdout >= ranked.size())
        throw UsageError("holdout " + std::to_string(holdout) + " must be smaller than the " +
                         std::to_string(ranked.size()) + " ranked editions");

    const PanelDataset selected = select_predictors(dataset, spec.predictors);
    ModelSpec inner = spec;
    inner.predictors = selected.variables;
    const std::vector<std::size_t> held(ranked.end() - static_cast<std::ptrdiff_t>(holdout), ranked.end());

    ForecastReport report;
    report.spec = spec;
    report.teams = dataset.teams;
    report.seed = options.fit.seed;
    report.mc_draws = options.evaluation.mc_draws;
    report.rows.resize(held.size());

    FitOptions fopt = options.fit;
    fopt.workers = 1;
    fopt.compute_standard_errors = false;
    parallel_for(held.size(), options.fit.workers, [&](std::size_t h) {
        const std::size_t t = held[h];
        const Edition& e = selected.editions[t];
        const PanelDataset window = truncate_editions(selected, t);
        FitResult fitted;
        try {
            fitted = fit(window, inner, std::nullopt, fopt);
        } catch (const DataError& err) {
            throw DataError("training window before edition " + e.label + " (" + std::to_string(window.ranked_edition_count()) +
                            " ranked editions): " + err.what());
        }
        std::map<TeamId, std::vector<double>> x;
        const std::size_t m = selected.variable_count();
        for (std::size_t r = 0; r < e.participants.size(); ++r)
            x[e.participants[r]].assign(e.predictors.begin() + static_cast<std::ptrdiff_t>(r * m),
                                        e.predictors.begin() + static_cast<std::ptrdiff_t>((r + 1) * m));
        const StrengthVector f = one_step_forecast(window, fitted.coef, e.participants, x);
        RandomSource rng = RandomSource(options.fit.seed).spawn(0x5eed0000u + t);
        const std::size_t k = options.k_playoff.value_or(default_playoff_k(e.participants.size()));
        EditionForecast row = evaluate_edition(f, *e.ranking, std::min(k, e.participants.size()), rng, options.evaluation);
        row.label = e.label;
        report.rows[h] = std::move(row);
    });
    report.aggregate = aggregate(report.rows);
    return report;
}

inline const std::vector<double>& default_lambda_grid() {
    static const std::vector<double> grid{0.0, 0.001, 0.01, 0.1, 1.0};
    return grid;
}

struct LambdaOutcome {
    double lambda = 0.0;
    std::optional<ForecastReport> report;
    std::string error;
};

struct LambdaSearchResult {
    std::optional<double> best_lambda;
    std::vector<LambdaOutcome> outcomes;
};

// A failing lambda (typically 0 on data violating the partition
// condition) is recorded and skipped; the best lambda maximizes the
// average predictive log-likelihood among the rest.
inline LambdaSearchResult lambda_grid_search(const PanelDataset& dataset, const ModelSpec& spec,
                                             const std::vector<double>& grid, std::size_t holdout,
                                             const ForecastOptions& options = {}) {
    if (grid.empty()) throw UsageError("lambda grid is empty");
    for (double l : grid)
        if (!(l >= 0.0) || !std::isfinite(l)) throw UsageError("lambda values must be finite and >= 0");
    LambdaSearchResult out;
    out.outcomes.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        LambdaOutcome& o = out.outcomes[i];
        o.lambda = grid[i];
        ModelSpec s = spec;
        s.penalty_lambda = grid[i];
        try {
            o.report = rolling_evaluation(dataset, s, holdout, options);
        } catch (const UsageError&) {
            throw;
        } catch (const std::exception& e) {
            o.error = e.what();
        }
    }
    const LambdaOutcome* best = nullptr;
    for (const auto& o : out.outcomes)
        if (o.report && (!best || o.report->aggregate.loglik > best->report->aggregate.loglik)) best = &o;
    if (best) out.best_lambda = best->lambda;
    return out;
}

}  // namespace gasrank
