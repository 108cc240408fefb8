#pragma once

// Synthetic panels drawn from the score-driven ranking model.

#include <cstdio>
#include <string>
#include <vector>

#include "gasrank/errors.hpp"
#include "gasrank/filter.hpp"
#include "gasrank/panel.hpp"
#include "gasrank/plackett_luce.hpp"
#include "gasrank/random.hpp"

namespace gasrank {

struct SimulationConfig {
    std::size_t teams = 8;
    std::size_t editions = 100;
    std::size_t predictors = 0;
    std::vector<double> omega;  // empty -> N(0, omega_sd^2) draws shifted to sum zero
    double omega_sd = 1.0;
    std::vector<double> beta;   // empty -> zeros
    double phi = 0.0;
    double alpha = 0.0;
    double participation = 1.0;  // per-team, per-edition probability of taking part
    std::vector<std::size_t> cancelled;  // edition indices left empty
    int first_year = 2001;
    std::uint64_t seed = 1;
};

struct SimulatedPanel {
    PanelDataset panel;
    Coefficients truth;
};

// Predictors are independent standard normal draws. An edition where fewer
// than two teams were drawn to take part is left empty.
inline SimulatedPanel simulate_panel(const SimulationConfig& cfg) {
    if (cfg.teams < 2) throw UsageError("simulation needs at least two teams");
    if (!cfg.omega.empty() && cfg.omega.size() != cfg.teams) throw UsageError("omega size does not match team count");
    if (!cfg.beta.empty() && cfg.beta.size() != cfg.predictors) throw UsageError("beta size does not match predictor count");
    if (!(cfg.participation > 0.0 && cfg.participation <= 1.0)) throw UsageError("participation must lie in (0, 1]");

    RandomSource rng(cfg.seed);
    SimulatedPanel out;
    PanelDataset& p = out.panel;
    const int width = cfg.teams < 100 ? 2 : static_cast<int>(std::to_string(cfg.teams - 1).size());
    for (std::size_t i = 0; i < cfg.teams; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "T%0*zu", width, i + 1);
        p.teams.emplace_back(buf);
    }
    for (std::size_t j = 0; j < cfg.predictors; ++j) p.variables.push_back("x" + std::to_string(j + 1));

    Coefficients& c = out.truth;
    c.omega = cfg.omega;
    if (c.omega.empty())
        for (std::size_t i = 0; i < cfg.teams; ++i) c.omega.push_back(cfg.omega_sd * rng.normal());
    standardize(c);
    c.beta = cfg.beta.empty() ? std::vector<double>(cfg.predictors, 0.0) : cfg.beta;
    c.phi = cfg.phi;
    c.alpha = cfg.alpha;

    const std::size_t n = cfg.teams, m = cfg.predictors;
    std::vector<double> u(n, 0.0);
    StrengthVector last_score;
    std::vector<char> cancelled(cfg.editions, 0);
    for (std::size_t t : cfg.cancelled)
        if (t < cfg.editions) cancelled[t] = 1;

    for (std::size_t t = 0; t < cfg.editions; ++t) {
        for (double& v : u) v *= c.phi;
        for (const auto& [team, s] : last_score) u[team] += c.alpha * s;
        last_score.clear();

        Edition e;
        e.label = std::to_string(cfg.first_year + static_cast<int>(t));
        if (!cancelled[t]) {
            for (TeamId i = 0; i < n; ++i)
                if (cfg.participation >= 1.0 || rng.uniform() < cfg.participation) e.participants.push_back(i);
            if (e.participants.size() < 2) e.participants.clear();
        }
        if (!e.participants.empty()) {
            StrengthVector f;
            for (TeamId i : e.participants) {
                double v = c.omega[i] + u[i];
                for (std::size_t j = 0; j < m; ++j) {
                    const double x = rng.normal();
                    e.predictors.push_back(x);
                    v += c.beta[j] * x;
                }
                f[i] = v;
            }
            e.ranking = sample_ranking(f, rng);
            last_score = score(*e.ranking, f);
        }
        p.editions.push_back(std::move(e));
    }
    return out;
}

}  // namespace gasrank
