#pragma once

// Score-driven strength recursion.
//
//   f[i,t] = omega[i] + sum_j beta[j] * x[i,t,j] + u[i,t]        (i takes part at t)
//   u[i,t] = phi * u[i,t-1] + 1{i took part at t-1} * alpha * score_i(f[t-1] | y[t-1])
//
// with u[i,0] = 0. The dynamic component is tracked for every registry team
// at every edition, so teams that sit out (or a cancelled edition) decay
// toward zero by phi per edition.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "gasrank/errors.hpp"
#include "gasrank/panel.hpp"
#include "gasrank/plackett_luce.hpp"

namespace gasrank {

struct Coefficients {
    std::vector<double> omega;  // per registry team, sums to zero
    std::vector<double> beta;   // per predictor
    double phi = 0.0;
    double alpha = 0.0;

    friend bool operator==(const Coefficients&, const Coefficients&) = default;
};

inline constexpr double omega_sum_tolerance = 1e-10;

// Shift omega so it sums to zero.
inline void standardize(Coefficients& coef) {
    if (coef.omega.empty()) return;
    double s = 0.0;
    for (double w : coef.omega) s += w;
    const double shift = s / static_cast<double>(coef.omega.size());
    for (double& w : coef.omega) w -= shift;
}

inline void validate_coefficients(const Coefficients& coef, const PanelDataset& panel) {
    std::vector<std::string> issues;
    if (coef.omega.size() != panel.team_count())
        issues.push_back("omega has " + std::to_string(coef.omega.size()) + " entries for " +
                         std::to_string(panel.team_count()) + " teams");
    if (coef.beta.size() != panel.variable_count())
        issues.push_back("beta has " + std::to_string(coef.beta.size()) + " entries for " +
                         std::to_string(panel.variable_count()) + " predictors");
    double s = 0.0;
    for (std::size_t i = 0; i < coef.omega.size(); ++i) {
        if (!std::isfinite(coef.omega[i]))
            issues.push_back("omega[" + (i < panel.teams.size() ? panel.teams[i] : std::to_string(i)) + "] is not finite");
        s += coef.omega[i];
    }
    if (std::isfinite(s) && std::abs(s) > omega_sum_tolerance)
        issues.push_back("fixed effects sum to " + std::to_string(s) + " instead of 0");
    for (std::size_t j = 0; j < coef.beta.size(); ++j)
        if (!std::isfinite(coef.beta[j])) issues.push_back("beta[" + std::to_string(j) + "] is not finite");
    if (!std::isfinite(coef.phi)) issues.push_back("phi is not finite");
    if (!std::isfinite(coef.alpha)) issues.push_back("alpha is not finite");
    if (!issues.empty()) throw ValidationError(std::move(issues));
}

// Bounded regime: 0 <= phi < 1, alpha >= 0.
inline void validate_bounded(const Coefficients& coef) {
    std::vector<std::string> issues;
    if (!(coef.phi >= 0.0 && coef.phi < 1.0)) issues.push_back("phi = " + std::to_string(coef.phi) + " outside [0, 1)");
    if (!(coef.alpha >= 0.0)) issues.push_back("alpha = " + std::to_string(coef.alpha) + " is negative");
    if (!issues.empty()) throw ValidationError(std::move(issues));
}

namespace detail {

// Panel flattened for the recursion: teams of each edition in finishing
// order with their predictor rows alongside.
struct PlanEdition {
    std::vector<TeamId> order;
    std::vector<std::size_t> row;  // index into Edition::participants
    std::vector<double> x;         // row-major, aligned with order
    bool ranked = false;
};

struct FilterPlan {
    std::size_t team_count = 0;
    std::size_t variable_count = 0;
    std::size_t max_participants = 0;
    std::vector<PlanEdition> editions;
};

inline FilterPlan make_plan(const PanelDataset& panel) {
    FilterPlan plan;
    plan.team_count = panel.team_count();
    plan.variable_count = panel.variable_count();
    const std::size_t m = plan.variable_count;
    for (const auto& e : panel.editions) {
        PlanEdition pe;
        pe.ranked = e.ranking.has_value();
        if (pe.ranked) {
            pe.order.assign(e.ranking->ordering().begin(), e.ranking->ordering().end());
        } else {
            pe.order = e.participants;
        }
        for (TeamId t : pe.order) {
            const std::size_t r = e.row_of(t);
            pe.row.push_back(r);
            for (std::size_t j = 0; j < m; ++j) pe.x.push_back(e.predictors[r * m + j]);
        }
        plan.max_participants = std::max(plan.max_participants, pe.order.size());
        plan.editions.push_back(std::move(pe));
    }
    return plan;
}

// Runs the recursion and returns the summed log-likelihood. visit(t, f,
// score, u) sees each edition after its strengths (and, when ranked, its
// score) are known; u holds u[., t] for all teams. u_next receives the
// state one step past the last edition when non-null.
template <class Scalar, class Visit>
Scalar run_recursion(const FilterPlan& plan, std::span<const Scalar> omega, std::span<const Scalar> beta,
                     const Scalar& phi, const Scalar& alpha, Visit&& visit, std::vector<Scalar>* u_next = nullptr) {
    const std::size_t n = plan.team_count;
    const std::size_t m = plan.variable_count;
    std::vector<Scalar> u(n, Scalar(0));
    std::vector<Scalar> last_score(n, Scalar(0));
    std::vector<TeamId> last_participants;
    std::vector<Scalar> f(plan.max_participants), s(plan.max_participants), work(plan.max_participants);
    Scalar total(0);

    auto advance = [&]() {
        for (std::size_t i = 0; i < n; ++i) u[i] = phi * u[i];
        for (TeamId t : last_participants) u[t] += alpha * last_score[t];
    };

    for (std::size_t t = 0; t < plan.editions.size(); ++t) {
        const PlanEdition& e = plan.editions[t];
        advance();
        const std::size_t k = e.order.size();
        for (std::size_t r = 0; r < k; ++r) {
            const TeamId team = e.order[r];
            Scalar v = omega[team] + u[team];
            for (std::size_t j = 0; j < m; ++j) v += beta[j] * e.x[r * m + j];
            f[r] = v;
        }
        std::span<const Scalar> fk(f.data(), k);
        std::span<Scalar> sk(s.data(), k);
        for (TeamId t : last_participants) last_score[t] = Scalar(0);
        last_participants = e.order;
        if (e.ranked) {
            total += ordered_log_pmf_and_score<Scalar>(fk, sk, std::span<Scalar>(work.data(), k));
            for (std::size_t r = 0; r < k; ++r) last_score[e.order[r]] = s[r];
        } else {
            for (std::size_t r = 0; r < k; ++r) sk[r] = Scalar(0);
        }
        visit(t, fk, std::span<const Scalar>(s.data(), k), std::span<const Scalar>(u));
    }
    if (u_next) {
        advance();
        *u_next = u;
    }
    return total;
}

struct NoVisit {
    template <class... A>
    void operator()(A&&...) const noexcept {}
};

// Log-likelihood for any scalar type; used by the optimizer (double) and
// by derivative checks (dual numbers).
template <class Scalar>
Scalar plan_loglik(const FilterPlan& plan, std::span<const Scalar> omega, std::span<const Scalar> beta,
                   const Scalar& phi, const Scalar& alpha) {
    return run_recursion<Scalar>(plan, omega, beta, phi, alpha, NoVisit{});
}

}  // namespace detail

struct FilterOutput {
    std::size_t team_count = 0;
    // u[t][i]: dynamic component of team i at edition t (all teams).
    std::vector<std::vector<double>> u;
    // strengths[t][k] and scores[t][k] belong to Edition::participants[k].
    // Scores are zero for editions without a ranking.
    std::vector<std::vector<double>> strengths;
    std::vector<std::vector<double>> scores;
    std::vector<double> edition_loglik;
    // Dynamic component entering the edition after the last one.
    std::vector<double> u_next;
    double loglik = 0.0;
};

inline FilterOutput run_filter(const PanelDataset& panel, const Coefficients& coef) {
    panel.validate();
    validate_coefficients(coef, panel);
    const detail::FilterPlan plan = detail::make_plan(panel);
    FilterOutput out;
    out.team_count = panel.team_count();
    out.u.resize(panel.edition_count());
    out.strengths.resize(panel.edition_count());
    out.scores.resize(panel.edition_count());
    out.edition_loglik.assign(panel.edition_count(), 0.0);
    std::vector<double> work(plan.max_participants);
    auto visit = [&](std::size_t t, std::span<const double> f, std::span<const double> s, std::span<const double> u) {
        const auto& pe = plan.editions[t];
        out.u[t].assign(u.begin(), u.end());
        out.strengths[t].assign(f.size(), 0.0);
        out.scores[t].assign(f.size(), 0.0);
        for (std::size_t r = 0; r < f.size(); ++r) {
            out.strengths[t][pe.row[r]] = f[r];
            out.scores[t][pe.row[r]] = s[r];
        }
        if (pe.ranked) out.edition_loglik[t] = detail::ordered_log_pmf<double>(f, std::span<double>(work.data(), f.size()));
    };
    out.loglik = detail::run_recursion<double>(plan, coef.omega, coef.beta, coef.phi, coef.alpha, visit, &out.u_next);
    return out;
}

// Sum over ranked editions of the Plackett-Luce log-likelihood at the
// filtered strengths.
inline double filtered_loglik(const PanelDataset& panel, const Coefficients& coef) {
    panel.validate();
    validate_coefficients(coef, panel);
    const detail::FilterPlan plan = detail::make_plan(panel);
    return detail::plan_loglik<double>(plan, coef.omega, coef.beta, coef.phi, coef.alpha);
}

}  // namespace gasrank
