#pragma once

// Maximum-likelihood and L2-penalized estimation of the score-driven
// ranking model, with the fixed-effect sum-to-zero standardization,
// parameter bounds, identifiability (partition) checks, Hessian-based
// standard errors, information criteria and log-likelihood profiles.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gasrank/errors.hpp"
#include "gasrank/filter.hpp"
#include "gasrank/panel.hpp"
#include "gasrank/parallel.hpp"
#include "gasrank/random.hpp"
#include "gasrank/subplex.hpp"

namespace gasrank {

enum class BoundsRegime {
    bounded,     // 0 <= phi < 1, alpha >= 0
    persistent,  // phi = 1 fixed, alpha free
    unbounded,   // phi, alpha free
};

inline const char* to_string(BoundsRegime r) {
    switch (r) {
        case BoundsRegime::bounded: return "bounded";
        case BoundsRegime::persistent: return "persistent";
        case BoundsRegime::unbounded: return "unbounded";
    }
    return "bounded";
}

inline BoundsRegime parse_bounds_regime(const std::string& s) {
    if (s == "bounded") return BoundsRegime::bounded;
    if (s == "persistent") return BoundsRegime::persistent;
    if (s == "unbounded") return BoundsRegime::unbounded;
    throw UsageError("unknown bounds regime '" + s + "' (expected bounded, persistent or unbounded)");
}

struct ModelSpec {
    std::string name = "model";
    std::vector<std::string> predictors;
    bool include_dynamics = true;
    BoundsRegime bounds = BoundsRegime::bounded;
    double penalty_lambda = 0.0;

    std::size_t dynamic_parameter_count() const {
        if (!include_dynamics) return 0;
        return bounds == BoundsRegime::persistent ? 1 : 2;
    }

    void validate(const PanelDataset& panel) const {
        std::vector<std::string> issues;
        for (const auto& p : predictors)
            if (!panel.find_variable(p)) issues.push_back("spec '" + name + "': predictor '" + p + "' not in panel");
        std::vector<std::string> sorted = predictors;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            issues.push_back("spec '" + name + "': predictor listed twice");
        if (!(penalty_lambda >= 0.0) || !std::isfinite(penalty_lambda))
            issues.push_back("spec '" + name + "': penalty lambda must be a finite value >= 0");
        if (!issues.empty()) throw ValidationError(std::move(issues));
    }

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

// ---------------------------------------------------------------------------
// Identifiability
// ---------------------------------------------------------------------------

// pass, or a certifying split: no team in `lower` ever finished above a
// team in `upper` in an edition where both took part.
struct PartitionReport {
    bool pass = true;
    std::vector<TeamId> upper;
    std::vector<TeamId> lower;
};

// The beats digraph (i -> j iff i finished above j in some shared
// edition) restricted to teams with at least one ranked appearance must be
// strongly connected. On failure the certificate's upper part is a source
// strongly connected component.
inline PartitionReport check_partition_condition(const PanelDataset& panel) {
    const std::size_t n = panel.team_count();
    const std::vector<TeamId> active = appearing_teams(panel);
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
    for (const auto& e : panel.editions) {
        if (!e.ranking) continue;
        const auto ord = e.ranking->ordering();
        for (std::size_t a = 0; a < ord.size(); ++a)
            for (std::size_t b = a + 1; b < ord.size(); ++b) reach[ord[a]][ord[b]] = 1;
    }
    for (TeamId t : active) reach[t][t] = 1;
    // Transitive closure (Warshall); registries hold a few dozen teams.
    for (TeamId k : active)
        for (TeamId i : active)
            if (reach[i][k])
                for (TeamId j : active)
                    if (reach[k][j]) reach[i][j] = 1;

    PartitionReport report;
    for (TeamId i : active)
        for (TeamId j : active)
            if (!reach[i][j]) report.pass = false;
    if (report.pass) return report;

    for (TeamId i : active) {
        bool source = true;
        for (TeamId j : active)
            if (reach[j][i] && !reach[i][j]) {
                source = false;
                break;
            }
        if (!source) continue;
        for (TeamId j : active) (reach[i][j] && reach[j][i] ? report.upper : report.lower).push_back(j);
        break;
    }
    return report;
}

inline std::string describe_partition(const PartitionReport& report, const PanelDataset& panel) {
    if (report.pass) return "partition condition holds";
    auto names = [&](const std::vector<TeamId>& ids) {
        std::string s = "{";
        for (std::size_t i = 0; i < ids.size(); ++i) s += (i ? ", " : "") + panel.teams[ids[i]];
        return s + "}";
    };
    return "partition condition fails: " + names(report.upper) + " never finished below any of " +
           names(report.lower);
}

// ---------------------------------------------------------------------------
// Parameterization
// ---------------------------------------------------------------------------

namespace detail {

inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }
inline double logit(double p) { return std::log(p / (1.0 - p)); }
inline double softplus(double z) { return z > 30.0 ? z : std::log1p(std::exp(z)); }
inline double softplus_inverse(double a) { return a > 30.0 ? a : std::log(std::expm1(a)); }

}  // namespace detail

// Maps between Coefficients, the free coefficient vector theta (omega of
// every estimated team but the last, beta, then phi and/or alpha as the
// regime frees them) and the optimizer's unconstrained coordinates.
// Teams without a ranked appearance keep omega = 0 and are not estimated;
// the last estimated team's omega is minus the sum of the others.
class ParameterLayout {
public:
    ParameterLayout(const PanelDataset& selected, const ModelSpec& spec)
        : team_count_(selected.team_count()),
          variable_count_(selected.variable_count()),
          spec_(spec),
          estimated_(appearing_teams(selected)) {
        if (estimated_.empty()) throw DataError("no ranked editions to estimate from");
        // Optimizer scale of each beta: the predictor's spread over
        // participating cells, so unit moves in internal space are
        // comparable across predictors measured in games, cm or 0/1.
        beta_scale_.assign(variable_count_, 1.0);
        for (std::size_t j = 0; j < variable_count_; ++j) {
            double n = 0.0, mean = 0.0, m2 = 0.0;
            for (const auto& e : selected.editions)
                for (std::size_t r = 0; r < e.participants.size(); ++r) {
                    const double x = e.predictors[r * variable_count_ + j];
                    n += 1.0;
                    const double d = x - mean;
                    mean += d / n;
                    m2 += d * (x - mean);
                }
            const double sd = n > 1.0 ? std::sqrt(m2 / (n - 1.0)) : 0.0;
            if (sd > 0.0 && std::isfinite(sd)) beta_scale_[j] = sd;
        }
    }

    std::size_t omega_free() const { return estimated_.size() - 1; }
    std::size_t free_count() const { return omega_free() + variable_count_ + spec_.dynamic_parameter_count(); }
    const std::vector<TeamId>& estimated_teams() const { return estimated_; }
    const ModelSpec& spec() const { return spec_; }
    bool has_phi() const { return spec_.include_dynamics && spec_.bounds != BoundsRegime::persistent; }
    bool has_alpha() const { return spec_.include_dynamics; }
    std::size_t phi_index() const { return omega_free() + variable_count_; }
    std::size_t alpha_index() const { return omega_free() + variable_count_ + (has_phi() ? 1 : 0); }

    double fixed_phi() const {
        if (!spec_.include_dynamics) return 0.0;
        return spec_.bounds == BoundsRegime::persistent ? 1.0 : 0.0;
    }

    std::vector<std::string> free_names(const PanelDataset& panel) const {
        std::vector<std::string> out;
        for (std::size_t k = 0; k < omega_free(); ++k) out.push_back("omega[" + panel.teams[estimated_[k]] + "]");
        for (const auto& v : panel.variables) out.push_back("beta[" + v + "]");
        if (has_phi()) out.emplace_back("phi");
        if (has_alpha()) out.emplace_back("alpha");
        return out;
    }

    Coefficients to_coefficients(std::span<const double> theta) const {
        Coefficients c;
        c.omega.assign(team_count_, 0.0);
        double sum = 0.0;
        for (std::size_t k = 0; k < omega_free(); ++k) {
            c.omega[estimated_[k]] = theta[k];
            sum += theta[k];
        }
        c.omega[estimated_.back()] = -sum;
        c.beta.assign(theta.begin() + static_cast<std::ptrdiff_t>(omega_free()),
                      theta.begin() + static_cast<std::ptrdiff_t>(omega_free() + variable_count_));
        c.phi = has_phi() ? theta[phi_index()] : fixed_phi();
        c.alpha = has_alpha() ? theta[alpha_index()] : 0.0;
        return c;
    }

    std::vector<double> to_theta(const Coefficients& c) const {
        std::vector<double> theta;
        theta.reserve(free_count());
        for (std::size_t k = 0; k < omega_free(); ++k) theta.push_back(c.omega[estimated_[k]]);
        for (double b : c.beta) theta.push_back(b);
        if (has_phi()) theta.push_back(c.phi);
        if (has_alpha()) theta.push_back(c.alpha);
        return theta;
    }

    std::vector<double> to_internal(std::span<const double> theta) const {
        std::vector<double> z(theta.begin(), theta.end());
        for (std::size_t j = 0; j < variable_count_; ++j) z[omega_free() + j] *= beta_scale_[j];
        if (spec_.bounds == BoundsRegime::bounded) {
            if (has_phi()) z[phi_index()] = detail::logit(std::clamp(theta[phi_index()], 1e-9, 1.0 - 1e-9));
            if (has_alpha()) z[alpha_index()] = detail::softplus_inverse(std::max(theta[alpha_index()], 1e-9));
        }
        return z;
    }

    std::vector<double> from_internal(std::span<const double> z) const {
        std::vector<double> theta(z.begin(), z.end());
        for (std::size_t j = 0; j < variable_count_; ++j) theta[omega_free() + j] /= beta_scale_[j];
        if (spec_.bounds == BoundsRegime::bounded) {
            if (has_phi()) theta[phi_index()] = std::min(detail::logistic(z[phi_index()]), std::nextafter(1.0, 0.0));
            if (has_alpha()) theta[alpha_index()] = detail::softplus(z[alpha_index()]);
        }
        return theta;
    }

    // Initial steps in internal coordinates.
    std::vector<double> internal_steps() const {
        std::vector<double> s(free_count(), 0.3);
        for (std::size_t j = 0; j < variable_count_; ++j) s[omega_free() + j] = 0.2;
        if (has_phi()) s[phi_index()] = 0.5;
        if (has_alpha()) s[alpha_index()] = 0.5;
        return s;
    }

    Coefficients default_start() const {
        Coefficients c;
        c.omega.assign(team_count_, 0.0);
        c.beta.assign(variable_count_, 0.0);
        c.phi = has_phi() ? 0.5 : fixed_phi();
        c.alpha = has_alpha() ? 0.1 : 0.0;
        return c;
    }

private:
    std::size_t team_count_;
    std::size_t variable_count_;
    ModelSpec spec_;
    std::vector<TeamId> estimated_;
    std::vector<double> beta_scale_;
};

// lambda * sum of squares over every coefficient: all omega (including
// the derived one), beta, phi and alpha, even when phi is held fixed.
inline double penalty(const Coefficients& c, double lambda) {
    if (lambda == 0.0) return 0.0;
    double s = c.phi * c.phi + c.alpha * c.alpha;
    for (double w : c.omega) s += w * w;
    for (double b : c.beta) s += b * b;
    return lambda * s;
}

inline double penalized_loglik(const PanelDataset& panel, const Coefficients& c, double lambda) {
    return filtered_loglik(panel, c) - penalty(c, lambda);
}

// ---------------------------------------------------------------------------
// Standard errors
// ---------------------------------------------------------------------------

struct FitOptions {
    std::size_t restarts = 10;
    double ftol_rel = 1e-9;
    std::size_t max_evaluations = 100000;
    std::uint64_t seed = 20240515;
    std::size_t workers = 1;
    bool compute_standard_errors = true;
};

struct StandardErrorReport {
    std::vector<std::string> names;  // free coefficients, then the derived omega
    std::vector<double> estimates;
    std::vector<double> se;
    std::vector<double> p_values;
    std::vector<bool> at_boundary;
    std::vector<std::string> warnings;
};

inline double two_sided_normal_p(double z) { return std::erfc(std::abs(z) / std::numbers::sqrt2); }

namespace detail {

// Central finite-difference Hessian of g at theta with per-coordinate
// steps max(1e-4, 1e-4 |theta_k|).
template <class G>
Eigen::MatrixXd central_hessian(G&& g, const std::vector<double>& theta) {
    const std::size_t p = theta.size();
    std::vector<double> h(p);
    for (std::size_t k = 0; k < p; ++k) h[k] = std::max(1e-4, 1e-4 * std::abs(theta[k]));
    Eigen::MatrixXd H(p, p);
    const double g0 = g(theta);
    std::vector<double> x = theta;
    for (std::size_t i = 0; i < p; ++i) {
        x[i] = theta[i] + h[i];
        const double gp = g(x);
        x[i] = theta[i] - h[i];
        const double gm = g(x);
        x[i] = theta[i];
        H(i, i) = (gp - 2.0 * g0 + gm) / (h[i] * h[i]);
        for (std::size_t j = 0; j < i; ++j) {
            double acc = 0.0;
            for (int si : {1, -1})
                for (int sj : {1, -1}) {
                    x[i] = theta[i] + si * h[i];
                    x[j] = theta[j] + sj * h[j];
                    acc += si * sj * g(x);
                }
            x[i] = theta[i];
            x[j] = theta[j];
            H(i, j) = H(j, i) = acc / (4.0 * h[i] * h[j]);
        }
    }
    return H;
}

}  // namespace detail

// se = sqrt(diag((-H)^-1)) with H the Hessian of the summed log-likelihood
// over the free coefficients (equivalently sqrt(diag(-Hbar^-1) / T) with
// Hbar the Hessian of the per-edition average). p-values are two-sided
// normal. The derived omega's error follows from omega_last = -sum(others).
inline StandardErrorReport standard_errors(const PanelDataset& dataset, const ModelSpec& spec, const Coefficients& coef) {
    spec.validate(dataset);
    const PanelDataset selected = select_predictors(dataset, spec.predictors);
    validate_coefficients(coef, selected);
    const ParameterLayout layout(selected, spec);
    const detail::FilterPlan plan = detail::make_plan(selected);
    auto loglik = [&](const std::vector<double>& theta) {
        const Coefficients c = layout.to_coefficients(theta);
        return detail::plan_loglik<double>(plan, c.omega, c.beta, c.phi, c.alpha);
    };
    const std::vector<double> theta = layout.to_theta(coef);
    const std::size_t p = theta.size();
    StandardErrorReport rep;
    rep.names = layout.free_names(selected);
    rep.estimates = theta;
    rep.at_boundary.assign(p, false);
    if (p == 0) return rep;

    std::vector<std::string> bound_names;
    if (spec.include_dynamics && spec.bounds == BoundsRegime::bounded) {
        constexpr double eps = 1e-6;
        if (layout.has_phi() && (coef.phi < eps || coef.phi > 1.0 - eps)) {
            rep.at_boundary[layout.phi_index()] = true;
            bound_names.emplace_back("phi");
        }
        if (coef.alpha < eps) {
            rep.at_boundary[layout.alpha_index()] = true;
            bound_names.emplace_back("alpha");
        }
    }

    const Eigen::MatrixXd H = detail::central_hessian(loglik, theta);
    // Indices kept in the information matrix; coefficients on a bound are
    // dropped (held fixed) when the full matrix is not positive definite.
    std::vector<Eigen::Index> keep;
    auto try_invert = [&](bool drop_bound) -> std::optional<Eigen::MatrixXd> {
        keep.clear();
        for (std::size_t k = 0; k < p; ++k)
            if (!(drop_bound && rep.at_boundary[k])) keep.push_back(static_cast<Eigen::Index>(k));
        const auto q = static_cast<Eigen::Index>(keep.size());
        Eigen::MatrixXd info(q, q);
        for (Eigen::Index a = 0; a < q; ++a)
            for (Eigen::Index b = 0; b < q; ++b) info(a, b) = -H(keep[a], keep[b]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(info);
        const Eigen::VectorXd ev = eig.eigenvalues();
        if (eig.info() != Eigen::Success || !(ev.minCoeff() > 0.0)) {
            if (!drop_bound) {
                std::ostringstream os;
                os << "observed information is not positive definite; eigenvalues:";
                for (Eigen::Index i = 0; i < ev.size(); ++i) os << ' ' << ev[i];
                rep.warnings.push_back(os.str());
            }
            return std::nullopt;
        }
        return eig.eigenvectors() * ev.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
    };
    std::optional<Eigen::MatrixXd> cov = try_invert(false);
    bool reduced = false;
    if (!cov && !bound_names.empty()) {
        cov = try_invert(true);
        reduced = cov.has_value();
    }
    if (!cov) {
        const std::string detail_msg = rep.warnings.empty() ? "observed information is not positive definite" : rep.warnings.front();
        throw NumericalError(detail_msg, theta, loglik(theta));
    }
    rep.warnings.clear();

    // Full-size covariance with NaN rows for dropped coefficients.
    Eigen::MatrixXd full = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p),
                                                     std::numeric_limits<double>::quiet_NaN());
    for (std::size_t a = 0; a < keep.size(); ++a)
        for (std::size_t b = 0; b < keep.size(); ++b)
            full(keep[a], keep[b]) = (*cov)(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    for (std::size_t k = 0; k < p; ++k) {
        const double s = std::sqrt(full(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)));
        rep.se.push_back(s);
        rep.p_values.push_back(std::isfinite(s) ? two_sided_normal_p(theta[k] / s) : s);
    }

    const std::size_t q = layout.omega_free();
    const TeamId last = layout.estimated_teams().back();
    const double var_last = full.topLeftCorner(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(q)).sum();
    rep.names.push_back("omega[" + selected.teams[last] + "]");
    rep.estimates.push_back(coef.omega[last]);
    rep.se.push_back(std::sqrt(std::max(var_last, 0.0)));
    rep.p_values.push_back(two_sided_normal_p(coef.omega[last] / rep.se.back()));
    rep.at_boundary.push_back(false);

    for (const auto& name : bound_names)
        rep.warnings.push_back(reduced ? name + " is at its bound and the full information matrix is not positive definite; "
                                             "its standard error is omitted and the others treat it as fixed"
                                       : name + " is at its bound; its standard error assumes an interior optimum");
    return rep;
}

// ---------------------------------------------------------------------------
// Fitting
// ---------------------------------------------------------------------------

struct ConvergenceInfo {
    std::size_t cycles = 0;
    std::size_t evaluations = 0;
    std::size_t restarts_used = 0;
    double final_tolerance = 0.0;
    bool converged = false;
    std::size_t best_start = 0;
};

struct CoefficientEstimate {
    enum class Role { free, derived, fixed };
    std::string name;
    double value = 0.0;
    Role role = Role::free;
    std::optional<double> se;
    std::optional<double> p_value;
    bool at_boundary = false;
};

inline const char* to_string(CoefficientEstimate::Role r) {
    switch (r) {
        case CoefficientEstimate::Role::free: return "free";
        case CoefficientEstimate::Role::derived: return "derived";
        case CoefficientEstimate::Role::fixed: return "fixed";
    }
    return "free";
}

struct FitResult {
    ModelSpec spec;
    std::vector<std::string> teams;
    std::vector<std::string> variables;
    Coefficients coef;
    double loglik = 0.0;
    double penalized_loglik = 0.0;
    double aic = 0.0;
    std::size_t free_parameters = 0;
    std::size_t observations = 0;
    bool has_standard_errors = false;
    // omega (registry order), beta, phi, alpha.
    std::vector<CoefficientEstimate> estimates;
    ConvergenceInfo convergence;
    PartitionReport partition;
    std::vector<std::string> notes;

    const CoefficientEstimate* find(const std::string& name) const {
        for (const auto& e : estimates)
            if (e.name == name) return &e;
        return nullptr;
    }
};

inline constexpr const char* penalized_se_caveat =
    "standard errors are not reported for penalized fits: the estimates are biased toward zero";

inline FitResult fit(const PanelDataset& dataset, const ModelSpec& spec, const std::optional<Coefficients>& init = std::nullopt,
                     const FitOptions& options = {}) {
    dataset.validate();
    spec.validate(dataset);
    const PanelDataset selected = select_predictors(dataset, spec.predictors);

    FitResult result;
    result.spec = spec;
    result.teams = selected.teams;
    result.variables = selected.variables;
    result.observations = selected.ranked_edition_count();
    result.partition = check_partition_condition(selected);
    if (spec.penalty_lambda == 0.0 && !result.partition.pass)
        throw DataError(describe_partition(result.partition, selected) +
                        "; maximum likelihood estimates would diverge. Set a penalty lambda > 0 or drop the teams involved.");

    const ParameterLayout layout(selected, spec);
    const detail::FilterPlan plan = detail::make_plan(selected);
    const double lambda = spec.penalty_lambda;
    auto objective = [&](const std::vector<double>& z) {
        const Coefficients c = layout.to_coefficients(layout.from_internal(z));
        const double ll = detail::plan_loglik<double>(plan, c.omega, c.beta, c.phi, c.alpha);
        return -(ll - penalty(c, lambda));
    };

    Coefficients start = init.value_or(layout.default_start());
    if (init) {
        validate_coefficients(start, selected);
        if (!spec.include_dynamics) start.phi = start.alpha = 0.0;
        if (spec.include_dynamics && spec.bounds == BoundsRegime::persistent) start.phi = 1.0;
    }
    const std::vector<double> z0 = layout.to_internal(layout.to_theta(start));
    const std::vector<double> steps = layout.internal_steps();

    SubplexOptions sopt;
    sopt.ftol_rel = options.ftol_rel;
    sopt.max_evaluations = options.max_evaluations;
    sopt.initial_step = steps;

    const std::size_t starts = std::max<std::size_t>(1, options.restarts);
    std::vector<SubplexResult> runs(starts);
    RandomSource master(options.seed);
    parallel_for(starts, options.workers, [&](std::size_t k) {
        std::vector<double> z = z0;
        if (k > 0) {
            RandomSource rng = master.spawn(k);
            for (std::size_t i = 0; i < z.size(); ++i) z[i] += 2.0 * steps[i] * rng.normal();
        }
        runs[k] = subplex_minimize(objective, z, sopt);
    });

    std::size_t best = 0;
    for (std::size_t k = 1; k < starts; ++k)
        if (runs[k].value < runs[best].value) best = k;

    ConvergenceInfo conv;
    conv.restarts_used = starts;
    conv.best_start = best;
    for (const auto& r : runs) {
        conv.evaluations += r.evaluations;
        conv.cycles += r.cycles;
    }
    // Restarting the simplex at the incumbent until it stops moving guards
    // against collapsed simplices.
    SubplexResult incumbent = runs[best];
    for (int polish = 0; polish < 5; ++polish) {
        SubplexResult again = subplex_minimize(objective, incumbent.x, sopt);
        conv.evaluations += again.evaluations;
        conv.cycles += again.cycles;
        const bool improved = again.value < incumbent.value;
        const double gain = improved ? (incumbent.value - again.value) / std::max(std::abs(again.value), 1e-300) : 0.0;
        if (improved) {
            again.converged = again.converged || incumbent.converged;
            incumbent = std::move(again);
        }
        if (gain <= options.ftol_rel) break;
    }
    conv.converged = incumbent.converged;
    conv.final_tolerance = incumbent.final_tolerance;
    result.convergence = conv;

    const std::vector<double> theta = layout.from_internal(incumbent.x);
    result.coef = layout.to_coefficients(theta);
    if (!conv.converged || !std::isfinite(incumbent.value))
        throw NumericalError("optimizer did not converge for spec '" + spec.name + "' within " +
                                 std::to_string(options.max_evaluations) + " evaluations per start",
                             theta, -incumbent.value);

    result.loglik = detail::plan_loglik<double>(plan, result.coef.omega, result.coef.beta, result.coef.phi, result.coef.alpha);
    result.penalized_loglik = result.loglik - penalty(result.coef, lambda);
    result.free_parameters = layout.free_count();
    result.aic = 2.0 * static_cast<double>(result.free_parameters) - 2.0 * result.loglik;

    // Coefficient table.
    std::vector<CoefficientEstimate> est;
    std::vector<std::size_t> theta_slot(selected.team_count(), SIZE_MAX);
    for (std::size_t k = 0; k < layout.omega_free(); ++k) theta_slot[layout.estimated_teams()[k]] = k;
    const TeamId derived = layout.estimated_teams().back();
    for (TeamId t = 0; t < selected.team_count(); ++t) {
        CoefficientEstimate e;
        e.name = "omega[" + selected.teams[t] + "]";
        e.value = result.coef.omega[t];
        e.role = theta_slot[t] != SIZE_MAX ? CoefficientEstimate::Role::free
                 : t == derived            ? CoefficientEstimate::Role::derived
                                           : CoefficientEstimate::Role::fixed;
        est.push_back(e);
    }
    auto entry = [](std::string name, double value, bool free) {
        CoefficientEstimate e;
        e.name = std::move(name);
        e.value = value;
        e.role = free ? CoefficientEstimate::Role::free : CoefficientEstimate::Role::fixed;
        return e;
    };
    for (std::size_t j = 0; j < selected.variable_count(); ++j)
        est.push_back(entry("beta[" + selected.variables[j] + "]", result.coef.beta[j], true));
    est.push_back(entry("phi", result.coef.phi, layout.has_phi()));
    est.push_back(entry("alpha", result.coef.alpha, layout.has_alpha()));

    if (lambda > 0.0) {
        result.notes.emplace_back(penalized_se_caveat);
    } else if (options.compute_standard_errors) {
        try {
            const StandardErrorReport se = standard_errors(dataset, spec, result.coef);
            for (std::size_t k = 0; k < se.names.size(); ++k)
                for (auto& e : est)
                    if (e.name == se.names[k]) {
                        if (std::isfinite(se.se[k])) {
                            e.se = se.se[k];
                            e.p_value = se.p_values[k];
                        }
                        e.at_boundary = se.at_boundary[k];
                    }
            for (const auto& w : se.warnings) result.notes.push_back(w);
            result.has_standard_errors = true;
        } catch (const NumericalError& e) {
            result.notes.push_back(std::string("standard errors unavailable: ") + e.what());
        }
    }
    for (TeamId t = 0; t < selected.team_count(); ++t)
        if (est[t].role == CoefficientEstimate::Role::fixed)
            result.notes.push_back("team " + selected.teams[t] + " has no ranked appearance; its fixed effect is held at 0");
    result.estimates = std::move(est);
    return result;
}

// ---------------------------------------------------------------------------
// Profiles and model comparison
// ---------------------------------------------------------------------------

struct ProfilePoint {
    double alpha;
    double loglik;
};

// Log-likelihood with every coefficient held at `coef` except alpha.
inline std::vector<ProfilePoint> profile_score_coefficient(const PanelDataset& dataset, const ModelSpec& spec,
                                                           const Coefficients& coef,
                                                           const std::vector<double>& alpha_grid) {
    spec.validate(dataset);
    const PanelDataset selected = select_predictors(dataset, spec.predictors);
    validate_coefficients(coef, selected);
    const detail::FilterPlan plan = detail::make_plan(selected);
    std::vector<ProfilePoint> out;
    out.reserve(alpha_grid.size());
    for (double a : alpha_grid)
        out.push_back({a, detail::plan_loglik<double>(plan, coef.omega, coef.beta, coef.phi, a)});
    return out;
}

inline std::string significance_stars(std::optional<double> p) {
    if (!p) return "";
    if (*p < 0.01) return "***";
    if (*p < 0.05) return "**";
    if (*p < 0.1) return "*";
    return "";
}

struct ModelColumn {
    ModelSpec spec;
    std::optional<FitResult> fit;
    std::string error;
};

struct ModelTable {
    std::vector<ModelColumn> columns;
    std::optional<std::size_t> best_aic;  // column index of the AIC minimizer
};

inline ModelTable model_table(const PanelDataset& dataset, const std::vector<ModelSpec>& specs, const FitOptions& options = {}) {
    ModelTable table;
    table.columns.resize(specs.size());
    FitOptions inner = options;
    inner.workers = 1;
    parallel_for(specs.size(), options.workers, [&](std::size_t k) {
        table.columns[k].spec = specs[k];
        try {
            table.columns[k].fit = fit(dataset, specs[k], std::nullopt, inner);
        } catch (const std::exception& e) {
            table.columns[k].error = e.what();
        }
    });
    for (std::size_t k = 0; k < table.columns.size(); ++k) {
        const auto& c = table.columns[k];
        if (!c.fit) continue;
        if (!table.best_aic || c.fit->aic < table.columns[*table.best_aic].fit->aic) table.best_aic = k;
    }
    return table;
}

}  // namespace gasrank
