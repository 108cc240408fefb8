#pragma once

// Plackett-Luce distribution over rankings of a finite participant set.
//
// A ranking is stored as its ordering: position r (0-based here) holds the
// team finishing r+1-th. Strengths live on the log scale; the distribution
// is invariant to adding a constant to every strength. All arithmetic is
// done in log space with suffix log-sum-exp so strengths tens of units
// apart stay finite.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "gasrank/errors.hpp"
#include "gasrank/random.hpp"

namespace gasrank {

using TeamId = std::uint32_t;

class Ranking {
public:
    Ranking() = default;

    explicit Ranking(std::vector<TeamId> ordering) : ordering_(std::move(ordering)) {
        if (ordering_.size() < 2) throw DomainError("a ranking needs at least two teams");
        std::vector<TeamId> sorted = ordering_;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw DomainError("ranking contains a team more than once");
    }

    std::span<const TeamId> ordering() const noexcept { return ordering_; }
    std::size_t size() const noexcept { return ordering_.size(); }

    // Team holding 1-based rank r.
    TeamId at_rank(std::size_t r) const {
        if (r == 0 || r > ordering_.size()) throw DataError("rank out of range");
        return ordering_[r - 1];
    }

    bool contains(TeamId team) const {
        return std::find(ordering_.begin(), ordering_.end(), team) != ordering_.end();
    }

    // 1-based rank of a team (the ranking y as opposed to the ordering).
    std::size_t rank_of(TeamId team) const {
        auto it = std::find(ordering_.begin(), ordering_.end(), team);
        if (it == ordering_.end())
            throw DataError("team " + std::to_string(team) + " is not part of the ranking");
        return static_cast<std::size_t>(it - ordering_.begin()) + 1;
    }

    std::map<TeamId, std::size_t> ranks() const {
        std::map<TeamId, std::size_t> out;
        for (std::size_t r = 0; r < ordering_.size(); ++r) out[ordering_[r]] = r + 1;
        return out;
    }

    std::vector<TeamId> team_set() const {
        std::vector<TeamId> s = ordering_;
        std::sort(s.begin(), s.end());
        return s;
    }

    friend bool operator==(const Ranking&, const Ranking&) = default;

private:
    std::vector<TeamId> ordering_;
};

// Team -> strength. Ordered so iteration (and therefore every derived
// output) is deterministic.
using StrengthVector = std::map<TeamId, double>;

namespace detail {

// out[r] = log sum_{s >= r} exp f[s]. Works for any scalar type providing
// exp/log/arithmetic and operator< (used by the forward-mode AD checks).
template <class Scalar>
void suffix_log_mass(std::span<const Scalar> f, std::span<Scalar> out) {
    using std::exp;
    using std::log;
    const std::size_t n = f.size();
    if (n == 0) return;
    out[n - 1] = f[n - 1];
    for (std::size_t r = n - 1; r-- > 0;) {
        const Scalar& a = f[r];
        const Scalar& b = out[r + 1];
        out[r] = (b < a) ? a + log(Scalar(1) + exp(b - a)) : b + log(Scalar(1) + exp(a - b));
    }
}

// Log-probability of the ordering whose strengths, listed best-first, are f.
template <class Scalar>
Scalar ordered_log_pmf(std::span<const Scalar> f, std::span<Scalar> work) {
    suffix_log_mass(f, work);
    Scalar total(0);
    for (std::size_t r = 0; r < f.size(); ++r) total += f[r] - work[r];
    return total;
}

// Log-probability plus the score (gradient w.r.t. f, in the same order).
// score[r] = 1 - exp(f[r]) * sum_{q <= r} 1 / S_q with S_q the suffix mass;
// the inner sum is accumulated as a running log-sum-exp so each term stays
// at most 1.
template <class Scalar>
Scalar ordered_log_pmf_and_score(std::span<const Scalar> f, std::span<Scalar> score,
                                 std::span<Scalar> work) {
    using std::exp;
    using std::log;
    suffix_log_mass(f, work);
    Scalar total(0);
    Scalar log_inv(0);
    for (std::size_t r = 0; r < f.size(); ++r) {
        total += f[r] - work[r];
        const Scalar next = -work[r];
        if (r == 0) {
            log_inv = next;
        } else {
            log_inv = (log_inv < next) ? next + log(Scalar(1) + exp(log_inv - next))
                                       : log_inv + log(Scalar(1) + exp(next - log_inv));
        }
        score[r] = Scalar(1) - exp(f[r] + log_inv);
    }
    return total;
}

inline std::vector<double> gather(const Ranking& ranking, const StrengthVector& f) {
    std::vector<double> out;
    out.reserve(ranking.size());
    for (TeamId t : ranking.ordering()) {
        auto it = f.find(t);
        if (it == f.end()) throw DataError("no strength for team " + std::to_string(t));
        if (!std::isfinite(it->second))
            throw DomainError("non-finite strength for team " + std::to_string(t));
        out.push_back(it->second);
    }
    return out;
}

inline void check_finite(const StrengthVector& f) {
    for (const auto& [team, v] : f)
        if (!std::isfinite(v)) throw DomainError("non-finite strength for team " + std::to_string(team));
}

}  // namespace detail

inline double log_pmf(const Ranking& ranking, const StrengthVector& f) {
    const std::vector<double> ordered = detail::gather(ranking, f);
    std::vector<double> work(ordered.size());
    return detail::ordered_log_pmf<double>(ordered, work);
}

inline StrengthVector score(const Ranking& ranking, const StrengthVector& f) {
    const std::vector<double> ordered = detail::gather(ranking, f);
    std::vector<double> s(ordered.size()), work(ordered.size());
    detail::ordered_log_pmf_and_score<double>(ordered, s, work);
    StrengthVector out;
    for (std::size_t r = 0; r < ordered.size(); ++r) out[ranking.ordering()[r]] = s[r];
    return out;
}

namespace detail {

// Draws the first `depth` positions of a Plackett-Luce ordering from
// weights exp(f - max f). `placed` is scratch space of the same length.
inline void draw_prefix(std::span<const double> weights, std::size_t depth, RandomSource& rng,
                        std::vector<char>& placed, std::vector<std::size_t>& picked) {
    picked.clear();
    placed.assign(weights.size(), 0);
    for (std::size_t r = 0; r < depth; ++r) {
        double remaining = 0.0;
        std::size_t fallback = weights.size();
        for (std::size_t i = 0; i < weights.size(); ++i)
            if (!placed[i]) {
                remaining += weights[i];
                if (fallback == weights.size() || weights[i] > 0.0) fallback = i;
            }
        const double target = rng.uniform() * remaining;
        double acc = 0.0;
        std::size_t choice = fallback;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (placed[i]) continue;
            acc += weights[i];
            if (target < acc) {
                choice = i;
                break;
            }
        }
        picked.push_back(choice);
        placed[choice] = 1;
    }
}

inline std::vector<double> relative_weights(const std::vector<double>& f) {
    const double m = *std::max_element(f.begin(), f.end());
    std::vector<double> w(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) w[i] = std::exp(f[i] - m);
    return w;
}

}  // namespace detail

// Sequential draw: rank 1 from all teams with probability proportional to
// exp f, rank 2 from the remaining teams, and so on.
inline Ranking sample_ranking(const StrengthVector& f, RandomSource& rng) {
    if (f.size() < 2) throw DomainError("sampling a ranking needs at least two teams");
    detail::check_finite(f);
    std::vector<TeamId> teams;
    std::vector<double> values;
    for (const auto& [t, v] : f) {
        teams.push_back(t);
        values.push_back(v);
    }
    const std::vector<double> w = detail::relative_weights(values);
    std::vector<char> placed;
    std::vector<std::size_t> picked;
    detail::draw_prefix(w, w.size(), rng, placed, picked);
    std::vector<TeamId> ordering;
    ordering.reserve(picked.size());
    for (std::size_t i : picked) ordering.push_back(teams[i]);
    return Ranking(std::move(ordering));
}

// Rank-1 marginal: exp f_team / sum_j exp f_j.
inline double champion_probability(const StrengthVector& f, TeamId team) {
    auto it = f.find(team);
    if (it == f.end()) throw DataError("team " + std::to_string(team) + " does not participate");
    detail::check_finite(f);
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& [t, v] : f) m = std::max(m, v);
    double total = 0.0;
    for (const auto& [t, v] : f) total += std::exp(v - m);
    return std::exp(it->second - m) / total;
}

enum class ProbabilityMethod { exact, monte_carlo };

inline constexpr std::size_t default_exact_cap = 40320;  // 8!

inline std::size_t factorial_capped(std::size_t k, std::size_t cap) {
    std::size_t acc = 1;
    for (std::size_t i = 2; i <= k; ++i) {
        if (acc > cap / i) return cap + 1;
        acc *= i;
    }
    return acc;
}

// Probability that team_set occupies exactly ranks 1..k in some internal
// order. The exact route sums the sequential-choice product over all k!
// orderings of the set; orderings sharing a placed prefix share the same
// remaining mass, so the sum is accumulated over subsets of the set
// (2^k * k terms instead of k! * k) without changing its value.
inline double top_k_set_probability(const StrengthVector& f, std::span<const TeamId> team_set,
                                    ProbabilityMethod method, RandomSource* rng = nullptr,
                                    std::size_t draws = 0,
                                    std::size_t exact_cap = default_exact_cap) {
    detail::check_finite(f);
    const std::size_t k = team_set.size();
    if (k == 0) throw DomainError("empty team set");
    std::vector<TeamId> set(team_set.begin(), team_set.end());
    std::sort(set.begin(), set.end());
    if (std::adjacent_find(set.begin(), set.end()) != set.end())
        throw DomainError("team set contains duplicates");
    for (TeamId t : set)
        if (!f.contains(t)) throw DataError("team " + std::to_string(t) + " is not a participant");

    std::vector<TeamId> teams;
    std::vector<double> values;
    for (const auto& [t, v] : f) {
        teams.push_back(t);
        values.push_back(v);
    }
    const std::vector<double> w = detail::relative_weights(values);

    if (method == ProbabilityMethod::exact) {
        if (factorial_capped(k, exact_cap) > exact_cap)
            throw CapacityError("exact top-" + std::to_string(k) + " probability exceeds the enumeration cap of " +
                                std::to_string(exact_cap) + " orderings");
        if (k >= 63) throw CapacityError("team set too large for exact evaluation");
        double total = 0.0;
        for (double x : w) total += x;
        std::vector<double> set_w(k);
        for (std::size_t i = 0; i < k; ++i)
            set_w[i] = w[static_cast<std::size_t>(std::lower_bound(teams.begin(), teams.end(), set[i]) - teams.begin())];
        const std::size_t subsets = std::size_t{1} << k;
        std::vector<double> placed_mass(subsets, 0.0), prob(subsets, 0.0);
        for (std::size_t s = 1; s < subsets; ++s) {
            const std::size_t low = static_cast<std::size_t>(std::countr_zero(s));
            placed_mass[s] = placed_mass[s & (s - 1)] + set_w[low];
        }
        prob[0] = 1.0;
        for (std::size_t s = 1; s < subsets; ++s) {
            double acc = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                if (!(s & (std::size_t{1} << i))) continue;
                const std::size_t before = s ^ (std::size_t{1} << i);
                acc += prob[before] * set_w[i] / (total - placed_mass[before]);
            }
            prob[s] = acc;
        }
        return std::min(prob[subsets - 1], 1.0);
    }

    if (rng == nullptr || draws == 0)
        throw DomainError("Monte-Carlo probability needs a random source and a positive draw count");
    std::vector<char> in_set(teams.size(), 0);
    for (TeamId t : set)
        in_set[static_cast<std::size_t>(std::lower_bound(teams.begin(), teams.end(), t) - teams.begin())] = 1;
    std::size_t hits = 0;
    std::vector<char> placed;
    std::vector<std::size_t> picked;
    picked.reserve(k);
    for (std::size_t d = 0; d < draws; ++d) {
        detail::draw_prefix(w, std::min(k, teams.size()), *rng, placed, picked);
        bool all = true;
        for (std::size_t i : picked)
            if (!in_set[i]) {
                all = false;
                break;
            }
        if (all) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(draws);
}

// Descending strength; ties broken by ascending team id (team ids follow
// the lexicographic order of team names in a panel registry).
inline Ranking modal_ranking(const StrengthVector& f) {
    detail::check_finite(f);
    std::vector<std::pair<double, TeamId>> keyed;
    for (const auto& [t, v] : f) keyed.emplace_back(-v, t);
    std::stable_sort(keyed.begin(), keyed.end());
    std::vector<TeamId> ordering;
    for (const auto& [v, t] : keyed) ordering.push_back(t);
    return Ranking(std::move(ordering));
}

inline constexpr const char* modal_tie_break_rule = "descending strength, ties by ascending team id";

}  // namespace gasrank
