#pragma once

// Time-indexed panel of tournament editions: who took part, how they
// finished, and the predictor values of each participating team.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gasrank/errors.hpp"
#include "gasrank/plackett_luce.hpp"

namespace gasrank {

struct Edition {
    std::string label;
    // Ascending team ids. Empty for a cancelled edition.
    std::vector<TeamId> participants;
    // Present iff at least two teams took part.
    std::optional<Ranking> ranking;
    // Row-major participants.size() x variable count; row k belongs to
    // participants[k].
    std::vector<double> predictors;

    bool participates(TeamId team) const {
        return std::binary_search(participants.begin(), participants.end(), team);
    }

    std::size_t row_of(TeamId team) const {
        auto it = std::lower_bound(participants.begin(), participants.end(), team);
        if (it == participants.end() || *it != team)
            throw DataError("team " + std::to_string(team) + " does not take part in edition " + label);
        return static_cast<std::size_t>(it - participants.begin());
    }

    double predictor(TeamId team, std::size_t variable, std::size_t variable_count) const {
        return predictors[row_of(team) * variable_count + variable];
    }

    friend bool operator==(const Edition&, const Edition&) = default;
};

struct PanelDataset {
    std::vector<std::string> teams;      // registry, lexicographically sorted
    std::vector<std::string> variables;  // predictor names
    std::vector<Edition> editions;       // chronological

    std::size_t team_count() const noexcept { return teams.size(); }
    std::size_t variable_count() const noexcept { return variables.size(); }
    std::size_t edition_count() const noexcept { return editions.size(); }

    std::size_t ranked_edition_count() const {
        return static_cast<std::size_t>(
            std::count_if(editions.begin(), editions.end(), [](const Edition& e) { return e.ranking.has_value(); }));
    }

    std::optional<TeamId> find_team(std::string_view name) const {
        auto it = std::lower_bound(teams.begin(), teams.end(), name);
        if (it == teams.end() || *it != name) return std::nullopt;
        return static_cast<TeamId>(it - teams.begin());
    }

    TeamId team_id(std::string_view name) const {
        auto id = find_team(name);
        if (!id) throw DataError("unknown team '" + std::string(name) + "'");
        return *id;
    }

    std::optional<std::size_t> find_variable(std::string_view name) const {
        auto it = std::find(variables.begin(), variables.end(), name);
        if (it == variables.end()) return std::nullopt;
        return static_cast<std::size_t>(it - variables.begin());
    }

    friend bool operator==(const PanelDataset&, const PanelDataset&) = default;

    // Throws ValidationError listing every violated invariant.
    void validate() const {
        std::vector<std::string> issues;
        if (teams.size() < 2) issues.push_back("panel needs at least two teams");
        if (editions.empty()) issues.push_back("panel needs at least one edition");
        if (!std::is_sorted(teams.begin(), teams.end()) ||
            std::adjacent_find(teams.begin(), teams.end()) != teams.end())
            issues.push_back("team registry must be sorted and free of duplicates");
        const std::size_t m = variables.size();
        for (const auto& e : editions) {
            const std::string where = "edition " + e.label + ": ";
            if (!std::is_sorted(e.participants.begin(), e.participants.end()) ||
                std::adjacent_find(e.participants.begin(), e.participants.end()) != e.participants.end())
                issues.push_back(where + "participants must be ascending and distinct");
            for (TeamId t : e.participants)
                if (t >= teams.size()) issues.push_back(where + "participant id " + std::to_string(t) + " out of range");
            const bool should_rank = e.participants.size() >= 2;
            if (should_rank != e.ranking.has_value())
                issues.push_back(where + (should_rank ? "missing ranking" : "ranking given for fewer than two participants"));
            if (e.ranking && e.ranking->team_set() != e.participants)
                issues.push_back(where + "ranking does not cover exactly the participants");
            if (e.predictors.size() != e.participants.size() * m) {
                issues.push_back(where + "predictor matrix has " + std::to_string(e.predictors.size()) +
                                 " values, expected " + std::to_string(e.participants.size() * m));
            } else {
                for (std::size_t r = 0; r < e.participants.size(); ++r)
                    for (std::size_t j = 0; j < m; ++j)
                        if (!std::isfinite(e.predictors[r * m + j]))
                            issues.push_back(where + "predictor '" + variables[j] + "' missing for team " +
                                             (e.participants[r] < teams.size() ? teams[e.participants[r]]
                                                                               : std::to_string(e.participants[r])));
            }
        }
        if (!issues.empty()) throw ValidationError(std::move(issues));
    }
};

// Same panel restricted to the named predictor columns, in the given order.
inline PanelDataset select_predictors(const PanelDataset& panel, const std::vector<std::string>& names) {
    std::vector<std::size_t> cols;
    for (const auto& n : names) {
        auto j = panel.find_variable(n);
        if (!j) throw DataError("predictor '" + n + "' is not in the panel");
        cols.push_back(*j);
    }
    PanelDataset out;
    out.teams = panel.teams;
    out.variables = names;
    out.editions.reserve(panel.editions.size());
    const std::size_t m = panel.variable_count();
    for (const auto& e : panel.editions) {
        Edition ne{e.label, e.participants, e.ranking, {}};
        ne.predictors.reserve(e.participants.size() * cols.size());
        for (std::size_t r = 0; r < e.participants.size(); ++r)
            for (std::size_t j : cols) ne.predictors.push_back(e.predictors[r * m + j]);
        out.editions.push_back(std::move(ne));
    }
    return out;
}

// First `count` editions.
inline PanelDataset truncate_editions(const PanelDataset& panel, std::size_t count) {
    PanelDataset out;
    out.teams = panel.teams;
    out.variables = panel.variables;
    out.editions.assign(panel.editions.begin(),
                        panel.editions.begin() + static_cast<std::ptrdiff_t>(std::min(count, panel.editions.size())));
    return out;
}

// Teams ranked in at least one edition, ascending.
inline std::vector<TeamId> appearing_teams(const PanelDataset& panel) {
    std::vector<char> seen(panel.team_count(), 0);
    for (const auto& e : panel.editions)
        if (e.ranking)
            for (TeamId t : e.participants) seen[t] = 1;
    std::vector<TeamId> out;
    for (TeamId t = 0; t < seen.size(); ++t)
        if (seen[t]) out.push_back(t);
    return out;
}

}  // namespace gasrank
