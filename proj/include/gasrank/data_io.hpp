#pragma once

// Tournament results and roster CSVs -> PanelDataset, plus the build
// report and five-number summaries of the predictor columns.
//
// results.csv: edition_year,tournament_code,team_id,final_rank,division_tier
// rosters.csv: edition_year,tournament_code,team_id,avg_height_cm,avg_weight_kg,
//              avg_age_years,iihf_games_avg,nhl_games_avg,other_league_games_avg,hosting_flag
//
// division_tier 1 is the top division. Ranks in lower tiers continue after
// the tiers above them (a division I winner ranks one below the top
// division's last team) when reciprocal-rank predictors are built.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "gasrank/csv.hpp"
#include "gasrank/errors.hpp"
#include "gasrank/estimation.hpp"
#include "gasrank/panel.hpp"

namespace gasrank {

inline constexpr std::array<std::string_view, 5> results_header{"edition_year", "tournament_code", "team_id",
                                                                 "final_rank", "division_tier"};
inline constexpr std::array<std::string_view, 10> rosters_header{
    "edition_year",   "tournament_code", "team_id",       "avg_height_cm",          "avg_weight_kg",
    "avg_age_years",  "iihf_games_avg",  "nhl_games_avg", "other_league_games_avg", "hosting_flag"};

struct ResultRow {
    std::size_t line = 0;
    int year = 0;
    std::string code;
    std::string team;
    int rank = 0;
    int tier = 1;
};

struct RosterRow {
    std::size_t line = 0;
    int year = 0;
    std::string code;
    std::string team;
    double height = 0, weight = 0, age = 0, iihf = 0, nhl = 0, other = 0;
    int hosting = 0;
};

struct RawResults {
    std::string source = "results.csv";
    std::vector<ResultRow> rows;
};

struct RawRosters {
    std::string source = "rosters.csv";
    std::vector<RosterRow> rows;
};

namespace detail {

template <std::size_t N>
void check_header(const CsvTable& t, const std::array<std::string_view, N>& expected, const std::string& source) {
    bool ok = t.header.size() == N;
    for (std::size_t i = 0; ok && i < N; ++i) ok = t.header[i] == expected[i];
    if (ok) return;
    std::string want;
    for (std::size_t i = 0; i < N; ++i) want += (i ? "," : "") + std::string(expected[i]);
    throw DataError(source + ": header must be exactly '" + want + "'");
}

inline std::string trim(std::string s) {
    auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && ws(static_cast<unsigned char>(s.back()))) s.pop_back();
    std::size_t b = 0;
    while (b < s.size() && ws(static_cast<unsigned char>(s[b]))) ++b;
    return s.substr(b);
}

template <class T>
std::optional<T> parse_number(const std::string& raw) {
    const std::string s = trim(raw);
    T v{};
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || p != end) return std::nullopt;
    if constexpr (std::is_floating_point_v<T>)
        if (!std::isfinite(v)) return std::nullopt;
    return v;
}

struct RowIssues {
    std::vector<std::string> list;
    void add(const std::string& source, std::size_t line, const std::string& what) {
        list.push_back(source + " row " + std::to_string(line) + ": " + what);
    }
};

}  // namespace detail

inline RawResults parse_results(const CsvTable& table, const std::string& source = "results.csv") {
    detail::check_header(table, results_header, source);
    RawResults out;
    out.source = source;
    detail::RowIssues issues;
    for (const auto& r : table.records) {
        ResultRow row;
        row.line = r.line;
        const auto year = detail::parse_number<int>(r.fields[0]);
        const auto rank = detail::parse_number<int>(r.fields[3]);
        const auto tier = detail::parse_number<int>(r.fields[4]);
        row.code = detail::trim(r.fields[1]);
        row.team = detail::trim(r.fields[2]);
        if (!year || *year <= 0) issues.add(source, r.line, "edition_year must be a positive integer");
        if (!rank || *rank <= 0) issues.add(source, r.line, "final_rank must be a positive integer");
        if (!tier || *tier <= 0) issues.add(source, r.line, "division_tier must be a positive integer");
        if (row.code.empty()) issues.add(source, r.line, "tournament_code is empty");
        if (row.team.empty()) issues.add(source, r.line, "team_id is empty");
        row.year = year.value_or(0);
        row.rank = rank.value_or(0);
        row.tier = tier.value_or(0);
        out.rows.push_back(std::move(row));
    }
    if (!issues.list.empty()) throw ValidationError(std::move(issues.list));
    return out;
}

inline RawRosters parse_rosters(const CsvTable& table, const std::string& source = "rosters.csv") {
    detail::check_header(table, rosters_header, source);
    RawRosters out;
    out.source = source;
    detail::RowIssues issues;
    for (const auto& r : table.records) {
        RosterRow row;
        row.line = r.line;
        const auto year = detail::parse_number<int>(r.fields[0]);
        row.code = detail::trim(r.fields[1]);
        row.team = detail::trim(r.fields[2]);
        if (!year || *year <= 0) issues.add(source, r.line, "edition_year must be a positive integer");
        if (row.code.empty()) issues.add(source, r.line, "tournament_code is empty");
        if (row.team.empty()) issues.add(source, r.line, "team_id is empty");
        row.year = year.value_or(0);
        struct Window {
            double* target;
            const char* name;
            double lo, hi;
        };
        const std::array<Window, 6> cols{{{&row.height, "avg_height_cm", 150.0, 220.0},
                                          {&row.weight, "avg_weight_kg", 50.0, 130.0},
                                          {&row.age, "avg_age_years", 15.0, 45.0},
                                          {&row.iihf, "iihf_games_avg", 0.0, 1e6},
                                          {&row.nhl, "nhl_games_avg", 0.0, 1e6},
                                          {&row.other, "other_league_games_avg", 0.0, 1e6}}};
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const auto v = detail::parse_number<double>(r.fields[3 + c]);
            if (!v) {
                issues.add(source, r.line, std::string(cols[c].name) + " is not a number");
                continue;
            }
            if (*v < cols[c].lo || *v > cols[c].hi)
                issues.add(source, r.line, std::string(cols[c].name) + " = " + detail::trim(r.fields[3 + c]) +
                                               " outside the plausible range");
            *cols[c].target = *v;
        }
        const auto host = detail::parse_number<int>(r.fields[9]);
        if (!host || (*host != 0 && *host != 1)) issues.add(source, r.line, "hosting_flag must be 0 or 1");
        row.hosting = host.value_or(0);
        out.rows.push_back(std::move(row));
    }
    if (!issues.list.empty()) throw ValidationError(std::move(issues.list));
    return out;
}

inline RawResults load_results(const std::string& path) { return parse_results(read_csv_file(path), path); }
inline RawRosters load_rosters(const std::string& path) { return parse_rosters(read_csv_file(path), path); }

// Predictor names understood by build_panel. last_<code> is the
// reciprocal rank in tournament <code>; the rest come from rosters.
inline const std::vector<std::string>& standard_predictors() {
    static const std::vector<std::string> names{"hosting",    "last_u18",   "last_wjc", "last_wc",  "avg_height",
                                                "avg_weight", "avg_age",    "iihf_exp", "nhl_exp",  "other_exp"};
    return names;
}

// Season alignment: for a panel tournament, the source tournament year
// feeding edition year Y is Y - lag.
using SeasonAlignment = std::map<std::string, std::map<std::string, int>>;

inline SeasonAlignment default_season_alignment() {
    return {{"WC", {{"WC", 1}, {"WJC", 0}, {"U18", 0}}}, {"WJC", {{"WC", 1}, {"WJC", 1}, {"U18", 1}}}};
}

struct BuildConfig {
    std::string tournament = "WC";
    std::optional<int> first_year;
    std::optional<int> last_year;
    std::map<std::string, std::string> merges;  // alias -> canonical
    std::vector<std::string> exclude;
    bool auto_exclude = false;
    std::vector<std::string> predictors = standard_predictors();
    SeasonAlignment alignment = default_season_alignment();
};

struct MergeApplied {
    std::string alias;
    std::string canonical;
    std::size_t rows = 0;
};

struct Exclusion {
    std::string team;
    std::string reason;
    std::size_t appearances = 0;
};

struct BuildReport {
    std::string tournament;
    int first_year = 0;
    int last_year = 0;
    std::vector<MergeApplied> merges;
    std::vector<Exclusion> excluded;
    std::vector<int> gap_years;
    std::vector<int> emptied_years;  // editions left with fewer than two teams after exclusions
    bool partition_pass = true;
    std::string partition;
    std::size_t teams = 0;
    std::size_t editions = 0;
    std::size_t ranked_editions = 0;
    std::vector<std::string> predictors;
};

namespace detail {

inline std::map<std::string, std::string> resolve_merges(const std::map<std::string, std::string>& merges) {
    std::map<std::string, std::string> out;
    std::vector<std::string> issues;
    for (const auto& [alias, _] : merges) {
        std::vector<std::string> chain{alias};
        std::string cur = alias;
        bool cycle = false;
        while (true) {
            auto it = merges.find(cur);
            if (it == merges.end()) break;
            cur = it->second;
            if (std::find(chain.begin(), chain.end(), cur) != chain.end()) {
                cycle = true;
                chain.push_back(cur);
                break;
            }
            chain.push_back(cur);
        }
        if (cycle) {
            std::string s;
            for (std::size_t i = 0; i < chain.size(); ++i) s += (i ? " -> " : "") + chain[i];
            issues.push_back("merge cycle: " + s);
        } else if (cur != alias) {
            out[alias] = cur;
        }
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));
    return out;
}

inline std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline std::string upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

// (year, code) -> team -> global rank across tiers.
using GlobalRanks = std::map<std::pair<int, std::string>, std::map<std::string, int>>;

inline GlobalRanks global_ranks(const std::vector<ResultRow>& rows) {
    std::map<std::pair<int, std::string>, std::map<int, std::vector<const ResultRow*>>> grouped;
    for (const auto& r : rows) grouped[{r.year, r.code}][r.tier].push_back(&r);
    GlobalRanks out;
    for (const auto& [key, tiers] : grouped) {
        int offset = 0;
        auto& dst = out[key];
        for (const auto& [tier, members] : tiers) {
            for (const ResultRow* r : members) dst[r->team] = r->rank + offset;
            offset += static_cast<int>(members.size());
        }
    }
    return out;
}

// Strongly connected components of the beats digraph over teams ranked at
// least once, each sorted, in order of their smallest member.
inline std::vector<std::vector<TeamId>> beat_components(const PanelDataset& panel) {
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
    for (TeamId k : active)
        for (TeamId i : active)
            if (reach[i][k])
                for (TeamId j : active)
                    if (reach[k][j]) reach[i][j] = 1;
    std::vector<char> done(n, 0);
    std::vector<std::vector<TeamId>> comps;
    for (TeamId i : active) {
        if (done[i]) continue;
        std::vector<TeamId> c;
        for (TeamId j : active)
            if (reach[i][j] && reach[j][i]) {
                c.push_back(j);
                done[j] = 1;
            }
        comps.push_back(std::move(c));
    }
    return comps;
}

}  // namespace detail

// 1/global rank of every participant of `panel` in tournament `source`,
// `lag` years before each edition; 0 when the team did not take part or
// the tournament was not held that year. Result is aligned with each
// edition's participants.
inline std::vector<std::vector<double>> reciprocal_rank_predictor(const RawResults& results, const std::string& source,
                                                                  int lag, const PanelDataset& panel) {
    bool known = false;
    for (const auto& r : results.rows) known = known || r.code == source;
    if (!known) throw DataError("unknown tournament code '" + source + "' in " + results.source);
    const auto ranks = detail::global_ranks(results.rows);
    std::vector<std::vector<double>> out;
    for (const auto& e : panel.editions) {
        std::vector<double> col(e.participants.size(), 0.0);
        const auto year = detail::parse_number<int>(e.label);
        if (!year) throw DataError("edition label '" + e.label + "' is not a year");
        auto it = ranks.find({*year - lag, source});
        if (it != ranks.end())
            for (std::size_t r = 0; r < e.participants.size(); ++r) {
                auto jt = it->second.find(panel.teams[e.participants[r]]);
                if (jt != it->second.end()) col[r] = 1.0 / static_cast<double>(jt->second);
            }
        out.push_back(std::move(col));
    }
    return out;
}

struct BuildOutput {
    PanelDataset panel;
    BuildReport report;
};

inline BuildOutput build_panel(RawResults results, RawRosters rosters, const BuildConfig& config) {
    BuildReport report;
    report.tournament = config.tournament;
    report.predictors = config.predictors;

    // Merges.
    const auto merge_map = detail::resolve_merges(config.merges);
    std::map<std::string, std::size_t> merged_rows;
    auto canonical = [&](std::string& team) {
        auto it = merge_map.find(team);
        if (it == merge_map.end()) return;
        ++merged_rows[team];
        team = it->second;
    };
    for (auto& r : results.rows) canonical(r.team);
    for (auto& r : rosters.rows) canonical(r.team);
    for (const auto& [alias, target] : merge_map) report.merges.push_back({alias, target, merged_rows[alias]});

    // Row-level consistency.
    std::vector<std::string> issues;
    {
        std::map<std::tuple<int, std::string, std::string>, std::size_t> seen;
        std::map<std::tuple<int, std::string, int>, std::vector<const ResultRow*>> groups;
        for (const auto& r : results.rows) {
            auto [it, fresh] = seen.try_emplace({r.year, r.code, r.team}, r.line);
            if (!fresh)
                issues.push_back(results.source + " row " + std::to_string(r.line) + ": duplicate entry for team " +
                                 r.team + " in " + r.code + " " + std::to_string(r.year) + " (first on row " +
                                 std::to_string(it->second) + ")");
            groups[{r.year, r.code, r.tier}].push_back(&r);
        }
        for (auto& [key, rows] : groups) {
            std::sort(rows.begin(), rows.end(), [](auto* a, auto* b) { return std::tie(a->rank, a->line) < std::tie(b->rank, b->line); });
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const int expect = static_cast<int>(i) + 1;
                if (rows[i]->rank == expect) continue;
                const std::string where = results.source + " row " + std::to_string(rows[i]->line) + ": ";
                const std::string group = std::get<1>(key) + " " + std::to_string(std::get<0>(key)) + " tier " +
                                          std::to_string(std::get<2>(key));
                if (i > 0 && rows[i]->rank == rows[i - 1]->rank)
                    issues.push_back(where + "rank " + std::to_string(rows[i]->rank) + " repeated in " + group);
                else
                    issues.push_back(where + "rank gap in " + group + ": expected " + std::to_string(expect) +
                                     ", found " + std::to_string(rows[i]->rank));
                break;
            }
        }
        std::map<std::tuple<int, std::string, std::string>, std::size_t> roster_seen;
        for (const auto& r : rosters.rows) {
            auto [it, fresh] = roster_seen.try_emplace({r.year, r.code, r.team}, r.line);
            if (!fresh)
                issues.push_back(rosters.source + " row " + std::to_string(r.line) + ": duplicate roster for team " +
                                 r.team + " in " + r.code + " " + std::to_string(r.year) + " (first on row " +
                                 std::to_string(it->second) + ")");
        }
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));

    // Top-division rows of the panel tournament inside the span.
    std::vector<const ResultRow*> panel_rows;
    for (const auto& r : results.rows)
        if (r.code == config.tournament && r.tier == 1) panel_rows.push_back(&r);
    if (panel_rows.empty()) throw DataError("no top-division results for tournament " + config.tournament);
    int first = config.first_year.value_or(std::numeric_limits<int>::max());
    int last = config.last_year.value_or(std::numeric_limits<int>::min());
    if (!config.first_year || !config.last_year)
        for (const auto* r : panel_rows) {
            if (!config.first_year) first = std::min(first, r->year);
            if (!config.last_year) last = std::max(last, r->year);
        }
    if (first > last) throw DataError("empty edition span");
    report.first_year = first;
    report.last_year = last;

    std::map<int, std::vector<const ResultRow*>> by_year;
    for (const auto* r : panel_rows)
        if (r->year >= first && r->year <= last) by_year[r->year].push_back(r);
    std::map<std::string, std::size_t> appearances;
    for (const auto& [y, rows] : by_year)
        for (const auto* r : rows) ++appearances[r->team];

    std::set<std::string> excluded;
    for (std::string name : config.exclude) {
        if (auto it = merge_map.find(name); it != merge_map.end()) name = it->second;
        if (!appearances.contains(name)) {
            issues.push_back("excluded team '" + name + "' does not appear in " + config.tournament + " " +
                             std::to_string(first) + "-" + std::to_string(last));
            continue;
        }
        if (excluded.insert(name).second) report.excluded.push_back({name, "excluded by configuration", appearances[name]});
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));

    auto assemble = [&](std::vector<int>& emptied) {
        PanelDataset p;
        std::set<std::string> names;
        for (const auto& [y, rows] : by_year)
            for (const auto* r : rows)
                if (!excluded.contains(r->team)) names.insert(r->team);
        p.teams.assign(names.begin(), names.end());
        emptied.clear();
        for (int y = first; y <= last; ++y) {
            Edition e;
            e.label = std::to_string(y);
            auto it = by_year.find(y);
            if (it != by_year.end()) {
                std::vector<const ResultRow*> kept;
                for (const auto* r : it->second)
                    if (!excluded.contains(r->team)) kept.push_back(r);
                std::sort(kept.begin(), kept.end(), [](auto* a, auto* b) { return a->rank < b->rank; });
                if (kept.size() >= 2) {
                    std::vector<TeamId> ordering;
                    for (const auto* r : kept) ordering.push_back(*p.find_team(r->team));
                    e.ranking = Ranking(ordering);
                    e.participants = ordering;
                    std::sort(e.participants.begin(), e.participants.end());
                } else {
                    emptied.push_back(y);
                }
            }
            p.editions.push_back(std::move(e));
        }
        return p;
    };

    PanelDataset panel = assemble(report.emptied_years);
    if (config.auto_exclude) {
        for (;;) {
            const auto comps = detail::beat_components(panel);
            if (comps.size() <= 1) break;
            std::size_t keep = 0;
            for (std::size_t c = 1; c < comps.size(); ++c)
                if (comps[c].size() > comps[keep].size()) keep = c;
            for (std::size_t c = 0; c < comps.size(); ++c) {
                if (c == keep) continue;
                for (TeamId t : comps[c]) {
                    const std::string& name = panel.teams[t];
                    excluded.insert(name);
                    report.excluded.push_back(
                        {name, "outside the largest strongly connected group of the beats relation", appearances[name]});
                }
            }
            panel = assemble(report.emptied_years);
        }
    }
    for (int y = first; y <= last; ++y)
        if (!by_year.contains(y)) report.gap_years.push_back(y);

    // Predictor columns.
    std::map<std::tuple<int, std::string, std::string>, const RosterRow*> roster_index;
    for (const auto& r : rosters.rows) roster_index[{r.year, r.code, r.team}] = &r;
    const std::size_t m = config.predictors.size();
    std::vector<std::vector<std::vector<double>>> columns(m);  // [var][edition][row]
    for (std::size_t j = 0; j < m; ++j) {
        const std::string& var = config.predictors[j];
        if (var.rfind("last_", 0) == 0) {
            const std::string code = detail::upper(var.substr(5));
            auto al = config.alignment.find(config.tournament);
            if (al == config.alignment.end())
                throw DataError("no season alignment configured for tournament " + config.tournament);
            auto lag = al->second.find(code);
            if (lag == al->second.end())
                throw DataError("unknown tournament code '" + code + "' for predictor " + var);
            bool present = false;
            for (const auto& r : results.rows) present = present || r.code == code;
            if (present) {
                columns[j] = reciprocal_rank_predictor(results, code, lag->second, panel);
            } else {
                for (const auto& e : panel.editions) columns[j].emplace_back(e.participants.size(), 0.0);
            }
            continue;
        }
        double RosterRow::*field = nullptr;
        if (var == "avg_height") field = &RosterRow::height;
        else if (var == "avg_weight") field = &RosterRow::weight;
        else if (var == "avg_age") field = &RosterRow::age;
        else if (var == "iihf_exp") field = &RosterRow::iihf;
        else if (var == "nhl_exp") field = &RosterRow::nhl;
        else if (var == "other_exp") field = &RosterRow::other;
        else if (var != "hosting") throw DataError("unknown predictor '" + var + "'");
        for (const auto& e : panel.editions) {
            std::vector<double> col(e.participants.size(), std::numeric_limits<double>::quiet_NaN());
            const int year = std::stoi(e.label);
            for (std::size_t r = 0; r < e.participants.size(); ++r) {
                const std::string& team = panel.teams[e.participants[r]];
                auto it = roster_index.find({year, config.tournament, team});
                if (it == roster_index.end()) {
                    issues.push_back(rosters.source + ": no roster row for " + team + " in " + config.tournament + " " +
                                     e.label + " (needed for " + var + ")");
                    continue;
                }
                col[r] = field ? it->second->*field : static_cast<double>(it->second->hosting);
            }
            columns[j].push_back(std::move(col));
        }
    }
    if (!issues.empty()) {
        std::sort(issues.begin(), issues.end());
        issues.erase(std::unique(issues.begin(), issues.end()), issues.end());
        throw ValidationError(std::move(issues));
    }
    panel.variables = config.predictors;
    for (std::size_t t = 0; t < panel.editions.size(); ++t) {
        Edition& e = panel.editions[t];
        e.predictors.assign(e.participants.size() * m, 0.0);
        for (std::size_t r = 0; r < e.participants.size(); ++r)
            for (std::size_t j = 0; j < m; ++j) e.predictors[r * m + j] = columns[j][t][r];
    }
    panel.validate();

    const PartitionReport pr = check_partition_condition(panel);
    report.partition_pass = pr.pass;
    report.partition = describe_partition(pr, panel);
    report.teams = panel.team_count();
    report.editions = panel.edition_count();
    report.ranked_editions = panel.ranked_edition_count();
    return {std::move(panel), std::move(report)};
}

struct FiveNumberSummary {
    std::string variable;
    std::size_t count = 0;
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

namespace detail {

inline double sorted_median(std::span<const double> v) {
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

// Quartiles are medians of the lower and upper halves; with an odd count
// the overall median belongs to neither half (1..5 -> 1, 1.5, 3, 4.5, 5).
// A single value gives five equal numbers.
inline FiveNumberSummary five_number_summary(std::vector<double> v, std::string name = {}) {
    FiveNumberSummary s;
    s.variable = std::move(name);
    s.count = v.size();
    if (v.empty()) throw DataError("no values to summarize for " + s.variable);
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    s.min = v.front();
    s.max = v.back();
    s.median = detail::sorted_median(v);
    if (n == 1) {
        s.q1 = s.q3 = v[0];
        return s;
    }
    const std::size_t half = n / 2;
    s.q1 = detail::sorted_median(std::span<const double>(v.data(), half));
    s.q3 = detail::sorted_median(std::span<const double>(v.data() + (n - half), half));
    return s;
}

// Per predictor, over participating (team, edition) cells.
inline std::vector<FiveNumberSummary> summary_stats(const PanelDataset& panel) {
    std::vector<FiveNumberSummary> out;
    const std::size_t m = panel.variable_count();
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<double> v;
        for (const auto& e : panel.editions)
            for (std::size_t r = 0; r < e.participants.size(); ++r) v.push_back(e.predictors[r * m + j]);
        if (v.empty()) continue;
        out.push_back(five_number_summary(std::move(v), panel.variables[j]));
    }
    return out;
}

}  // namespace gasrank
