#pragma once

// Run configuration (JSON). Relative paths resolve against the directory
// of the configuration file.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gasrank/data_io.hpp"
#include "gasrank/errors.hpp"
#include "gasrank/estimation.hpp"
#include "gasrank/json_io.hpp"

namespace gasrank {

struct DiagnoseConfig {
    std::vector<int> lags{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<int> cross_lags{0, 1, 2, 3, 4, 5};
    std::size_t replications = 2000;
    CorrelationMethod method = CorrelationMethod::pearson;
    std::optional<std::string> cross_tournament;
};

struct RunConfig {
    std::filesystem::path base_dir = ".";
    std::optional<std::filesystem::path> results;
    std::optional<std::filesystem::path> rosters;
    std::optional<std::filesystem::path> panel;  // prebuilt panel.json instead of CSVs
    BuildConfig build;
    std::vector<ModelSpec> specs;
    std::string default_spec;
    std::vector<double> lambda_grid = default_lambda_grid();
    std::size_t holdout = 16;
    std::optional<std::size_t> k_playoff;
    std::size_t mc_draws = 1000000;
    std::uint64_t seed = 20240515;
    std::size_t restarts = 10;
    std::size_t workers = 1;
    std::filesystem::path out_dir = "out";
    DiagnoseConfig diagnose;
    std::vector<double> alpha_grid;
    Json source = Json::object();  // configuration as read, for the digest

    const ModelSpec& spec(const std::string& name) const {
        for (const auto& s : specs)
            if (s.name == name) return s;
        std::string known;
        for (const auto& s : specs) known += (known.empty() ? "" : ", ") + s.name;
        throw UsageError("unknown spec '" + name + "' (known: " + known + ")");
    }
};

// Predictor families per tournament: static and dynamic carry no
// predictors; tournament, physical and experience add the hosting dummy to
// their group; full holds every predictor; final is the selected subset.
inline std::vector<ModelSpec> standard_specs(const std::string& tournament) {
    auto make = [](std::string name, std::vector<std::string> preds, bool dyn = true) {
        ModelSpec s;
        s.name = std::move(name);
        s.predictors = std::move(preds);
        s.include_dynamics = dyn;
        return s;
    };
    std::vector<ModelSpec> out{
        make("static", {}, false),
        make("dynamic", {}),
        make("tournament", {"hosting", "last_u18", "last_wjc", "last_wc"}),
        make("physical", {"hosting", "avg_height", "avg_weight", "avg_age"}),
        make("experience", {"hosting", "iihf_exp", "nhl_exp", "other_exp"}),
        make("full", standard_predictors()),
    };
    if (tournament == "WJC")
        out.push_back(make("final", {"hosting", "avg_height", "avg_weight", "iihf_exp"}));
    else
        out.push_back(make("final", {"last_wjc", "last_wc", "avg_age", "iihf_exp", "nhl_exp"}));
    return out;
}

namespace detail {

template <class T>
void read_opt(const Json& j, const char* key, T& dst) {
    if (j.contains(key) && !j.at(key).is_null()) dst = j.at(key).get<T>();
}

}  // namespace detail

inline RunConfig parse_run_config(const Json& j, const std::filesystem::path& base_dir) {
    RunConfig c;
    c.base_dir = base_dir;
    c.source = j;
    if (!j.is_object()) throw UsageError("configuration must be a JSON object");
    static const std::vector<std::string> known{
        "results", "rosters", "panel",  "tournament", "first_year", "last_year",  "merges",   "exclude",
        "auto_exclude", "predictors", "alignment", "specs", "default_spec", "lambda_grid", "holdout",
        "k_playoff", "mc_draws", "seed", "restarts", "workers", "out_dir", "diagnose", "alpha_grid"};
    for (const auto& [k, _] : j.items())
        if (std::find(known.begin(), known.end(), k) == known.end()) throw UsageError("unknown configuration key '" + k + "'");
    try {
        auto path = [&](const char* key) -> std::optional<std::filesystem::path> {
            if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
            std::filesystem::path p = j.at(key).get<std::string>();
            return p.is_absolute() ? p : base_dir / p;
        };
        c.results = path("results");
        c.rosters = path("rosters");
        c.panel = path("panel");
        if (auto o = path("out_dir")) c.out_dir = *o;
        else c.out_dir = base_dir / "out";

        detail::read_opt(j, "tournament", c.build.tournament);
        if (j.contains("first_year") && !j["first_year"].is_null()) c.build.first_year = j["first_year"].get<int>();
        if (j.contains("last_year") && !j["last_year"].is_null()) c.build.last_year = j["last_year"].get<int>();
        detail::read_opt(j, "merges", c.build.merges);
        detail::read_opt(j, "exclude", c.build.exclude);
        detail::read_opt(j, "auto_exclude", c.build.auto_exclude);
        detail::read_opt(j, "predictors", c.build.predictors);
        if (j.contains("alignment")) c.build.alignment = j["alignment"].get<SeasonAlignment>();

        if (j.contains("specs")) {
            for (const auto& s : j["specs"]) {
                ModelSpec m;
                m.name = s.at("name").get<std::string>();
                detail::read_opt(s, "predictors", m.predictors);
                detail::read_opt(s, "dynamics", m.include_dynamics);
                if (s.contains("bounds")) m.bounds = parse_bounds_regime(s["bounds"].get<std::string>());
                detail::read_opt(s, "lambda", m.penalty_lambda);
                c.specs.push_back(std::move(m));
            }
        } else {
            c.specs = standard_specs(c.build.tournament);
        }
        for (std::size_t a = 0; a < c.specs.size(); ++a)
            for (std::size_t b = a + 1; b < c.specs.size(); ++b)
                if (c.specs[a].name == c.specs[b].name) throw UsageError("spec name '" + c.specs[a].name + "' used twice");
        c.default_spec = c.specs.empty() ? "" : c.specs.back().name;
        detail::read_opt(j, "default_spec", c.default_spec);

        detail::read_opt(j, "lambda_grid", c.lambda_grid);
        detail::read_opt(j, "holdout", c.holdout);
        if (j.contains("k_playoff") && !j["k_playoff"].is_null()) c.k_playoff = j["k_playoff"].get<std::size_t>();
        detail::read_opt(j, "mc_draws", c.mc_draws);
        detail::read_opt(j, "seed", c.seed);
        detail::read_opt(j, "restarts", c.restarts);
        detail::read_opt(j, "workers", c.workers);
        detail::read_opt(j, "alpha_grid", c.alpha_grid);
        if (j.contains("diagnose")) {
            const auto& d = j["diagnose"];
            detail::read_opt(d, "lags", c.diagnose.lags);
            detail::read_opt(d, "cross_lags", c.diagnose.cross_lags);
            detail::read_opt(d, "replications", c.diagnose.replications);
            if (d.contains("method")) c.diagnose.method = parse_correlation_method(d["method"].get<std::string>());
            if (d.contains("cross_tournament") && !d["cross_tournament"].is_null())
                c.diagnose.cross_tournament = d["cross_tournament"].get<std::string>();
        }
    } catch (const Json::exception& e) {
        throw UsageError(std::string("invalid configuration: ") + e.what());
    }
    return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
    Json j;
    try {
        j = Json::parse(read_text_file(path.string()));
    } catch (const Json::exception& e) {
        throw UsageError(path.string() + ": " + e.what());
    }
    return parse_run_config(j, path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
}

// FNV-1a 64-bit, hex.
inline std::string digest_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace gasrank
