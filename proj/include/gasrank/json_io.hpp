#pragma once

// JSON and CSV renderings of panels, fits, forecasts and correlation
// reports, plus fixed-layout text tables.

#include <charconv>
#include <cstdio>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gasrank/csv.hpp"
#include "gasrank/data_io.hpp"
#include "gasrank/diagnostics.hpp"
#include "gasrank/errors.hpp"
#include "gasrank/estimation.hpp"
#include "gasrank/forecast.hpp"
#include "gasrank/panel.hpp"

namespace gasrank {

using Json = nlohmann::ordered_json;

inline constexpr const char* panel_format_tag = "gasrank-panel";
inline constexpr int panel_format_version = 1;

namespace detail {

template <class T>
Json optional_json(const std::optional<T>& v) {
    return v ? Json(*v) : Json(nullptr);
}

inline std::string fixed(double v, int digits) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

}  // namespace detail

// Serializes like Json::dump(indent) but prints every floating-point
// number with 17 significant digits; NaN and infinities become null.
inline void write_json(std::ostream& os, const Json& j, int indent = 2, int depth = 0) {
    auto pad = [&](int d) {
        if (indent >= 0) os << '\n' << std::string(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ',';
                first = false;
                pad(depth + 1);
                os << Json(it.key()).dump() << (indent >= 0 ? ": " : ":");
                write_json(os, it.value(), indent, depth + 1);
            }
            pad(depth);
            os << '}';
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            os << '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ',';
                pad(depth + 1);
                write_json(os, j[i], indent, depth + 1);
            }
            pad(depth);
            os << ']';
            return;
        }
        case Json::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v)) {
                os << "null";
                return;
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            std::string s = buf;
            if (s.find_first_of(".eE") == std::string::npos) s += ".0";
            os << s;
            return;
        }
        default: os << j.dump();
    }
}

inline std::string dump_json(const Json& j, int indent = 2) {
    std::ostringstream os;
    write_json(os, j, indent);
    os << '\n';
    return os.str();
}

// ---------------------------------------------------------------------------
// Panel
// ---------------------------------------------------------------------------

inline Json panel_to_json(const PanelDataset& p) {
    Json j;
    j["format"] = panel_format_tag;
    j["version"] = panel_format_version;
    j["teams"] = p.teams;
    j["variables"] = p.variables;
    Json eds = Json::array();
    for (const auto& e : p.editions) {
        Json je;
        je["label"] = e.label;
        std::string bitmap(p.team_count(), '0');
        for (TeamId t : e.participants) bitmap[t] = '1';
        je["participation"] = bitmap;
        if (e.ranking) {
            je["ranking"] = std::vector<TeamId>(e.ranking->ordering().begin(), e.ranking->ordering().end());
        } else {
            je["ranking"] = nullptr;
        }
        Json rows = Json::array();
        const std::size_t m = p.variable_count();
        for (std::size_t r = 0; r < e.participants.size(); ++r)
            rows.push_back(std::vector<double>(e.predictors.begin() + static_cast<std::ptrdiff_t>(r * m),
                                               e.predictors.begin() + static_cast<std::ptrdiff_t>((r + 1) * m)));
        je["predictors"] = std::move(rows);
        eds.push_back(std::move(je));
    }
    j["editions"] = std::move(eds);
    return j;
}

inline PanelDataset panel_from_json(const Json& j) {
    try {
        if (j.at("format").get<std::string>() != panel_format_tag) throw DataError("not a panel file");
        if (j.at("version").get<int>() != panel_format_version) throw DataError("unsupported panel format version");
        PanelDataset p;
        p.teams = j.at("teams").get<std::vector<std::string>>();
        p.variables = j.at("variables").get<std::vector<std::string>>();
        const std::size_t m = p.variables.size();
        for (const auto& je : j.at("editions")) {
            Edition e;
            e.label = je.at("label").get<std::string>();
            const std::string bitmap = je.at("participation").get<std::string>();
            if (bitmap.size() != p.teams.size()) throw DataError("edition " + e.label + ": participation bitmap has wrong length");
            for (std::size_t t = 0; t < bitmap.size(); ++t) {
                if (bitmap[t] == '1') e.participants.push_back(static_cast<TeamId>(t));
                else if (bitmap[t] != '0') throw DataError("edition " + e.label + ": participation bitmap must hold 0/1");
            }
            if (!je.at("ranking").is_null()) e.ranking = Ranking(je.at("ranking").get<std::vector<TeamId>>());
            const auto& rows = je.at("predictors");
            if (rows.size() != e.participants.size())
                throw DataError("edition " + e.label + ": predictor rows do not match participants");
            for (const auto& row : rows) {
                if (row.size() != m) throw DataError("edition " + e.label + ": predictor row has wrong width");
                for (const auto& v : row)
                    e.predictors.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>());
            }
            p.editions.push_back(std::move(e));
        }
        p.validate();
        return p;
    } catch (const Json::exception& e) {
        throw DataError(std::string("malformed panel JSON: ") + e.what());
    }
}

inline PanelDataset load_panel(const std::string& path) {
    const std::string text = read_text_file(path);
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    return panel_from_json(j);
}

inline Json build_report_to_json(const BuildReport& r) {
    Json j;
    j["tournament"] = r.tournament;
    j["first_year"] = r.first_year;
    j["last_year"] = r.last_year;
    j["teams"] = r.teams;
    j["editions"] = r.editions;
    j["ranked_editions"] = r.ranked_editions;
    j["predictors"] = r.predictors;
    Json merges = Json::array();
    for (const auto& m : r.merges) merges.push_back({{"alias", m.alias}, {"canonical", m.canonical}, {"rows", m.rows}});
    j["merges"] = std::move(merges);
    Json ex = Json::array();
    for (const auto& e : r.excluded)
        ex.push_back({{"team", e.team}, {"reason", e.reason}, {"appearances", e.appearances}});
    j["excluded"] = std::move(ex);
    j["gap_years"] = r.gap_years;
    j["emptied_years"] = r.emptied_years;
    j["partition"] = {{"pass", r.partition_pass}, {"detail", r.partition}};
    return j;
}

inline Json summary_to_json(const std::vector<FiveNumberSummary>& s) {
    Json a = Json::array();
    for (const auto& v : s)
        a.push_back({{"variable", v.variable}, {"count", v.count}, {"min", v.min}, {"q1", v.q1},
                     {"median", v.median}, {"q3", v.q3}, {"max", v.max}});
    return a;
}

// ---------------------------------------------------------------------------
// Fits
// ---------------------------------------------------------------------------

inline Json spec_to_json(const ModelSpec& s) {
    return {{"name", s.name},
            {"predictors", s.predictors},
            {"dynamics", s.include_dynamics},
            {"bounds", to_string(s.bounds)},
            {"lambda", s.penalty_lambda}};
}

inline Json coefficients_to_json(const Coefficients& c, const std::vector<std::string>& teams,
                                 const std::vector<std::string>& variables) {
    Json omega = Json::object();
    for (std::size_t i = 0; i < teams.size(); ++i) omega[teams[i]] = c.omega[i];
    Json beta = Json::object();
    for (std::size_t j = 0; j < variables.size(); ++j) beta[variables[j]] = c.beta[j];
    return {{"omega", omega}, {"beta", beta}, {"phi", c.phi}, {"alpha", c.alpha}};
}

inline Json fit_to_json(const FitResult& f) {
    Json j;
    j["spec"] = spec_to_json(f.spec);
    j["loglik"] = f.loglik;
    j["penalized_loglik"] = f.penalized_loglik;
    j["aic"] = f.aic;
    j["free_parameters"] = f.free_parameters;
    j["observations"] = f.observations;
    j["coefficients"] = coefficients_to_json(f.coef, f.teams, f.variables);
    Json rows = Json::array();
    for (const auto& e : f.estimates)
        rows.push_back({{"name", e.name},
                        {"value", e.value},
                        {"role", to_string(e.role)},
                        {"se", detail::optional_json(e.se)},
                        {"p_value", detail::optional_json(e.p_value)},
                        {"stars", significance_stars(e.p_value)},
                        {"at_boundary", e.at_boundary}});
    j["estimates"] = std::move(rows);
    j["convergence"] = {{"converged", f.convergence.converged},
                        {"evaluations", f.convergence.evaluations},
                        {"cycles", f.convergence.cycles},
                        {"restarts", f.convergence.restarts_used},
                        {"best_start", f.convergence.best_start},
                        {"final_tolerance", f.convergence.final_tolerance}};
    j["partition_condition"] = f.partition.pass;
    j["notes"] = f.notes;
    return j;
}

inline Json model_table_to_json(const ModelTable& t) {
    Json cols = Json::array();
    for (std::size_t k = 0; k < t.columns.size(); ++k) {
        const auto& c = t.columns[k];
        Json j;
        j["spec"] = spec_to_json(c.spec);
        j["best_aic"] = t.best_aic == k;
        if (c.fit) j["fit"] = fit_to_json(*c.fit);
        else j["error"] = c.error;
        cols.push_back(std::move(j));
    }
    return {{"columns", cols}};
}

// Rows: every predictor used by any column, then the dynamic coefficients,
// then log-likelihood and AIC. Values carry significance stars, standard
// errors sit underneath in parentheses.
inline std::string render_model_table(const ModelTable& t) {
    std::vector<std::string> predictors;
    for (const auto& c : t.columns)
        for (const auto& p : c.spec.predictors)
            if (std::find(predictors.begin(), predictors.end(), p) == predictors.end()) predictors.push_back(p);

    std::vector<std::string> labels;
    std::vector<std::vector<std::string>> cells(t.columns.size());
    auto add_row = [&](const std::string& label, auto&& cell) {
        labels.push_back(label);
        labels.emplace_back("");
        for (std::size_t k = 0; k < t.columns.size(); ++k) {
            auto [top, bottom] = cell(t.columns[k]);
            cells[k].push_back(top);
            cells[k].push_back(bottom);
        }
    };
    auto coefficient = [](const std::string& name) {
        return [name](const ModelColumn& c) -> std::pair<std::string, std::string> {
            if (!c.fit) return {"", ""};
            const CoefficientEstimate* e = c.fit->find(name);
            if (!e || (e->role == CoefficientEstimate::Role::fixed && name != "phi")) return {"", ""};
            if (e->role == CoefficientEstimate::Role::fixed) return {detail::fixed(e->value, 3), ""};
            std::string top = detail::fixed(e->value, 3) + significance_stars(e->p_value);
            std::string bottom = e->se ? "(" + detail::fixed(*e->se, 3) + ")" : "";
            return {top, bottom};
        };
    };
    for (const auto& p : predictors) add_row(p, coefficient("beta[" + p + "]"));
    add_row("Autoreg. Coef.", [&](const ModelColumn& c) -> std::pair<std::string, std::string> {
        if (!c.spec.include_dynamics) return {"", ""};
        return coefficient("phi")(c);
    });
    add_row("Score Coef.", coefficient("alpha"));

    std::vector<std::string> footer_labels{"Log-likelihood", "AIC", "Parameters"};
    std::vector<std::vector<std::string>> footer(t.columns.size());
    for (std::size_t k = 0; k < t.columns.size(); ++k) {
        const auto& c = t.columns[k];
        if (c.fit) {
            footer[k] = {detail::fixed(c.fit->loglik, 3), detail::fixed(c.fit->aic, 3) + (t.best_aic == k ? " <" : ""),
                         std::to_string(c.fit->free_parameters)};
        } else {
            footer[k] = {"failed", "", ""};
        }
    }

    std::size_t lw = 16;
    for (const auto& l : labels) lw = std::max(lw, l.size() + 2);
    std::vector<std::size_t> cw(t.columns.size(), 12);
    for (std::size_t k = 0; k < t.columns.size(); ++k) {
        cw[k] = std::max(cw[k], t.columns[k].spec.name.size() + 2);
        for (const auto& s : cells[k]) cw[k] = std::max(cw[k], s.size() + 2);
        for (const auto& s : footer[k]) cw[k] = std::max(cw[k], s.size() + 2);
    }
    std::ostringstream os;
    auto line = [&](const std::string& label, auto&& get) {
        os << std::left << std::setw(static_cast<int>(lw)) << label;
        for (std::size_t k = 0; k < t.columns.size(); ++k) os << std::right << std::setw(static_cast<int>(cw[k])) << get(k);
        os << '\n';
    };
    std::size_t total = lw;
    for (auto w : cw) total += w;
    line("", [&](std::size_t k) { return t.columns[k].spec.name; });
    os << std::string(total, '-') << '\n';
    for (std::size_t r = 0; r < labels.size(); ++r) line(labels[r], [&](std::size_t k) { return cells[k][r]; });
    os << std::string(total, '-') << '\n';
    for (std::size_t r = 0; r < footer_labels.size(); ++r)
        line(footer_labels[r], [&](std::size_t k) { return footer[k][r]; });
    os << std::string(total, '-') << '\n';
    os << "*** p < 0.01, ** p < 0.05, * p < 0.1; standard errors in parentheses; '<' marks the lowest AIC\n";
    for (const auto& c : t.columns)
        if (!c.fit) os << c.spec.name << ": " << c.error << '\n';
    return os.str();
}

inline std::string render_fit(const FitResult& f) {
    std::ostringstream os;
    os << "spec " << f.spec.name << " (" << to_string(f.spec.bounds) << ", lambda " << f.spec.penalty_lambda << ")\n";
    os << std::left << std::setw(28) << "coefficient" << std::right << std::setw(12) << "estimate" << std::setw(12)
       << "std.err" << std::setw(12) << "p-value" << "  role\n";
    for (const auto& e : f.estimates) {
        os << std::left << std::setw(28) << e.name << std::right << std::setw(12) << detail::fixed(e.value, 4)
           << std::setw(12) << (e.se ? detail::fixed(*e.se, 4) : "-") << std::setw(12)
           << (e.p_value ? detail::fixed(*e.p_value, 4) : "-") << "  " << to_string(e.role)
           << significance_stars(e.p_value) << (e.at_boundary ? " (bound)" : "") << '\n';
    }
    os << "log-likelihood " << detail::fixed(f.loglik, 4) << ", AIC " << detail::fixed(f.aic, 4) << ", parameters "
       << f.free_parameters << ", editions " << f.observations << '\n';
    for (const auto& n : f.notes) os << "note: " << n << '\n';
    return os.str();
}

// ---------------------------------------------------------------------------
// Forecasts
// ---------------------------------------------------------------------------

inline const char* to_string(ProbabilityMethod m) { return m == ProbabilityMethod::exact ? "exact" : "monte_carlo"; }

inline constexpr const char* forecast_csv_header =
    "edition,n,k_playoff,loglik,p_champion,p_medals,p_playoffs,playoff_method,mae,rmse,champion_hit,medals_hit,"
    "playoffs_hit";

inline Json forecast_to_json(const ForecastReport& r) {
    Json j;
    j["spec"] = spec_to_json(r.spec);
    j["seed"] = r.seed;
    j["mc_draws"] = r.mc_draws;
    j["tie_break"] = r.tie_break_rule;
    j["caveat"] = r.caveat;
    Json rows = Json::array();
    for (const auto& e : r.rows) {
        Json row;
        row["edition"] = e.label;
        row["n"] = e.participants;
        row["k_playoff"] = e.k_playoff;
        row["loglik"] = e.loglik;
        row["p_champion"] = e.p_champion;
        row["p_medals"] = e.p_medals;
        row["p_playoffs"] = e.p_playoffs;
        row["playoff_method"] = to_string(e.playoff_method);
        row["mae"] = e.mae;
        row["rmse"] = e.rmse;
        row["champion_hit"] = e.champion_hit;
        row["medals_hit"] = e.medals_hit;
        row["playoffs_hit"] = e.playoffs_hit;
        Json strengths = Json::object();
        for (const auto& [t, v] : e.strengths) strengths[r.teams[t]] = v;
        row["strengths"] = std::move(strengths);
        std::vector<std::string> modal, realized;
        for (TeamId t : e.modal.ordering()) modal.push_back(r.teams[t]);
        for (TeamId t : e.realized.ordering()) realized.push_back(r.teams[t]);
        row["modal_ranking"] = modal;
        row["realized_ranking"] = realized;
        Json errs = Json::object();
        for (const auto& [t, v] : e.abs_rank_error) errs[r.teams[t]] = v;
        row["abs_rank_error"] = std::move(errs);
        rows.push_back(std::move(row));
    }
    j["editions"] = std::move(rows);
    const auto& a = r.aggregate;
    j["aggregate"] = {{"loglik", a.loglik},       {"p_champion", a.p_champion},       {"p_medals", a.p_medals},
                      {"p_playoffs", a.p_playoffs}, {"mae", a.mae},                    {"rmse", a.rmse},
                      {"champion_hit_rate", a.champion_hits}, {"medals_hit_rate", a.medals_hits},
                      {"playoffs_hit_rate", a.playoffs_hits}};
    return j;
}

namespace detail {

// Shortest text that reads back to the same double.
inline std::string num(double v) {
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

// For labels in human-readable tables.
inline std::string label_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace detail

inline std::string forecast_to_csv(const ForecastReport& r) {
    std::ostringstream os;
    os << forecast_csv_header << '\n';
    for (const auto& e : r.rows)
        os << csv_escape(e.label) << ',' << e.participants << ',' << e.k_playoff << ',' << detail::num(e.loglik) << ','
           << detail::num(e.p_champion) << ',' << detail::num(e.p_medals) << ',' << detail::num(e.p_playoffs) << ','
           << to_string(e.playoff_method) << ',' << detail::num(e.mae) << ',' << detail::num(e.rmse) << ','
           << int(e.champion_hit) << ',' << int(e.medals_hit) << ',' << int(e.playoffs_hit) << '\n';
    const auto& a = r.aggregate;
    os << "AGG,,," << detail::num(a.loglik) << ',' << detail::num(a.p_champion) << ',' << detail::num(a.p_medals) << ','
       << detail::num(a.p_playoffs) << ",," << detail::num(a.mae) << ',' << detail::num(a.rmse) << ','
       << detail::num(a.champion_hits) << ',' << detail::num(a.medals_hits) << ',' << detail::num(a.playoffs_hits)
       << '\n';
    return os.str();
}

inline std::string render_lambda_table(const LambdaSearchResult& s) {
    std::ostringstream os;
    os << std::left << std::setw(16) << "";
    for (const auto& o : s.outcomes) os << std::right << std::setw(12) << ("l=" + detail::label_num(o.lambda));
    os << '\n';
    auto row = [&](const std::string& label, auto&& get) {
        os << std::left << std::setw(16) << label;
        for (const auto& o : s.outcomes) os << std::right << std::setw(12) << (o.report ? detail::fixed(get(o.report->aggregate), 3) : "failed");
        os << '\n';
    };
    row("Log-likelihood", [](const ForecastAggregate& a) { return a.loglik; });
    row("P[Champion]", [](const ForecastAggregate& a) { return a.p_champion; });
    row("P[Medalists]", [](const ForecastAggregate& a) { return a.p_medals; });
    row("P[Playoffs]", [](const ForecastAggregate& a) { return a.p_playoffs; });
    row("MAE", [](const ForecastAggregate& a) { return a.mae; });
    row("RMSE", [](const ForecastAggregate& a) { return a.rmse; });
    if (s.best_lambda) os << "best lambda (average log-likelihood): " << detail::label_num(*s.best_lambda) << '\n';
    for (const auto& o : s.outcomes)
        if (!o.report) os << "lambda " << detail::label_num(o.lambda) << ": " << o.error << '\n';
    os << modal_error_caveat << '\n';
    return os.str();
}

// ---------------------------------------------------------------------------
// Correlations
// ---------------------------------------------------------------------------

inline Json correlation_to_json(const CorrelationReport& r) {
    Json j;
    j["method"] = r.method;
    j["pairing"] = r.pairing_rule;
    j["bootstrap"] = {{"replications", r.replications}, {"seed", r.seed}, {"level", r.level}, {"scheme", "iid pairs, percentile"}};
    Json lags = Json::array();
    for (const auto& l : r.lags)
        lags.push_back({{"lag", l.lag},
                        {"pairs", l.pairs},
                        {"estimate", detail::optional_json(l.estimate)},
                        {"lo", detail::optional_json(l.lo)},
                        {"hi", detail::optional_json(l.hi)},
                        {"note", l.note}});
    j["lags"] = std::move(lags);
    return j;
}

inline std::string correlation_to_csv(const CorrelationReport& r) {
    std::ostringstream os;
    os << "lag,estimate,lo,hi,pairs\n";
    auto opt = [](const std::optional<double>& v) { return v ? detail::num(*v) : std::string(); };
    for (const auto& l : r.lags)
        os << l.lag << ',' << opt(l.estimate) << ',' << opt(l.lo) << ',' << opt(l.hi) << ',' << l.pairs << '\n';
    return os.str();
}

inline Json correlation_matrix_to_json(const CorrelationMatrix& m) {
    Json values = Json::array();
    for (const auto& row : m.values) {
        Json r = Json::array();
        for (const auto& v : row) r.push_back(detail::optional_json(v));
        values.push_back(std::move(r));
    }
    return {{"method", m.method}, {"cells", m.cells}, {"names", m.names}, {"values", values}};
}

inline std::string correlation_matrix_to_csv(const CorrelationMatrix& m) {
    std::ostringstream os;
    os << "variable";
    for (const auto& n : m.names) os << ',' << csv_escape(n);
    os << '\n';
    for (std::size_t a = 0; a < m.names.size(); ++a) {
        os << csv_escape(m.names[a]);
        for (const auto& v : m.values[a]) os << ',' << (v ? detail::num(*v) : std::string());
        os << '\n';
    }
    return os.str();
}

inline std::string profile_to_csv(const std::vector<ProfilePoint>& pts) {
    std::ostringstream os;
    os << "alpha,loglik\n";
    for (const auto& p : pts) os << detail::num(p.alpha) << ',' << detail::num(p.loglik) << '\n';
    return os.str();
}

}  // namespace gasrank
