// gasrank command-line tool: build panels, fit, forecast, diagnose,
// profile and simulate.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gasrank/gasrank.hpp"

namespace fs = std::filesystem;
using namespace gasrank;

namespace {

enum class Format { json, csv, table };

struct Globals {
    std::string config_path;
    std::string panel_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::string out_dir;
    std::string format = "table";
};

struct Context {
    RunConfig config;
    Format format = Format::table;
    std::string digest;
    bool has_config = false;
};

Format parse_format(const std::string& s) {
    if (s == "json") return Format::json;
    if (s == "csv") return Format::csv;
    if (s == "table") return Format::table;
    throw UsageError("unknown format '" + s + "' (expected json, csv or table)");
}

Context make_context(const Globals& g, bool config_required) {
    Context ctx;
    ctx.format = parse_format(g.format);
    if (!g.config_path.empty()) {
        ctx.config = load_run_config(g.config_path);
        ctx.has_config = true;
    } else if (config_required && g.panel_path.empty()) {
        throw UsageError("--config is required");
    } else {
        ctx.config.specs = standard_specs("WC");
        ctx.config.default_spec = ctx.config.specs.back().name;
        ctx.config.out_dir = "out";
    }
    if (!g.panel_path.empty()) ctx.config.panel = fs::path(g.panel_path);
    if (g.seed) ctx.config.seed = *g.seed;
    if (g.workers) ctx.config.workers = std::max<std::size_t>(1, *g.workers);
    if (!g.out_dir.empty()) ctx.config.out_dir = g.out_dir;
    // Worker count and output location do not influence results.
    Json effective = ctx.config.source;
    effective["seed"] = ctx.config.seed;
    if (ctx.config.panel) effective["panel"] = ctx.config.panel->lexically_normal().generic_string();
    effective.erase("workers");
    effective.erase("out_dir");
    ctx.digest = digest_hex(effective.dump());
    return ctx;
}

Json envelope(const Context& ctx, const std::string& command, Json result, Json seeds = Json()) {
    Json j;
    j["tool"] = {{"name", tool_name}, {"version", tool_version}};
    j["command"] = command;
    j["config_digest"] = ctx.digest;
    j["seeds"] = seeds.is_null() ? Json{{"master", ctx.config.seed}} : std::move(seeds);
    j["result"] = std::move(result);
    return j;
}

std::string csv_preamble(const Context& ctx, const std::string& command) {
    std::ostringstream os;
    os << "# " << tool_name << ' ' << tool_version << " command=" << command << " config_digest=" << ctx.digest
       << " seed=" << ctx.config.seed << '\n';
    return os.str();
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << content;
    if (!out) throw DataError("failed writing " + path.string());
}

std::string dump(const Json& j) { return dump_json(j); }

std::string number_tag(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

FitOptions fit_options(const RunConfig& c) {
    FitOptions o;
    o.seed = c.seed;
    o.restarts = c.restarts;
    o.workers = c.workers;
    return o;
}

BuildOutput build_from_config(const RunConfig& c) {
    if (!c.results) throw UsageError("configuration names no results file");
    RawResults results = load_results(c.results->string());
    RawRosters rosters;
    if (c.rosters) rosters = load_rosters(c.rosters->string());
    return build_panel(std::move(results), std::move(rosters), c.build);
}

PanelDataset obtain_panel(const RunConfig& c) {
    if (c.panel) return load_panel(c.panel->string());
    return build_from_config(c).panel;
}

// ---------------------------------------------------------------------------

int cmd_build(const Context& ctx) {
    const BuildOutput built = build_from_config(ctx.config);
    const auto stats = summary_stats(built.panel);
    Json panel = Json::object();
    panel["meta"] = {{"tool", tool_name}, {"version", tool_version}, {"config_digest", ctx.digest}, {"seed", ctx.config.seed}};
    panel.update(panel_to_json(built.panel));
    Json report = build_report_to_json(built.report);
    report["summary"] = summary_to_json(stats);
    const Json env = envelope(ctx, "build", report);
    write_file(ctx.config.out_dir / "panel.json", dump(panel));
    write_file(ctx.config.out_dir / "build_report.json", dump(env));
    if (ctx.format == Format::json) {
        std::cout << dump(env);
    } else if (ctx.format == Format::csv) {
        std::cout << "variable,count,min,q1,median,q3,max\n";
        for (const auto& s : stats)
            std::cout << s.variable << ',' << s.count << ',' << s.min << ',' << s.q1 << ',' << s.median << ',' << s.q3
                      << ',' << s.max << '\n';
    } else {
        const auto& r = built.report;
        std::cout << r.tournament << ' ' << r.first_year << '-' << r.last_year << ": " << r.teams << " teams, "
                  << r.editions << " editions (" << r.ranked_editions << " ranked)\n";
        for (const auto& m : r.merges) std::cout << "merged " << m.alias << " -> " << m.canonical << " (" << m.rows << " rows)\n";
        for (const auto& e : r.excluded) std::cout << "excluded " << e.team << ": " << e.reason << '\n';
        if (!r.gap_years.empty()) {
            std::cout << "gap editions:";
            for (int y : r.gap_years) std::cout << ' ' << y;
            std::cout << '\n';
        }
        std::cout << r.partition << '\n';
        for (const auto& s : stats)
            std::cout << "  " << s.variable << ": " << s.min << ' ' << s.q1 << ' ' << s.median << ' ' << s.q3 << ' '
                      << s.max << '\n';
        std::cout << "wrote " << (ctx.config.out_dir / "panel.json").string() << '\n';
    }
    return 0;
}

int cmd_fit(const Context& ctx, const std::string& spec_name, bool all_specs, std::optional<double> lambda,
            std::optional<std::string> bounds) {
    const PanelDataset panel = obtain_panel(ctx.config);
    auto adjust = [&](ModelSpec s) {
        if (lambda) s.penalty_lambda = *lambda;
        if (bounds) s.bounds = parse_bounds_regime(*bounds);
        return s;
    };
    if (all_specs) {
        std::vector<ModelSpec> specs;
        for (const auto& s : ctx.config.specs) specs.push_back(adjust(s));
        const ModelTable table = model_table(panel, specs, fit_options(ctx.config));
        const Json env = envelope(ctx, "fit", model_table_to_json(table));
        const std::string text = render_model_table(table);
        write_file(ctx.config.out_dir / "model_table.json", dump(env));
        write_file(ctx.config.out_dir / "model_table.txt", text);
        if (ctx.format == Format::json) std::cout << dump(env);
        else std::cout << text;
        bool any = false;
        for (const auto& c : table.columns) any = any || c.fit.has_value();
        return any ? 0 : 3;
    }
    const ModelSpec spec = adjust(ctx.config.spec(spec_name.empty() ? ctx.config.default_spec : spec_name));
    const FitResult result = fit(panel, spec, std::nullopt, fit_options(ctx.config));
    const Json env = envelope(ctx, "fit", fit_to_json(result));
    write_file(ctx.config.out_dir / ("fit_" + spec.name + ".json"), dump(env));
    if (ctx.format == Format::json) {
        std::cout << dump(env);
    } else if (ctx.format == Format::csv) {
        std::cout << "name,value,se,p_value,role\n";
        for (const auto& e : result.estimates)
            std::cout << csv_escape(e.name) << ',' << e.value << ',' << (e.se ? number_tag(*e.se) : "") << ','
                      << (e.p_value ? number_tag(*e.p_value) : "") << ',' << to_string(e.role) << '\n';
    } else {
        std::cout << render_fit(result);
    }
    return 0;
}

int cmd_forecast(const Context& ctx, const std::string& spec_name, std::optional<std::size_t> holdout,
                 std::optional<std::size_t> k_playoff, std::vector<double> lambdas, std::optional<std::size_t> mc_draws) {
    const PanelDataset panel = obtain_panel(ctx.config);
    const ModelSpec spec = ctx.config.spec(spec_name.empty() ? ctx.config.default_spec : spec_name);
    if (lambdas.empty()) lambdas = ctx.config.lambda_grid;
    ForecastOptions opt;
    opt.fit = fit_options(ctx.config);
    opt.evaluation.mc_draws = mc_draws.value_or(ctx.config.mc_draws);
    opt.k_playoff = k_playoff ? k_playoff : ctx.config.k_playoff;
    const LambdaSearchResult search = lambda_grid_search(panel, spec, lambdas, holdout.value_or(ctx.config.holdout), opt);

    Json summary = Json::array();
    for (const auto& o : search.outcomes) {
        const std::string stem = "forecast_" + spec.name + "_lambda_" + number_tag(o.lambda);
        Json result;
        if (o.report) {
            result = forecast_to_json(*o.report);
            write_file(ctx.config.out_dir / (stem + ".csv"), csv_preamble(ctx, "forecast") + forecast_to_csv(*o.report));
        } else {
            result = {{"lambda", o.lambda}, {"error", o.error}};
        }
        write_file(ctx.config.out_dir / (stem + ".json"), dump(envelope(ctx, "forecast", result)));
        summary.push_back({{"lambda", o.lambda},
                           {"file", stem + ".json"},
                           {"loglik", o.report ? Json(o.report->aggregate.loglik) : Json(nullptr)},
                           {"error", o.error}});
    }
    Json search_json = {{"spec", spec_to_json(spec)},
                        {"best_lambda", search.best_lambda ? Json(*search.best_lambda) : Json(nullptr)},
                        {"lambdas", summary}};
    const Json env = envelope(ctx, "forecast", search_json);
    write_file(ctx.config.out_dir / ("forecast_" + spec.name + "_search.json"), dump(env));
    if (ctx.format == Format::json) {
        std::cout << dump(env);
    } else if (ctx.format == Format::csv) {
        std::cout << "lambda," << forecast_csv_header << '\n';
        for (const auto& o : search.outcomes) {
            if (!o.report) continue;
            std::istringstream rows(forecast_to_csv(*o.report));
            std::string line;
            std::getline(rows, line);
            while (std::getline(rows, line)) std::cout << o.lambda << ',' << line << '\n';
        }
    } else {
        std::cout << "spec " << spec.name << ", holdout " << holdout.value_or(ctx.config.holdout) << '\n'
                  << render_lambda_table(search);
    }
    return search.best_lambda ? 0 : 2;
}

int cmd_diagnose(const Context& ctx, std::vector<int> lags, std::optional<std::size_t> replications,
                 std::optional<std::string> method) {
    const PanelDataset panel = obtain_panel(ctx.config);
    CorrelationOptions opt;
    opt.seed = ctx.config.seed;
    opt.workers = ctx.config.workers;
    opt.replications = replications.value_or(ctx.config.diagnose.replications);
    opt.method = method ? parse_correlation_method(*method) : ctx.config.diagnose.method;
    if (lags.empty()) lags = ctx.config.diagnose.lags;

    const CorrelationReport auto_rep = rank_autocorrelation(panel, lags, opt);
    const CorrelationMatrix matrix = predictor_rank_correlations(panel, opt.method);
    Json result = {{"autocorrelation", correlation_to_json(auto_rep)}, {"predictor_rank", correlation_matrix_to_json(matrix)}};
    write_file(ctx.config.out_dir / "autocorrelation.csv", csv_preamble(ctx, "diagnose") + correlation_to_csv(auto_rep));
    write_file(ctx.config.out_dir / "predictor_rank_correlations.csv",
               csv_preamble(ctx, "diagnose") + correlation_matrix_to_csv(matrix));

    std::optional<CorrelationReport> cross;
    if (ctx.config.diagnose.cross_tournament) {
        BuildConfig bc = ctx.config.build;
        bc.tournament = *ctx.config.diagnose.cross_tournament;
        bc.first_year.reset();
        bc.last_year.reset();
        bc.exclude.clear();
        bc.auto_exclude = false;
        bc.predictors.clear();
        if (!ctx.config.results) throw UsageError("cross-tournament correlation needs the results file");
        const PanelDataset other = build_panel(load_results(ctx.config.results->string()), RawRosters{}, bc).panel;
        cross = cross_correlation(panel, other, ctx.config.diagnose.cross_lags, opt);
        result["cross_correlation"] = correlation_to_json(*cross);
        result["cross_correlation"]["tournaments"] = {ctx.config.build.tournament, bc.tournament};
        write_file(ctx.config.out_dir / "cross_correlation.csv", csv_preamble(ctx, "diagnose") + correlation_to_csv(*cross));
    }
    const Json env = envelope(ctx, "diagnose", result);
    write_file(ctx.config.out_dir / "diagnostics.json", dump(env));
    if (ctx.format == Format::json) {
        std::cout << dump(env);
    } else if (ctx.format == Format::csv) {
        std::cout << correlation_to_csv(auto_rep);
    } else {
        auto show = [](const std::string& title, const CorrelationReport& r) {
            std::cout << title << " (" << r.method << ", " << r.replications << " bootstrap replications)\n";
            for (const auto& l : r.lags) {
                std::cout << "  lag " << l.lag << ": ";
                if (l.estimate) std::cout << detail::fixed(*l.estimate, 3);
                else std::cout << "undefined";
                if (l.lo && l.hi) std::cout << " [" << detail::fixed(*l.lo, 3) << ", " << detail::fixed(*l.hi, 3) << "]";
                std::cout << "  pairs " << l.pairs;
                if (!l.note.empty()) std::cout << "  (" << l.note << ")";
                std::cout << '\n';
            }
        };
        show("rank autocorrelation", auto_rep);
        if (cross) show("cross correlation", *cross);
        std::cout << "rank vs predictors:\n";
        for (std::size_t j = 1; j < matrix.names.size(); ++j) {
            std::cout << "  " << matrix.names[j] << ": ";
            if (matrix.values[0][j]) std::cout << detail::fixed(*matrix.values[0][j], 3) << '\n';
            else std::cout << "undefined\n";
        }
    }
    return 0;
}

int cmd_profile(const Context& ctx, const std::string& spec_name, std::optional<std::vector<double>> grid,
                std::optional<std::string> bounds) {
    const std::vector<double> alpha = grid ? *grid : ctx.config.alpha_grid;
    if (alpha.empty()) throw UsageError("alpha grid is empty");
    for (double a : alpha)
        if (!std::isfinite(a)) throw UsageError("alpha grid values must be finite");
    const PanelDataset panel = obtain_panel(ctx.config);
    ModelSpec spec = ctx.config.spec(spec_name.empty() ? ctx.config.default_spec : spec_name);
    if (bounds) spec.bounds = parse_bounds_regime(*bounds);
    if (!spec.include_dynamics) throw UsageError("spec '" + spec.name + "' has no score coefficient to profile");
    FitOptions fo = fit_options(ctx.config);
    fo.compute_standard_errors = false;
    // A free alpha at phi = 1 has a spiky likelihood the search cannot settle
    // on, so the persistent profile reuses the mean-reverting fit with phi = 1.
    ModelSpec fit_spec = spec;
    if (spec.bounds == BoundsRegime::persistent) fit_spec.bounds = BoundsRegime::bounded;
    FitResult fitted = fit(panel, fit_spec, std::nullopt, fo);
    if (spec.bounds == BoundsRegime::persistent) fitted.coef.phi = 1.0;
    const auto points = profile_score_coefficient(panel, spec, fitted.coef, alpha);
    const std::string csv = profile_to_csv(points);
    write_file(ctx.config.out_dir / ("profile_" + spec.name + ".csv"), csv_preamble(ctx, "profile") + csv);
    Json pts = Json::array();
    for (const auto& p : points) pts.push_back({{"alpha", p.alpha}, {"loglik", p.loglik}});
    const Json env = envelope(ctx, "profile",
                              {{"spec", spec_to_json(spec)}, {"fitted_alpha", fitted.coef.alpha}, {"fitted_phi", fitted.coef.phi},
                               {"fitted_loglik", fitted.loglik}, {"fitted_bounds", to_string(fit_spec.bounds)}, {"points", pts}});
    write_file(ctx.config.out_dir / ("profile_" + spec.name + ".json"), dump(env));
    if (ctx.format == Format::json) std::cout << dump(env);
    else std::cout << csv;
    return 0;
}

struct SimulateArgs {
    SimulationConfig sim;
    std::vector<double> beta;
};

int cmd_simulate(const Context& ctx, SimulateArgs args) {
    args.sim.beta = args.beta;
    args.sim.seed = ctx.config.seed;
    const SimulatedPanel sp = simulate_panel(args.sim);
    Json meta = {{"tool", tool_name},
                 {"version", tool_version},
                 {"seed", ctx.config.seed},
                 {"teams", args.sim.teams},
                 {"editions", args.sim.editions},
                 {"phi", args.sim.phi},
                 {"alpha", args.sim.alpha},
                 {"beta", args.sim.beta},
                 {"participation", args.sim.participation}};
    Json digest_src = meta;
    digest_src.erase("tool");
    digest_src.erase("version");
    meta["config_digest"] = digest_hex(digest_src.dump());
    Json panel = Json::object();
    panel["meta"] = meta;
    panel.update(panel_to_json(sp.panel));
    write_file(ctx.config.out_dir / "panel.json", dump(panel));
    const Json truth = coefficients_to_json(sp.truth, sp.panel.teams, sp.panel.variables);
    Json env = envelope(ctx, "simulate", {{"truth", truth}, {"panel", (ctx.config.out_dir / "panel.json").string()}});
    env["config_digest"] = meta["config_digest"];
    write_file(ctx.config.out_dir / "truth.json", dump(env));
    if (ctx.format == Format::json) std::cout << dump(env);
    else std::cout << "wrote " << (ctx.config.out_dir / "panel.json").string() << " (" << sp.panel.team_count()
                   << " teams, " << sp.panel.edition_count() << " editions)\n";
    return 0;
}

void report_error(const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (auto* v = dynamic_cast<const ValidationError*>(&e))
        for (const auto& issue : v->issues()) std::cerr << "  " << issue << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Score-driven Plackett-Luce ranking models: build, fit, forecast, diagnose"};
    app.set_version_flag("--version", std::string(tool_version));
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    std::uint64_t seed_value = 0;
    std::size_t workers_value = 0;
    app.add_option("--config", g.config_path, "JSON run configuration");
    app.add_option("--panel", g.panel_path, "prebuilt panel.json (overrides the configured data)");
    auto* seed_opt = app.add_option("--seed", seed_value, "master seed for every randomized step");
    auto* workers_opt = app.add_option("--workers", workers_value, "maximum worker threads")->check(CLI::PositiveNumber);
    app.add_option("--out-dir", g.out_dir, "output directory");
    app.add_option("--format", g.format, "stdout format")->check(CLI::IsMember({"json", "csv", "table"}));

    auto* build = app.add_subcommand("build", "ingest CSVs into panel.json and a build report");

    auto* fitc = app.add_subcommand("fit", "estimate a model specification");
    std::string fit_spec;
    bool all_specs = false;
    std::optional<double> fit_lambda;
    std::optional<std::string> fit_bounds;
    fitc->add_option("--spec", fit_spec, "specification name");
    fitc->add_flag("--all-specs", all_specs, "fit every configured specification and compare");
    fitc->add_option("--lambda", fit_lambda, "L2 penalty override");
    fitc->add_option("--bounds", fit_bounds, "bounded | persistent | unbounded");

    auto* fc = app.add_subcommand("forecast", "rolling one-step-ahead evaluation over a lambda grid");
    std::string fc_spec;
    std::optional<std::size_t> fc_holdout, fc_k, fc_draws;
    std::vector<double> fc_lambdas;
    fc->add_option("--spec", fc_spec, "specification name");
    fc->add_option("--holdout", fc_holdout, "number of held-out ranked editions");
    fc->add_option("--k-playoff", fc_k, "playoff set size");
    fc->add_option("--lambda", fc_lambdas, "lambda grid (repeatable)");
    fc->add_option("--mc-draws", fc_draws, "Monte-Carlo draws for large playoff sets");

    auto* dc = app.add_subcommand("diagnose", "rank autocorrelation and predictor correlations");
    std::vector<int> dc_lags;
    std::optional<std::size_t> dc_reps;
    std::optional<std::string> dc_method;
    dc->add_option("--lags", dc_lags, "lags");
    dc->add_option("--replications", dc_reps, "bootstrap replications");
    dc->add_option("--method", dc_method, "pearson | spearman");

    auto* pc = app.add_subcommand("profile", "log-likelihood over a grid of score coefficients");
    std::string pc_spec;
    std::optional<std::vector<double>> pc_grid;
    std::optional<std::string> pc_bounds;
    pc->add_option("--spec", pc_spec, "specification name");
    auto* grid_opt = pc->add_option("--alpha-grid", pc_grid, "score coefficient values")->delimiter(',')->expected(0, -1);
    pc->add_option("--bounds", pc_bounds, "bounded | persistent | unbounded");

    auto* sc = app.add_subcommand("simulate", "draw a synthetic panel");
    SimulateArgs sa;
    sc->add_option("--teams", sa.sim.teams, "number of teams");
    sc->add_option("--editions", sa.sim.editions, "number of editions");
    sc->add_option("--predictors", sa.sim.predictors, "number of standard normal predictors");
    sc->add_option("--phi", sa.sim.phi, "autoregressive coefficient");
    sc->add_option("--alpha", sa.sim.alpha, "score coefficient");
    sc->add_option("--beta", sa.beta, "predictor coefficients")->delimiter(',');
    sc->add_option("--omega-sd", sa.sim.omega_sd, "fixed-effect spread");
    sc->add_option("--participation", sa.sim.participation, "participation probability");
    sc->add_option("--first-year", sa.sim.first_year, "label of the first edition");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    if (seed_opt->count()) g.seed = seed_value;
    if (workers_opt->count()) g.workers = workers_value;
    // An explicitly empty grid is an error, not a request for the default.
    if (grid_opt->count() && !pc_grid) pc_grid.emplace();

    try {
        if (*build) return cmd_build(make_context(g, true));
        if (*fitc) return cmd_fit(make_context(g, true), fit_spec, all_specs, fit_lambda, fit_bounds);
        if (*fc) return cmd_forecast(make_context(g, true), fc_spec, fc_holdout, fc_k, fc_lambdas, fc_draws);
        if (*dc) return cmd_diagnose(make_context(g, true), dc_lags, dc_reps, dc_method);
        if (*pc) return cmd_profile(make_context(g, true), pc_spec, pc_grid, pc_bounds);
        if (*sc) return cmd_simulate(make_context(g, false), sa);
    } catch (const std::exception& e) {
        report_error(e);
        return exit_code(e);
    }
    return 2;
}
