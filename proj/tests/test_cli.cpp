#include <catch_amalgamated.hpp>

#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace gasrank;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

// Copies the sample data into a fresh directory.
fs::path sample_workspace(const std::string& name) {
    const fs::path dir = oracle::temp_dir("cli_" + name);
    const fs::path src = fs::path(GASRANK_SOURCE_DIR) / "data" / "sample";
    for (const char* f : {"results.csv", "rosters.csv", "config.json"}) fs::copy_file(src / f, dir / f);
    return dir;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

oracle::CommandResult run(const fs::path& dir, const std::string& args) {
    return oracle::run_cli("--config " + q(dir / "config.json") + " " + args, dir);
}

Json read_json(const fs::path& p) { return Json::parse(oracle::slurp(p)); }

// Team A beats B in `wins` of `editions` years; no predictors.
fs::path two_team_workspace(const std::string& name, int wins, int editions) {
    const fs::path dir = oracle::temp_dir("cli_" + name);
    std::string results = "edition_year,tournament_code,team_id,final_rank,division_tier\n";
    for (int t = 0; t < editions; ++t) {
        const bool a_wins = t < wins;
        results += std::to_string(2001 + t) + ",WC,A," + (a_wins ? "1" : "2") + ",1\n";
        results += std::to_string(2001 + t) + ",WC,B," + (a_wins ? "2" : "1") + ",1\n";
    }
    oracle::write(dir / "results.csv", results);
    oracle::write(dir / "config.json", R"({"results": "results.csv", "predictors": [], "restarts": 2,
        "specs": [{"name": "static", "dynamics": false}, {"name": "dynamic"}]})");
    return dir;
}

}  // namespace

TEST_CASE("build writes the panel and report", "[cli]") {
    const fs::path dir = sample_workspace("build");
    const auto r = run(dir, "build");
    REQUIRE(r.exit_code == 0);
    CHECK_THAT(r.output, ContainsSubstring("gap editions: 2010"));
    const Json report = read_json(dir / "out" / "build_report.json");
    CHECK(report["tool"]["name"] == "gasrank");
    CHECK(report["command"] == "build");
    CHECK(report["config_digest"].get<std::string>().size() == 16);
    CHECK(report["result"]["excluded"][0]["team"] == "NED");
    const PanelDataset p = load_panel((dir / "out" / "panel.json").string());
    CHECK(p.edition_count() == 20);
    CHECK(p.ranked_edition_count() == 19);
    CHECK(p.variables == standard_predictors());
}

TEST_CASE("invalid input exits with code 2 and names the row", "[cli]") {
    const fs::path dir = sample_workspace("duplicate");
    std::string results = oracle::slurp(dir / "results.csv");
    results += "2019,WC,CAN,3,1\n";
    oracle::write(dir / "results.csv", results);
    const auto r = run(dir, "build");
    CHECK(r.exit_code == 2);
    CHECK_THAT(r.output, ContainsSubstring("row 603"));

    CHECK(oracle::run_cli("--config " + q(dir / "missing.json") + " build", dir).exit_code == 2);
    CHECK(oracle::run_cli("build --bogus", dir).exit_code == 2);
    CHECK(oracle::run_cli("", dir).exit_code == 2);
    CHECK(run(dir, "fit --spec nosuchspec").exit_code == 2);
}

TEST_CASE("static fit on two teams matches the closed form", "[cli]") {
    const fs::path dir = two_team_workspace("two_team", 6, 8);
    const auto r = run(dir, "fit --spec static --format json");
    REQUIRE(r.exit_code == 0);
    const Json j = read_json(dir / "out" / "fit_static.json");
    const Json& res = j["result"];
    CHECK_THAT(res["loglik"].get<double>(), WithinAbs(6 * std::log(0.75) + 2 * std::log(0.25), 1e-6));
    double omega_a = 0, se_a = 0;
    for (const auto& e : res["estimates"])
        if (e["name"] == "omega[A]") {
            omega_a = e["value"].get<double>();
            se_a = e["se"].get<double>();
        }
    CHECK_THAT(omega_a, WithinAbs(0.5 * std::log(3.0), 1e-4));
    CHECK_THAT(se_a, WithinAbs(0.4082, 5e-4));
    CHECK_THAT(r.output, ContainsSubstring("\"config_digest\""));
}

TEST_CASE("all-spec fit marks the AIC minimum", "[cli]") {
    const fs::path dir = sample_workspace("all_specs");
    const auto r = run(dir, "fit --all-specs");
    REQUIRE(r.exit_code == 0);
    const std::string text = oracle::slurp(dir / "out" / "model_table.txt");
    CHECK_THAT(text, ContainsSubstring("Autoreg. Coef."));
    CHECK_THAT(text, ContainsSubstring("Score Coef."));
    const Json j = read_json(dir / "out" / "model_table.json");
    double min_aic = 1e300, flagged = 0;
    int flags = 0;
    for (const auto& c : j["result"]["columns"]) {
        min_aic = std::min(min_aic, c["fit"]["aic"].get<double>());
        if (c["best_aic"].get<bool>()) {
            ++flags;
            flagged = c["fit"]["aic"].get<double>();
        }
    }
    CHECK(flags == 1);
    CHECK(flagged == min_aic);
    std::size_t marks = 0;
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);)
        if (!line.starts_with("***")) marks += std::count(line.begin(), line.end(), '<');
    CHECK(marks == 1);
}

TEST_CASE("forecast writes one report per lambda", "[cli]") {
    const fs::path dir = sample_workspace("forecast");
    const auto r = run(dir, "forecast --spec dynamic --holdout 1");
    REQUIRE(r.exit_code == 0);
    for (const char* l : {"0", "0.001", "0.01", "0.1", "1"}) {
        const fs::path csv = dir / "out" / (std::string("forecast_dynamic_lambda_") + l + ".csv");
        REQUIRE(fs::exists(csv));
        const std::string text = oracle::slurp(csv);
        CHECK(text.rfind("# gasrank ", 0) == 0);
        CHECK(std::count(text.begin(), text.end(), '\n') == 4);  // preamble, header, one edition, AGG
        CHECK_THAT(text, ContainsSubstring("\nAGG,"));
    }
    const Json s = read_json(dir / "out" / "forecast_dynamic_search.json");
    CHECK(s["result"]["lambdas"].size() == 5);
    CHECK_FALSE(s["result"]["best_lambda"].is_null());
    const Json one = read_json(dir / "out" / "forecast_dynamic_lambda_0.01.json");
    CHECK(one["result"]["editions"].size() == 1);
    CHECK(one["result"]["editions"][0]["edition"] == "2019");
}

TEST_CASE("reruns are byte-identical and independent of worker count", "[cli]") {
    const fs::path dir = sample_workspace("rerun");
    const std::vector<std::pair<std::string, std::vector<std::string>>> commands{
        {"fit --spec tournament", {"fit_tournament.json"}},
        {"forecast --spec dynamic --holdout 2 --lambda 0.01 --lambda 0.1",
         {"forecast_dynamic_lambda_0.01.csv", "forecast_dynamic_lambda_0.1.json", "forecast_dynamic_search.json"}},
        {"diagnose --replications 300", {"autocorrelation.csv", "cross_correlation.csv", "diagnostics.json"}},
    };
    for (const auto& [cmd, files] : commands) {
        REQUIRE(run(dir, cmd).exit_code == 0);
        std::vector<std::string> first;
        for (const auto& f : files) first.push_back(oracle::slurp(dir / "out" / f));
        REQUIRE(run(dir, "--workers 3 " + cmd).exit_code == 0);
        for (std::size_t i = 0; i < files.size(); ++i) CHECK(oracle::slurp(dir / "out" / files[i]) == first[i]);
        REQUIRE(run(dir, "--seed 99 " + cmd).exit_code == 0);
        CHECK(oracle::slurp(dir / "out" / files[0]) != first[0]);
    }
}

TEST_CASE("profile command", "[cli]") {
    const fs::path dir = sample_workspace("profile");
    CHECK(run(dir, "profile --spec dynamic --alpha-grid=").exit_code == 2);
    CHECK(run(dir, "profile --spec static").exit_code == 2);
    REQUIRE(run(dir, "profile --spec dynamic --bounds persistent --alpha-grid=-1,-0.5,-0.25,-0.1,0,0.1").exit_code == 0);
    const Json j = read_json(dir / "out" / "profile_dynamic.json");
    REQUIRE(j["result"]["points"].size() == 6);
    CHECK(j["result"]["fitted_phi"] == 1.0);
    for (const auto& p : j["result"]["points"]) CHECK(p["loglik"].is_number());
    REQUIRE(run(dir, "profile --spec dynamic").exit_code == 0);
    const std::string csv = oracle::slurp(dir / "out" / "profile_dynamic.csv");
    CHECK_THAT(csv, ContainsSubstring("alpha,loglik"));
}

TEST_CASE("simulate then fit from the panel", "[cli]") {
    const fs::path dir = oracle::temp_dir("cli_simulate");
    const auto r = oracle::run_cli("--seed 5 --out-dir " + q(dir / "sim") +
                                       " simulate --teams 5 --editions 40 --predictors 1 --beta 0.5 --phi 0.6 --alpha 0.3",
                                   dir);
    REQUIRE(r.exit_code == 0);
    const PanelDataset p = load_panel((dir / "sim" / "panel.json").string());
    CHECK(p.team_count() == 5);
    CHECK(p.edition_count() == 40);
    const Json truth = read_json(dir / "sim" / "truth.json");
    CHECK(truth["result"]["truth"]["phi"] == 0.6);
    oracle::write(dir / "config.json", R"({"specs": [{"name": "d", "predictors": ["x1"]}], "restarts": 2})");
    const auto f = oracle::run_cli("--config " + q(dir / "config.json") + " --panel " + q(dir / "sim" / "panel.json") +
                                       " --out-dir " + q(dir / "fit") + " fit --spec d",
                                   dir);
    REQUIRE(f.exit_code == 0);
    CHECK(fs::exists(dir / "fit" / "fit_d.json"));
    const auto again = oracle::run_cli("--seed 5 --out-dir " + q(dir / "sim2") +
                                           " simulate --teams 5 --editions 40 --predictors 1 --beta 0.5 --phi 0.6 --alpha 0.3",
                                       dir);
    REQUIRE(again.exit_code == 0);
    CHECK(oracle::slurp(dir / "sim2" / "panel.json") == oracle::slurp(dir / "sim" / "panel.json"));
}

TEST_CASE("unidentified data exits with code 2 at lambda zero", "[cli]") {
    const fs::path dir = two_team_workspace("separated", 5, 5);
    const auto r = run(dir, "fit --spec static");
    CHECK(r.exit_code == 2);
    CHECK_THAT(r.output, ContainsSubstring("partition"));
    CHECK(run(dir, "fit --spec static --lambda 0.1").exit_code == 0);
}
