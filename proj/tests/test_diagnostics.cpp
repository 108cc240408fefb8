#include <catch_amalgamated.hpp>

#include "support/oracles.hpp"

using namespace gasrank;
using Catch::Matchers::WithinAbs;

namespace {

// Uniformly shuffled rankings of n teams over T consecutive years.
PanelDataset shuffled_panel(std::size_t n, std::size_t editions, std::uint64_t seed, int first_year = 1800) {
    SimulationConfig cfg;
    cfg.teams = n;
    cfg.editions = editions;
    cfg.omega = std::vector<double>(n, 0.0);
    cfg.first_year = first_year;
    cfg.seed = seed;
    return simulate_panel(cfg).panel;
}

PanelDataset constant_panel(std::size_t editions) {
    PanelDataset p;
    p.teams = {"A", "B", "C", "D"};
    for (std::size_t t = 0; t < editions; ++t) {
        Edition e;
        e.label = std::to_string(2000 + t);
        e.ranking = Ranking({2, 0, 3, 1});
        e.participants = {0, 1, 2, 3};
        p.editions.push_back(std::move(e));
    }
    return p;
}

CorrelationOptions opts(std::size_t reps = 200, std::uint64_t seed = 7) {
    CorrelationOptions o;
    o.replications = reps;
    o.seed = seed;
    return o;
}

// Plain two-pass Pearson, written out independently.
double reference_pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    double num = 0, dx = 0, dy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - sx / n) * (y[i] - sy / n);
        dx += (x[i] - sx / n) * (x[i] - sx / n);
        dy += (y[i] - sy / n) * (y[i] - sy / n);
    }
    return num / std::sqrt(dx * dy);
}

}  // namespace

TEST_CASE("Pearson correlation against a direct computation", "[diagnostics]") {
    RandomSource rng(3);
    for (int c = 0; c < 20; ++c) {
        std::vector<double> x, y;
        for (int i = 0; i < 30; ++i) {
            x.push_back(rng.normal());
            y.push_back(0.5 * x.back() + rng.normal());
        }
        CHECK_THAT(*pearson_correlation(x, y), WithinAbs(reference_pearson(x, y), 1e-12));
    }
    const std::vector<double> flat{1, 1, 1}, other{1, 2, 3};
    CHECK_FALSE(pearson_correlation(flat, other));
    CHECK_FALSE(pearson_correlation(std::vector<double>{1.0}, std::vector<double>{2.0}));
}

TEST_CASE("Spearman uses mid-ranks", "[diagnostics]") {
    const std::vector<double> x{10, 20, 20, 40};
    CHECK(mid_ranks(x) == std::vector<double>{1, 2.5, 2.5, 4});
    const std::vector<double> a{1, 2, 3, 4, 5}, b{1, 4, 9, 16, 25};
    CHECK_THAT(*correlation(a, b, CorrelationMethod::spearman), WithinAbs(1.0, 1e-15));
    CHECK(*correlation(a, b, CorrelationMethod::pearson) < 1.0);
    CHECK(parse_correlation_method("spearman") == CorrelationMethod::spearman);
    CHECK_THROWS_AS(parse_correlation_method("kendall"), UsageError);
}

TEST_CASE("identical rankings give autocorrelation one", "[diagnostics]") {
    const auto r = rank_autocorrelation(constant_panel(10), {1, 2, 3}, opts());
    for (const auto& l : r.lags) {
        CHECK_THAT(*l.estimate, WithinAbs(1.0, 1e-12));
        CHECK(l.pairs == (10 - l.lag) * 4u);
    }
}

TEST_CASE("shuffled rankings have no autocorrelation", "[diagnostics]") {
    const auto r = rank_autocorrelation(shuffled_panel(8, 200, 11), {1, 2, 5}, opts());
    for (const auto& l : r.lags) CHECK(std::abs(*l.estimate) <= 0.1);
}

TEST_CASE("independent panels are uncorrelated and a panel matches itself", "[diagnostics]") {
    const auto a = shuffled_panel(8, 200, 21), b = shuffled_panel(8, 200, 22);
    const auto r = cross_correlation(a, b, {0, 1}, opts());
    for (const auto& l : r.lags) CHECK(std::abs(*l.estimate) <= 0.1);
    const auto self = cross_correlation(a, a, {0}, opts());
    CHECK(*self.lags[0].estimate == 1.0);
    CHECK(self.lags[0].pairs == 1600);
}

TEST_CASE("pairing follows year labels and team names", "[diagnostics]") {
    PanelDataset a = constant_panel(3);
    PanelDataset b;
    b.teams = {"A", "B", "Z"};
    Edition e;
    e.label = "2001";
    e.ranking = Ranking({1, 0, 2});
    e.participants = {0, 1, 2};
    b.editions.push_back(e);
    const auto r = cross_correlation(a, b, {0, 1, 5}, opts());
    CHECK(r.lags[0].pairs == 2);  // A and B in 2001
    CHECK(r.lags[1].pairs == 2);  // a's 2002 against b's 2001
    CHECK(r.lags[2].pairs == 0);
    CHECK_FALSE(r.lags[2].estimate);
    CHECK_FALSE(r.lags[2].lo);
    CHECK_FALSE(r.lags[2].note.empty());
    // Gap editions break lag pairs rather than shifting them.
    PanelDataset gapped = constant_panel(5);
    gapped.editions[2].participants.clear();
    gapped.editions[2].ranking.reset();
    CHECK(rank_autocorrelation(gapped, {1}, opts()).lags[0].pairs == 2 * 4u);
    CHECK_THROWS_AS(rank_autocorrelation(gapped, {0}, opts()), UsageError);
}

TEST_CASE("bootstrap bands are reproducible and contain the estimate", "[diagnostics]") {
    SimulationConfig cfg;
    cfg.teams = 8;
    cfg.editions = 60;
    cfg.phi = 0.8;
    cfg.alpha = 0.5;
    cfg.seed = 31;
    const auto p = simulate_panel(cfg).panel;
    const auto a = rank_autocorrelation(p, {1, 2, 3}, opts(500, 9));
    auto o = opts(500, 9);
    o.workers = 3;
    const auto b = rank_autocorrelation(p, {1, 2, 3}, o);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(a.lags[i].lo == b.lags[i].lo);
        CHECK(a.lags[i].hi == b.lags[i].hi);
        CHECK(*a.lags[i].lo <= *a.lags[i].estimate);
        CHECK(*a.lags[i].estimate <= *a.lags[i].hi);
        CHECK(*a.lags[i].lo >= -1.0);
        CHECK(*a.lags[i].hi <= 1.0);
    }
    const auto c = rank_autocorrelation(p, {1, 2, 3}, opts(500, 10));
    CHECK(c.lags[0].lo != a.lags[0].lo);
}

TEST_CASE("bands narrow as pairs accumulate", "[diagnostics]") {
    auto width = [](std::size_t editions) {
        const auto r = rank_autocorrelation(shuffled_panel(8, editions, 41), {1}, opts(400));
        return *r.lags[0].hi - *r.lags[0].lo;
    };
    CHECK(width(400) < width(25));
}

TEST_CASE("predictor correlation matrix", "[diagnostics]") {
    SimulationConfig cfg;
    cfg.teams = 6;
    cfg.editions = 30;
    cfg.predictors = 2;
    cfg.beta = {1.0, 0.0};
    cfg.seed = 51;
    PanelDataset p = simulate_panel(cfg).panel;
    // Third predictor equals the rank, fourth is constant.
    p.variables.push_back("same");
    p.variables.push_back("flat");
    for (auto& e : p.editions) {
        std::vector<double> x;
        for (std::size_t r = 0; r < e.participants.size(); ++r) {
            x.push_back(e.predictors[r * 2]);
            x.push_back(e.predictors[r * 2 + 1]);
            x.push_back(static_cast<double>(e.ranking->rank_of(e.participants[r])));
            x.push_back(3.0);
        }
        e.predictors = x;
    }
    const auto m = predictor_rank_correlations(p);
    REQUIRE(m.names == std::vector<std::string>{"rank", "x1", "x2", "same", "flat"});
    CHECK(m.cells == 180);
    for (std::size_t a = 0; a < 4; ++a) {
        CHECK(*m.values[a][a] == 1.0);
        for (std::size_t b = 0; b < 4; ++b) CHECK_THAT(*m.values[a][b], WithinAbs(*m.values[b][a], 1e-12));
    }
    CHECK_THAT(*m.values[0][3], WithinAbs(1.0, 1e-12));
    CHECK(*m.values[0][1] < -0.2);  // stronger teams finish with smaller ranks
    for (std::size_t a = 0; a < 5; ++a) {
        CHECK_FALSE(m.values[a][4]);
        CHECK_FALSE(m.values[4][a]);
    }
    const auto s = predictor_rank_correlations(p, CorrelationMethod::spearman);
    CHECK_THAT(*s.values[0][3], WithinAbs(1.0, 1e-12));
}

TEST_CASE("non-year labels are rejected", "[diagnostics]") {
    PanelDataset p = constant_panel(3);
    p.editions[1].label = "spring";
    CHECK_THROWS_AS(rank_autocorrelation(p, {1}, opts()), DataError);
}
