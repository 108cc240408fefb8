#pragma once

// Independent reference computations for the test suite: direct product
// formulas, permutation enumeration and a forward-mode dual number.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "gasrank/gasrank.hpp"

namespace oracle {

using gasrank::StrengthVector;
using gasrank::TeamId;

// Product of sequential choice probabilities, in linear space.
inline double pmf(const std::vector<TeamId>& ordering, const StrengthVector& f) {
    double p = 1.0;
    for (std::size_t r = 0; r < ordering.size(); ++r) {
        double denom = 0.0;
        for (std::size_t s = r; s < ordering.size(); ++s) denom += std::exp(f.at(ordering[s]));
        p *= std::exp(f.at(ordering[r])) / denom;
    }
    return p;
}

inline std::vector<std::vector<TeamId>> all_orderings(const StrengthVector& f) {
    std::vector<TeamId> teams;
    for (const auto& [t, _] : f) teams.push_back(t);
    std::vector<std::vector<TeamId>> out;
    do {
        out.push_back(teams);
    } while (std::next_permutation(teams.begin(), teams.end()));
    return out;
}

// P(the first k positions hold exactly `set`), by summing over all n!
// orderings.
inline double top_set_probability(const StrengthVector& f, const std::vector<TeamId>& set) {
    const std::set<TeamId> s(set.begin(), set.end());
    double total = 0.0;
    for (const auto& o : all_orderings(f)) {
        bool ok = true;
        for (std::size_t r = 0; r < set.size() && ok; ++r) ok = s.contains(o[r]);
        if (ok) total += pmf(o, f);
    }
    return total;
}

inline std::vector<TeamId> argmax_ordering(const StrengthVector& f) {
    std::vector<TeamId> best;
    double bp = -1.0;
    for (const auto& o : all_orderings(f)) {
        const double p = pmf(o, f);
        if (p > bp) {
            bp = p;
            best = o;
        }
    }
    return best;
}

inline StrengthVector random_strengths(std::size_t n, gasrank::RandomSource& rng, double sd = 1.0) {
    StrengthVector f;
    for (TeamId i = 0; i < n; ++i) f[i] = sd * rng.normal();
    return f;
}

// Forward-mode dual number with a dense gradient.
struct Dual {
    double v = 0.0;
    std::vector<double> d;

    Dual() = default;
    Dual(double x) : v(x) {}  // NOLINT: implicit by design
    Dual(double x, std::size_t n, std::size_t i) : v(x), d(n, 0.0) { d[i] = 1.0; }

    double grad(std::size_t i) const { return i < d.size() ? d[i] : 0.0; }

    static std::vector<double> combine(const std::vector<double>& a, double ca, const std::vector<double>& b, double cb) {
        std::vector<double> out(std::max(a.size(), b.size()), 0.0);
        for (std::size_t i = 0; i < a.size(); ++i) out[i] += ca * a[i];
        for (std::size_t i = 0; i < b.size(); ++i) out[i] += cb * b[i];
        return out;
    }

    friend Dual operator+(const Dual& a, const Dual& b) {
        Dual r(a.v + b.v);
        r.d = combine(a.d, 1.0, b.d, 1.0);
        return r;
    }
    friend Dual operator-(const Dual& a, const Dual& b) {
        Dual r(a.v - b.v);
        r.d = combine(a.d, 1.0, b.d, -1.0);
        return r;
    }
    friend Dual operator*(const Dual& a, const Dual& b) {
        Dual r(a.v * b.v);
        r.d = combine(a.d, b.v, b.d, a.v);
        return r;
    }
    friend Dual operator-(const Dual& a) {
        Dual r(-a.v);
        r.d = combine(a.d, -1.0, {}, 0.0);
        return r;
    }
    Dual& operator+=(const Dual& b) { return *this = *this + b; }
    friend bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
    friend Dual exp(const Dual& a) {
        Dual r(std::exp(a.v));
        r.d = combine(a.d, r.v, {}, 0.0);
        return r;
    }
    friend Dual log(const Dual& a) {
        Dual r(std::log(a.v));
        r.d = combine(a.d, 1.0 / a.v, {}, 0.0);
        return r;
    }
};

inline std::filesystem::path temp_dir(const std::string& name) {
    std::filesystem::path p = std::filesystem::path(GASRANK_TEST_TMP) / name;
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

inline void write(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CommandResult {
    int exit_code = -1;
    std::string output;
};

// Runs the CLI with stdout and stderr captured.
inline CommandResult run_cli(const std::string& args, const std::filesystem::path& work) {
    const auto log = work / "cli_output.txt";
    const std::string cmd = std::string(GASRANK_CLI) + " " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    CommandResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.output = slurp(log);
    return r;
}

// Two teams A and B; A wins `wins` of `editions`.
inline gasrank::PanelDataset two_team_panel(int wins, int editions) {
    gasrank::PanelDataset p;
    p.teams = {"A", "B"};
    for (int t = 0; t < editions; ++t) {
        gasrank::Edition e;
        e.label = std::to_string(2001 + t);
        e.participants = {0, 1};
        e.ranking = gasrank::Ranking(t < wins ? std::vector<TeamId>{0, 1} : std::vector<TeamId>{1, 0});
        p.editions.push_back(std::move(e));
    }
    return p;
}

}  // namespace oracle
