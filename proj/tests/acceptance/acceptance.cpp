// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any line fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"
#include "revcon_support.hpp"
#include "unsolv/calibration_sim.hpp"
#include "unsolv/dataset.hpp"
#include "unsolv/game24.hpp"
#include "unsolv/hamiltonian.hpp"
#include "unsolv/hitori.hpp"
#include "unsolv/maze.hpp"
#include "unsolv/reward.hpp"
#include "unsolv/rng.hpp"
#include "unsolv/sat.hpp"

using namespace unsolv;

namespace {

// Tolerances and budgets, pinned here rather than scattered through the checks.
constexpr double kThresholdTol = 1e-12;
constexpr double kAdvMeanTol = 1e-9;
constexpr double kAdvStdTol = 1e-6;
constexpr double kRefusalDrop = 0.80;
constexpr double kCollapseFraction = 0.10;
constexpr double kKeepFraction = 0.50;
constexpr int kSimSeeds = 10;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
};

// ---- 1 ------------------------------------------------------------------------------------

Outcome exact_arithmetic() {
    Outcome o;
    const auto r = game24::classify(game24::NumberSet::make({3, 3, 8, 8}));
    o.require(std::holds_alternative<game24::Solvable>(r), "{3,3,8,8} not classified Solvable");
    if (!o.pass) return o;
    const auto& w = std::get<game24::Solvable>(r).witness;
    o.require(w.evaluate() == Rational(24), "witness does not evaluate to 24/1");
    // The float reference only finds 8/(3-8/3) once a tolerance is allowed.
    const bool float_exact = oracle::float_solvable({3, 3, 8, 8}, 0.0);
    const bool float_eps = oracle::float_solvable({3, 3, 8, 8}, 1e-9);
    o.require(!float_exact && float_eps, "float reference did not need an epsilon");
    if (o.pass) o.detail = "witness " + w.to_infix() + " = 24/1; float == misses it, float with 1e-9 finds it";
    return o;
}

// ---- 2 ------------------------------------------------------------------------------------

Outcome game24_oracle() {
    Outcome o;
    Rng rng(2);
    int agree = 0;
    for (int i = 0; i < 200; ++i) {
        std::vector<int> nums(4);
        for (auto& x : nums) x = static_cast<int>(rng.uniform_int(1, 13));
        const bool mine = std::holds_alternative<game24::Solvable>(game24::classify(game24::NumberSet::make(nums)));
        agree += mine == oracle::fraction_solvable(nums);
    }
    o.require(agree == 200, "agreement " + std::to_string(agree) + "/200");
    game24::ClassifyStats stats;
    game24::classify(game24::NumberSet::make({1, 1, 1, 1}), {.pruning = false}, &stats);
    const auto oracle_trees = oracle::all_tree_values({1, 2, 3, 4}).size();
    o.require(stats.trees_visited == 7680 && oracle_trees == 7680, "visit count " + std::to_string(stats.trees_visited));
    if (o.pass) o.detail = "200/200 agree; 7680 labeled trees visited";
    return o;
}

// ---- 3 ------------------------------------------------------------------------------------

Outcome sat_correctness() {
    Outcome o;
    Rng rng(3);
    int agree = 0, sat_models = 0, sat_count = 0;
    for (int i = 0; i < 300; ++i) {
        const int vars = static_cast<int>(rng.uniform_int(3, 16));
        // Clause/variable ratio spread around the 4.26 phase transition.
        const int clauses = std::max(1, static_cast<int>(vars * (2.0 + 4.0 * rng.uniform01())));
        sat::CnfFormula f(vars);
        for (int c = 0; c < clauses; ++c) {
            sat::Clause clause;
            for (int k = 0; k < 3; ++k) clause.push_back(sat::Literal{static_cast<int>(rng.uniform_int(1, vars)), rng.bernoulli(0.5)});
            f.add_clause(clause);
        }
        const bool expected = oracle::truth_table_sat(f);
        const auto r = sat::solve(f);
        const bool got = std::holds_alternative<sat::Sat>(r);
        agree += got == expected;
        if (got) {
            ++sat_count;
            sat_models += oracle::model_satisfies(f, std::get<sat::Sat>(r).model);
        }
    }
    o.require(agree == 300, "agreement " + std::to_string(agree) + "/300");
    o.require(sat_models == sat_count, "a Sat model failed clause evaluation");
    if (o.pass) o.detail = "300/300 agree (" + std::to_string(sat_count) + " Sat, all models check)";
    return o;
}

// ---- 4 ------------------------------------------------------------------------------------

Outcome hamiltonian_oracle() {
    Outcome o;
    Rng rng(4);
    int agree = 0;
    for (int i = 0; i < 100; ++i) {
        const int n = static_cast<int>(rng.uniform_int(2, 8));
        const double density = 0.15 + 0.8 * (i % 10) / 9.0;
        auto g = ham::Graph::empty(n);
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (rng.bernoulli(density)) g.add_edge(u, v);
        bool both = true;
        for (ham::Mode mode : {ham::Mode::Cycle, ham::Mode::Path}) {
            const auto d = ham::decide(g, mode);
            const bool got = std::holds_alternative<ham::Solvable>(d);
            both = both && got == oracle::brute_force_traversal(g, mode);
            if (got) both = both && ham::check_sequence(g, std::get<ham::Solvable>(d).order, mode);
        }
        agree += both;
    }
    o.require(agree == 100, "agreement " + std::to_string(agree) + "/100");
    for (int n = 3; n <= 8; ++n)
        for (ham::Mode mode : {ham::Mode::Cycle, ham::Mode::Path})
            o.require(std::holds_alternative<ham::Solvable>(ham::decide(ham::Graph::complete(n), mode)), "K_" + std::to_string(n) + " not Solvable");
    if (o.pass) o.detail = "100/100 agree in both modes; K_3..K_8 Solvable";
    return o;
}

// ---- 5 ------------------------------------------------------------------------------------

Outcome hitori_counting() {
    Outcome o;
    Rng rng(5);
    int agree = 0;
    for (int i = 0; i < 100; ++i) {
        const int n = static_cast<int>(rng.uniform_int(1, 4));
        std::vector<std::vector<int>> rows(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n)));
        for (auto& row : rows)
            for (auto& x : row) x = static_cast<int>(rng.uniform_int(1, n));
        const auto grid = hitori::Grid::from_rows(rows);
        const std::uint64_t limit = (std::uint64_t{1} << (n * n)) + 1;
        agree += hitori::count_solutions(grid, limit) == oracle::hitori_brute_count(grid);
    }
    o.require(agree == 100, "agreement " + std::to_string(agree) + "/100");
    const auto ones = hitori::Grid::from_rows({{1, 1}, {1, 1}});
    o.require(hitori::count_solutions(ones, 16) == 0, "[[1,1],[1,1]] has solutions");
    if (o.pass) o.detail = "100/100 match the 2^(n^2) enumeration; [[1,1],[1,1]] counts 0";
    return o;
}

// ---- 6 ------------------------------------------------------------------------------------

Outcome maze_certification() {
    Outcome o;
    int reachable = 0, blocked = 0, clean_diffs = 0;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        const int side = seed % 2 ? 11 : 7;
        const auto s = maze::generate(side, side, Label::Solvable, seed);
        const auto sm = maze::maze_from_payload(s.payload);
        reachable += std::holds_alternative<maze::Reachable>(maze::solve_bfs(sm));

        const auto u = maze::generate(side, side, Label::Unsolvable, seed);
        const auto um = maze::maze_from_payload(u.payload);
        blocked += std::holds_alternative<maze::Unreachable>(maze::solve_bfs(um));
        bool only_open_to_wall = true;
        for (int r = 0; r < side; ++r)
            for (int c = 0; c < side; ++c) {
                const auto before = sm.at({r, c}), after = um.at({r, c});
                if (before != after && !(before == maze::Tile::Open && after == maze::Tile::Wall)) only_open_to_wall = false;
            }
        clean_diffs += only_open_to_wall;
    }
    o.require(reachable == 500, "reachable " + std::to_string(reachable) + "/500");
    o.require(blocked == 500, "unreachable " + std::to_string(blocked) + "/500");
    o.require(clean_diffs == 500, "Open->Wall-only diffs " + std::to_string(clean_diffs) + "/500");
    if (o.pass) o.detail = "500 solvable Reachable, 500 blocked Unreachable, all diffs Open->Wall";
    return o;
}

// ---- 7 ------------------------------------------------------------------------------------

Outcome threshold_constants() {
    Outcome o;
    const double a = decision_threshold(0.1, 0.0);
    const double b = decision_threshold(0.1, -0.5);
    o.require(std::fabs(a - 1.0 / 11.0) <= kThresholdTol, "threshold(0.1, 0) = " + std::to_string(a));
    o.require(b == 0.375, "threshold(0.1, -0.5) is not exactly 0.375");
    o.require(a < 0.0910 && a > 0.0909, "threshold(0.1, 0) does not round to 0.09");
    if (o.pass) {
        std::ostringstream s;
        s.precision(17);
        s << "threshold(0.1, 0) = " << a << ", threshold(0.1, -0.5) = " << b;
        o.detail = s.str();
    }
    return o;
}

// ---- 8 ------------------------------------------------------------------------------------

Outcome reward_table() {
    Outcome o;
    const RewardConfig cfg;  // rho = -0.5, lambda = 1
    const double tau = 0.6;
    struct Cell {
        Label label;
        ResponseKind kind;
        std::optional<bool> correct;
        double beta;
        double expected;
    };
    const double lam = cfg.lambda;
    const std::vector<Cell> cells{
        {Label::Solvable, Answer{"a"}, true, 0.5, 1.0},
        {Label::Solvable, Answer{"a"}, false, 0.5, 0.0},
        {Label::Solvable, UnsolvableTag{}, std::nullopt, 0.5, -0.5},
        {Label::Solvable, RefusalTag{}, std::nullopt, 0.25, lam * (tau - 0.25)},
        {Label::Solvable, RefusalTag{}, std::nullopt, 0.75, lam * (tau - 0.75)},
        {Label::Solvable, Malformed{}, std::nullopt, 0.5, 0.0},
        {Label::Unsolvable, Answer{"a"}, true, 0.5, 0.0},
        {Label::Unsolvable, Answer{"a"}, false, 0.5, 0.0},
        {Label::Unsolvable, UnsolvableTag{}, std::nullopt, 0.5, 1.0},
        {Label::Unsolvable, RefusalTag{}, std::nullopt, 0.25, lam * (tau - 0.25)},
        {Label::Unsolvable, RefusalTag{}, std::nullopt, 0.75, lam * (tau - 0.75)},
        {Label::Unsolvable, Malformed{}, std::nullopt, 0.5, 0.0},
    };
    int matched = 0;
    for (const auto& c : cells) {
        const auto part = score(c.label, c.kind, c.correct, cfg);
        const double total = part.total + calibration_reward(c.kind, tau, c.beta, cfg.lambda);
        matched += std::fabs(total - c.expected) <= 1e-15;
    }
    o.require(matched == 12, "table cells matched " + std::to_string(matched) + "/12");

    // Additivity: every (label, kind, correctness) over a grid of rho, lambda, tau, beta.
    int checked = 0;
    const std::vector<ResponseKind> kinds{Answer{"a"}, UnsolvableTag{}, RefusalTag{}, Malformed{}};
    for (double rho : {0.0, -0.25, -0.5, -1.0})
        for (double lambda : {0.5, 1.0, 2.0})
            for (int t = 0; t <= 10; ++t)
                for (int b = 0; b <= 10; ++b)
                    for (Label label : {Label::Solvable, Label::Unsolvable})
                        for (const auto& kind : kinds)
                            for (int flag = 0; flag < (std::holds_alternative<Answer>(kind) ? 2 : 1); ++flag) {
                                RewardConfig rc;
                                rc.rho = rho;
                                rc.lambda = lambda;
                                std::optional<bool> corr;
                                if (std::holds_alternative<Answer>(kind)) corr = flag == 1;
                                const auto p = score(label, kind, corr, rc);
                                const auto whole = RewardBreakdown::of(p.r_acc, p.r_detect, calibration_reward(kind, t / 10.0, b / 10.0, lambda));
                                const bool ok = whole.total == whole.r_acc + whole.r_detect + whole.r_cal && (p.r_acc == 0 || p.r_detect == 0);
                                o.require(ok, "additivity failed");
                                ++checked;
                            }
    if (o.pass) o.detail = "12/12 cells; additivity over " + std::to_string(checked) + " combinations";
    return o;
}

// ---- 9 ------------------------------------------------------------------------------------

Outcome advantages() {
    Outcome o;
    Rng rng(9);
    int non_constant = 0;
    double worst_mean = 0, lo = 1, hi = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto g = static_cast<std::size_t>(rng.uniform_int(2, 16));
        std::vector<double> r(g);
        // Composite rewards on a 0.05 grid over [-1.5, 1]. The epsilon in the denominator caps
        // std(A) at sigma / (sigma + 1e-8), so the lower bound needs sigma >= 1e-2, which any
        // non-constant group on this grid has.
        for (auto& x : r) x = static_cast<double>(rng.uniform_int(-30, 20)) * 0.05;
        const auto adv = group_advantages(r);
        const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / static_cast<double>(g);
        worst_mean = std::max(worst_mean, std::fabs(mean));
        if (std::all_of(r.begin(), r.end(), [&](double x) { return x == r[0]; })) continue;
        ++non_constant;
        double var = 0;
        for (double x : adv) var += (x - mean) * (x - mean);
        const double sd = std::sqrt(var / static_cast<double>(g));
        lo = std::min(lo, sd);
        hi = std::max(hi, sd);
    }
    o.require(worst_mean <= kAdvMeanTol, "mean(A) reached " + std::to_string(worst_mean));
    o.require(lo >= 1 - kAdvStdTol && hi <= 1.0, "std(A) outside [1-1e-6, 1]");
    if (o.pass) {
        std::ostringstream s;
        s << non_constant << " non-constant groups; max |mean| " << worst_mean << ", std in [" << std::setprecision(12) << lo << ", " << hi << "]";
        o.detail = s.str();
    }
    return o;
}

// ---- 10 -----------------------------------------------------------------------------------

Outcome dynamics() {
    Outcome o;
    int a_ok = 0, b_ok = 0, c_ok = 0;
    double worst_drop = 1, worst_collapse = 0, worst_keep = 1e9;
    for (int seed = 0; seed < kSimSeeds; ++seed) {
        // (a) solvable-easy only, tau fixed below the starting accuracy, so beta > tau throughout.
        sim::SimConfig fixed;
        fixed.seed = static_cast<std::uint64_t>(seed);
        fixed.mix = sim::Mix{1.0, 0.0, 0.0};
        fixed.reward.tau = TauSchedule::fixed(0.25);
        const auto fa = sim::summarize(sim::simulate(fixed));
        const double drop = 1 - fa.refusal_rate.final_window / fa.refusal_rate.initial;
        worst_drop = std::min(worst_drop, drop);
        // A single step-0 group is too noisy to gate on; the run-average beta must sit above tau.
        a_ok += drop >= kRefusalDrop && fa.beta.area > 0.25;

        // (b) rho = -0.5 with no unsolvable instances in training.
        sim::SimConfig starved;
        starved.seed = static_cast<std::uint64_t>(seed);
        starved.include_unsolvable_data = false;
        const auto fb = sim::summarize(sim::simulate(starved));
        const double ratio = fb.declare_rate.final_window / fb.declare_rate.initial;
        worst_collapse = std::max(worst_collapse, ratio);
        b_ok += ratio < kCollapseFraction;

        // (c) rho = -0.5 against rho = 0, both with unsolvable data.
        sim::SimConfig with;
        with.seed = static_cast<std::uint64_t>(seed);
        sim::SimConfig without = with;
        without.reward.rho = 0.0;
        const auto pw = sim::summarize(sim::simulate(with));
        const auto pn = sim::summarize(sim::simulate(without));
        const double keep = pw.declare_rate.final_window / pn.declare_rate.final_window;
        worst_keep = std::min(worst_keep, keep);
        c_ok += keep >= kKeepFraction && pw.solvable_accuracy.final_window >= pn.solvable_accuracy.final_window;
    }
    o.require(a_ok == kSimSeeds, "(a) held on " + std::to_string(a_ok) + "/10 seeds");
    o.require(b_ok == kSimSeeds, "(b) held on " + std::to_string(b_ok) + "/10 seeds");
    o.require(c_ok == kSimSeeds, "(c) held on " + std::to_string(c_ok) + "/10 seeds");
    if (o.pass) {
        std::ostringstream s;
        s.precision(3);
        s << "10 seeds: refusal drop >= " << worst_drop << ", starved declare ratio <= " << worst_collapse
          << ", with-penalty declare share >= " << worst_keep;
        o.detail = s.str();
    }
    return o;
}

// ---- 11 -----------------------------------------------------------------------------------

Outcome end_to_end() {
    Outcome o;
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "unsolv_acceptance";
    fs::create_directories(dir);
    // Train-split puzzle rows of the reference dataset.
    const std::vector<std::tuple<std::string, int, int>> rows{
        {"game24", 50, 50}, {"hamcycle", 48, 48}, {"hampath", 50, 50}, {"hitori", 50, 50}, {"maze", 100, 59}};
    std::vector<std::string> files;
    for (const auto& [domain, s, u] : rows) {
        const auto path = (dir / (domain + ".jsonl")).string();
        std::ostringstream out, err;
        const int code = cli::run({"gen", "--domain", domain, "--solvable", std::to_string(s), "--unsolvable", std::to_string(u), "--seed",
                                   "20240601", "--split", "train", "--out", path},
                                  out, err);
        o.require(code == 0, "gen " + domain + " exited " + std::to_string(code) + ": " + err.str());
        files.push_back(path);
    }
    if (!o.pass) return o;

    std::vector<std::string> verify_args{"verify"};
    verify_args.insert(verify_args.end(), files.begin(), files.end());
    std::ostringstream vout, verr;
    const int vcode = cli::run(verify_args, vout, verr);
    o.require(vcode == 0, "verify exited " + std::to_string(vcode) + ": " + verr.str());

    std::vector<std::string> stats_args{"stats", "--json"};
    stats_args.insert(stats_args.end(), files.begin(), files.end());
    std::ostringstream sout, serr;
    o.require(cli::run(stats_args, sout, serr) == 0, "stats failed: " + serr.str());
    if (!o.pass) return o;
    std::map<std::string, std::pair<int, int>> got;
    for (const auto& row : Json::parse(sout.str()))
        if (row.value("split", "") == "train" && row.contains("domain"))
            got[row.at("domain").get<std::string>()] = {row.at("solvable").get<int>(), row.at("unsolvable").get<int>()};
    int total_s = 0, total_u = 0;
    for (const auto& [domain, s, u] : rows) {
        o.require(got.count(domain) && got[domain] == std::pair{s, u}, "stats row for " + domain + " differs");
        total_s += s;
        total_u += u;
    }
    if (o.pass)
        o.detail = "5 domains generated, verify 0 problems, stats rows match (" + std::to_string(total_s) + " solvable / " +
                   std::to_string(total_u) + " unsolvable)";
    return o;
}

// ---- 12 -----------------------------------------------------------------------------------

Outcome reverse_construction() {
    Outcome o;
    using revtest::Stage;
    const auto seed = revtest::sample_seed();
    struct Path {
        const char* name;
        revtest::Replies replies;
        bool retained;
        std::vector<Stage> calls;
        const char* tier;
    };
    revtest::Replies t1;
    revtest::Replies t2;
    t2.tier1 = std::string(revtest::kAnswer);
    revtest::Replies rej;
    rej.tier1 = std::string(revtest::kAnswer);
    rej.tier2 = std::string(revtest::kAnswer);
    const std::vector<Path> paths{
        {"tier1-confirm", t1, true, {Stage::Plan, Stage::Synthesis, Stage::Tier1}, "tier1"},
        {"tier2-confirm", t2, true, {Stage::Plan, Stage::Synthesis, Stage::Tier1, Stage::Tier2}, "tier2"},
        {"both-reject", rej, false, {Stage::Plan, Stage::Synthesis, Stage::Tier1, Stage::Tier2}, ""},
    };
    for (const auto& p : paths) {
        revcon::ScriptedOracle oracle(revtest::routed(seed, p.replies));
        const auto inst = revcon::run(seed, oracle);
        o.require(inst.has_value() == p.retained, std::string(p.name) + ": wrong retention");
        o.require(revtest::stages(seed, oracle) == p.calls, std::string(p.name) + ": unexpected oracle call sequence");
        if (inst) {
            o.require(inst->label == Label::Unsolvable && inst->domain == Domain::Math, std::string(p.name) + ": wrong label or domain");
            o.require(inst->provenance.at("verdict").at("tier") == p.tier, std::string(p.name) + ": wrong tier in provenance");
        }
    }
    if (o.pass) o.detail = "tier1-confirm kept, tier2-confirm kept, both-reject discarded; scripted oracle only";
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int number;
        double budget_seconds;  // 0 means no runtime bound
        std::function<Outcome()> check;
    };
    const std::vector<Criterion> criteria{
        {1, 1, exact_arithmetic},     {2, 30, game24_oracle},    {3, 60, sat_correctness},   {4, 60, hamiltonian_oracle},
        {5, 60, hitori_counting},     {6, 30, maze_certification}, {7, 0, threshold_constants}, {8, 0, reward_table},
        {9, 0, advantages},           {10, 60, dynamics},        {11, 300, end_to_end},      {12, 0, reverse_construction},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.check();
        } catch (const std::exception& e) {
            out = Outcome{false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_seconds > 0 && secs > c.budget_seconds && out.pass) {
            out.pass = false;
            out.detail += " (over the " + std::to_string(static_cast<int>(c.budget_seconds)) + " s budget)";
        }
        failures += !out.pass;
        std::ostringstream t;
        t.precision(3);
        t << std::fixed << secs;
        std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << c.number << ": " << out.detail << " [" << t.str() << " s]" << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
