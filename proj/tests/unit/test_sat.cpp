#include <doctest.h>

#include "oracles.hpp"
#include "unsolv/error.hpp"
#include "unsolv/rng.hpp"
#include "unsolv/sat.hpp"

using namespace unsolv;
using namespace unsolv::sat;

namespace {

CnfFormula random_3cnf(Rng& rng, int vars, int clauses) {
    CnfFormula f(vars);
    for (int c = 0; c < clauses; ++c) {
        Clause clause;
        for (int k = 0; k < 3; ++k)
            clause.push_back(Literal{static_cast<int>(rng.uniform_int(1, vars)), rng.bernoulli(0.5)});
        f.add_clause(clause);
    }
    return f;
}

CnfFormula pigeonhole(int pigeons, int holes) {
    CnfFormula f(pigeons * holes);
    const auto var = [&](int p, int h) { return p * holes + h + 1; };
    for (int p = 0; p < pigeons; ++p) {
        Clause some;
        for (int h = 0; h < holes; ++h) some.push_back(pos(var(p, h)));
        f.add_clause(some);
    }
    for (int h = 0; h < holes; ++h)
        for (int p = 0; p < pigeons; ++p)
            for (int q = p + 1; q < pigeons; ++q) f.add_clause({neg(var(p, h)), neg(var(q, h))});
    return f;
}

}  // namespace

TEST_SUITE("sat") {
    TEST_CASE("exactly_one shapes") {
        const Literal a = pos(1), b = pos(2), c = pos(3);
        const std::vector<Literal> two{a, b};
        const auto pair = exactly_one(two);
        REQUIRE(pair.size() == 2);
        CHECK(pair[0] == Clause{a, b});
        CHECK(pair[1] == Clause{~a, ~b});

        const std::vector<Literal> one{a};
        const auto single = exactly_one(one);
        REQUIRE(single.size() == 1);
        CHECK(single[0] == Clause{a});

        const std::vector<Literal> three{a, b, c};
        const auto trio = exactly_one(three);
        CHECK(trio.size() == 4);
        CnfFormula f(3);
        f.add_clauses(trio);
        CHECK(oracle::truth_table_models(f) == 3);

        CHECK_THROWS_AS(exactly_one(std::span<const Literal>{}), EmptyInput);
    }

    TEST_CASE("exactly_one over mixed polarities keeps the contract") {
        const std::vector<Literal> lits{pos(1), neg(2), pos(3), neg(4)};
        CnfFormula f(4);
        f.add_clauses(exactly_one(lits));
        for (std::uint64_t bits = 0; bits < 16; ++bits) {
            int true_lits = 0;
            for (const auto& l : lits) true_lits += (((bits >> (l.variable - 1)) & 1) != 0) == l.positive;
            bool all = true;
            for (const auto& cl : f.clauses()) all = all && oracle::clause_holds(cl, bits);
            CHECK(all == (true_lits == 1));
        }
    }

    TEST_CASE("solve examples") {
        const auto empty = solve(CnfFormula(4));
        REQUIRE(std::holds_alternative<Sat>(empty));
        const auto& m = std::get<Sat>(empty).model;
        for (int v = 1; v <= 4; ++v) CHECK_FALSE(m[v]);

        CnfFormula contra(1);
        contra.add_clause({pos(1)});
        contra.add_clause({neg(1)});
        CHECK(std::holds_alternative<Unsat>(solve(contra)));

        const auto php = pigeonhole(3, 2);
        CHECK(php.variable_count() == 6);
        CHECK_FALSE(oracle::truth_table_sat(php));
        CHECK(std::holds_alternative<Unsat>(solve(php)));
        CHECK(std::holds_alternative<Unsat>(solve(php, {.branching = Branching::LowestIndex})));
        CHECK(std::holds_alternative<Unsat>(solve(pigeonhole(6, 5))));
        CHECK(std::holds_alternative<Sat>(solve(pigeonhole(5, 5))));
    }

    TEST_CASE("insert-time normalization") {
        CnfFormula f(3);
        CHECK_FALSE(f.add_clause({pos(1), neg(1)}));
        CHECK(f.clauses().empty());
        CHECK(f.add_clause({pos(2), pos(2), neg(3)}));
        CHECK(f.clauses().back().size() == 2);
        CHECK_THROWS_AS(f.add_clause({}), InvalidArgument);
        CHECK_THROWS_AS(f.add_clause({pos(4)}), InvalidArgument);
        CHECK_THROWS_AS(f.add_clause({Literal{0, true}}), InvalidArgument);
    }

    TEST_CASE("random 3-CNF agrees with the truth table under both heuristics") {
        Rng rng(1234);
        for (int i = 0; i < 300; ++i) {
            const int vars = static_cast<int>(rng.uniform_int(3, 12));
            const int clauses = static_cast<int>(rng.uniform_int(1, 6 * vars));
            const auto f = random_3cnf(rng, vars, clauses);
            const bool expected = oracle::truth_table_sat(f);
            for (Branching b : {Branching::Activity, Branching::LowestIndex}) {
                const auto r = solve(f, {.branching = b});
                REQUIRE(std::holds_alternative<Sat>(r) == expected);
                if (expected) {
                    CHECK(oracle::model_satisfies(f, std::get<Sat>(r).model));
                    CHECK(evaluate(f, std::get<Sat>(r).model));
                }
            }
            const auto restarted = solve(f, {.restart_unit = 2});
            CHECK(std::holds_alternative<Sat>(restarted) == expected);
        }
    }

    TEST_CASE("evaluate agrees with the independent check") {
        Rng rng(8);
        for (int i = 0; i < 200; ++i) {
            const auto f = random_3cnf(rng, 6, 10);
            Assignment a;
            a.values.assign(7, false);
            for (int v = 1; v <= 6; ++v) a.values[static_cast<std::size_t>(v)] = rng.bernoulli(0.5);
            CHECK(evaluate(f, a) == oracle::model_satisfies(f, a));
        }
    }

    TEST_CASE("determinism") {
        Rng rng(55);
        for (int i = 0; i < 50; ++i) {
            const auto f = random_3cnf(rng, 14, 40);
            const auto a = solve(f), b = solve(f);
            REQUIRE(a.index() == b.index());
            if (std::holds_alternative<Sat>(a)) CHECK(std::get<Sat>(a).model == std::get<Sat>(b).model);
        }
    }

    TEST_CASE("budget exhaustion is not Unsat") {
        CHECK_THROWS_AS(solve(pigeonhole(7, 6), {.propagation_budget = 10}), ResourceLimit);
    }

    TEST_CASE("stats are filled in") {
        SolveStats stats;
        solve(pigeonhole(5, 4), {}, &stats);
        CHECK(stats.conflicts > 0);
        CHECK(stats.decisions > 0);
        CHECK(stats.propagations > 0);
    }

    TEST_CASE("DIMACS round-trip") {
        Rng rng(9);
        const auto f = random_3cnf(rng, 8, 20);
        const auto text = f.to_dimacs();
        CHECK(text.rfind("p cnf 8 ", 0) == 0);
        const auto back = CnfFormula::from_dimacs(text);
        CHECK(back.variable_count() == f.variable_count());
        CHECK(back.clauses() == f.clauses());
        const auto parsed = CnfFormula::from_dimacs("c comment\np cnf 2 2\n1 -2 0\n2 0\n");
        CHECK(parsed.clauses().size() == 2);
        CHECK(std::holds_alternative<Sat>(solve(parsed)));
    }
}
