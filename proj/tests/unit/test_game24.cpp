#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "unsolv/error.hpp"
#include "unsolv/game24.hpp"
#include "unsolv/rng.hpp"

using namespace unsolv;
using namespace unsolv::game24;

TEST_SUITE("game24") {
    TEST_CASE("classify examples") {
        auto pair = classify(NumberSet::fixture({4, 6}));
        REQUIRE(std::holds_alternative<Solvable>(pair));
        CHECK(std::get<Solvable>(pair).witness.evaluate() == Rational(24));

        CHECK(std::holds_alternative<Unsolvable>(classify(NumberSet::make({1, 1, 1, 1}))));
        CHECK(std::holds_alternative<Unsolvable>(classify(NumberSet::make({1, 1, 1, 1}), {.pruning = false})));

        for (bool pruning : {true, false}) {
            auto r = classify(NumberSet::make({3, 3, 8, 8}), {.pruning = pruning});
            REQUIRE(std::holds_alternative<Solvable>(r));
            const auto& w = std::get<Solvable>(r).witness;
            CHECK(w.evaluate() == Rational(24));
            auto leaves = w.leaves();
            std::sort(leaves.begin(), leaves.end());
            CHECK(leaves == std::vector<int>{3, 3, 8, 8});
        }
    }

    TEST_CASE("oracle: {1,1,1,1} never exceeds 4") {
        const auto values = oracle::all_tree_values({1, 1, 1, 1});
        CHECK(values.size() == 7680);
        for (const auto& v : values)
            if (v.den != 0) CHECK(v.num <= 4 * v.den);
    }

    TEST_CASE("float reference needs an epsilon for {3,3,8,8}") {
        CHECK_FALSE(oracle::float_solvable({3, 3, 8, 8}, 0.0));
        CHECK(oracle::float_solvable({3, 3, 8, 8}, 1e-9));
        CHECK(oracle::fraction_solvable({3, 3, 8, 8}));
    }

    TEST_CASE("NumberSet contract") {
        CHECK_THROWS_AS(NumberSet::make({1, 2, 3}), InvalidArgument);
        CHECK_THROWS_AS(NumberSet::make({1, 2, 3, 4, 5, 6, 7}), InvalidArgument);
        CHECK_THROWS_AS(NumberSet::make({0, 2, 3, 4}), InvalidArgument);
        CHECK_THROWS_AS(NumberSet::make({14, 2, 3, 4}), InvalidArgument);
        CHECK_NOTHROW(NumberSet::fixture({4, 6}));
        CHECK(NumberSet::make({9, 1, 5, 1}).sorted() == std::vector<int>{1, 1, 5, 9});
    }

    TEST_CASE("visit counter equals 5 * 4! * 4^3 for k = 4") {
        ClassifyStats stats;
        classify(NumberSet::make({1, 1, 1, 1}), {.pruning = false}, &stats);
        CHECK(stats.trees_visited == 7680);
        ClassifyStats all;
        count_solutions(NumberSet::make({2, 5, 7, 11}), &all);
        CHECK(all.trees_visited == 7680);
    }

    TEST_CASE("solution counts match the positional enumerator") {
        Rng rng(2024);
        for (int i = 0; i < 60; ++i) {
            std::vector<int> nums(4);
            for (auto& x : nums) x = static_cast<int>(rng.uniform_int(1, 13));
            const auto hits = count_solutions(NumberSet::make(nums));
            CHECK(hits == oracle::fraction_solution_count(nums));
        }
    }

    TEST_CASE("pruned and exhaustive classification agree with the oracle") {
        Rng rng(77);
        for (int i = 0; i < 300; ++i) {
            std::vector<int> nums(4);
            for (auto& x : nums) x = static_cast<int>(rng.uniform_int(1, 13));
            const auto set = NumberSet::make(nums);
            const bool expected = oracle::fraction_solvable(nums);
            const bool pruned = std::holds_alternative<Solvable>(classify(set));
            const bool full = std::holds_alternative<Solvable>(classify(set, {.pruning = false}));
            REQUIRE(pruned == expected);
            REQUIRE(full == expected);
        }
    }

    TEST_CASE("witness soundness, k = 4..6") {
        Rng rng(3);
        for (int k = 4; k <= 6; ++k) {
            for (int i = 0; i < (k == 6 ? 10 : 40); ++i) {
                std::vector<int> nums(static_cast<std::size_t>(k));
                for (auto& x : nums) x = static_cast<int>(rng.uniform_int(1, 13));
                const auto r = classify(NumberSet::make(nums));
                if (!std::holds_alternative<Solvable>(r)) continue;
                const auto& w = std::get<Solvable>(r).witness;
                CHECK(w.evaluate() == Rational(24));
                auto leaves = w.leaves();
                std::sort(leaves.begin(), leaves.end());
                std::sort(nums.begin(), nums.end());
                CHECK(leaves == nums);
                CHECK(std::holds_alternative<Correct>(check_answer(NumberSet::make(nums), w.to_infix())));
            }
        }
    }

    TEST_CASE("check_answer") {
        const auto pair = NumberSet::fixture({4, 6});
        CHECK(std::holds_alternative<Correct>(check_answer(pair, "(4*6)")));
        CHECK(std::holds_alternative<Correct>(check_answer(pair, " 6 × 4 ")));
        const auto wrong = check_answer(pair, "4+6");
        REQUIRE(std::holds_alternative<Incorrect>(wrong));
        CHECK(std::get<Incorrect>(wrong).reason == Rejection::WrongValue);

        const auto set = NumberSet::make({3, 3, 8, 8});
        CHECK(std::holds_alternative<Correct>(check_answer(set, "8/(3-8/3)")));
        CHECK(std::get<Incorrect>(check_answer(set, "8*3")).reason == Rejection::WrongNumbers);
        CHECK(std::get<Incorrect>(check_answer(set, "8/(3-3)+8")).reason == Rejection::DivisionByZero);
        CHECK(std::get<Incorrect>(check_answer(set, "3*8")).reason == Rejection::WrongNumbers);
        CHECK(std::get<Incorrect>(check_answer(set, "8/(3-8/3")).reason == Rejection::ParseError);
        CHECK(std::get<Incorrect>(check_answer(set, "8^3")).reason == Rejection::ParseError);
        CHECK(std::get<Incorrect>(check_answer(set, "")).reason == Rejection::ParseError);
        CHECK(std::get<Incorrect>(check_answer(set, "-8+3+3+8")).reason == Rejection::ParseError);
    }

    TEST_CASE("parser is left-associative") {
        CHECK(parse_expression("8-3-1").evaluate() == Rational(4));
        CHECK(parse_expression("24/2/3").evaluate() == Rational(4));
        CHECK(parse_expression("2+3*4").evaluate() == Rational(14));
        CHECK(parse_expression("(2+3)*4").evaluate() == Rational(20));
        // Infix rendering re-parses to the same value.
        const auto t = parse_expression("8-(3-1)");
        CHECK(parse_expression(t.to_infix()).evaluate() == Rational(6));
    }

    TEST_CASE("sample") {
        const auto inst = sample(4, Label::Unsolvable, 7, 10000);
        CHECK(inst.label == Label::Unsolvable);
        CHECK(std::holds_alternative<Unsolvable>(classify(numbers_from_payload(inst.payload))));
        CHECK_FALSE(inst.witness.has_value());
        CHECK(inst == sample(4, Label::Unsolvable, 7, 10000));
        CHECK_THROWS_AS(sample(4, Label::Solvable, 3, 0), ExhaustedAttempts);
        CHECK_THROWS_AS(sample(3, Label::Solvable, 3, 10), InvalidArgument);

        for (int k = 4; k <= 6; ++k) {
            const auto s = sample(k, Label::Solvable, 11, 10000);
            REQUIRE(s.witness.has_value());
            const auto set = numbers_from_payload(s.payload);
            CHECK(set.size() == static_cast<std::size_t>(k));
            CHECK(std::holds_alternative<Correct>(check_answer(set, s.witness->get<std::string>())));
            CHECK(s.difficulty.scale == k);
        }
    }

    TEST_CASE("sample honours the exclusion list") {
        const auto first = sample(4, Label::Unsolvable, 7, 10000);
        const std::vector<std::vector<int>> used{numbers_from_payload(first.payload).sorted()};
        const auto second = sample(4, Label::Unsolvable, 7, 10000, used);
        CHECK(numbers_from_payload(second.payload).sorted() != used[0]);
    }

    TEST_CASE("verification path holds no floating point") {
        for (const char* file : {"/src/game24.cpp", "/src/rational.cpp", "/include/unsolv/game24.hpp", "/include/unsolv/rational.hpp"}) {
            std::ifstream in(std::string(UNSOLV_SOURCE_DIR) + file);
            REQUIRE(in);
            std::stringstream text;
            text << in.rdbuf();
            INFO(file);
            CHECK(text.str().find("double") == std::string::npos);
            CHECK(text.str().find("float") == std::string::npos);
        }
    }
}
