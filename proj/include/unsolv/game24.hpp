#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "unsolv/instance.hpp"
#include "unsolv/rational.hpp"

namespace unsolv::game24 {

inline constexpr int kTarget = 24;
inline constexpr int kMinValue = 1;
inline constexpr int kMaxValue = 13;

/// Multiset of card values. `make` enforces the production contract
/// (k in [4, 6], values in [1, 13]); `fixture` skips the count check.
class NumberSet {
public:
    static NumberSet make(std::vector<int> numbers);
    static NumberSet fixture(std::vector<int> numbers);

    std::span<const int> numbers() const noexcept { return numbers_; }
    std::size_t size() const noexcept { return numbers_.size(); }
    /// Ascending copy; the dedup key within a generation run.
    std::vector<int> sorted() const;

private:
    explicit NumberSet(std::vector<int> numbers) : numbers_(std::move(numbers)) {}
    std::vector<int> numbers_;
};

/// Immutable binary expression tree; subtrees are shared.
class ExpressionTree {
public:
    static ExpressionTree leaf(int value);
    static ExpressionTree node(ArithOp op, ExpressionTree left, ExpressionTree right);

    bool is_leaf() const noexcept { return !node_; }
    int leaf_value() const noexcept { return value_; }
    ArithOp op() const noexcept;
    const ExpressionTree& left() const noexcept;
    const ExpressionTree& right() const noexcept;

    /// Throws DivisionByZero if any subtree divides by zero.
    Rational evaluate() const;
    std::vector<int> leaves() const;
    /// Minimal-parenthesis infix using + - * /.
    std::string to_infix() const;

private:
    struct Node;
    int value_ = 0;
    std::shared_ptr<const Node> node_;
};

struct ExpressionTree::Node {
    ArithOp op;
    ExpressionTree left;
    ExpressionTree right;
};

inline ArithOp ExpressionTree::op() const noexcept { return node_->op; }
inline const ExpressionTree& ExpressionTree::left() const noexcept { return node_->left; }
inline const ExpressionTree& ExpressionTree::right() const noexcept { return node_->right; }


struct Solvable {
    ExpressionTree witness;
};
struct Unsolvable {};
using Classification = std::variant<Solvable, Unsolvable>;

struct ClassifyOptions {
    /// Memoize distinct values per sub-multiset and skip mirrored Add/Mul operands.
    /// Disabled, every labeled tree is visited individually.
    bool pruning = true;
};

struct ClassifyStats {
    /// Labeled trees reached at the root, including ones skipped for division by zero.
    std::uint64_t trees_visited = 0;
    std::uint64_t division_by_zero_skips = 0;
};

Classification classify(const NumberSet& set, ClassifyOptions options = {}, ClassifyStats* stats = nullptr);

/// Visits every labeled tree without early exit and returns how many solve the set.
std::uint64_t count_solutions(const NumberSet& set, ClassifyStats* stats = nullptr);

enum class Rejection : std::uint8_t { ParseError, WrongNumbers, WrongValue, DivisionByZero };
std::string_view to_string(Rejection reason) noexcept;

struct Correct {};
struct Incorrect {
    Rejection reason;
    std::string detail;
};
using AnswerVerdict = std::variant<Correct, Incorrect>;

/// Parses an infix expression (integers, + - * / and the × ÷ − glyphs, parentheses).
/// Throws InvalidArgument with a position on malformed input.
ExpressionTree parse_expression(std::string_view text);

AnswerVerdict check_answer(const NumberSet& set, std::string_view expression_text);

/// Rejection-samples k values in [1, 13] until classify matches `target`.
/// `exclude` holds sorted multisets already used in this run.
PuzzleInstance sample(int k, Label target, std::uint64_t seed, std::uint64_t max_attempts,
                      std::span<const std::vector<int>> exclude = {});

/// Reads the number multiset back out of an instance payload.
NumberSet numbers_from_payload(const Json& payload, bool fixture = false);

Json payload_for(const NumberSet& set);

}  // namespace unsolv::game24
