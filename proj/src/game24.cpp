#include "unsolv/game24.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <unordered_map>

#include "unsolv/error.hpp"
#include "unsolv/prompts.hpp"
#include "unsolv/rng.hpp"

namespace unsolv::game24 {

namespace {

constexpr std::array<ArithOp, 4> kOps = {ArithOp::Add, ArithOp::Sub, ArithOp::Mul, ArithOp::Div};

void check_values(const std::vector<int>& numbers) {
    for (int v : numbers)
        if (v < kMinValue || v > kMaxValue)
            throw InvalidArgument("game24 value " + std::to_string(v) + " outside [1, 13]");
}

// Non-owning callable reference; avoids std::function allocation in the hot loop.
template <typename Signature>
class FunctionRef;

template <typename R, typename... Args>
class FunctionRef<R(Args...)> {
public:
    template <typename F>
    FunctionRef(F& f) noexcept  // NOLINT(implicit)
        : obj_(&f), call_([](void* o, Args... args) -> R { return (*static_cast<F*>(o))(args...); }) {}

    R operator()(Args... args) const { return call_(obj_, args...); }

private:
    void* obj_;
    R (*call_)(void*, Args...);
};

// A tree under construction during exhaustive enumeration. Children live on
// the enclosing stack frames for as long as the visitor runs.
struct Frame {
    bool valid = true;
    Rational value;
    int leaf = 0;
    ArithOp op = ArithOp::Add;
    const Frame* left = nullptr;
    const Frame* right = nullptr;
};

ExpressionTree materialize(const Frame& f) {
    if (!f.left) return ExpressionTree::leaf(f.leaf);
    return ExpressionTree::node(f.op, materialize(*f.left), materialize(*f.right));
}

class Exhaustive {
public:
    explicit Exhaustive(std::span<const int> numbers) : numbers_(numbers) {}

    // Calls `visit` for every labeled tree over the leaves in `mask`; stops when it returns false.
    bool enumerate(unsigned mask, FunctionRef<bool(const Frame&)> visit) {
        if (std::has_single_bit(mask)) {
            Frame f;
            f.leaf = numbers_[static_cast<std::size_t>(std::countr_zero(mask))];
            f.value = Rational(f.leaf);
            return visit(f);
        }
        for (unsigned left = (mask - 1) & mask; left != 0; left = (left - 1) & mask) {
            const unsigned right = mask ^ left;
            auto on_left = [&](const Frame& lf) {
                auto on_right = [&](const Frame& rf) {
                    for (ArithOp op : kOps) {
                        Frame f;
                        f.op = op;
                        f.left = &lf;
                        f.right = &rf;
                        if (!lf.valid || !rf.valid || (op == ArithOp::Div && rf.value.is_zero())) {
                            f.valid = false;
                        } else {
                            f.value = rational_apply(op, lf.value, rf.value);
                        }
                        if (!visit(f)) return false;
                    }
                    return true;
                };
                return enumerate(right, on_right);
            };
            if (!enumerate(left, on_left)) return false;
        }
        return true;
    }

private:
    std::span<const int> numbers_;
};

// Distinct values reachable from one sub-multiset, with one derivation each.
struct Derived {
    Rational value;
    ArithOp op = ArithOp::Add;
    unsigned left_mask = 0;
    std::uint32_t left_index = 0;
    std::uint32_t right_index = 0;
};

class Memoized {
public:
    Memoized(std::span<const int> numbers, ClassifyStats& stats)
        : numbers_(numbers), stats_(stats), table_(std::size_t{1} << numbers.size()) {}

    std::optional<ExpressionTree> solve() {
        const unsigned full = (1u << numbers_.size()) - 1;
        const Rational target(kTarget);
        if (numbers_.size() == 1) {
            ++stats_.trees_visited;
            if (Rational(numbers_[0]) == target) return ExpressionTree::leaf(numbers_[0]);
            return std::nullopt;
        }
        for (unsigned left = (full - 1) & full; left != 0; left = (left - 1) & full) {
            const unsigned right = full ^ left;
            const auto& lv = values(left);
            const auto& rv = values(right);
            for (std::uint32_t i = 0; i < lv.size(); ++i) {
                for (std::uint32_t j = 0; j < rv.size(); ++j) {
                    for (ArithOp op : kOps) {
                        if ((op == ArithOp::Add || op == ArithOp::Mul) && left > right) continue;
                        ++stats_.trees_visited;
                        if (op == ArithOp::Div && rv[j].value.is_zero()) {
                            ++stats_.division_by_zero_skips;
                            continue;
                        }
                        if (rational_apply(op, lv[i].value, rv[j].value) == target)
                            return ExpressionTree::node(op, rebuild(left, i), rebuild(right, j));
                    }
                }
            }
        }
        return std::nullopt;
    }

private:
    const std::vector<Derived>& values(unsigned mask) {
        auto& slot = table_[mask];
        if (!slot.empty()) return slot;
        if (std::has_single_bit(mask)) {
            slot.push_back(Derived{Rational(numbers_[static_cast<std::size_t>(std::countr_zero(mask))])});
            return slot;
        }
        std::unordered_map<Rational, std::uint32_t> seen;
        for (unsigned left = (mask - 1) & mask; left != 0; left = (left - 1) & mask) {
            const unsigned right = mask ^ left;
            const auto& lv = values(left);
            const auto& rv = values(right);
            for (std::uint32_t i = 0; i < lv.size(); ++i) {
                for (std::uint32_t j = 0; j < rv.size(); ++j) {
                    for (ArithOp op : kOps) {
                        if ((op == ArithOp::Add || op == ArithOp::Mul) && left > right) continue;
                        if (op == ArithOp::Div && rv[j].value.is_zero()) {
                            ++stats_.division_by_zero_skips;
                            continue;
                        }
                        Rational v = rational_apply(op, lv[i].value, rv[j].value);
                        if (seen.emplace(v, static_cast<std::uint32_t>(slot.size())).second)
                            slot.push_back(Derived{v, op, left, i, j});
                    }
                }
            }
        }
        return slot;
    }

    ExpressionTree rebuild(unsigned mask, std::uint32_t index) {
        const Derived& d = table_[mask][index];
        if (std::has_single_bit(mask)) return ExpressionTree::leaf(numbers_[static_cast<std::size_t>(std::countr_zero(mask))]);
        return ExpressionTree::node(d.op, rebuild(d.left_mask, d.left_index), rebuild(mask ^ d.left_mask, d.right_index));
    }

    std::span<const int> numbers_;
    ClassifyStats& stats_;
    std::vector<std::vector<Derived>> table_;
};

int precedence(ArithOp op) noexcept { return (op == ArithOp::Add || op == ArithOp::Sub) ? 1 : 2; }

void write_infix(const ExpressionTree& t, std::string& out) {
    if (t.is_leaf()) {
        out += std::to_string(t.leaf_value());
        return;
    }
    const int p = precedence(t.op());
    const auto child = [&](const ExpressionTree& c, bool right_side) {
        bool parens = false;
        if (!c.is_leaf()) {
            const int cp = precedence(c.op());
            parens = cp < p || (right_side && cp == p && (t.op() == ArithOp::Sub || t.op() == ArithOp::Div));
        }
        if (parens) out += '(';
        write_infix(c, out);
        if (parens) out += ')';
    };
    child(t.left(), false);
    out += op_symbol(t.op());
    child(t.right(), true);
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    ExpressionTree parse() {
        ExpressionTree t = expression();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return t;
    }

private:
    ExpressionTree expression() {
        ExpressionTree t = term();
        while (true) {
            if (accept_op({"+"})) t = ExpressionTree::node(ArithOp::Add, t, term());
            else if (accept_op({"-", "\xE2\x88\x92"})) t = ExpressionTree::node(ArithOp::Sub, t, term());
            else return t;
        }
    }

    ExpressionTree term() {
        ExpressionTree t = factor();
        while (true) {
            if (accept_op({"*", "\xC3\x97"})) t = ExpressionTree::node(ArithOp::Mul, t, factor());
            else if (accept_op({"/", "\xC3\xB7"})) t = ExpressionTree::node(ArithOp::Div, t, factor());
            else return t;
        }
    }

    ExpressionTree factor() {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '(') {
            ++pos_;
            ExpressionTree t = expression();
            skip_space();
            if (pos_ >= text_.size() || text_[pos_] != ')') fail("expected ')'");
            ++pos_;
            return t;
        }
        const std::size_t start = pos_;
        long long value = 0;
        while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
            if (pos_ - start >= 9) fail("integer literal too long");
            value = value * 10 + (text_[pos_] - '0');
            ++pos_;
        }
        if (pos_ == start) fail("expected a number or '('");
        return ExpressionTree::leaf(static_cast<int>(value));
    }

    bool accept_op(std::initializer_list<std::string_view> spellings) {
        skip_space();
        for (auto s : spellings) {
            if (text_.substr(pos_, s.size()) == s) {
                pos_ += s.size();
                return true;
            }
        }
        return false;
    }

    void skip_space() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r'))
            ++pos_;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw InvalidArgument(what + " at offset " + std::to_string(pos_));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

NumberSet NumberSet::make(std::vector<int> numbers) {
    if (numbers.size() < 4 || numbers.size() > 6)
        throw InvalidArgument("game24 count must be in [4, 6], got " + std::to_string(numbers.size()));
    check_values(numbers);
    return NumberSet(std::move(numbers));
}

NumberSet NumberSet::fixture(std::vector<int> numbers) {
    if (numbers.empty() || numbers.size() > 8) throw InvalidArgument("game24 fixture needs 1 to 8 values");
    check_values(numbers);
    return NumberSet(std::move(numbers));
}

std::vector<int> NumberSet::sorted() const {
    std::vector<int> out = numbers_;
    std::sort(out.begin(), out.end());
    return out;
}

ExpressionTree ExpressionTree::leaf(int value) {
    ExpressionTree t;
    t.value_ = value;
    return t;
}

ExpressionTree ExpressionTree::node(ArithOp op, ExpressionTree left, ExpressionTree right) {
    ExpressionTree t;
    t.node_ = std::make_shared<const Node>(Node{op, std::move(left), std::move(right)});
    return t;
}

Rational ExpressionTree::evaluate() const {
    if (is_leaf()) return Rational(value_);
    return rational_apply(op(), left().evaluate(), right().evaluate());
}

std::vector<int> ExpressionTree::leaves() const {
    if (is_leaf()) return {value_};
    auto out = left().leaves();
    auto r = right().leaves();
    out.insert(out.end(), r.begin(), r.end());
    return out;
}

std::string ExpressionTree::to_infix() const {
    std::string out;
    write_infix(*this, out);
    return out;
}

Classification classify(const NumberSet& set, ClassifyOptions options, ClassifyStats* stats) {
    ClassifyStats local;
    ClassifyStats& s = stats ? *stats : local;
    if (options.pruning) {
        Memoized solver(set.numbers(), s);
        if (auto tree = solver.solve()) return Solvable{std::move(*tree)};
        return Unsolvable{};
    }
    const Rational target(kTarget);
    std::optional<ExpressionTree> found;
    Exhaustive walker(set.numbers());
    auto visit = [&](const Frame& f) {
        ++s.trees_visited;
        if (!f.valid) {
            ++s.division_by_zero_skips;
            return true;
        }
        if (f.value == target) {
            found = materialize(f);
            return false;
        }
        return true;
    };
    walker.enumerate((1u << set.size()) - 1, visit);
    if (found) return Solvable{std::move(*found)};
    return Unsolvable{};
}

std::uint64_t count_solutions(const NumberSet& set, ClassifyStats* stats) {
    ClassifyStats local;
    ClassifyStats& s = stats ? *stats : local;
    const Rational target(kTarget);
    std::uint64_t hits = 0;
    Exhaustive walker(set.numbers());
    auto visit = [&](const Frame& f) {
        ++s.trees_visited;
        if (!f.valid) ++s.division_by_zero_skips;
        else if (f.value == target) ++hits;
        return true;
    };
    walker.enumerate((1u << set.size()) - 1, visit);
    return hits;
}

std::string_view to_string(Rejection reason) noexcept {
    switch (reason) {
        case Rejection::ParseError: return "parse_error";
        case Rejection::WrongNumbers: return "wrong_numbers";
        case Rejection::WrongValue: return "wrong_value";
        case Rejection::DivisionByZero: return "division_by_zero";
    }
    return "unknown";
}

ExpressionTree parse_expression(std::string_view text) { return Parser(text).parse(); }

AnswerVerdict check_answer(const NumberSet& set, std::string_view expression_text) {
    std::optional<ExpressionTree> tree;
    try {
        tree = parse_expression(expression_text);
    } catch (const InvalidArgument& e) {
        return Incorrect{Rejection::ParseError, e.what()};
    }
    auto used = tree->leaves();
    std::sort(used.begin(), used.end());
    if (used != set.sorted()) return Incorrect{Rejection::WrongNumbers, "leaves do not match the given numbers"};
    try {
        const Rational value = tree->evaluate();
        if (value == Rational(kTarget)) return Correct{};
        return Incorrect{Rejection::WrongValue, "evaluates to " + value.to_string()};
    } catch (const DivisionByZero&) {
        return Incorrect{Rejection::DivisionByZero, "expression divides by zero"};
    }
}

Json payload_for(const NumberSet& set) {
    Json numbers = Json::array();
    for (int v : set.numbers()) numbers.push_back(v);
    return Json{{"numbers", numbers}, {"k", set.size()}, {"target", kTarget}};
}

NumberSet numbers_from_payload(const Json& payload, bool fixture) {
    auto numbers = payload.at("numbers").get<std::vector<int>>();
    return fixture ? NumberSet::fixture(std::move(numbers)) : NumberSet::make(std::move(numbers));
}

PuzzleInstance sample(int k, Label target, std::uint64_t seed, std::uint64_t max_attempts,
                      std::span<const std::vector<int>> exclude) {
    if (k < 4 || k > 6) throw InvalidArgument("game24 count must be in [4, 6]");
    Rng rng(seed);
    for (std::uint64_t attempt = 1; attempt <= max_attempts; ++attempt) {
        std::vector<int> numbers(static_cast<std::size_t>(k));
        for (auto& v : numbers) v = static_cast<int>(rng.uniform_int(kMinValue, kMaxValue));
        const auto set = NumberSet::make(numbers);
        if (std::find(exclude.begin(), exclude.end(), set.sorted()) != exclude.end()) continue;
        auto verdict = classify(set);
        const bool solvable = std::holds_alternative<Solvable>(verdict);
        if (solvable != (target == Label::Solvable)) continue;

        PuzzleInstance inst;
        inst.domain = Domain::Game24;
        inst.label = target;
        inst.difficulty = Difficulty{k == 4 ? Level::Easy : Level::Hard, k};
        inst.seed = seed;
        inst.id = instance_id(inst.domain, inst.difficulty, inst.label, seed);
        inst.payload = payload_for(set);
        if (solvable) inst.witness = std::get<Solvable>(verdict).witness.to_infix();
        inst.prompt = render_prompt(inst.domain, inst.payload);
        inst.provenance = Json{{"generator", "game24.rejection_sampling"},
                               {"attempts", attempt},
                               {"verification", "solver-certified"}};
        return inst;
    }
    throw ExhaustedAttempts("game24 sample k=" + std::to_string(k) + " after " + std::to_string(max_attempts));
}

}  // namespace unsolv::game24
