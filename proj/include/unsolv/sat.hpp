#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace unsolv::sat {

struct Literal {
    int variable = 1;  // 1-based
    bool positive = true;

    Literal operator~() const noexcept { return Literal{variable, !positive}; }
    friend auto operator<=>(const Literal&, const Literal&) = default;
};

inline Literal pos(int variable) noexcept { return Literal{variable, true}; }
inline Literal neg(int variable) noexcept { return Literal{variable, false}; }

using Clause = std::vector<Literal>;

/// Clause database. Duplicate literals are merged and tautologies dropped on insert.
class CnfFormula {
public:
    explicit CnfFormula(int variable_count = 0);

    int variable_count() const noexcept { return variable_count_; }
    const std::vector<Clause>& clauses() const noexcept { return clauses_; }

    int new_variable() noexcept { return ++variable_count_; }

    /// Returns false when the clause was a tautology and therefore not stored.
    /// Throws InvalidArgument for an empty clause or an out-of-range variable.
    bool add_clause(Clause clause);
    void add_clauses(const std::vector<Clause>& clauses);

    std::string to_dimacs() const;
    static CnfFormula from_dimacs(std::string_view text);

private:
    int variable_count_ = 0;
    std::vector<Clause> clauses_;
};

/// Total assignment; index 0 is unused so `values[v]` is variable v.
struct Assignment {
    std::vector<bool> values;

    bool operator[](int variable) const { return values.at(static_cast<std::size_t>(variable)); }
    bool satisfies(const Literal& lit) const { return (*this)[lit.variable] == lit.positive; }
    friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// Clause-by-clause check, independent of the solver's internal state.
bool evaluate(const CnfFormula& formula, const Assignment& assignment);

std::vector<Clause> at_least_one(std::span<const Literal> literals);
/// Pairwise encoding.
std::vector<Clause> at_most_one(std::span<const Literal> literals);
/// at_least_one + at_most_one; throws EmptyInput on an empty list.
std::vector<Clause> exactly_one(std::span<const Literal> literals);

enum class Branching : std::uint8_t {
    LowestIndex,  // lowest unassigned variable, false first
    Activity,     // highest conflict activity, ties to lowest index, false first
};

struct SolverOptions {
    Branching branching = Branching::LowestIndex;
    /// Propagated literals allowed before ResourceLimit is thrown.
    std::uint64_t propagation_budget = 10'000'000;
    /// Conflicts per Luby restart unit; 0 disables restarts.
    std::uint64_t restart_unit = 0;
};

struct SolveStats {
    std::uint64_t decisions = 0;
    std::uint64_t propagations = 0;
    std::uint64_t conflicts = 0;
    std::uint64_t learned = 0;
};

struct Sat {
    Assignment model;
};
struct Unsat {};
using SolveResult = std::variant<Sat, Unsat>;

/// Complete CDCL search. Deterministic for a fixed formula and options.
/// Throws ResourceLimit when the budget runs out; that is never reported as Unsat.
SolveResult solve(const CnfFormula& formula, SolverOptions options = {}, SolveStats* stats = nullptr);

}  // namespace unsolv::sat
