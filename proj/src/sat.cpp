#include "unsolv/sat.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "unsolv/error.hpp"

namespace unsolv::sat {

CnfFormula::CnfFormula(int variable_count) : variable_count_(variable_count) {
    if (variable_count < 0) throw InvalidArgument("negative variable count");
}

bool CnfFormula::add_clause(Clause clause) {
    if (clause.empty()) throw InvalidArgument("empty clause");
    for (const auto& lit : clause)
        if (lit.variable < 1 || lit.variable > variable_count_)
            throw InvalidArgument("literal variable " + std::to_string(lit.variable) + " out of range");
    std::sort(clause.begin(), clause.end());
    clause.erase(std::unique(clause.begin(), clause.end()), clause.end());
    for (std::size_t i = 1; i < clause.size(); ++i)
        if (clause[i].variable == clause[i - 1].variable) return false;
    clauses_.push_back(std::move(clause));
    return true;
}

void CnfFormula::add_clauses(const std::vector<Clause>& clauses) {
    for (const auto& c : clauses) add_clause(c);
}

std::string CnfFormula::to_dimacs() const {
    std::ostringstream out;
    out << "p cnf " << variable_count_ << " " << clauses_.size() << "\n";
    for (const auto& c : clauses_) {
        for (const auto& lit : c) out << (lit.positive ? lit.variable : -lit.variable) << " ";
        out << "0\n";
    }
    return out.str();
}

CnfFormula CnfFormula::from_dimacs(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    bool have_header = false;
    long declared_clauses = 0;
    CnfFormula formula;
    Clause pending;
    while (std::getline(in, line)) {
        std::istringstream tokens(line);
        std::string first;
        if (!(tokens >> first) || first == "c" || first[0] == 'c' || first[0] == '%') continue;
        if (first == "p") {
            std::string kind;
            long vars = 0;
            if (!(tokens >> kind >> vars >> declared_clauses) || kind != "cnf" || vars < 0 || declared_clauses < 0)
                throw InvalidArgument("malformed DIMACS header: " + line);
            formula = CnfFormula(static_cast<int>(vars));
            have_header = true;
            continue;
        }
        if (!have_header) throw InvalidArgument("DIMACS clause before header");
        std::istringstream values(line);
        long v = 0;
        while (values >> v) {
            if (v == 0) {
                if (pending.empty()) throw InvalidArgument("empty clause in DIMACS input");
                formula.add_clause(pending);
                pending.clear();
            } else {
                pending.push_back(Literal{static_cast<int>(v < 0 ? -v : v), v > 0});
            }
        }
        if (!values.eof()) throw InvalidArgument("non-integer token in DIMACS clause: " + line);
    }
    if (!have_header) throw InvalidArgument("missing DIMACS header");
    if (!pending.empty()) throw InvalidArgument("unterminated DIMACS clause");
    return formula;
}

bool evaluate(const CnfFormula& formula, const Assignment& assignment) {
    if (assignment.values.size() != static_cast<std::size_t>(formula.variable_count()) + 1) return false;
    for (const auto& clause : formula.clauses()) {
        bool sat = false;
        for (const auto& lit : clause) {
            if (assignment.satisfies(lit)) {
                sat = true;
                break;
            }
        }
        if (!sat) return false;
    }
    return true;
}

std::vector<Clause> at_least_one(std::span<const Literal> literals) {
    if (literals.empty()) throw EmptyInput("at_least_one");
    return {Clause(literals.begin(), literals.end())};
}

std::vector<Clause> at_most_one(std::span<const Literal> literals) {
    std::vector<Clause> out;
    for (std::size_t i = 0; i < literals.size(); ++i)
        for (std::size_t j = i + 1; j < literals.size(); ++j) out.push_back({~literals[i], ~literals[j]});
    return out;
}

std::vector<Clause> exactly_one(std::span<const Literal> literals) {
    if (literals.empty()) throw EmptyInput("exactly_one");
    auto out = at_least_one(literals);
    auto amo = at_most_one(literals);
    out.insert(out.end(), amo.begin(), amo.end());
    return out;
}

namespace {

// Literal code: 2 * (variable - 1) + (negative ? 1 : 0).
using Lit = int;

constexpr int kUnassigned = -1;

// 1, 1, 2, 1, 1, 2, 4, ... (i starting at 1)
std::uint64_t luby(std::uint64_t i) {
    std::uint64_t k = 1;
    while (((std::uint64_t{1} << k) - 1) < i) ++k;
    while (true) {
        if (i == (std::uint64_t{1} << k) - 1) return std::uint64_t{1} << (k - 1);
        i -= (std::uint64_t{1} << (k - 1)) - 1;
        k = 1;
        while (((std::uint64_t{1} << k) - 1) < i) ++k;
    }
}
constexpr int kNoReason = -1;

Lit encode(const Literal& lit) noexcept { return 2 * (lit.variable - 1) + (lit.positive ? 0 : 1); }
int var_of(Lit l) noexcept { return l >> 1; }

class Solver {
public:
    Solver(const CnfFormula& formula, SolverOptions options, SolveStats& stats)
        : options_(options),
          stats_(stats),
          n_(formula.variable_count()),
          value_(static_cast<std::size_t>(n_), kUnassigned),
          level_(static_cast<std::size_t>(n_), 0),
          reason_(static_cast<std::size_t>(n_), kNoReason),
          seen_(static_cast<std::size_t>(n_), 0),
          activity_(static_cast<std::size_t>(n_), 0.0),
          watches_(static_cast<std::size_t>(2 * n_)) {
        for (const auto& c : formula.clauses()) {
            std::vector<Lit> lits;
            lits.reserve(c.size());
            for (const auto& lit : c) lits.push_back(encode(lit));
            initial_.push_back(std::move(lits));
        }
    }

    SolveResult run() {
        for (auto& lits : initial_) {
            if (lits.size() == 1) {
                const int v = lit_value(lits[0]);
                if (v == 0) return Unsat{};
                if (v == kUnassigned) assign(lits[0], kNoReason);
                continue;
            }
            attach(std::move(lits));
        }
        initial_.clear();

        while (true) {
            const int conflict = propagate();
            if (conflict != kNoReason) {
                ++stats_.conflicts;
                if (decision_level() == 0) return Unsat{};
                auto [learnt, backjump] = analyze(conflict);
                backtrack(backjump);
                if (learnt.size() == 1) {
                    assign(learnt[0], kNoReason);
                } else {
                    const Lit asserting = learnt[0];
                    const int index = attach(std::move(learnt));
                    assign(asserting, index);
                }
                ++stats_.learned;
                decay_activity();
                if (options_.restart_unit > 0 && ++since_restart_ >= options_.restart_unit * luby(restarts_ + 1)) {
                    since_restart_ = 0;
                    ++restarts_;
                    backtrack(0);
                }
                continue;
            }
            const int next = pick_branch_variable();
            if (next < 0) return Sat{extract_model()};
            ++stats_.decisions;
            trail_limits_.push_back(static_cast<int>(trail_.size()));
            assign(2 * next + 1, kNoReason);  // false first
        }
    }

private:
    int decision_level() const noexcept { return static_cast<int>(trail_limits_.size()); }

    int lit_value(Lit l) const noexcept {
        const int v = value_[static_cast<std::size_t>(var_of(l))];
        if (v == kUnassigned) return kUnassigned;
        return v ^ (l & 1);
    }

    void assign(Lit l, int reason) {
        const auto v = static_cast<std::size_t>(var_of(l));
        value_[v] = (l & 1) ? 0 : 1;
        level_[v] = decision_level();
        reason_[v] = reason;
        trail_.push_back(l);
    }

    int attach(std::vector<Lit> lits) {
        const int index = static_cast<int>(clauses_.size());
        watches_[static_cast<std::size_t>(lits[0])].push_back(index);
        watches_[static_cast<std::size_t>(lits[1])].push_back(index);
        clauses_.push_back(std::move(lits));
        return index;
    }

    // Returns the index of a conflicting clause or kNoReason.
    int propagate() {
        while (head_ < trail_.size()) {
            const Lit p = trail_[head_++];
            if (++stats_.propagations > options_.propagation_budget)
                throw ResourceLimit("propagation budget of " + std::to_string(options_.propagation_budget));
            const Lit false_lit = p ^ 1;
            auto& list = watches_[static_cast<std::size_t>(false_lit)];
            std::size_t keep = 0;
            for (std::size_t i = 0; i < list.size(); ++i) {
                const int ci = list[i];
                auto& c = clauses_[static_cast<std::size_t>(ci)];
                if (c[0] == false_lit) std::swap(c[0], c[1]);
                if (lit_value(c[0]) == 1) {
                    list[keep++] = ci;
                    continue;
                }
                bool moved = false;
                for (std::size_t k = 2; k < c.size(); ++k) {
                    if (lit_value(c[k]) != 0) {
                        std::swap(c[1], c[k]);
                        watches_[static_cast<std::size_t>(c[1])].push_back(ci);
                        moved = true;
                        break;
                    }
                }
                if (moved) continue;
                list[keep++] = ci;
                if (lit_value(c[0]) == 0) {
                    for (std::size_t j = i + 1; j < list.size(); ++j) list[keep++] = list[j];
                    list.resize(keep);
                    head_ = trail_.size();
                    return ci;
                }
                assign(c[0], ci);
            }
            list.resize(keep);
        }
        return kNoReason;
    }

    std::pair<std::vector<Lit>, int> analyze(int conflict) {
        std::vector<Lit> learnt{0};
        int pending = 0;
        Lit p = -1;
        std::size_t index = trail_.size();
        int clause_index = conflict;
        do {
            const auto& c = clauses_[static_cast<std::size_t>(clause_index)];
            for (std::size_t j = (p == -1 ? 0 : 1); j < c.size(); ++j) {
                const Lit q = c[j];
                const auto v = static_cast<std::size_t>(var_of(q));
                if (seen_[v] || level_[v] == 0) continue;
                seen_[v] = 1;
                bump(v);
                if (level_[v] >= decision_level()) ++pending;
                else learnt.push_back(q);
            }
            while (!seen_[static_cast<std::size_t>(var_of(trail_[--index]))]) {
            }
            p = trail_[index];
            clause_index = reason_[static_cast<std::size_t>(var_of(p))];
            seen_[static_cast<std::size_t>(var_of(p))] = 0;
            --pending;
        } while (pending > 0);
        learnt[0] = p ^ 1;

        int backjump = 0;
        if (learnt.size() > 1) {
            std::size_t best = 1;
            for (std::size_t i = 2; i < learnt.size(); ++i)
                if (level_[static_cast<std::size_t>(var_of(learnt[i]))] > level_[static_cast<std::size_t>(var_of(learnt[best]))])
                    best = i;
            std::swap(learnt[1], learnt[best]);
            backjump = level_[static_cast<std::size_t>(var_of(learnt[1]))];
        }
        for (std::size_t i = 1; i < learnt.size(); ++i) seen_[static_cast<std::size_t>(var_of(learnt[i]))] = 0;
        return {std::move(learnt), backjump};
    }

    void backtrack(int level) {
        if (decision_level() <= level) return;
        const auto stop = static_cast<std::size_t>(trail_limits_[static_cast<std::size_t>(level)]);
        for (std::size_t i = trail_.size(); i > stop; --i) {
            const auto v = static_cast<std::size_t>(var_of(trail_[i - 1]));
            value_[v] = kUnassigned;
            reason_[v] = kNoReason;
        }
        trail_.resize(stop);
        trail_limits_.resize(static_cast<std::size_t>(level));
        head_ = trail_.size();
    }

    void bump(std::size_t v) {
        activity_[v] += activity_increment_;
        if (activity_[v] > 1e100) {
            for (auto& a : activity_) a *= 1e-100;
            activity_increment_ *= 1e-100;
        }
    }

    void decay_activity() { activity_increment_ /= 0.95; }

    int pick_branch_variable() const {
        int best = -1;
        for (int v = 0; v < n_; ++v) {
            if (value_[static_cast<std::size_t>(v)] != kUnassigned) continue;
            if (options_.branching == Branching::LowestIndex) return v;
            if (best < 0 || activity_[static_cast<std::size_t>(v)] > activity_[static_cast<std::size_t>(best)]) best = v;
        }
        return best;
    }

    Assignment extract_model() const {
        Assignment a;
        a.values.assign(static_cast<std::size_t>(n_) + 1, false);
        for (int v = 0; v < n_; ++v) a.values[static_cast<std::size_t>(v) + 1] = value_[static_cast<std::size_t>(v)] == 1;
        return a;
    }

    SolverOptions options_;
    SolveStats& stats_;
    int n_;
    std::vector<int> value_;
    std::vector<int> level_;
    std::vector<int> reason_;
    std::vector<char> seen_;
    std::vector<double> activity_;
    double activity_increment_ = 1.0;
    std::vector<std::vector<int>> watches_;
    std::vector<std::vector<Lit>> clauses_;
    std::vector<std::vector<Lit>> initial_;
    std::vector<Lit> trail_;
    std::vector<int> trail_limits_;
    std::size_t head_ = 0;
    std::uint64_t since_restart_ = 0;
    std::uint64_t restarts_ = 0;
};

}  // namespace

SolveResult solve(const CnfFormula& formula, SolverOptions options, SolveStats* stats) {
    SolveStats local;
    SolveStats& s = stats ? *stats : local;
    Solver solver(formula, options, s);
    SolveResult result = solver.run();
    if (const auto* sat = std::get_if<Sat>(&result); sat && !evaluate(formula, sat->model))
        throw std::logic_error("sat solver produced a model that violates the formula");
    return result;
}

}  // namespace unsolv::sat
