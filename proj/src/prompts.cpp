#include "unsolv/prompts.hpp"

#include <sstream>

#include "unsolv/error.hpp"
#include "unsolv/reward.hpp"

namespace unsolv {

namespace {

const char* const kAnswerRules =
    "If the puzzle has no solution, reply with {unsolvable}. "
    "If you cannot solve it, reply with \"I am sorry, this is {refusal}.\"";

void replace_all(std::string& text, std::string_view from, std::string_view to) {
    for (std::size_t pos = text.find(from); pos != std::string::npos; pos = text.find(from, pos + to.size()))
        text.replace(pos, from.size(), to);
}

}  // namespace

TemplateSet TemplateSet::train_defaults() {
    TemplateSet set;
    const std::string rules = kAnswerRules;
    set.templates[Domain::Game24] = {
        "Use each of the numbers {puzzle} exactly once with +, -, *, / and parentheses to make 24. "
        "Give the final expression in \\boxed{}. " + rules};
    set.templates[Domain::HamCycle] = {
        "Find a Hamiltonian cycle in the undirected graph below: visit every vertex exactly once and "
        "return to the start.\n{puzzle}\nGive the vertex order in \\boxed{}, e.g. \\boxed{0,3,1,2}. " + rules};
    set.templates[Domain::HamPath] = {
        "Find a Hamiltonian path in the undirected graph below: visit every vertex exactly once.\n"
        "{puzzle}\nGive the vertex order in \\boxed{}, e.g. \\boxed{0,3,1,2}. " + rules};
    set.templates[Domain::Hitori] = {
        "Solve this Hitori puzzle. Shade cells so that no number repeats among unshaded cells in any row "
        "or column, no two shaded cells touch orthogonally, and all unshaded cells stay connected.\n"
        "{puzzle}\nList the shaded cells as (row,col) pairs, 0-indexed, in \\boxed{}. " + rules};
    set.templates[Domain::Maze] = {
        "Find a path from S to E in the maze below. '#' is a wall and '.' is open floor; move one cell "
        "at a time up, down, left or right.\n{puzzle}\nGive the moves as a string of U, D, L, R in "
        "\\boxed{}. " + rules};
    set.templates[Domain::Math] = {"{puzzle}\nPut the final answer in \\boxed{}. " + rules};
    return set;
}

TemplateSet TemplateSet::test_defaults() {
    TemplateSet set = train_defaults();
    const std::string rules = kAnswerRules;
    set.templates[Domain::Game24].push_back(
        "Numbers: {puzzle}. Combine all of them, each used once, with basic arithmetic to reach exactly 24. "
        "Write the expression inside \\boxed{}. " + rules);
    set.templates[Domain::HamCycle].push_back(
        "Graph:\n{puzzle}\nIs there a closed tour through all vertices that uses each vertex once? If so, "
        "write the tour as a comma-separated vertex list in \\boxed{}. " + rules);
    set.templates[Domain::HamPath].push_back(
        "Graph:\n{puzzle}\nWrite an ordering of all vertices in which consecutive vertices are adjacent, "
        "as a comma-separated list inside \\boxed{}. " + rules);
    set.templates[Domain::Hitori].push_back(
        "Hitori grid:\n{puzzle}\nBlacken cells to remove repeated numbers in every row and column; black "
        "cells may not be orthogonal neighbours and the white cells must form one region. Answer with the "
        "black cells as (row,col) in \\boxed{}. " + rules);
    set.templates[Domain::Maze].push_back(
        "Maze ('#' wall, '.' floor, S start, E exit):\n{puzzle}\nReport a route as U/D/L/R letters inside "
        "\\boxed{}. " + rules);
    return set;
}

TemplateSet TemplateSet::from_json(const Json& doc, const TemplateSet& fallback) {
    TemplateSet set = fallback;
    if (!doc.is_object()) throw InvalidArgument("template file must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        const Domain domain = parse_domain(key);
        std::vector<std::string> list;
        if (value.is_string()) list.push_back(value.get<std::string>());
        else list = value.get<std::vector<std::string>>();
        if (list.empty()) throw InvalidArgument("empty template list for " + key);
        set.templates[domain] = std::move(list);
    }
    return set;
}

std::string render_puzzle(Domain domain, const Json& payload) {
    std::ostringstream out;
    switch (domain) {
        case Domain::Game24: {
            bool first = true;
            for (const auto& v : payload.at("numbers")) {
                if (!first) out << ", ";
                out << v.get<int>();
                first = false;
            }
            break;
        }
        case Domain::HamCycle:
        case Domain::HamPath: {
            out << "Vertices: 0.." << payload.at("n").get<int>() - 1 << "\nEdges:";
            for (const auto& e : payload.at("edges")) out << " " << e.at(0).get<int>() << "-" << e.at(1).get<int>();
            break;
        }
        case Domain::Hitori: {
            const int n = payload.at("n").get<int>();
            const auto& cells = payload.at("cells");
            for (int r = 0; r < n; ++r) {
                for (int c = 0; c < n; ++c) out << (c ? " " : "") << cells.at(static_cast<std::size_t>(r * n + c)).get<int>();
                if (r + 1 < n) out << "\n";
            }
            break;
        }
        case Domain::Maze: {
            bool first = true;
            for (const auto& row : payload.at("rows")) {
                if (!first) out << "\n";
                out << row.get<std::string>();
                first = false;
            }
            break;
        }
        case Domain::Math: out << payload.at("statement").get<std::string>(); break;
    }
    return out.str();
}

std::string render_prompt(Domain domain, const Json& payload, const TemplateSet& templates, std::size_t variant) {
    const auto it = templates.templates.find(domain);
    if (it == templates.templates.end() || it->second.empty())
        throw UnknownDomain("no prompt template for " + std::string(to_string(domain)));
    std::string text = it->second[variant % it->second.size()];
    replace_all(text, "{puzzle}", render_puzzle(domain, payload));
    replace_all(text, "{unsolvable}", kUnsolvableMarker);
    replace_all(text, "{refusal}", kRefusalMarker);
    return text;
}

std::string render_prompt(Domain domain, const Json& payload) {
    static const TemplateSet defaults = TemplateSet::train_defaults();
    return render_prompt(domain, payload, defaults, 0);
}

}  // namespace unsolv
