#include "unsolv/hamiltonian.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "unsolv/error.hpp"
#include "unsolv/prompts.hpp"
#include "unsolv/rng.hpp"

namespace unsolv::ham {

std::string_view to_string(Mode mode) noexcept { return mode == Mode::Cycle ? "cycle" : "path"; }

std::string_view to_string(Strategy strategy) noexcept {
    switch (strategy) {
        case Strategy::Disconnect: return "disconnect";
        case Strategy::Bottleneck: return "bottleneck";
        case Strategy::DeadEnd: return "dead_end";
    }
    return "unknown";
}

Strategy parse_strategy(std::string_view text) {
    if (text == "disconnect") return Strategy::Disconnect;
    if (text == "bottleneck") return Strategy::Bottleneck;
    if (text == "dead_end" || text == "deadend") return Strategy::DeadEnd;
    throw InvalidArgument("unknown unsolvability strategy '" + std::string(text) + "'");
}

Graph Graph::make(int n, std::span<const Edge> edges) {
    Graph g = empty(n);
    for (const auto& [u, v] : edges) {
        if (u < 0 || v < 0 || u >= n || v >= n) throw InvalidArgument("edge endpoint out of range");
        if (u == v) throw InvalidArgument("self-loop on vertex " + std::to_string(u));
        if (!g.add_edge(u, v)) throw InvalidArgument("duplicate edge " + std::to_string(u) + "-" + std::to_string(v));
    }
    return g;
}

Graph Graph::empty(int n) {
    if (n < 2) throw InvalidArgument("graph needs at least 2 vertices");
    return Graph(n);
}

Graph Graph::complete(int n) {
    Graph g = empty(n);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) g.add_edge(u, v);
    return g;
}

bool Graph::has_edge(int u, int v) const noexcept {
    if (u < 0 || v < 0 || u >= n_ || v >= n_) return false;
    return adjacency_[static_cast<std::size_t>(u * n_ + v)] != 0;
}

int Graph::degree(int v) const noexcept {
    int d = 0;
    for (int u = 0; u < n_; ++u) d += has_edge(v, u) ? 1 : 0;
    return d;
}

std::vector<Edge> Graph::edges() const {
    std::vector<Edge> out;
    for (int u = 0; u < n_; ++u)
        for (int v = u + 1; v < n_; ++v)
            if (has_edge(u, v)) out.emplace_back(u, v);
    return out;
}

std::vector<int> Graph::neighbors(int v) const {
    std::vector<int> out;
    for (int u = 0; u < n_; ++u)
        if (has_edge(v, u)) out.push_back(u);
    return out;
}

bool Graph::add_edge(int u, int v) {
    if (u == v || u < 0 || v < 0 || u >= n_ || v >= n_) throw InvalidArgument("invalid edge");
    auto& cell = adjacency_[static_cast<std::size_t>(u * n_ + v)];
    if (cell) return false;
    cell = 1;
    adjacency_[static_cast<std::size_t>(v * n_ + u)] = 1;
    return true;
}

sat::CnfFormula encode(const Graph& graph, Mode mode) {
    const int n = graph.vertex_count();
    sat::CnfFormula formula(n * n);
    std::vector<sat::Literal> group;
    for (int i = 0; i < n; ++i) {
        group.clear();
        for (int v = 0; v < n; ++v) group.push_back(sat::pos(position_variable(n, v, i)));
        formula.add_clauses(sat::exactly_one(group));
    }
    for (int v = 0; v < n; ++v) {
        group.clear();
        for (int i = 0; i < n; ++i) group.push_back(sat::pos(position_variable(n, v, i)));
        formula.add_clauses(sat::exactly_one(group));
    }
    const auto forbid_non_edges = [&](int from, int to) {
        for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v)
                if (u != v && !graph.has_edge(u, v))
                    formula.add_clause({sat::neg(position_variable(n, u, from)), sat::neg(position_variable(n, v, to))});
    };
    for (int i = 0; i + 1 < n; ++i) forbid_non_edges(i, i + 1);
    if (mode == Mode::Cycle) {
        if (n < 3) {
            formula.add_clause({sat::pos(1)});
            formula.add_clause({sat::neg(1)});
        } else {
            forbid_non_edges(n - 1, 0);
        }
    }
    return formula;
}

std::vector<int> canonicalize(std::vector<int> order, Mode mode) {
    if (order.size() < 2) return order;
    if (mode == Mode::Path) {
        if (order.front() > order.back()) std::reverse(order.begin(), order.end());
        return order;
    }
    const auto zero = std::find(order.begin(), order.end(), 0);
    if (zero != order.end()) std::rotate(order.begin(), zero, order.end());
    if (order.size() > 2 && order.back() < order[1]) std::reverse(order.begin() + 1, order.end());
    return order;
}

Decision decide(const Graph& graph, Mode mode, sat::SolverOptions options) {
    const int n = graph.vertex_count();
    const auto result = sat::solve(encode(graph, mode), options);
    const auto* sat = std::get_if<sat::Sat>(&result);
    if (!sat) return Unsolvable{};
    std::vector<int> order(static_cast<std::size_t>(n), -1);
    for (int v = 0; v < n; ++v)
        for (int i = 0; i < n; ++i)
            if (sat->model[position_variable(n, v, i)]) order[static_cast<std::size_t>(i)] = v;
    order = canonicalize(std::move(order), mode);
    if (!check_sequence(graph, order, mode)) throw std::logic_error("decoded Hamiltonian order fails verification");
    return Solvable{std::move(order)};
}

bool check_sequence(const Graph& graph, std::span<const int> order, Mode mode) {
    const int n = graph.vertex_count();
    if (order.size() != static_cast<std::size_t>(n)) return false;
    if (mode == Mode::Cycle && n < 3) return false;
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    for (int v : order) {
        if (v < 0 || v >= n || used[static_cast<std::size_t>(v)]) return false;
        used[static_cast<std::size_t>(v)] = 1;
    }
    for (std::size_t i = 0; i + 1 < order.size(); ++i)
        if (!graph.has_edge(order[i], order[i + 1])) return false;
    if (mode == Mode::Cycle && !graph.has_edge(order.back(), order.front())) return false;
    return true;
}

int component_count_without(const Graph& graph, int removed) {
    const int n = graph.vertex_count();
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    int components = 0;
    std::vector<int> stack;
    for (int s = 0; s < n; ++s) {
        if (s == removed || seen[static_cast<std::size_t>(s)]) continue;
        ++components;
        seen[static_cast<std::size_t>(s)] = 1;
        stack.push_back(s);
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int v = 0; v < n; ++v) {
                if (v == removed || seen[static_cast<std::size_t>(v)] || !graph.has_edge(u, v)) continue;
                seen[static_cast<std::size_t>(v)] = 1;
                stack.push_back(v);
            }
        }
    }
    return components;
}

int component_count(const Graph& graph) { return component_count_without(graph, -1); }

std::vector<int> articulation_points(const Graph& graph) {
    // Hopcroft-Tarjan low-link.
    const int n = graph.vertex_count();
    std::vector<int> disc(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0);
    std::vector<char> is_cut(static_cast<std::size_t>(n), 0);
    int timer = 0;
    std::function<void(int, int)> dfs = [&](int u, int parent) {
        disc[static_cast<std::size_t>(u)] = low[static_cast<std::size_t>(u)] = timer++;
        int children = 0;
        for (int v = 0; v < n; ++v) {
            if (!graph.has_edge(u, v) || v == parent) continue;
            if (disc[static_cast<std::size_t>(v)] >= 0) {
                low[static_cast<std::size_t>(u)] = std::min(low[static_cast<std::size_t>(u)], disc[static_cast<std::size_t>(v)]);
                continue;
            }
            ++children;
            dfs(v, u);
            low[static_cast<std::size_t>(u)] = std::min(low[static_cast<std::size_t>(u)], low[static_cast<std::size_t>(v)]);
            if (parent >= 0 && low[static_cast<std::size_t>(v)] >= disc[static_cast<std::size_t>(u)]) is_cut[static_cast<std::size_t>(u)] = 1;
        }
        if (parent < 0 && children > 1) is_cut[static_cast<std::size_t>(u)] = 1;
    };
    for (int s = 0; s < n; ++s)
        if (disc[static_cast<std::size_t>(s)] < 0) dfs(s, -1);
    std::vector<int> out;
    for (int v = 0; v < n; ++v)
        if (is_cut[static_cast<std::size_t>(v)]) out.push_back(v);
    return out;
}

namespace {

// Random spanning tree over `group`, so the group is connected before noise.
void connect_group(Graph& g, const std::vector<int>& group, Rng& rng) {
    for (std::size_t i = 1; i < group.size(); ++i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        g.add_edge(group[i], group[j]);
    }
}

// Adds a uniform number of edges drawn from `allowed` pairs, up to the density cap.
void add_noise(Graph& g, std::vector<Edge> allowed, Rng& rng) {
    const int n = g.vertex_count();
    const int cap = n * (n - 1) / 4;
    const int current = static_cast<int>(g.edges().size());
    std::erase_if(allowed, [&](const Edge& e) { return g.has_edge(e.first, e.second); });
    const int room = std::min<int>(std::max(0, cap - current), static_cast<int>(allowed.size()));
    if (room <= 0) return;
    const auto count = static_cast<std::size_t>(rng.uniform_int(0, room));
    rng.shuffle(std::span<Edge>(allowed));
    for (std::size_t i = 0; i < count; ++i) g.add_edge(allowed[i].first, allowed[i].second);
}

std::vector<Edge> pairs_within(const std::vector<int>& group) {
    std::vector<Edge> out;
    for (std::size_t i = 0; i < group.size(); ++i)
        for (std::size_t j = i + 1; j < group.size(); ++j)
            out.emplace_back(std::min(group[i], group[j]), std::max(group[i], group[j]));
    return out;
}

// Splits `items` into `parts` consecutive non-empty chunks, each at least `min_size` when possible.
std::vector<std::vector<int>> partition(const std::vector<int>& items, int parts, Rng& rng) {
    const int total = static_cast<int>(items.size());
    const int min_size = total >= 2 * parts ? 2 : 1;
    std::vector<int> sizes(static_cast<std::size_t>(parts), min_size);
    for (int extra = total - min_size * parts; extra > 0; --extra) ++sizes[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(parts)))];
    std::vector<std::vector<int>> out;
    std::size_t at = 0;
    for (int s : sizes) {
        out.emplace_back(items.begin() + static_cast<std::ptrdiff_t>(at), items.begin() + static_cast<std::ptrdiff_t>(at + static_cast<std::size_t>(s)));
        at += static_cast<std::size_t>(s);
    }
    return out;
}

Graph build_solvable(Mode mode, int n, Rng& rng) {
    Graph g = Graph::empty(n);
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(std::span<int>(perm));
    for (std::size_t i = 0; i + 1 < perm.size(); ++i) g.add_edge(perm[i], perm[i + 1]);
    if (mode == Mode::Cycle) g.add_edge(perm.back(), perm.front());
    std::vector<int> all(perm.begin(), perm.end());
    add_noise(g, pairs_within(all), rng);
    return g;
}

Graph build_unsolvable(Mode mode, int n, Strategy strategy, Rng& rng) {
    Graph g = Graph::empty(n);
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(std::span<int>(perm));
    std::vector<Edge> allowed;
    switch (strategy) {
        case Strategy::Disconnect: {
            for (auto& part : partition(perm, 2, rng)) {
                connect_group(g, part, rng);
                auto p = pairs_within(part);
                allowed.insert(allowed.end(), p.begin(), p.end());
            }
            break;
        }
        case Strategy::Bottleneck: {
            // A cut vertex separating 2 blocks kills cycles; paths need 3 blocks.
            const int hub = perm[0];
            const std::vector<int> rest(perm.begin() + 1, perm.end());
            for (auto part : partition(rest, mode == Mode::Cycle ? 2 : 3, rng)) {
                connect_group(g, part, rng);
                g.add_edge(hub, part[static_cast<std::size_t>(rng.below(part.size()))]);
                part.push_back(hub);
                auto p = pairs_within(part);
                allowed.insert(allowed.end(), p.begin(), p.end());
            }
            break;
        }
        case Strategy::DeadEnd: {
            // Cycles: one vertex of degree 1. Paths: three vertices of degree 1.
            const std::size_t leaves = mode == Mode::Cycle ? 1 : 3;
            const std::vector<int> core(perm.begin() + static_cast<std::ptrdiff_t>(leaves), perm.end());
            connect_group(g, core, rng);
            for (std::size_t i = 0; i < leaves; ++i) g.add_edge(perm[i], core[static_cast<std::size_t>(rng.below(core.size()))]);
            allowed = pairs_within(core);
            break;
        }
    }
    add_noise(g, allowed, rng);
    return g;
}

}  // namespace

PuzzleInstance generate(Mode mode, int n, Label target, std::optional<Strategy> strategy, std::uint64_t seed,
                        GenerateOptions options) {
    if (n < 4 || n > 20) throw InvalidArgument("hamiltonian vertex count must be in [4, 20]");
    Rng rng(seed);
    for (std::uint64_t attempt = 1; attempt <= options.max_attempts; ++attempt) {
        std::optional<Strategy> used;
        Graph g = Graph::empty(n);
        if (target == Label::Solvable) {
            g = build_solvable(mode, n, rng);
        } else {
            used = strategy ? *strategy : static_cast<Strategy>(rng.below(3));
            g = build_unsolvable(mode, n, *used, rng);
        }
        const Decision d = decide(g, mode, options.solver);
        const bool solvable = std::holds_alternative<Solvable>(d);
        if (solvable != (target == Label::Solvable)) continue;

        PuzzleInstance inst;
        inst.domain = mode == Mode::Cycle ? Domain::HamCycle : Domain::HamPath;
        inst.label = target;
        inst.difficulty = Difficulty{n <= 8 ? Level::Easy : Level::Hard, n};
        inst.seed = seed;
        inst.id = instance_id(inst.domain, inst.difficulty, inst.label, seed);
        inst.payload = payload_for(g, mode);
        if (solvable) inst.witness = Json(std::get<Solvable>(d).order);
        inst.prompt = render_prompt(inst.domain, inst.payload);
        inst.provenance = Json{{"generator", "hamiltonian.construct"},
                               {"attempts", attempt},
                               {"verification", "solver-certified"}};
        if (used) inst.provenance["strategy"] = to_string(*used);
        return inst;
    }
    throw ExhaustedAttempts("hamiltonian generate n=" + std::to_string(n));
}

Json payload_for(const Graph& graph, Mode mode) {
    Json edges = Json::array();
    for (const auto& [u, v] : graph.edges()) edges.push_back(Json::array({u, v}));
    return Json{{"n", graph.vertex_count()}, {"mode", to_string(mode)}, {"edges", edges}};
}

Graph graph_from_payload(const Json& payload) {
    std::vector<Edge> edges;
    for (const auto& e : payload.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    return Graph::make(payload.at("n").get<int>(), edges);
}

Mode mode_from_payload(const Json& payload) {
    const auto m = payload.at("mode").get<std::string>();
    if (m == "cycle") return Mode::Cycle;
    if (m == "path") return Mode::Path;
    throw InvalidArgument("unknown traversal mode '" + m + "'");
}

}  // namespace unsolv::ham
