#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "unsolv/instance.hpp"
#include "unsolv/sat.hpp"

namespace unsolv::ham {

enum class Mode : std::uint8_t { Cycle, Path };
enum class Strategy : std::uint8_t { Disconnect, Bottleneck, DeadEnd };

std::string_view to_string(Mode mode) noexcept;
std::string_view to_string(Strategy strategy) noexcept;
Strategy parse_strategy(std::string_view text);

using Edge = std::pair<int, int>;

/// Simple undirected graph on vertices 0..n-1.
class Graph {
public:
    /// Throws InvalidArgument on n < 2, self-loops, duplicates or out-of-range endpoints.
    static Graph make(int n, std::span<const Edge> edges);
    /// n vertices, no edges; grow it with add_edge.
    static Graph empty(int n);
    static Graph complete(int n);

    int vertex_count() const noexcept { return n_; }
    bool has_edge(int u, int v) const noexcept;
    int degree(int v) const noexcept;
    /// Sorted (u < v) edge list.
    std::vector<Edge> edges() const;
    std::vector<int> neighbors(int v) const;

    /// Returns false when the edge already exists.
    bool add_edge(int u, int v);

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    explicit Graph(int n) : n_(n), adjacency_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0) {}

    int n_ = 0;
    std::vector<char> adjacency_;
};

/// Variable for "vertex v sits at position i" in the position encoding.
constexpr int position_variable(int n, int vertex, int position) noexcept { return vertex * n + position + 1; }

/// n^2 position variables, exactly-one per position and per vertex, non-edge exclusion
/// between consecutive positions, and the wrap-around pair for cycles.
/// Cycles on fewer than 3 vertices are encoded as contradictions.
sat::CnfFormula encode(const Graph& graph, Mode mode);

struct Solvable {
    std::vector<int> order;
};
struct Unsolvable {};
using Decision = std::variant<Solvable, Unsolvable>;

/// SAT-backed decision; orders are canonicalized. Propagates ResourceLimit.
Decision decide(const Graph& graph, Mode mode, sat::SolverOptions options = {});

bool check_sequence(const Graph& graph, std::span<const int> order, Mode mode);

/// Cycles start at vertex 0 and head toward the smaller neighbour; paths start at the
/// smaller endpoint.
std::vector<int> canonicalize(std::vector<int> order, Mode mode);

int component_count(const Graph& graph);
/// Components left after deleting `removed` (which is not counted).
int component_count_without(const Graph& graph, int removed);
std::vector<int> articulation_points(const Graph& graph);

struct GenerateOptions {
    std::uint64_t max_attempts = 1000;
    sat::SolverOptions solver = {};
};

PuzzleInstance generate(Mode mode, int n, Label target, std::optional<Strategy> strategy, std::uint64_t seed,
                        GenerateOptions options = {});

Json payload_for(const Graph& graph, Mode mode);
Graph graph_from_payload(const Json& payload);
Mode mode_from_payload(const Json& payload);

}  // namespace unsolv::ham
