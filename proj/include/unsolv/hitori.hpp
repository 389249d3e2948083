#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "unsolv/instance.hpp"

namespace unsolv::hitori {

inline constexpr int kMaxCountingSize = 6;

class Grid {
public:
    /// Row-major values, each in [1, n].
    static Grid make(int n, std::vector<int> cells);
    static Grid from_rows(const std::vector<std::vector<int>>& rows);

    int size() const noexcept { return n_; }
    int at(int row, int col) const noexcept { return cells_[static_cast<std::size_t>(row * n_ + col)]; }
    std::span<const int> cells() const noexcept { return cells_; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    Grid(int n, std::vector<int> cells) : n_(n), cells_(std::move(cells)) {}
    int n_;
    std::vector<int> cells_;
};

using Cell = std::pair<int, int>;  // (row, col)

class Shading {
public:
    static Shading none(int n);
    static Shading from_cells(int n, std::span<const Cell> shaded);
    /// Bit k of `mask` shades row-major cell k.
    static Shading from_mask(int n, std::uint64_t mask);

    int size() const noexcept { return n_; }
    bool shaded(int row, int col) const noexcept { return cells_[static_cast<std::size_t>(row * n_ + col)] != 0; }
    void set(int row, int col, bool value) { cells_.at(static_cast<std::size_t>(row * n_ + col)) = value ? 1 : 0; }
    std::vector<Cell> shaded_cells() const;

    friend bool operator==(const Shading&, const Shading&) = default;

private:
    explicit Shading(int n) : n_(n), cells_(static_cast<std::size_t>(n * n), 0) {}
    int n_;
    std::vector<char> cells_;
};

enum class Rule : std::uint8_t { Uniqueness, Adjacency, Connectivity };
std::string_view to_string(Rule rule) noexcept;

struct Valid {};
struct Invalid {
    Rule rule;
};
using Verdict = std::variant<Valid, Invalid>;

/// Checks the rules in order (uniqueness, adjacency, connectivity) and reports the first
/// one broken. A grid with no unshaded cell fails connectivity. Throws DimensionMismatch.
Verdict check_shading(const Grid& grid, const Shading& shading);

enum class Ordering : std::uint8_t { RowMajor, DuplicatesFirst };

struct CountOptions {
    Ordering ordering = Ordering::RowMajor;
    /// Abandon branches whose shaded cells already split the non-shaded region.
    bool connectivity_pruning = true;
};

/// Number of valid shadings, saturating at `limit`. Backtracks with uniqueness and adjacency
/// pruning and filters complete candidates for connectivity. Accepted shadings are
/// appended to `solutions` when provided. Requires n <= 6.
std::uint64_t count_solutions(const Grid& grid, std::uint64_t limit, CountOptions options = {},
                              std::vector<Shading>* solutions = nullptr);

enum class Sampler : std::uint8_t {
    Uniform,          // every cell uniform in [1, n]
    DuplicateBiased,  // copies row values to over-represent duplicates
    /// Picks a maximal shading first, fills unshaded cells from a Latin square and gives each
    /// shaded cell a value it duplicates. Still only a proposal: acceptance is by counting.
    Planted
};
std::string_view to_string(Sampler sampler) noexcept;

PuzzleInstance generate(int n, Label target, std::uint64_t seed, std::uint64_t max_attempts,
                        Sampler sampler = Sampler::Uniform);

Json payload_for(const Grid& grid);
Grid grid_from_payload(const Json& payload);
Json witness_for(const Shading& shading);

}  // namespace unsolv::hitori
