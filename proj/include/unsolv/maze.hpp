#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "unsolv/instance.hpp"

namespace unsolv::maze {

struct Pos {
    int row = 0;
    int col = 0;
    friend auto operator<=>(const Pos&, const Pos&) = default;
};

enum class Tile : std::uint8_t { Open, Wall };
enum class Move : std::uint8_t { Up, Down, Left, Right };

using MovePath = std::vector<Move>;

/// Cell grid; walls are cells, so a passage wall and an obstacle are the same thing.
class Maze {
public:
    /// Throws InvalidArgument when start/goal are out of bounds or walls, or coincide
    /// outside the 1x1 case.
    static Maze make(int width, int height, std::vector<Tile> tiles, Pos start, Pos goal);
    static Maze open(int width, int height, Pos start, Pos goal);
    /// Rows of '#', '.', 'S', 'E'; exactly one S and one E ('S' alone on a 1x1 grid).
    static Maze from_rows(const std::vector<std::string>& rows);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    Pos start() const noexcept { return start_; }
    Pos goal() const noexcept { return goal_; }

    bool in_bounds(Pos p) const noexcept { return p.row >= 0 && p.col >= 0 && p.row < height_ && p.col < width_; }
    bool is_open(Pos p) const noexcept { return in_bounds(p) && tiles_[index(p)] == Tile::Open; }
    Tile at(Pos p) const { return tiles_.at(index(p)); }
    void set(Pos p, Tile t) { tiles_.at(index(p)) = t; }

    std::vector<std::string> to_rows() const;
    std::size_t open_count() const noexcept;

    friend bool operator==(const Maze&, const Maze&) = default;

private:
    Maze(int width, int height, std::vector<Tile> tiles, Pos start, Pos goal)
        : width_(width), height_(height), tiles_(std::move(tiles)), start_(start), goal_(goal) {}
    std::size_t index(Pos p) const noexcept { return static_cast<std::size_t>(p.row * width_ + p.col); }

    int width_;
    int height_;
    std::vector<Tile> tiles_;
    Pos start_;
    Pos goal_;
};

Pos step(Pos p, Move m) noexcept;
std::string to_string(const MovePath& path);
/// Letters U/D/L/R (either case); whitespace and commas are ignored. nullopt on anything else.
std::optional<MovePath> parse_moves(std::string_view text);

struct Reachable {
    MovePath shortest;
};
struct Unreachable {};
using Reachability = std::variant<Reachable, Unreachable>;

/// Breadth-first search; neighbours are expanded in Up, Down, Left, Right order.
Reachability solve_bfs(const Maze& maze);

/// Every open cell reachable from start.
std::vector<Pos> reachable_cells(const Maze& maze);

struct CarveOptions {
    /// Fraction of the interior walls left after carving that are knocked out to form loops.
    double loop_ratio = 0.10;
    std::optional<Pos> start;
    std::optional<Pos> goal;
};

/// Randomized depth-first carving on the lattice where rooms sit at even coordinates.
/// An even dimension leaves a trailing open row/column. Default start/goal are opposite corners.
Maze carve(int width, int height, std::uint64_t seed, CarveOptions options = {});

/// Repeatedly walls an interior cell of the current shortest path, biased toward its middle,
/// until the goal is cut off. Flipped cells are appended to `flipped` in order.
/// Throws CannotBlock when no interior path cell exists or after width*height flips.
Maze block_critical(const Maze& maze, std::uint64_t seed, std::vector<Pos>* flipped = nullptr);

bool check_moves(const Maze& maze, const MovePath& path);

PuzzleInstance generate(int width, int height, Label target, std::uint64_t seed, CarveOptions options = {});

Json payload_for(const Maze& maze);
Maze maze_from_payload(const Json& payload);

}  // namespace unsolv::maze
