#include "unsolv/maze.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>

#include "unsolv/error.hpp"
#include "unsolv/prompts.hpp"
#include "unsolv/rng.hpp"

namespace unsolv::maze {

namespace {

constexpr std::array<Move, 4> kMoveOrder = {Move::Up, Move::Down, Move::Left, Move::Right};

char move_letter(Move m) noexcept {
    switch (m) {
        case Move::Up: return 'U';
        case Move::Down: return 'D';
        case Move::Left: return 'L';
        case Move::Right: return 'R';
    }
    return '?';
}

// BFS parents; -1 means unvisited, -2 marks the start.
std::vector<int> bfs_parents(const Maze& maze) {
    const auto w = maze.width();
    std::vector<int> parent(static_cast<std::size_t>(w * maze.height()), -1);
    const auto idx = [w](Pos p) { return static_cast<std::size_t>(p.row * w + p.col); };
    std::deque<Pos> queue{maze.start()};
    parent[idx(maze.start())] = -2;
    while (!queue.empty()) {
        const Pos p = queue.front();
        queue.pop_front();
        if (p == maze.goal()) break;
        for (Move m : kMoveOrder) {
            const Pos q = step(p, m);
            if (!maze.is_open(q) || parent[idx(q)] != -1) continue;
            parent[idx(q)] = static_cast<int>(idx(p));
            queue.push_back(q);
        }
    }
    return parent;
}

std::vector<Pos> shortest_cells(const Maze& maze) {
    const auto w = maze.width();
    const auto parent = bfs_parents(maze);
    const auto gi = static_cast<std::size_t>(maze.goal().row * w + maze.goal().col);
    if (parent[gi] == -1) return {};
    std::vector<Pos> cells;
    for (int at = static_cast<int>(gi); at != -2; at = parent[static_cast<std::size_t>(at)]) cells.push_back(Pos{at / w, at % w});
    std::reverse(cells.begin(), cells.end());
    return cells;
}

}  // namespace

Maze Maze::make(int width, int height, std::vector<Tile> tiles, Pos start, Pos goal) {
    if (width < 1 || height < 1) throw InvalidArgument("maze dimensions must be at least 1");
    if (tiles.size() != static_cast<std::size_t>(width * height)) throw DimensionMismatch("maze tile count");
    Maze m(width, height, std::move(tiles), start, goal);
    if (!m.in_bounds(start) || !m.in_bounds(goal)) throw InvalidArgument("maze start/goal out of bounds");
    if (!m.is_open(start) || !m.is_open(goal)) throw InvalidArgument("maze start/goal must be open");
    if (start == goal && (width != 1 || height != 1)) throw InvalidArgument("maze start and goal coincide");
    return m;
}

Maze Maze::open(int width, int height, Pos start, Pos goal) {
    return make(width, height, std::vector<Tile>(static_cast<std::size_t>(width * height), Tile::Open), start, goal);
}

Maze Maze::from_rows(const std::vector<std::string>& rows) {
    if (rows.empty()) throw InvalidArgument("maze needs at least one row");
    const int height = static_cast<int>(rows.size());
    const int width = static_cast<int>(rows.front().size());
    std::vector<Tile> tiles;
    std::optional<Pos> start, goal;
    for (int r = 0; r < height; ++r) {
        if (static_cast<int>(rows[static_cast<std::size_t>(r)].size()) != width) throw DimensionMismatch("ragged maze rows");
        for (int c = 0; c < width; ++c) {
            const char ch = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
            switch (ch) {
                case '#': tiles.push_back(Tile::Wall); break;
                case '.': tiles.push_back(Tile::Open); break;
                case 'S':
                    if (start) throw InvalidArgument("maze has more than one S");
                    start = Pos{r, c};
                    tiles.push_back(Tile::Open);
                    break;
                case 'E':
                    if (goal) throw InvalidArgument("maze has more than one E");
                    goal = Pos{r, c};
                    tiles.push_back(Tile::Open);
                    break;
                default: throw InvalidArgument(std::string("unexpected maze character '") + ch + "'");
            }
        }
    }
    if (!start) throw InvalidArgument("maze has no S");
    if (!goal) {
        if (width == 1 && height == 1) goal = start;
        else throw InvalidArgument("maze has no E");
    }
    return make(width, height, std::move(tiles), *start, *goal);
}

std::vector<std::string> Maze::to_rows() const {
    std::vector<std::string> rows;
    for (int r = 0; r < height_; ++r) {
        std::string row;
        for (int c = 0; c < width_; ++c) {
            const Pos p{r, c};
            if (p == start_) row += 'S';
            else if (p == goal_) row += 'E';
            else row += tiles_[index(p)] == Tile::Wall ? '#' : '.';
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::size_t Maze::open_count() const noexcept {
    return static_cast<std::size_t>(std::count(tiles_.begin(), tiles_.end(), Tile::Open));
}

Pos step(Pos p, Move m) noexcept {
    switch (m) {
        case Move::Up: return Pos{p.row - 1, p.col};
        case Move::Down: return Pos{p.row + 1, p.col};
        case Move::Left: return Pos{p.row, p.col - 1};
        case Move::Right: return Pos{p.row, p.col + 1};
    }
    return p;
}

std::string to_string(const MovePath& path) {
    std::string out;
    for (Move m : path) out += move_letter(m);
    return out;
}

std::optional<MovePath> parse_moves(std::string_view text) {
    MovePath path;
    for (char ch : text) {
        switch (ch) {
            case 'U': case 'u': path.push_back(Move::Up); break;
            case 'D': case 'd': path.push_back(Move::Down); break;
            case 'L': case 'l': path.push_back(Move::Left); break;
            case 'R': case 'r': path.push_back(Move::Right); break;
            case ' ': case ',': case '\t': case '\n': case '\r': break;
            default: return std::nullopt;
        }
    }
    return path;
}

Reachability solve_bfs(const Maze& maze) {
    const auto cells = shortest_cells(maze);
    if (cells.empty()) return Unreachable{};
    MovePath path;
    for (std::size_t i = 1; i < cells.size(); ++i) {
        for (Move m : kMoveOrder) {
            if (step(cells[i - 1], m) == cells[i]) {
                path.push_back(m);
                break;
            }
        }
    }
    return Reachable{std::move(path)};
}

std::vector<Pos> reachable_cells(const Maze& maze) {
    std::vector<char> seen(static_cast<std::size_t>(maze.width() * maze.height()), 0);
    const auto idx = [&](Pos p) { return static_cast<std::size_t>(p.row * maze.width() + p.col); };
    std::vector<Pos> out{maze.start()};
    seen[idx(maze.start())] = 1;
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (Move m : kMoveOrder) {
            const Pos q = step(out[i], m);
            if (!maze.is_open(q) || seen[idx(q)]) continue;
            seen[idx(q)] = 1;
            out.push_back(q);
        }
    }
    return out;
}

Maze carve(int width, int height, std::uint64_t seed, CarveOptions options) {
    if (width < 2 || height < 2) throw InvalidArgument("carve needs width and height >= 2");
    Rng rng(seed);
    std::vector<Tile> tiles(static_cast<std::size_t>(width * height), Tile::Wall);
    const auto idx = [width](int r, int c) { return static_cast<std::size_t>(r * width + c); };
    const auto is_room = [&](int r, int c) { return r >= 0 && c >= 0 && r < height && c < width && r % 2 == 0 && c % 2 == 0; };

    for (int r = 0; r < height; r += 2)
        for (int c = 0; c < width; c += 2) tiles[idx(r, c)] = Tile::Open;

    // Iterative randomized DFS over rooms.
    std::vector<char> visited(tiles.size(), 0);
    std::vector<Pos> stack{Pos{0, 0}};
    visited[idx(0, 0)] = 1;
    const int dr[4] = {-2, 2, 0, 0};
    const int dc[4] = {0, 0, -2, 2};
    while (!stack.empty()) {
        const Pos p = stack.back();
        std::array<int, 4> dirs{};
        int count = 0;
        for (int d = 0; d < 4; ++d) {
            const int r = p.row + dr[d], c = p.col + dc[d];
            if (is_room(r, c) && !visited[idx(r, c)]) dirs[static_cast<std::size_t>(count++)] = d;
        }
        if (count == 0) {
            stack.pop_back();
            continue;
        }
        const int d = dirs[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(count)))];
        const int r = p.row + dr[d], c = p.col + dc[d];
        tiles[idx(p.row + dr[d] / 2, p.col + dc[d] / 2)] = Tile::Open;
        visited[idx(r, c)] = 1;
        stack.push_back(Pos{r, c});
    }

    // Walls separating two rooms that the tree left standing become loop candidates.
    std::vector<Pos> candidates;
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            if (tiles[idx(r, c)] != Tile::Wall || (r % 2 == 1 && c % 2 == 1)) continue;
            const bool between_h = r % 2 == 0 && is_room(r, c - 1) && is_room(r, c + 1);
            const bool between_v = c % 2 == 0 && is_room(r - 1, c) && is_room(r + 1, c);
            if (between_h || between_v) candidates.push_back(Pos{r, c});
        }
    }
    rng.shuffle(std::span<Pos>(candidates));
    const auto loops = static_cast<std::size_t>(std::lround(options.loop_ratio * static_cast<double>(candidates.size())));
    for (std::size_t i = 0; i < std::min(loops, candidates.size()); ++i) tiles[idx(candidates[i].row, candidates[i].col)] = Tile::Open;

    if (width % 2 == 0)
        for (int r = 0; r < height; ++r) tiles[idx(r, width - 1)] = Tile::Open;
    if (height % 2 == 0)
        for (int c = 0; c < width; ++c) tiles[idx(height - 1, c)] = Tile::Open;

    const Pos start = options.start.value_or(Pos{0, 0});
    const Pos goal = options.goal.value_or(Pos{height - 1, width - 1});
    if (start.row >= 0 && start.col >= 0 && start.row < height && start.col < width) tiles[idx(start.row, start.col)] = Tile::Open;
    if (goal.row >= 0 && goal.col >= 0 && goal.row < height && goal.col < width) tiles[idx(goal.row, goal.col)] = Tile::Open;
    return Maze::make(width, height, std::move(tiles), start, goal);
}

Maze block_critical(const Maze& maze, std::uint64_t seed, std::vector<Pos>* flipped) {
    if (std::holds_alternative<Unreachable>(solve_bfs(maze))) throw InvalidArgument("block_critical needs a solvable maze");
    Rng rng(seed);
    Maze out = maze;
    const int cap = maze.width() * maze.height();
    for (int flips = 0; flips < cap; ++flips) {
        const auto cells = shortest_cells(out);
        if (cells.empty()) return out;
        if (cells.size() <= 2) throw CannotBlock("start and goal are adjacent");
        // Interior cells are indices 1..size-2; draw near the middle.
        const auto interior = static_cast<std::int64_t>(cells.size() - 2);
        const std::int64_t mid = 1 + (interior - 1) / 2;
        const std::int64_t spread = interior / 4;
        const std::int64_t pick = std::clamp<std::int64_t>(mid + rng.uniform_int(-spread, spread), 1, interior);
        const Pos target = cells[static_cast<std::size_t>(pick)];
        out.set(target, Tile::Wall);
        if (flipped) flipped->push_back(target);
    }
    if (shortest_cells(out).empty()) return out;
    throw CannotBlock("goal still reachable after " + std::to_string(cap) + " flips");
}

bool check_moves(const Maze& maze, const MovePath& path) {
    Pos p = maze.start();
    for (Move m : path) {
        p = step(p, m);
        if (!maze.is_open(p)) return false;
    }
    return p == maze.goal();
}

Json payload_for(const Maze& maze) {
    return Json{{"width", maze.width()}, {"height", maze.height()}, {"rows", maze.to_rows()}};
}

Maze maze_from_payload(const Json& payload) {
    Maze m = Maze::from_rows(payload.at("rows").get<std::vector<std::string>>());
    if (payload.contains("width") && payload.at("width").get<int>() != m.width()) throw DimensionMismatch("maze width");
    if (payload.contains("height") && payload.at("height").get<int>() != m.height()) throw DimensionMismatch("maze height");
    return m;
}

PuzzleInstance generate(int width, int height, Label target, std::uint64_t seed, CarveOptions options) {
    const Maze base = carve(width, height, seed, options);
    PuzzleInstance inst;
    inst.domain = Domain::Maze;
    inst.label = target;
    inst.difficulty = Difficulty{std::max(width, height) <= 7 ? Level::Easy : Level::Hard, std::max(width, height)};
    inst.seed = seed;
    inst.id = instance_id(inst.domain, inst.difficulty, inst.label, seed);
    inst.provenance = Json{{"generator", "maze.dfs_carve"}, {"verification", "solver-certified"}};
    if (target == Label::Solvable) {
        const auto reach = solve_bfs(base);
        inst.payload = payload_for(base);
        inst.witness = to_string(std::get<Reachable>(reach).shortest);
    } else {
        std::vector<Pos> flipped;
        const Maze blocked = block_critical(base, mix_seed(seed, 0x626c6f636bULL), &flipped);
        if (!std::holds_alternative<Unreachable>(solve_bfs(blocked))) throw std::logic_error("blocked maze still solvable");
        inst.payload = payload_for(blocked);
        Json cells = Json::array();
        for (const Pos& p : flipped) cells.push_back(Json::array({p.row, p.col}));
        inst.provenance["generator"] = "maze.dfs_carve+strategic_blockage";
        inst.provenance["blocked_cells"] = cells;
    }
    inst.prompt = render_prompt(inst.domain, inst.payload);
    return inst;
}

}  // namespace unsolv::maze
