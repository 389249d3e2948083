#include "unsolv/hitori.hpp"

#include <algorithm>
#include <numeric>

#include "unsolv/error.hpp"
#include "unsolv/prompts.hpp"
#include "unsolv/rng.hpp"

namespace unsolv::hitori {

namespace {

constexpr int kDr[4] = {-1, 1, 0, 0};
constexpr int kDc[4] = {0, 0, -1, 1};

// True when every cell accepted by `open` lies in one orthogonal region (false if none does).
template <typename Open>
bool single_region(int n, Open open) {
    std::vector<char> seen(static_cast<std::size_t>(n * n), 0);
    std::vector<int> stack;
    int total = 0;
    int start = -1;
    for (int k = 0; k < n * n; ++k) {
        if (open(k)) {
            ++total;
            if (start < 0) start = k;
        }
    }
    if (start < 0) return false;
    seen[static_cast<std::size_t>(start)] = 1;
    stack.push_back(start);
    int reached = 0;
    while (!stack.empty()) {
        const int k = stack.back();
        stack.pop_back();
        ++reached;
        const int r = k / n, c = k % n;
        for (int d = 0; d < 4; ++d) {
            const int rr = r + kDr[d], cc = c + kDc[d];
            if (rr < 0 || cc < 0 || rr >= n || cc >= n) continue;
            const int kk = rr * n + cc;
            if (seen[static_cast<std::size_t>(kk)] || !open(kk)) continue;
            seen[static_cast<std::size_t>(kk)] = 1;
            stack.push_back(kk);
        }
    }
    return reached == total;
}

class Counter {
public:
    Counter(const Grid& grid, std::uint64_t limit, CountOptions options, std::vector<Shading>* out)
        : grid_(grid),
          n_(grid.size()),
          limit_(limit),
          options_(options),
          out_(out),
          state_(static_cast<std::size_t>(n_ * n_), kFree),
          row_white_(static_cast<std::size_t>(n_ * (n_ + 1)), 0),
          col_white_(static_cast<std::size_t>(n_ * (n_ + 1)), 0) {
        order_.resize(static_cast<std::size_t>(n_ * n_));
        std::iota(order_.begin(), order_.end(), 0);
        if (options.ordering == Ordering::DuplicatesFirst) {
            std::vector<int> weight(order_.size(), 0);
            for (int k = 0; k < n_ * n_; ++k) {
                const int r = k / n_, c = k % n_, v = grid.at(r, c);
                for (int j = 0; j < n_; ++j) {
                    if (j != c && grid.at(r, j) == v) ++weight[static_cast<std::size_t>(k)];
                    if (j != r && grid.at(j, c) == v) ++weight[static_cast<std::size_t>(k)];
                }
            }
            std::stable_sort(order_.begin(), order_.end(),
                             [&](int a, int b) { return weight[static_cast<std::size_t>(a)] > weight[static_cast<std::size_t>(b)]; });
        }
    }

    std::uint64_t run() {
        if (limit_ > 0) search(0);
        return count_;
    }

private:
    static constexpr char kFree = -1;
    static constexpr char kWhite = 0;
    static constexpr char kBlack = 1;

    char& cell(int k) { return state_[static_cast<std::size_t>(k)]; }
    int& row_count(int r, int v) { return row_white_[static_cast<std::size_t>(r * (n_ + 1) + v)]; }
    int& col_count(int c, int v) { return col_white_[static_cast<std::size_t>(c * (n_ + 1) + v)]; }

    bool black_neighbor(int k) const {
        const int r = k / n_, c = k % n_;
        for (int d = 0; d < 4; ++d) {
            const int rr = r + kDr[d], cc = c + kDc[d];
            if (rr < 0 || cc < 0 || rr >= n_ || cc >= n_) continue;
            if (state_[static_cast<std::size_t>(rr * n_ + cc)] == kBlack) return true;
        }
        return false;
    }

    // Returns false once the limit is reached.
    bool search(std::size_t depth) {
        if (depth == order_.size()) return accept();
        const int k = order_[depth];
        const int r = k / n_, c = k % n_, v = grid_.at(r, c);

        if (row_count(r, v) == 0 && col_count(c, v) == 0) {
            cell(k) = kWhite;
            ++row_count(r, v);
            ++col_count(c, v);
            const bool go_on = search(depth + 1);
            --row_count(r, v);
            --col_count(c, v);
            cell(k) = kFree;
            if (!go_on) return false;
        }
        if (!black_neighbor(k)) {
            cell(k) = kBlack;
            bool viable = true;
            if (options_.connectivity_pruning)
                viable = single_region(n_, [&](int i) { return state_[static_cast<std::size_t>(i)] != kBlack; });
            const bool go_on = viable ? search(depth + 1) : true;
            cell(k) = kFree;
            if (!go_on) return false;
        }
        return true;
    }

    bool accept() {
        if (!single_region(n_, [&](int i) { return state_[static_cast<std::size_t>(i)] == kWhite; })) return true;
        ++count_;
        if (out_) {
            Shading s = Shading::none(n_);
            for (int k = 0; k < n_ * n_; ++k)
                if (state_[static_cast<std::size_t>(k)] == kBlack) s.set(k / n_, k % n_, true);
            out_->push_back(std::move(s));
        }
        return count_ < limit_;
    }

    const Grid& grid_;
    int n_;
    std::uint64_t limit_;
    CountOptions options_;
    std::vector<Shading>* out_;
    std::vector<char> state_;
    std::vector<int> row_white_;
    std::vector<int> col_white_;
    std::vector<int> order_;
    std::uint64_t count_ = 0;
};

Grid planted_grid(int n, Rng& rng) {
    const int cells_n = n * n;
    std::vector<char> black(static_cast<std::size_t>(cells_n), 0);
    std::vector<int> order(static_cast<std::size_t>(cells_n));
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(std::span<int>(order));
    const auto has_black_neighbor = [&](int k) {
        const int r = k / n, c = k % n;
        for (int d = 0; d < 4; ++d) {
            const int rr = r + kDr[d], cc = c + kDc[d];
            if (rr >= 0 && cc >= 0 && rr < n && cc < n && black[static_cast<std::size_t>(rr * n + cc)]) return true;
        }
        return false;
    };
    // Greedy maximal shading: afterwards no further cell can be shaded legally.
    for (int k : order) {
        if (has_black_neighbor(k)) continue;
        black[static_cast<std::size_t>(k)] = 1;
        if (!single_region(n, [&](int i) { return !black[static_cast<std::size_t>(i)]; })) black[static_cast<std::size_t>(k)] = 0;
    }

    std::vector<int> rows(static_cast<std::size_t>(n)), cols(static_cast<std::size_t>(n)), symbols(static_cast<std::size_t>(n));
    std::iota(rows.begin(), rows.end(), 0);
    std::iota(cols.begin(), cols.end(), 0);
    std::iota(symbols.begin(), symbols.end(), 1);
    rng.shuffle(std::span<int>(rows));
    rng.shuffle(std::span<int>(cols));
    rng.shuffle(std::span<int>(symbols));
    std::vector<int> cells(static_cast<std::size_t>(cells_n));
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            cells[static_cast<std::size_t>(r * n + c)] = symbols[static_cast<std::size_t>((rows[static_cast<std::size_t>(r)] + cols[static_cast<std::size_t>(c)]) % n)];

    for (int k = 0; k < cells_n; ++k) {
        if (!black[static_cast<std::size_t>(k)]) continue;
        const int r = k / n, c = k % n;
        std::vector<int> pool;
        for (int j = 0; j < n; ++j) {
            if (j != c && !black[static_cast<std::size_t>(r * n + j)]) pool.push_back(cells[static_cast<std::size_t>(r * n + j)]);
            if (j != r && !black[static_cast<std::size_t>(j * n + c)]) pool.push_back(cells[static_cast<std::size_t>(j * n + c)]);
        }
        if (!pool.empty()) cells[static_cast<std::size_t>(k)] = pool[static_cast<std::size_t>(rng.below(pool.size()))];
    }
    return Grid::make(n, std::move(cells));
}

Grid sample_grid(int n, Sampler sampler, Rng& rng) {
    if (sampler == Sampler::Planted) return planted_grid(n, rng);
    std::vector<int> cells(static_cast<std::size_t>(n * n));
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            int v = static_cast<int>(rng.uniform_int(1, n));
            if (sampler == Sampler::DuplicateBiased && c > 0 && rng.bernoulli(0.35))
                v = cells[static_cast<std::size_t>(r * n + static_cast<int>(rng.below(static_cast<std::uint64_t>(c))))];
            cells[static_cast<std::size_t>(r * n + c)] = v;
        }
    }
    return Grid::make(n, std::move(cells));
}

}  // namespace

Grid Grid::make(int n, std::vector<int> cells) {
    if (n < 1) throw InvalidArgument("hitori grid size must be positive");
    if (cells.size() != static_cast<std::size_t>(n * n))
        throw DimensionMismatch("hitori grid expects " + std::to_string(n * n) + " cells");
    for (int v : cells)
        if (v < 1 || v > n) throw InvalidArgument("hitori value " + std::to_string(v) + " outside [1, n]");
    return Grid(n, std::move(cells));
}

Grid Grid::from_rows(const std::vector<std::vector<int>>& rows) {
    const int n = static_cast<int>(rows.size());
    std::vector<int> cells;
    for (const auto& row : rows) {
        if (row.size() != rows.size()) throw DimensionMismatch("hitori grid must be square");
        cells.insert(cells.end(), row.begin(), row.end());
    }
    return make(n, std::move(cells));
}

Shading Shading::none(int n) {
    if (n < 1) throw InvalidArgument("shading size must be positive");
    return Shading(n);
}

Shading Shading::from_cells(int n, std::span<const Cell> shaded) {
    Shading s = none(n);
    for (const auto& [r, c] : shaded) {
        if (r < 0 || c < 0 || r >= n || c >= n) throw DimensionMismatch("shaded cell outside the grid");
        s.set(r, c, true);
    }
    return s;
}

Shading Shading::from_mask(int n, std::uint64_t mask) {
    Shading s = none(n);
    for (int k = 0; k < n * n; ++k)
        if ((mask >> k) & 1U) s.set(k / n, k % n, true);
    return s;
}

std::vector<Cell> Shading::shaded_cells() const {
    std::vector<Cell> out;
    for (int r = 0; r < n_; ++r)
        for (int c = 0; c < n_; ++c)
            if (shaded(r, c)) out.emplace_back(r, c);
    return out;
}

std::string_view to_string(Rule rule) noexcept {
    switch (rule) {
        case Rule::Uniqueness: return "uniqueness";
        case Rule::Adjacency: return "adjacency";
        case Rule::Connectivity: return "connectivity";
    }
    return "unknown";
}

std::string_view to_string(Sampler sampler) noexcept {
    switch (sampler) {
        case Sampler::Uniform: return "uniform";
        case Sampler::DuplicateBiased: return "duplicate_biased";
        case Sampler::Planted: return "planted";
    }
    return "unknown";
}

Verdict check_shading(const Grid& grid, const Shading& shading) {
    const int n = grid.size();
    if (shading.size() != n) throw DimensionMismatch("shading is " + std::to_string(shading.size()) + "x" +
                                                     std::to_string(shading.size()) + ", grid is " + std::to_string(n));
    std::vector<int> seen(static_cast<std::size_t>(n + 1));
    for (int line = 0; line < n; ++line) {
        std::fill(seen.begin(), seen.end(), 0);
        for (int j = 0; j < n; ++j)
            if (!shading.shaded(line, j) && seen[static_cast<std::size_t>(grid.at(line, j))]++) return Invalid{Rule::Uniqueness};
        std::fill(seen.begin(), seen.end(), 0);
        for (int j = 0; j < n; ++j)
            if (!shading.shaded(j, line) && seen[static_cast<std::size_t>(grid.at(j, line))]++) return Invalid{Rule::Uniqueness};
    }
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            if (!shading.shaded(r, c)) continue;
            if ((r + 1 < n && shading.shaded(r + 1, c)) || (c + 1 < n && shading.shaded(r, c + 1))) return Invalid{Rule::Adjacency};
        }
    }
    if (!single_region(n, [&](int k) { return !shading.shaded(k / n, k % n); })) return Invalid{Rule::Connectivity};
    return Valid{};
}

std::uint64_t count_solutions(const Grid& grid, std::uint64_t limit, CountOptions options, std::vector<Shading>* solutions) {
    if (grid.size() > kMaxCountingSize)
        throw InvalidArgument("exact hitori counting is limited to n <= " + std::to_string(kMaxCountingSize));
    return Counter(grid, limit, options, solutions).run();
}

Json payload_for(const Grid& grid) {
    return Json{{"n", grid.size()}, {"cells", std::vector<int>(grid.cells().begin(), grid.cells().end())}};
}

Grid grid_from_payload(const Json& payload) {
    return Grid::make(payload.at("n").get<int>(), payload.at("cells").get<std::vector<int>>());
}

Json witness_for(const Shading& shading) {
    Json cells = Json::array();
    for (const auto& [r, c] : shading.shaded_cells()) cells.push_back(Json::array({r, c}));
    return cells;
}

PuzzleInstance generate(int n, Label target, std::uint64_t seed, std::uint64_t max_attempts, Sampler sampler) {
    if (n < 3 || n > kMaxCountingSize) throw InvalidArgument("hitori size must be in [3, 6]");
    if (sampler == Sampler::Planted && target == Label::Unsolvable)
        throw InvalidArgument("the planted sampler always has a solution; use another sampler for unsolvable grids");
    Rng rng(seed);
    const std::uint64_t wanted = target == Label::Solvable ? 1 : 0;
    for (std::uint64_t attempt = 1; attempt <= max_attempts; ++attempt) {
        const Grid grid = sample_grid(n, sampler, rng);
        std::vector<Shading> found;
        // Limit 2 separates "none", "exactly one" and "several".
        if (count_solutions(grid, 2, {}, &found) != wanted) continue;

        PuzzleInstance inst;
        inst.domain = Domain::Hitori;
        inst.label = target;
        inst.difficulty = Difficulty{n <= 4 ? Level::Easy : Level::Hard, n};
        inst.seed = seed;
        inst.id = instance_id(inst.domain, inst.difficulty, inst.label, seed);
        inst.payload = payload_for(grid);
        if (wanted == 1) inst.witness = witness_for(found.front());
        inst.prompt = render_prompt(inst.domain, inst.payload);
        inst.provenance = Json{{"generator", "hitori.rejection_sampling"},
                               {"sampler", to_string(sampler)},
                               {"attempts", attempt},
                               {"verification", "solver-certified"}};
        return inst;
    }
    throw ExhaustedAttempts("hitori generate n=" + std::to_string(n) + " after " + std::to_string(max_attempts));
}

}  // namespace unsolv::hitori
