#include "unsolv/reward.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "unsolv/error.hpp"
#include "unsolv/game24.hpp"
#include "unsolv/hamiltonian.hpp"
#include "unsolv/hitori.hpp"
#include "unsolv/maze.hpp"

namespace unsolv {

namespace {

std::string lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool contains_ci(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return false;
    return lower(haystack).find(lower(needle)) != std::string::npos;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::optional<std::string> last_boxed(std::string_view text) {
    constexpr std::string_view tag = "\\boxed{";
    const auto at = text.rfind(tag);
    if (at == std::string_view::npos) return std::nullopt;
    int depth = 1;
    const std::size_t begin = at + tag.size();
    for (std::size_t i = begin; i < text.size(); ++i) {
        if (text[i] == '{') ++depth;
        else if (text[i] == '}' && --depth == 0) return std::string(text.substr(begin, i - begin));
    }
    return std::nullopt;  // unbalanced: fall through to the other rules
}

std::optional<std::string> last_fenced(std::string_view text) {
    const auto close = text.rfind("```");
    if (close == std::string_view::npos || close == 0) return std::nullopt;
    const auto open = text.rfind("```", close - 1);
    if (open == std::string_view::npos) return std::nullopt;
    std::string_view body = text.substr(open + 3, close - open - 3);
    // Drop an info string such as ```text.
    if (const auto nl = body.find('\n'); nl != std::string_view::npos && body.substr(0, nl).find(' ') == std::string_view::npos)
        body.remove_prefix(nl + 1);
    return std::string(body);
}

std::vector<long long> integers_in(std::string_view text) {
    std::vector<long long> out;
    for (std::size_t i = 0; i < text.size();) {
        if (std::isdigit(static_cast<unsigned char>(text[i]))) {
            long long v = 0;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
                v = v * 10 + (text[i] - '0');
                if (v > 1'000'000'000) return {};
                ++i;
            }
            out.push_back(v);
        } else {
            ++i;
        }
    }
    return out;
}

std::string normalize_math(std::string_view text) {
    std::string out;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch)) && ch != '$') out += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return out;
}

bool check_game24(const PuzzleInstance& inst, std::string_view answer) {
    const auto set = game24::numbers_from_payload(inst.payload, true);
    // Accept "expr = 24" by dropping everything from the first '='.
    const auto eq = answer.find('=');
    const auto expr = eq == std::string_view::npos ? answer : answer.substr(0, eq);
    return std::holds_alternative<game24::Correct>(game24::check_answer(set, expr));
}

bool check_ham(const PuzzleInstance& inst, std::string_view answer) {
    const auto graph = ham::graph_from_payload(inst.payload);
    const auto mode = ham::mode_from_payload(inst.payload);
    std::vector<int> order;
    for (long long v : integers_in(answer)) order.push_back(static_cast<int>(v));
    // A closed tour may repeat the first vertex at the end.
    if (mode == ham::Mode::Cycle && order.size() == static_cast<std::size_t>(graph.vertex_count()) + 1 && order.front() == order.back())
        order.pop_back();
    return ham::check_sequence(graph, order, mode);
}

bool check_hitori(const PuzzleInstance& inst, std::string_view answer) {
    const auto grid = hitori::grid_from_payload(inst.payload);
    const auto nums = integers_in(answer);
    if (nums.size() % 2 != 0) return false;
    std::vector<hitori::Cell> cells;
    for (std::size_t i = 0; i < nums.size(); i += 2) {
        if (nums[i] >= grid.size() || nums[i + 1] >= grid.size()) return false;
        cells.emplace_back(static_cast<int>(nums[i]), static_cast<int>(nums[i + 1]));
    }
    const auto shading = hitori::Shading::from_cells(grid.size(), cells);
    return std::holds_alternative<hitori::Valid>(hitori::check_shading(grid, shading));
}

bool check_maze(const PuzzleInstance& inst, std::string_view answer) {
    const auto maze = maze::maze_from_payload(inst.payload);
    const auto moves = maze::parse_moves(answer);
    return moves && maze::check_moves(maze, *moves);
}

bool check_math(const PuzzleInstance& inst, std::string_view answer) {
    for (const char* key : {"reference_answer", "answer"}) {
        if (inst.payload.contains(key) && inst.payload.at(key).is_string()) {
            const auto ref = normalize_math(inst.payload.at(key).get<std::string>());
            return !ref.empty() && ref == normalize_math(answer);
        }
    }
    return false;
}

}  // namespace

std::string_view kind_name(const ResponseKind& kind) noexcept {
    switch (kind.index()) {
        case 0: return "answer";
        case 1: return "unsolvable";
        case 2: return "refusal";
        default: return "malformed";
    }
}

std::string extract_final_answer(std::string_view text) {
    if (auto boxed = last_boxed(text)) return trim(*boxed);
    if (auto fenced = last_fenced(text)) return trim(*fenced);
    std::string last;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = trim(text.substr(start, nl - start));
        if (!line.empty()) last = std::move(line);
        start = nl + 1;
    }
    return last;
}

ResponseKind classify_response(std::string_view text, const Markers& markers) {
    const bool unsolvable = contains_ci(text, markers.unsolvable);
    const bool refusal = contains_ci(text, markers.refusal);
    if (unsolvable && refusal) return Malformed{};
    if (unsolvable) return UnsolvableTag{};
    if (refusal) return RefusalTag{};
    return Answer{extract_final_answer(text)};
}

void TauSchedule::validate() const {
    if (!(initial >= 0 && initial <= terminal && terminal <= 1)) throw InvalidArgument("tau schedule needs 0 <= initial <= terminal <= 1");
    if (horizon < 0) throw InvalidArgument("tau horizon must be non-negative");
}

double tau_at(std::int64_t step, const TauSchedule& schedule) {
    if (step < 0) throw InvalidArgument("step must be non-negative");
    if (step == 0) return schedule.initial;
    if (step >= schedule.horizon) return schedule.terminal;
    const double t = static_cast<double>(step) / static_cast<double>(schedule.horizon);
    // Clamp guards against rounding pushing an interior step past the terminal value.
    return std::min(schedule.terminal, schedule.initial + (schedule.terminal - schedule.initial) * t);
}

void RewardConfig::validate() const {
    if (!(rho <= 0)) throw InvalidArgument("rho must be <= 0");
    if (!(lambda > 0)) throw InvalidArgument("lambda must be > 0");
    tau.validate();
}

RewardBreakdown score(Label label, const ResponseKind& kind, std::optional<bool> answer_correct, const RewardConfig& config) {
    const bool is_answer = std::holds_alternative<Answer>(kind);
    if (is_answer && !answer_correct) throw MissingCorrectness();
    if (!is_answer && answer_correct) throw InvalidArgument("correctness flag given for a non-answer response");
    if (is_answer) {
        const double acc = label == Label::Solvable && *answer_correct ? 1.0 : 0.0;
        return RewardBreakdown::of(acc, 0, 0);
    }
    if (std::holds_alternative<UnsolvableTag>(kind)) return RewardBreakdown::of(0, label == Label::Unsolvable ? 1.0 : config.rho, 0);
    return RewardBreakdown::of(0, 0, 0);
}

double calibration_reward(const ResponseKind& kind, double tau, double beta, double lambda) {
    if (!std::holds_alternative<RefusalTag>(kind)) return 0;
    return lambda * (tau - beta);
}

std::vector<double> group_advantages(std::span<const double> rewards, double epsilon) {
    if (rewards.size() < 2) throw GroupTooSmall(rewards.size());
    const double n = static_cast<double>(rewards.size());
    const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
    double var = 0;
    for (double r : rewards) var += (r - mean) * (r - mean);
    const double sigma = std::sqrt(var / n);
    std::vector<double> out;
    out.reserve(rewards.size());
    for (double r : rewards) out.push_back((r - mean) / (sigma + epsilon));
    return out;
}

double decision_threshold(double epsilon_cap, double rho) {
    if (!(epsilon_cap >= 0 && epsilon_cap <= 1)) throw InvalidArgument("epsilon_cap must lie in [0, 1]");
    if (!(rho <= 0)) throw InvalidArgument("rho must be <= 0");
    // Extended precision keeps e.g. (0.1, -0.5) at exactly 0.375 after rounding.
    const long double gap = static_cast<long double>(epsilon_cap) - static_cast<long double>(rho);
    return static_cast<double>(gap / (1.0L + gap));
}

bool answer_is_correct(const PuzzleInstance& instance, std::string_view answer) {
    if (instance.label == Label::Unsolvable) return false;
    try {
        switch (instance.domain) {
            case Domain::Game24: return check_game24(instance, answer);
            case Domain::HamCycle:
            case Domain::HamPath: return check_ham(instance, answer);
            case Domain::Hitori: return check_hitori(instance, answer);
            case Domain::Maze: return check_maze(instance, answer);
            case Domain::Math: return check_math(instance, answer);
        }
    } catch (const InvalidArgument&) {
        return false;  // unparseable answer; also covers DimensionMismatch
    }
    throw UnknownDomain("no checker for domain " + std::to_string(static_cast<int>(instance.domain)));
}

GroupGrade grade_group(const PuzzleInstance& instance, std::span<const std::string> responses, const RewardConfig& config,
                       std::int64_t step) {
    GroupGrade grade;
    grade.tau = tau_at(step, config.tau);
    std::size_t correct = 0;
    for (const auto& text : responses) {
        GradedResponse g;
        g.kind = classify_response(text, config.markers);
        std::optional<bool> flag;
        if (const auto* a = std::get_if<Answer>(&g.kind)) {
            flag = answer_is_correct(instance, a->payload);
            g.correct = *flag;
        } else if (std::holds_alternative<UnsolvableTag>(g.kind)) {
            g.correct = instance.label == Label::Unsolvable;
        }
        g.breakdown = score(instance.label, g.kind, flag, config);
        correct += g.correct ? 1 : 0;
        grade.responses.push_back(std::move(g));
    }
    grade.beta = responses.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(responses.size());
    for (auto& g : grade.responses) {
        const double cal = calibration_reward(g.kind, grade.tau, grade.beta, config.lambda);
        g.breakdown = RewardBreakdown::of(g.breakdown.r_acc, g.breakdown.r_detect, cal);
    }
    return grade;
}

void GradeSummary::add(Label label, const GradedResponse& graded) {
    ++responses;
    if (label == Label::Solvable) {
        ++solvable;
        if (graded.correct) ++solvable_correct;
    } else {
        ++unsolvable;
        if (graded.correct) ++unsolvable_detected;
    }
    if (std::holds_alternative<RefusalTag>(graded.kind)) ++refusals;
    reward_sum += graded.breakdown.total;
}

namespace {
double ratio(std::uint64_t a, std::uint64_t b) noexcept { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); }
}  // namespace

double GradeSummary::s_rate() const noexcept { return ratio(solvable_correct, solvable); }
double GradeSummary::u_rate() const noexcept { return ratio(unsolvable_detected, unsolvable); }
double GradeSummary::refusal_rate() const noexcept { return ratio(refusals, responses); }
double GradeSummary::mean_reward() const noexcept { return responses == 0 ? 0.0 : reward_sum / static_cast<double>(responses); }

Json GradeSummary::to_json() const {
    return Json{{"responses", responses},     {"solvable", solvable},         {"unsolvable", unsolvable},
                {"s_rate", s_rate()},         {"u_rate", u_rate()},           {"refusal_rate", refusal_rate()},
                {"mean_reward", mean_reward()}};
}

}  // namespace unsolv
