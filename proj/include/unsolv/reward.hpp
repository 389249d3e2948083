#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "unsolv/instance.hpp"

namespace unsolv {

inline constexpr std::string_view kUnsolvableMarker = "<unsolvable>";
inline constexpr std::string_view kRefusalMarker = "beyond my capabilities";

/// Substrings matched case-insensitively against a response.
struct Markers {
    std::string unsolvable{kUnsolvableMarker};
    std::string refusal{kRefusalMarker};
};

struct Answer {
    std::string payload;
    friend bool operator==(const Answer&, const Answer&) = default;
};
struct UnsolvableTag {
    friend bool operator==(const UnsolvableTag&, const UnsolvableTag&) = default;
};
struct RefusalTag {
    friend bool operator==(const RefusalTag&, const RefusalTag&) = default;
};
/// Both markers at once.
struct Malformed {
    friend bool operator==(const Malformed&, const Malformed&) = default;
};
using ResponseKind = std::variant<Answer, UnsolvableTag, RefusalTag, Malformed>;

std::string_view kind_name(const ResponseKind& kind) noexcept;

/// Final-answer span: contents of the last \boxed{...}, else the last fenced block,
/// else the last non-empty line. Trimmed.
std::string extract_final_answer(std::string_view text);

ResponseKind classify_response(std::string_view text, const Markers& markers = {});

/// Linear ramp from `initial` at step 0 to `terminal` at `horizon`, flat afterwards.
struct TauSchedule {
    double initial = 0.3;
    double terminal = 0.95;
    std::int64_t horizon = 320;

    static TauSchedule fixed(double tau) { return TauSchedule{tau, tau, 0}; }
    /// Throws InvalidArgument unless 0 <= initial <= terminal <= 1 and horizon >= 0.
    void validate() const;
};

double tau_at(std::int64_t step, const TauSchedule& schedule);

struct RewardConfig {
    double rho = -0.5;
    double lambda = 1.0;
    TauSchedule tau;
    Markers markers;

    void validate() const;
};

struct RewardBreakdown {
    double r_acc = 0;
    double r_detect = 0;
    double r_cal = 0;
    double total = 0;

    static RewardBreakdown of(double acc, double detect, double cal) { return {acc, detect, cal, acc + detect + cal}; }
    friend bool operator==(const RewardBreakdown&, const RewardBreakdown&) = default;
};

/// Accuracy and detection parts only; r_cal is left at 0. `answer_correct` must be given
/// exactly when `kind` is an Answer (MissingCorrectness / InvalidArgument otherwise).
RewardBreakdown score(Label label, const ResponseKind& kind, std::optional<bool> answer_correct, const RewardConfig& config);

double calibration_reward(const ResponseKind& kind, double tau, double beta, double lambda);

/// (R_i - mean) / (population std + epsilon). Throws GroupTooSmall below two rewards.
std::vector<double> group_advantages(std::span<const double> rewards, double epsilon = 1e-8);

/// Belief above which declaring unsolvable beats attempting: (e - rho) / (1 + e - rho).
double decision_threshold(double epsilon_cap, double rho);

/// Runs the domain verifier on an extracted answer. Never true for unsolvable instances.
bool answer_is_correct(const PuzzleInstance& instance, std::string_view answer);

struct GradedResponse {
    ResponseKind kind;
    bool correct = false;
    RewardBreakdown breakdown;
};

struct GroupGrade {
    std::vector<GradedResponse> responses;
    double beta = 0;
    double tau = 0;
};

/// Correct means a verified Answer on a solvable instance or the unsolvable marker on an
/// unsolvable one. Refusals and malformed responses count as not correct in beta.
GroupGrade grade_group(const PuzzleInstance& instance, std::span<const std::string> responses, const RewardConfig& config,
                       std::int64_t step);

/// Aggregate metrics over graded responses.
struct GradeSummary {
    std::uint64_t responses = 0;
    std::uint64_t solvable = 0;
    std::uint64_t solvable_correct = 0;
    std::uint64_t unsolvable = 0;
    std::uint64_t unsolvable_detected = 0;
    std::uint64_t refusals = 0;
    double reward_sum = 0;

    void add(Label label, const GradedResponse& graded);
    double s_rate() const noexcept;
    double u_rate() const noexcept;
    double refusal_rate() const noexcept;
    double mean_reward() const noexcept;
    Json to_json() const;
};

}  // namespace unsolv
