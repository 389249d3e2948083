#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "unsolv/reward.hpp"

namespace unsolv::sim {

enum class Action : std::uint8_t { Attempt, Declare, Refuse };
/// Instance types: solvable and easy, unsolvable, hard but solvable.
enum class Context : std::uint8_t { SolvableEasy, Unsolvable, Hard };

inline constexpr std::size_t kActions = 3;
inline constexpr std::size_t kContexts = 3;
using Probs = std::array<double, kActions>;

struct Capability {
    double easy = 0.9;
    double hard = 0.1;
    double at(Context c) const noexcept { return c == Context::SolvableEasy ? easy : c == Context::Hard ? hard : 0.0; }
};

/// Softmax policy over shared + per-context logits. The shared part is what lets
/// training on one context move behaviour on contexts that are never sampled.
struct SyntheticAgent {
    Probs shared{};
    std::array<Probs, kContexts> per_context{};
    Capability capability;
    double learning_rate = 0.1;

    Probs policy(Context c) const;
};

struct Mix {
    double solvable_easy = 0.4;
    double unsolvable = 0.3;
    double hard = 0.3;
};

struct SimConfig {
    Mix mix;
    Capability capability;
    /// Use TauSchedule::fixed for a static threshold.
    RewardConfig reward;
    /// When false, unsolvable instances are dropped from the mix (their declare rate is still probed).
    bool include_unsolvable_data = true;
    int group_size = 12;
    double learning_rate = 0.1;
    std::int64_t steps = 5000;
    std::uint64_t seed = 0;
    Probs initial_logits{};

    /// Throws InvalidArgument on a bad mix (negative, not summing to 1) or parameters.
    void validate() const;
};

/// Per-step series. Rates are policy probabilities after the step's update.
struct SimTrace {
    std::vector<double> refusal_rate;       // mix-weighted P(refuse)
    std::vector<double> declare_rate;       // P(declare | unsolvable)
    std::vector<double> beta;               // sampled group accuracy
    std::vector<double> tau;
    std::vector<double> mean_reward;        // mean group reward
    std::vector<double> hard_refusal_rate;  // P(refuse | hard)
    std::vector<double> solvable_accuracy;  // P(correct | solvable), weighted like the mix

    std::size_t size() const noexcept { return tau.size(); }
};

SimTrace simulate(const SimConfig& config);

struct SeriesSummary {
    double initial = 0;
    double final_window = 0;  // mean of the last 10% of steps (at least one)
    double area = 0;          // mean over all steps
};

struct SimSummary {
    SeriesSummary refusal_rate, declare_rate, beta, tau, mean_reward, hard_refusal_rate, solvable_accuracy;
};

/// Throws EmptyTrace on a zero-length trace.
SimSummary summarize(const SimTrace& trace);

/// Columns: step,refusal_rate,declare_rate,beta,tau,mean_reward
void write_csv(const SimTrace& trace, std::ostream& out);

/// Expected per-context logit change lr * pi_k * (R_k - mean R) under the policy, with
/// beta replaced by its expectation P(attempt) * capability.
Probs expected_logit_update(const SyntheticAgent& agent, Context context, double tau, const RewardConfig& reward);

/// Non-learning agent picking the higher expected reward; ties go to Attempt.
Action greedy_action(double belief_unsolvable, double epsilon_cap, double rho);

}  // namespace unsolv::sim
