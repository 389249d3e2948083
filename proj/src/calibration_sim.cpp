#include "unsolv/calibration_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "unsolv/error.hpp"
#include "unsolv/rng.hpp"

namespace unsolv::sim {

namespace {

constexpr std::array<Context, kContexts> kAllContexts = {Context::SolvableEasy, Context::Unsolvable, Context::Hard};

std::size_t idx(Context c) noexcept { return static_cast<std::size_t>(c); }
std::size_t idx(Action a) noexcept { return static_cast<std::size_t>(a); }

Label label_of(Context c) noexcept { return c == Context::Unsolvable ? Label::Unsolvable : Label::Solvable; }

ResponseKind kind_of(Action a) {
    switch (a) {
        case Action::Attempt: return Answer{};
        case Action::Declare: return UnsolvableTag{};
        case Action::Refuse: return RefusalTag{};
    }
    return Malformed{};
}

std::array<double, kContexts> mix_weights(const SimConfig& config) {
    std::array<double, kContexts> w = {config.mix.solvable_easy, config.include_unsolvable_data ? config.mix.unsolvable : 0.0,
                                       config.mix.hard};
    const double total = w[0] + w[1] + w[2];
    for (auto& x : w) x /= total;
    return w;
}

}  // namespace

Probs SyntheticAgent::policy(Context c) const {
    Probs logits;
    for (std::size_t k = 0; k < kActions; ++k) logits[k] = shared[k] + per_context[idx(c)][k];
    const double top = *std::max_element(logits.begin(), logits.end());
    double z = 0;
    for (auto& l : logits) z += (l = std::exp(l - top));
    for (auto& l : logits) l /= z;
    return logits;
}

void SimConfig::validate() const {
    const double parts[] = {mix.solvable_easy, mix.unsolvable, mix.hard};
    for (double p : parts)
        if (!(p >= 0)) throw InvalidArgument("mix fractions must be non-negative");
    if (std::abs(parts[0] + parts[1] + parts[2] - 1.0) > 1e-9) throw InvalidArgument("mix fractions must sum to 1");
    if (mix.solvable_easy + mix.hard + (include_unsolvable_data ? mix.unsolvable : 0.0) <= 0)
        throw InvalidArgument("mix leaves no instance type to train on");
    for (double e : {capability.easy, capability.hard})
        if (!(e >= 0 && e <= 1)) throw InvalidArgument("capability must lie in [0, 1]");
    if (group_size < 1) throw InvalidArgument("group size must be positive");
    if (!(learning_rate > 0)) throw InvalidArgument("learning rate must be positive");
    if (steps < 0) throw InvalidArgument("steps must be non-negative");
    reward.validate();
}

SimTrace simulate(const SimConfig& config) {
    config.validate();
    Rng rng(config.seed);
    SyntheticAgent agent;
    agent.shared = config.initial_logits;
    agent.capability = config.capability;
    agent.learning_rate = config.learning_rate;
    const auto weights = mix_weights(config);
    const double solvable_weight = weights[idx(Context::SolvableEasy)] + weights[idx(Context::Hard)];

    SimTrace trace;
    const auto n = static_cast<std::size_t>(config.steps);
    for (auto* series : {&trace.refusal_rate, &trace.declare_rate, &trace.beta, &trace.tau, &trace.mean_reward,
                         &trace.hard_refusal_rate, &trace.solvable_accuracy})
        series->reserve(n);

    const auto g = static_cast<std::size_t>(config.group_size);
    std::vector<Action> actions(g);
    std::vector<char> correct(g);
    std::vector<double> rewards(g);

    for (std::int64_t step = 0; step < config.steps; ++step) {
        const Context ctx = kAllContexts[rng.weighted_index(std::span<const double>(weights))];
        const Probs pi = agent.policy(ctx);
        const double tau = tau_at(step, config.reward.tau);
        const double eps = config.capability.at(ctx);

        std::size_t hits = 0;
        for (std::size_t i = 0; i < g; ++i) {
            actions[i] = static_cast<Action>(rng.weighted_index(std::span<const double>(pi)));
            correct[i] = 0;
            if (actions[i] == Action::Attempt) correct[i] = ctx != Context::Unsolvable && rng.bernoulli(eps);
            else if (actions[i] == Action::Declare) correct[i] = ctx == Context::Unsolvable;
            hits += correct[i] ? 1 : 0;
        }
        const double beta = static_cast<double>(hits) / static_cast<double>(g);

        double reward_sum = 0;
        Probs grad{};
        for (std::size_t i = 0; i < g; ++i) {
            const ResponseKind kind = kind_of(actions[i]);
            const std::optional<bool> flag = actions[i] == Action::Attempt ? std::optional<bool>(correct[i] != 0) : std::nullopt;
            const auto part = score(label_of(ctx), kind, flag, config.reward);
            rewards[i] = part.r_acc + part.r_detect + calibration_reward(kind, tau, beta, config.reward.lambda);
            reward_sum += rewards[i];
            for (std::size_t k = 0; k < kActions; ++k) grad[k] += rewards[i] * ((idx(actions[i]) == k ? 1.0 : 0.0) - pi[k]);
        }
        for (std::size_t k = 0; k < kActions; ++k) {
            const double delta = config.learning_rate * grad[k] / static_cast<double>(g);
            agent.shared[k] += delta;
            agent.per_context[idx(ctx)][k] += delta;
        }

        double refusal = 0, accuracy = 0;
        for (Context c : kAllContexts) {
            const Probs p = agent.policy(c);
            refusal += weights[idx(c)] * p[idx(Action::Refuse)];
            if (c != Context::Unsolvable) accuracy += weights[idx(c)] * p[idx(Action::Attempt)] * config.capability.at(c);
        }
        trace.refusal_rate.push_back(refusal);
        trace.declare_rate.push_back(agent.policy(Context::Unsolvable)[idx(Action::Declare)]);
        trace.beta.push_back(beta);
        trace.tau.push_back(tau);
        trace.mean_reward.push_back(reward_sum / static_cast<double>(g));
        trace.hard_refusal_rate.push_back(agent.policy(Context::Hard)[idx(Action::Refuse)]);
        trace.solvable_accuracy.push_back(solvable_weight > 0 ? accuracy / solvable_weight : 0.0);
    }
    return trace;
}

namespace {

SeriesSummary summarize_series(const std::vector<double>& s) {
    const std::size_t window = std::max<std::size_t>(1, (s.size() + 9) / 10);
    SeriesSummary out;
    out.initial = s.front();
    out.final_window = std::accumulate(s.end() - static_cast<std::ptrdiff_t>(window), s.end(), 0.0) / static_cast<double>(window);
    out.area = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    return out;
}

}  // namespace

SimSummary summarize(const SimTrace& trace) {
    if (trace.size() == 0) throw EmptyTrace();
    return SimSummary{summarize_series(trace.refusal_rate), summarize_series(trace.declare_rate),
                      summarize_series(trace.beta),         summarize_series(trace.tau),
                      summarize_series(trace.mean_reward),  summarize_series(trace.hard_refusal_rate),
                      summarize_series(trace.solvable_accuracy)};
}

void write_csv(const SimTrace& trace, std::ostream& out) {
    out << "step,refusal_rate,declare_rate,beta,tau,mean_reward\n";
    for (std::size_t i = 0; i < trace.size(); ++i)
        out << i << ',' << trace.refusal_rate[i] << ',' << trace.declare_rate[i] << ',' << trace.beta[i] << ',' << trace.tau[i]
            << ',' << trace.mean_reward[i] << '\n';
}

Probs expected_logit_update(const SyntheticAgent& agent, Context context, double tau, const RewardConfig& reward) {
    const Probs pi = agent.policy(context);
    const double eps = agent.capability.at(context);
    const bool unsolvable = context == Context::Unsolvable;
    const double beta = unsolvable ? pi[idx(Action::Declare)] : pi[idx(Action::Attempt)] * eps;
    Probs r{};
    r[idx(Action::Attempt)] = unsolvable ? 0.0 : eps;
    r[idx(Action::Declare)] = unsolvable ? 1.0 : reward.rho;
    r[idx(Action::Refuse)] = reward.lambda * (tau - beta);
    const double mean = pi[0] * r[0] + pi[1] * r[1] + pi[2] * r[2];
    Probs out;
    for (std::size_t k = 0; k < kActions; ++k) out[k] = agent.learning_rate * pi[k] * (r[k] - mean);
    return out;
}

Action greedy_action(double belief_unsolvable, double epsilon_cap, double rho) {
    const double attempt = (1 - belief_unsolvable) * epsilon_cap;
    const double reject = belief_unsolvable + (1 - belief_unsolvable) * rho;
    return reject > attempt ? Action::Declare : Action::Attempt;
}

}  // namespace unsolv::sim
