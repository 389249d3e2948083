#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "unsolv/error.hpp"
#include "unsolv/instance.hpp"

namespace unsolv::revcon {

struct SeedProblem {
    std::string statement;
    std::string reference_rationale;
    std::string reference_answer;

    /// Throws InvalidArgument when any field is blank.
    void validate() const;
    /// Non-empty, trimmed rationale lines; plan locations index into this.
    std::vector<std::string> steps() const;
};

enum class Strategy : std::uint8_t { ConstraintContradiction, AxiomContradiction };
std::string_view to_string(Strategy s) noexcept;
/// Accepts "constraint", "constraint contradiction", "constraint_contradiction" and the axiom forms.
std::optional<Strategy> parse_strategy(std::string_view text);

struct ContradictionPlan {
    Strategy strategy = Strategy::ConstraintContradiction;
    std::size_t location = 0;  // 0-based rationale step
    std::string mechanism;
    friend bool operator==(const ContradictionPlan&, const ContradictionPlan&) = default;
};

enum class Tier : std::uint8_t { Tier1, Tier2 };
enum class Outcome : std::uint8_t { ConfirmedUnsolvable, Rejected };
std::string_view to_string(Tier t) noexcept;
std::string_view to_string(Outcome o) noexcept;

struct VerificationVerdict {
    Tier tier = Tier::Tier1;
    Outcome outcome = Outcome::Rejected;
    friend bool operator==(const VerificationVerdict&, const VerificationVerdict&) = default;
};

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds timeout{120'000};
    std::chrono::milliseconds backoff{500};
};

/// A request that ran out of time; retried like any other transport failure.
class OracleTimeout : public OracleError {
public:
    explicit OracleTimeout(const std::string& what) : OracleError("timeout: " + what) {}
};

/// Text-completion backend. Implementations throw OracleError on transport failure and
/// must be safe to call from several threads when used with run_batch.
class TextOracle {
public:
    virtual ~TextOracle() = default;
    virtual std::string complete(const std::string& prompt) = 0;
    virtual RetryPolicy retry_policy() const { return {}; }
};

/// Calls the oracle, retrying OracleError up to the policy's attempt count.
std::string complete_with_retry(TextOracle& oracle, const std::string& prompt);

/// Test double: replies come from a script and every prompt is logged.
class ScriptedOracle : public TextOracle {
public:
    struct Timeout {};
    using Reply = std::variant<std::string, Timeout>;
    using Script = std::function<Reply(const std::string& prompt, std::size_t call)>;

    explicit ScriptedOracle(Script script, RetryPolicy policy = {3, std::chrono::milliseconds(1000), std::chrono::milliseconds(0)})
        : script_(std::move(script)), policy_(policy) {}
    /// Replies in order; the last one repeats once the list runs out.
    static ScriptedOracle sequence(std::vector<Reply> replies);

    std::string complete(const std::string& prompt) override;
    RetryPolicy retry_policy() const override { return policy_; }

    std::vector<std::string> calls() const;
    std::size_t call_count() const;

private:
    Script script_;
    RetryPolicy policy_;
    mutable std::mutex mutex_;
    std::vector<std::string> calls_;
};

// Prompt builders, exposed so tests can assert on their content.
std::string seed_check_prompt(const SeedProblem& seed);
std::string planner_prompt(const SeedProblem& seed);
std::string synthesis_prompt(const SeedProblem& seed, const ContradictionPlan& plan);
std::string tier1_prompt(std::string_view candidate);
std::string tier2_prompt(std::string_view candidate, const ContradictionPlan& plan, const SeedProblem* seed = nullptr);

/// Reads the ```plan block (or bare STRATEGY/LOCATION/MECHANISM lines). LOCATION is 1-based
/// in the text and must fall within `step_count`. Throws PlanParseError.
ContradictionPlan parse_plan(std::string_view text, std::size_t step_count);

ContradictionPlan plan(const SeedProblem& seed, TextOracle& oracle);
/// Returns the oracle output verbatim; EmptyOutput when it is blank.
std::string synthesize(const SeedProblem& seed, const ContradictionPlan& plan, TextOracle& oracle);
/// Tier 1 shows the candidate alone (`tier1_samples` tries); only if none declares it
/// unsolvable does Tier 2 show candidate and plan.
VerificationVerdict verify_two_tier(std::string_view candidate, const ContradictionPlan& plan, TextOracle& oracle,
                                    int tier1_samples = 1, const SeedProblem* seed = nullptr);

struct RunOptions {
    /// Ask the oracle to solve the seed first and drop it unless the reference answer comes back.
    bool validate_seed = false;
    int tier1_samples = 1;
};

/// Math instance labeled Unsolvable, present only when verification confirms.
std::optional<PuzzleInstance> run(const SeedProblem& seed, TextOracle& oracle, RunOptions options = {});

struct BatchItem {
    std::optional<PuzzleInstance> instance;
    std::string error;  // set when a stage threw
};

/// Seeds run concurrently on at most `max_in_flight` workers, so at most that many oracle
/// requests are outstanding. Results keep the input order.
std::vector<BatchItem> run_batch(const std::vector<SeedProblem>& seeds, TextOracle& oracle, std::size_t max_in_flight,
                                 RunOptions options = {});

std::vector<SeedProblem> seeds_from_json(const Json& doc);

/// OpenAI-style chat-completion endpoint. The key is read from the environment only.
struct HttpOracleConfig {
    std::string endpoint;  // e.g. https://host/v1/chat/completions
    std::string model;
    std::string api_key_env = "UNSOLV_API_KEY";
    double temperature = 0.6;
    RetryPolicy retry;
    bool debug = false;

    static HttpOracleConfig from_json(const Json& doc);
};

/// Throws InvalidArgument for a bad endpoint, a missing key variable, or https without TLS support.
std::unique_ptr<TextOracle> make_http_oracle(const HttpOracleConfig& config);

}  // namespace unsolv::revcon
