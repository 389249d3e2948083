#include "unsolv/reverse_construction.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <sstream>
#include <thread>

#include "unsolv/prompts.hpp"
#include "unsolv/reward.hpp"
#include "unsolv/rng.hpp"

namespace unsolv::revcon {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::vector<std::string> lines_of(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) nl = text.size();
        out.emplace_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return out;
}

// Value after "KEY:" when `line` starts with the key, case-insensitively.
std::optional<std::string> field(std::string_view line, std::string_view key) {
    const std::string t = trim(line);
    if (t.size() <= key.size() || lower(t.substr(0, key.size())) != lower(key)) return std::nullopt;
    std::string_view rest = std::string_view(t).substr(key.size());
    const auto colon = rest.find_first_not_of(" \t");
    if (colon == std::string_view::npos || rest[colon] != ':') return std::nullopt;
    return trim(rest.substr(colon + 1));
}

std::string describe(const ContradictionPlan& p, const SeedProblem* seed) {
    std::ostringstream out;
    out << "STRATEGY: " << to_string(p.strategy) << "\nLOCATION: step " << p.location + 1;
    if (seed) {
        const auto steps = seed->steps();
        if (p.location < steps.size()) out << " (\"" << steps[p.location] << "\")";
    }
    out << "\nMECHANISM: " << p.mechanism;
    return out.str();
}

bool declares_unsolvable(const std::string& response) {
    return std::holds_alternative<UnsolvableTag>(classify_response(response));
}

}  // namespace

void SeedProblem::validate() const {
    if (trim(statement).empty()) throw InvalidArgument("seed statement is empty");
    if (trim(reference_rationale).empty()) throw InvalidArgument("seed rationale is empty");
    if (trim(reference_answer).empty()) throw InvalidArgument("seed answer is empty");
}

std::vector<std::string> SeedProblem::steps() const {
    std::vector<std::string> out;
    for (const auto& line : lines_of(reference_rationale))
        if (auto t = trim(line); !t.empty()) out.push_back(std::move(t));
    return out;
}

std::string_view to_string(Strategy s) noexcept {
    return s == Strategy::ConstraintContradiction ? "constraint_contradiction" : "axiom_contradiction";
}

std::optional<Strategy> parse_strategy(std::string_view text) {
    std::string t = lower(trim(text));
    std::replace(t.begin(), t.end(), '_', ' ');
    std::replace(t.begin(), t.end(), '-', ' ');
    if (t == "constraint" || t == "constraint contradiction") return Strategy::ConstraintContradiction;
    if (t == "axiom" || t == "axiom contradiction") return Strategy::AxiomContradiction;
    return std::nullopt;
}

std::string_view to_string(Tier t) noexcept { return t == Tier::Tier1 ? "tier1" : "tier2"; }
std::string_view to_string(Outcome o) noexcept { return o == Outcome::ConfirmedUnsolvable ? "confirmed_unsolvable" : "rejected"; }

std::string complete_with_retry(TextOracle& oracle, const std::string& prompt) {
    const RetryPolicy policy = oracle.retry_policy();
    const int attempts = std::max(1, policy.max_attempts);
    std::string last_error;
    for (int i = 1; i <= attempts; ++i) {
        try {
            return oracle.complete(prompt);
        } catch (const OracleError& e) {
            last_error = e.what();
            if (i < attempts && policy.backoff.count() > 0) std::this_thread::sleep_for(policy.backoff * i);
        }
    }
    throw OracleError("giving up after " + std::to_string(attempts) + " attempts: " + last_error);
}

ScriptedOracle ScriptedOracle::sequence(std::vector<Reply> replies) {
    if (replies.empty()) throw InvalidArgument("scripted oracle needs at least one reply");
    return ScriptedOracle([replies = std::move(replies)](const std::string&, std::size_t call) {
        return replies[std::min(call, replies.size() - 1)];
    });
}

std::string ScriptedOracle::complete(const std::string& prompt) {
    std::size_t call = 0;
    {
        std::lock_guard lock(mutex_);
        call = calls_.size();
        calls_.push_back(prompt);
    }
    Reply reply = script_(prompt, call);
    if (std::holds_alternative<Timeout>(reply)) throw OracleTimeout("scripted call " + std::to_string(call));
    return std::get<std::string>(std::move(reply));
}

std::vector<std::string> ScriptedOracle::calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

std::size_t ScriptedOracle::call_count() const {
    std::lock_guard lock(mutex_);
    return calls_.size();
}

std::string seed_check_prompt(const SeedProblem& seed) {
    return "Solve the following problem. Put the final answer in \\boxed{}.\n\n" + seed.statement;
}

std::string planner_prompt(const SeedProblem& seed) {
    std::ostringstream out;
    out << "You are given a solvable problem and its reference solution. Design a logical contradiction that "
           "makes a modified version of the problem impossible to solve.\n"
           "Use one of two strategies:\n"
           "- constraint_contradiction: add or alter a condition so the constraints cannot all hold.\n"
           "- axiom_contradiction: require something that violates a mathematical fact or definition.\n\n"
        << "Problem:\n" << seed.statement << "\n\nReference solution (numbered steps):\n";
    const auto steps = seed.steps();
    for (std::size_t i = 0; i < steps.size(); ++i) out << i + 1 << ". " << steps[i] << "\n";
    out << "\nReference answer: " << seed.reference_answer << "\n\n"
        << "Reply with exactly this block:\n```plan\nSTRATEGY: <constraint_contradiction|axiom_contradiction>\n"
           "LOCATION: <step number where the contradiction bites>\nMECHANISM: <one sentence>\n```";
    return out.str();
}

std::string synthesis_prompt(const SeedProblem& seed, const ContradictionPlan& plan) {
    std::ostringstream out;
    out << "Rewrite the problem below so that it contains the planned contradiction and therefore has no "
           "solution. Keep the original wording style, length and level of difficulty, and do not mention "
           "that the problem is contradictory. Output only the new problem statement.\n\n"
        << "Original problem:\n" << seed.statement << "\n\nContradiction plan:\n" << describe(plan, &seed) << "\n";
    return out.str();
}

std::string tier1_prompt(std::string_view candidate) {
    std::string p = "Solve the following problem. If it cannot be solved because its conditions are contradictory, "
                    "reply with ";
    p += kUnsolvableMarker;
    p += " and explain why. Otherwise put the final answer in \\boxed{}.\n\n";
    p += candidate;
    return p;
}

std::string tier2_prompt(std::string_view candidate, const ContradictionPlan& plan, const SeedProblem* seed) {
    std::string p = "The problem below was built to contain the contradiction described in the plan. Check whether "
                    "the contradiction really makes the problem unsolvable. If it does, reply with ";
    p += kUnsolvableMarker;
    p += ". If the problem can still be solved, give the answer in \\boxed{}.\n\nProblem:\n";
    p += candidate;
    p += "\n\nPlan:\n" + describe(plan, seed) + "\n";
    return p;
}

ContradictionPlan parse_plan(std::string_view text, std::size_t step_count) {
    std::vector<std::string> lines = lines_of(text);
    // Prefer the fenced block when one exists.
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lower(trim(lines[i])) != "```plan") continue;
        std::vector<std::string> block;
        for (std::size_t j = i + 1; j < lines.size() && trim(lines[j]) != "```"; ++j) block.push_back(lines[j]);
        lines = std::move(block);
        break;
    }
    std::optional<std::string> strategy, location, mechanism;
    for (const auto& line : lines) {
        if (!strategy) strategy = field(line, "STRATEGY");
        if (!location) location = field(line, "LOCATION");
        if (!mechanism) mechanism = field(line, "MECHANISM");
    }
    if (!strategy || !location || !mechanism) throw PlanParseError("missing STRATEGY, LOCATION or MECHANISM line");
    const auto s = parse_strategy(*strategy);
    if (!s) throw PlanParseError("unknown strategy '" + *strategy + "'");
    const auto digit = location->find_first_of("0123456789");
    if (digit == std::string::npos) throw PlanParseError("LOCATION has no step number");
    std::size_t step = 0;
    try {
        step = std::stoul(location->substr(digit));
    } catch (const std::exception&) {
        throw PlanParseError("LOCATION step number out of range");
    }
    if (step < 1 || step > step_count)
        throw PlanParseError("LOCATION " + std::to_string(step) + " outside 1.." + std::to_string(step_count));
    if (mechanism->empty()) throw PlanParseError("MECHANISM is empty");
    return ContradictionPlan{*s, step - 1, *mechanism};
}

ContradictionPlan plan(const SeedProblem& seed, TextOracle& oracle) {
    seed.validate();
    return parse_plan(complete_with_retry(oracle, planner_prompt(seed)), seed.steps().size());
}

std::string synthesize(const SeedProblem& seed, const ContradictionPlan& p, TextOracle& oracle) {
    std::string out = complete_with_retry(oracle, synthesis_prompt(seed, p));
    if (trim(out).empty()) throw EmptyOutput("synthesis returned no statement");
    return out;
}

VerificationVerdict verify_two_tier(std::string_view candidate, const ContradictionPlan& p, TextOracle& oracle, int tier1_samples,
                                    const SeedProblem* seed) {
    if (trim(candidate).empty()) throw InvalidArgument("candidate statement is empty");
    const std::string first = tier1_prompt(candidate);
    for (int i = 0; i < std::max(1, tier1_samples); ++i)
        if (declares_unsolvable(complete_with_retry(oracle, first))) return {Tier::Tier1, Outcome::ConfirmedUnsolvable};
    if (declares_unsolvable(complete_with_retry(oracle, tier2_prompt(candidate, p, seed))))
        return {Tier::Tier2, Outcome::ConfirmedUnsolvable};
    return {Tier::Tier2, Outcome::Rejected};
}

std::optional<PuzzleInstance> run(const SeedProblem& seed, TextOracle& oracle, RunOptions options) {
    seed.validate();
    if (options.validate_seed) {
        const auto kind = classify_response(complete_with_retry(oracle, seed_check_prompt(seed)));
        const auto* answer = std::get_if<Answer>(&kind);
        const auto norm = [](std::string_view s) {
            std::string o;
            for (char c : s)
                if (!std::isspace(static_cast<unsigned char>(c)) && c != '$') o += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            return o;
        };
        if (!answer || norm(answer->payload) != norm(seed.reference_answer)) return std::nullopt;
    }
    const ContradictionPlan p = plan(seed, oracle);
    const std::string candidate = synthesize(seed, p, oracle);
    const VerificationVerdict verdict = verify_two_tier(candidate, p, oracle, options.tier1_samples, &seed);
    if (verdict.outcome != Outcome::ConfirmedUnsolvable) return std::nullopt;

    PuzzleInstance inst;
    inst.domain = Domain::Math;
    inst.label = Label::Unsolvable;
    inst.difficulty = Difficulty{Level::Hard, static_cast<int>(seed.steps().size())};
    inst.seed = fnv1a64(seed.statement);
    inst.id = instance_id(inst.domain, inst.difficulty, inst.label, inst.seed);
    inst.payload = Json{{"statement", candidate}, {"seed_statement", seed.statement}};
    inst.prompt = render_prompt(inst.domain, inst.payload);
    inst.provenance = Json{{"generator", "reverse_construction"},
                           {"verification", "model-verified"},
                           {"plan", {{"strategy", to_string(p.strategy)}, {"location", p.location}, {"mechanism", p.mechanism}}},
                           {"verdict", {{"tier", to_string(verdict.tier)}, {"outcome", to_string(verdict.outcome)}}},
                           {"tier1_samples", std::max(1, options.tier1_samples)},
                           {"seed_validated", options.validate_seed}};
    return inst;
}

std::vector<BatchItem> run_batch(const std::vector<SeedProblem>& seeds, TextOracle& oracle, std::size_t max_in_flight,
                                 RunOptions options) {
    std::vector<BatchItem> out(seeds.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < seeds.size(); i = next++) {
            try {
                out[i].instance = run(seeds[i], oracle, options);
            } catch (const std::exception& e) {
                out[i].error = e.what();
            }
        }
    };
    const std::size_t workers = std::clamp<std::size_t>(max_in_flight, 1, std::max<std::size_t>(1, seeds.size()));
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    pool.clear();  // joins
    return out;
}

std::vector<SeedProblem> seeds_from_json(const Json& doc) {
    const Json& list = doc.is_object() && doc.contains("seeds") ? doc.at("seeds") : doc;
    if (!list.is_array()) throw InvalidArgument("seed file must be an array or {\"seeds\": [...]}");
    std::vector<SeedProblem> out;
    for (const auto& item : list) {
        SeedProblem s;
        s.statement = item.at("statement").get<std::string>();
        s.reference_rationale = item.at(item.contains("reference_rationale") ? "reference_rationale" : "rationale").get<std::string>();
        s.reference_answer = item.at(item.contains("reference_answer") ? "reference_answer" : "answer").get<std::string>();
        out.push_back(std::move(s));
    }
    return out;
}

HttpOracleConfig HttpOracleConfig::from_json(const Json& doc) {
    HttpOracleConfig c;
    c.endpoint = doc.at("endpoint").get<std::string>();
    c.model = doc.at("model").get<std::string>();
    c.api_key_env = doc.value("api_key_env", c.api_key_env);
    c.temperature = doc.value("temperature", c.temperature);
    c.retry.max_attempts = doc.value("max_attempts", c.retry.max_attempts);
    c.retry.timeout = std::chrono::milliseconds(static_cast<long long>(doc.value("timeout_seconds", 120.0) * 1000));
    c.retry.backoff = std::chrono::milliseconds(static_cast<long long>(doc.value("backoff_seconds", 0.5) * 1000));
    c.debug = doc.value("debug", false);
    if (doc.contains("api_key")) throw InvalidArgument("the API key is read from the environment only; remove api_key from the config");
    return c;
}

}  // namespace unsolv::revcon
