#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <thread>

#include "unsolv/calibration_sim.hpp"
#include "unsolv/dataset.hpp"
#include "unsolv/error.hpp"
#include "unsolv/game24.hpp"
#include "unsolv/hamiltonian.hpp"
#include "unsolv/hitori.hpp"
#include "unsolv/maze.hpp"
#include "unsolv/prompts.hpp"
#include "unsolv/reverse_construction.hpp"
#include "unsolv/reward.hpp"
#include "unsolv/rng.hpp"

namespace unsolv::cli {

namespace {

/// Bad flag values found after parsing; reported with exit code 2.
class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(what) {}
};

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw SchemaError(0, path + ": " + e.what());
    }
}

// ---- gen ----------------------------------------------------------------------------------

struct GenArgs {
    std::vector<std::string> domains;
    std::size_t solvable = 0;
    std::size_t unsolvable = 0;
    std::string difficulty = "easy";
    int scale = 0;
    std::uint64_t seed = 0;
    std::string split = "train";
    std::string out;
    std::string templates;
    std::string strategy;
    std::string hitori_sampler = "auto";
    std::uint64_t max_attempts = 200'000;
    unsigned threads = 0;
};

const std::vector<Domain> kPuzzleDomains = {Domain::Game24, Domain::HamCycle, Domain::HamPath, Domain::Hitori, Domain::Maze};

struct Job {
    Domain domain;
    Label label;
    Level level;
    std::size_t index;
};

int default_scale(Domain d, Level level) {
    const bool easy = level == Level::Easy;
    switch (d) {
        // Six-number unsolvable sets are too rare for uniform rejection sampling, so Hard means
        // five numbers for both labels; --scale 6 still works for solvable draws.
        case Domain::Game24: return easy ? 4 : 5;
        case Domain::HamCycle:
        case Domain::HamPath: return easy ? 7 : 12;
        case Domain::Hitori: return easy ? 4 : 5;
        case Domain::Maze: return easy ? 7 : 11;
        case Domain::Math: break;
    }
    throw UsageError("math instances come from revgen, not gen");
}

std::uint64_t job_seed(std::uint64_t base, const Job& job, std::uint64_t salt) {
    std::string tag = std::string(to_string(job.domain)) + "|" + std::string(to_string(job.label)) + "|" + std::string(to_string(job.level));
    return mix_seed(mix_seed(mix_seed(base, fnv1a64(tag)), job.index), salt);
}

PuzzleInstance make_instance(const GenArgs& args, const Job& job, std::uint64_t seed) {
    const int scale = args.scale > 0 ? args.scale : default_scale(job.domain, job.level);
    switch (job.domain) {
        case Domain::Game24: return game24::sample(scale, job.label, seed, args.max_attempts);
        case Domain::HamCycle:
        case Domain::HamPath: {
            std::optional<ham::Strategy> strategy;
            if (!args.strategy.empty()) strategy = ham::parse_strategy(args.strategy);
            return ham::generate(job.domain == Domain::HamCycle ? ham::Mode::Cycle : ham::Mode::Path, scale, job.label, strategy, seed);
        }
        case Domain::Hitori: {
            // Same proposal for both labels, so grid statistics carry no label signal.
            hitori::Sampler sampler = hitori::Sampler::Uniform;
            if (args.hitori_sampler == "uniform") sampler = hitori::Sampler::Uniform;
            else if (args.hitori_sampler == "duplicate_biased") sampler = hitori::Sampler::DuplicateBiased;
            else if (args.hitori_sampler == "planted") sampler = hitori::Sampler::Planted;
            return hitori::generate(scale, job.label, seed, args.max_attempts, sampler);
        }
        case Domain::Maze: return maze::generate(scale, scale, job.label, seed);
        case Domain::Math: break;
    }
    throw UsageError("unsupported domain for gen");
}

// Two instances are duplicates when their puzzles coincide; Game24 compares the multiset.
std::string dedup_key(const PuzzleInstance& inst) {
    if (inst.domain == Domain::Game24) {
        auto nums = inst.payload.at("numbers").get<std::vector<int>>();
        std::sort(nums.begin(), nums.end());
        return "game24|" + Json(nums).dump();
    }
    return std::string(to_string(inst.domain)) + "|" + inst.payload.dump();
}

template <typename F>
void parallel_for(std::size_t count, unsigned threads, F body) {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    const auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

int cmd_gen(const GenArgs& args, std::ostream& out, std::ostream& err) {
    std::vector<Domain> domains;
    for (const auto& name : args.domains) {
        if (name == "all") {
            domains.insert(domains.end(), kPuzzleDomains.begin(), kPuzzleDomains.end());
            continue;
        }
        Domain d;
        try {
            d = parse_domain(name);
        } catch (const UnknownDomain&) {
            throw UsageError("unknown domain '" + name + "'");
        }
        if (d == Domain::Math) throw UsageError("math instances come from revgen, not gen");
        domains.push_back(d);
    }
    if (args.difficulty != "easy" && args.difficulty != "hard" && args.difficulty != "mixed")
        throw UsageError("--difficulty must be easy, hard or mixed");
    const Split split = parse_split(args.split);
    if (!args.strategy.empty()) ham::parse_strategy(args.strategy);

    std::vector<Job> jobs;
    for (Domain d : domains) {
        for (Label label : {Label::Solvable, Label::Unsolvable}) {
            const std::size_t count = label == Label::Solvable ? args.solvable : args.unsolvable;
            for (std::size_t i = 0; i < count; ++i) {
                Level level = args.difficulty == "hard" ? Level::Hard : Level::Easy;
                if (args.difficulty == "mixed") level = i % 2 == 0 ? Level::Easy : Level::Hard;
                jobs.push_back(Job{d, label, level, i});
            }
        }
    }

    const unsigned threads = args.threads > 0 ? args.threads : std::max(1u, std::thread::hardware_concurrency());
    std::vector<PuzzleInstance> made(jobs.size());
    parallel_for(jobs.size(), threads, [&](std::size_t i) { made[i] = make_instance(args, jobs[i], job_seed(args.seed, jobs[i], 0)); });

    // Sequential, in job order, so the outcome does not depend on thread timing.
    std::set<std::string> seen;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        std::uint64_t salt = 0;
        while (!seen.insert(dedup_key(made[i])).second) {
            if (++salt > 1000) throw ExhaustedAttempts("could not find a fresh " + std::string(to_string(jobs[i].domain)) + " instance");
            made[i] = make_instance(args, jobs[i], job_seed(args.seed, jobs[i], salt));
        }
    }

    TemplateSet templates = split == Split::Test ? TemplateSet::test_defaults() : TemplateSet::train_defaults();
    if (!args.templates.empty()) templates = TemplateSet::from_json(read_json_file(args.templates), templates);
    std::vector<DatasetRecord> records;
    records.reserve(made.size());
    for (auto& inst : made) {
        const std::size_t variant = split == Split::Test ? static_cast<std::size_t>(inst.seed % 1000003) : 0;
        inst.prompt = render_prompt(inst.domain, inst.payload, templates, variant);
        records.push_back(DatasetRecord{std::move(inst), split, Json::object()});
    }
    std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.instance.id < b.instance.id; });

    if (args.out.empty() || args.out == "-") {
        dataset::write_jsonl(records, out);
    } else {
        Json config{{"domains", args.domains}, {"solvable", args.solvable},   {"unsolvable", args.unsolvable},
                    {"difficulty", args.difficulty}, {"scale", args.scale},   {"seed", args.seed},
                    {"split", args.split},      {"strategy", args.strategy}, {"hitori_sampler", args.hitori_sampler}};
        dataset::write_records(records, args.out, config);
        err << "wrote " << records.size() << " records to " << args.out << "\n";
    }
    return kExitOk;
}

// ---- verify / stats ----------------------------------------------------------------------

int cmd_verify(const std::vector<std::string>& files, std::ostream& out, std::ostream& err) {
    std::size_t total = 0, problems = 0;
    for (const auto& file : files) {
        const auto records = dataset::read_records(file);
        total += records.size();
        for (const auto& issue : dataset::verify(records)) {
            ++problems;
            err << file << ": record " << issue.index + 1 << " (" << issue.id << "): " << issue.message << "\n";
        }
        if (std::filesystem::exists(dataset::manifest_path(file)) && !dataset::read_manifest(file).matches(records)) {
            ++problems;
            err << file << ": manifest counts do not match the records\n";
        }
    }
    out << "verified " << total << " records, " << problems << " problem" << (problems == 1 ? "" : "s") << "\n";
    return problems == 0 ? kExitOk : kExitValidation;
}

int cmd_stats(const std::vector<std::string>& files, bool as_json, std::ostream& out) {
    std::vector<DatasetRecord> all;
    for (const auto& file : files) {
        auto records = dataset::read_records(file);
        all.insert(all.end(), std::make_move_iterator(records.begin()), std::make_move_iterator(records.end()));
    }
    const auto table = dataset::stats(all);
    if (!as_json) {
        out << dataset::format_stats(table);
        return kExitOk;
    }
    Json doc = Json::array();
    for (const auto& [split, sub] : table.splits)
        for (const auto& [domain, row] : sub.rows)
            doc.push_back(Json{{"split", to_string(split)}, {"domain", to_string(domain)}, {"solvable", row.solvable},
                               {"unsolvable", row.unsolvable}, {"total", row.total()}});
    out << doc.dump(2) << "\n";
    return kExitOk;
}

// ---- grade --------------------------------------------------------------------------------

struct RewardArgs {
    double rho = -0.5;
    double lambda = 1.0;
    double tau0 = 0.3;
    double tau1 = 0.95;
    std::int64_t horizon = 320;
    double fixed_tau = -1;  // negative: use the schedule

    RewardConfig config() const {
        RewardConfig c;
        c.rho = rho;
        c.lambda = lambda;
        c.tau = fixed_tau >= 0 ? TauSchedule::fixed(fixed_tau) : TauSchedule{tau0, tau1, horizon};
        try {
            c.validate();
        } catch (const InvalidArgument& e) {
            throw UsageError(e.what());
        }
        return c;
    }
};

void add_reward_flags(CLI::App* cmd, RewardArgs& r) {
    cmd->add_option("--rho", r.rho, "False-unsolvability penalty (<= 0)")->capture_default_str();
    cmd->add_option("--lambda", r.lambda, "Calibration scale (> 0)")->capture_default_str();
    cmd->add_option("--tau0", r.tau0, "Initial target accuracy")->capture_default_str();
    cmd->add_option("--tau1", r.tau1, "Terminal target accuracy")->capture_default_str();
    cmd->add_option("--horizon", r.horizon, "Steps from tau0 to tau1")->capture_default_str();
    cmd->add_option("--fixed-tau", r.fixed_tau, "Use a constant tau instead of the schedule");
}

int cmd_grade(const std::string& instances_path, const std::string& responses_path, std::int64_t step, const RewardArgs& reward,
              const std::string& out_path, const std::string& summary_path, std::ostream& out, std::ostream& err) {
    const RewardConfig config = reward.config();
    std::map<std::string, PuzzleInstance> by_id;
    for (auto& rec : dataset::read_records(instances_path)) by_id.emplace(rec.instance.id, std::move(rec.instance));

    std::vector<std::string> order;
    std::map<std::string, std::vector<std::string>> groups;
    std::ifstream in(responses_path);
    if (!in) throw IoError("cannot open " + responses_path);
    std::string line;
    for (std::size_t number = 1; std::getline(in, line); ++number) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Json doc;
        try {
            doc = Json::parse(line);
        } catch (const Json::parse_error& e) {
            throw SchemaError(number, e.what());
        }
        if (!doc.contains("instance_id")) throw SchemaError(number, "missing 'instance_id'");
        const auto id = doc.at("instance_id").get<std::string>();
        if (!groups.contains(id)) order.push_back(id);
        auto& group = groups[id];
        if (doc.contains("responses")) {
            for (const auto& r : doc.at("responses")) group.push_back(r.get<std::string>());
        } else if (doc.contains("response")) {
            group.push_back(doc.at("response").get<std::string>());
        } else {
            throw SchemaError(number, "needs 'response' or 'responses'");
        }
    }

    std::ofstream file;
    if (!out_path.empty() && out_path != "-") {
        file.open(out_path);
        if (!file) throw IoError("cannot open " + out_path);
    }
    std::ostream& sink = file.is_open() ? static_cast<std::ostream&>(file) : out;

    GradeSummary summary;
    std::size_t unknown = 0;
    for (const auto& id : order) {
        const auto it = by_id.find(id);
        if (it == by_id.end()) {
            err << "no instance with id " << id << "\n";
            ++unknown;
            continue;
        }
        const auto grade = grade_group(it->second, groups[id], config, step);
        for (std::size_t i = 0; i < grade.responses.size(); ++i) {
            const auto& g = grade.responses[i];
            summary.add(it->second.label, g);
            sink << Json{{"instance_id", id},           {"index", i},
                         {"kind", kind_name(g.kind)},   {"correct", g.correct},
                         {"r_acc", g.breakdown.r_acc},  {"r_detect", g.breakdown.r_detect},
                         {"r_cal", g.breakdown.r_cal},  {"total", g.breakdown.total},
                         {"beta", grade.beta},          {"tau", grade.tau}}
                        .dump()
                 << "\n";
        }
    }
    const std::string text = summary.to_json().dump(2) + "\n";
    if (!summary_path.empty()) {
        std::ofstream s(summary_path);
        if (!s) throw IoError("cannot open " + summary_path);
        s << text;
    } else {
        err << text;
    }
    return unknown == 0 ? kExitOk : kExitValidation;
}

// ---- sim ----------------------------------------------------------------------------------

struct SimArgs {
    RewardArgs reward;
    std::vector<double> mix{0.4, 0.3, 0.3};
    double easy = 0.9;
    double hard = 0.1;
    bool no_unsolvable = false;
    int group = 12;
    double lr = 0.1;
    std::int64_t steps = 5000;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_sim(const SimArgs& a, std::ostream& out, std::ostream& err) {
    sim::SimConfig c;
    if (a.mix.size() != 3) throw UsageError("--mix takes three fractions: solvable-easy, unsolvable, hard");
    c.mix = sim::Mix{a.mix[0], a.mix[1], a.mix[2]};
    c.capability = sim::Capability{a.easy, a.hard};
    c.reward = a.reward.config();
    c.include_unsolvable_data = !a.no_unsolvable;
    c.group_size = a.group;
    c.learning_rate = a.lr;
    c.steps = a.steps;
    c.seed = a.seed;
    try {
        c.validate();
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    const auto trace = sim::simulate(c);
    if (a.out.empty() || a.out == "-") {
        sim::write_csv(trace, out);
    } else {
        std::ofstream f(a.out);
        if (!f) throw IoError("cannot open " + a.out);
        sim::write_csv(trace, f);
    }
    if (trace.size() > 0) {
        const auto s = sim::summarize(trace);
        const auto pack = [](const sim::SeriesSummary& x) { return Json{{"initial", x.initial}, {"final", x.final_window}, {"area", x.area}}; };
        err << Json{{"refusal_rate", pack(s.refusal_rate)},
                    {"declare_rate", pack(s.declare_rate)},
                    {"beta", pack(s.beta)},
                    {"tau", pack(s.tau)},
                    {"mean_reward", pack(s.mean_reward)},
                    {"hard_refusal_rate", pack(s.hard_refusal_rate)},
                    {"solvable_accuracy", pack(s.solvable_accuracy)}}
                   .dump(2)
            << "\n";
    }
    return kExitOk;
}

// ---- revgen -------------------------------------------------------------------------------

struct RevArgs {
    std::string seeds;
    std::string oracle;
    std::string out;
    std::string split = "train";
    std::size_t max_in_flight = 4;
    int tier1_samples = 1;
    bool validate_seeds = false;
    bool debug = false;
};

int cmd_revgen(const RevArgs& a, std::ostream& out, std::ostream& err) {
    const Split split = parse_split(a.split);
    const auto seeds = revcon::seeds_from_json(read_json_file(a.seeds));
    auto config = revcon::HttpOracleConfig::from_json(read_json_file(a.oracle));
    config.debug = config.debug || a.debug;
    auto oracle = revcon::make_http_oracle(config);
    const auto results = revcon::run_batch(seeds, *oracle, a.max_in_flight, {a.validate_seeds, a.tier1_samples});

    std::vector<DatasetRecord> records;
    std::size_t failures = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (!results[i].error.empty()) {
            ++failures;
            err << "seed " << i + 1 << ": " << results[i].error << "\n";
        } else if (results[i].instance) {
            records.push_back(DatasetRecord{*results[i].instance, split, Json::object()});
        }
    }
    std::sort(records.begin(), records.end(), [](const auto& x, const auto& y) { return x.instance.id < y.instance.id; });
    if (a.out.empty() || a.out == "-") dataset::write_jsonl(records, out);
    else dataset::write_records(records, a.out, Json{{"seeds", a.seeds}, {"tier1_samples", a.tier1_samples}});
    err << records.size() << " of " << seeds.size() << " seeds confirmed unsolvable\n";
    return failures == 0 ? kExitOk : kExitValidation;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Generate, verify and grade solvable/unsolvable reasoning instances", "unsolv"};
    app.require_subcommand(1);
    app.set_version_flag("--version", dataset::kToolVersion);

    GenArgs gen;
    auto* g = app.add_subcommand("gen", "Generate puzzle instances");
    g->add_option("--domain", gen.domains, "game24, hamcycle, hampath, hitori, maze or all (comma-separated)")
        ->required()
        ->delimiter(',');
    g->add_option("--solvable", gen.solvable, "Solvable instances per domain")->capture_default_str();
    g->add_option("--unsolvable", gen.unsolvable, "Unsolvable instances per domain")->capture_default_str();
    g->add_option("--difficulty", gen.difficulty, "easy, hard or mixed")->capture_default_str();
    g->add_option("--scale", gen.scale, "Override the size (Game24 k, graph n, Hitori n, maze side)");
    g->add_option("--seed", gen.seed, "Base seed")->required();
    g->add_option("--split", gen.split, "train or test")->capture_default_str();
    g->add_option("--out", gen.out, "Output JSONL path (default stdout)");
    g->add_option("--templates", gen.templates, "JSON file of prompt templates");
    g->add_option("--strategy", gen.strategy, "Hamiltonian unsolvability: disconnect, bottleneck, dead_end");
    g->add_option("--hitori-sampler", gen.hitori_sampler, "auto (same as uniform), uniform, duplicate_biased or planted")->capture_default_str();
    g->add_option("--max-attempts", gen.max_attempts, "Rejection-sampling cap per instance")->capture_default_str();
    g->add_option("--threads", gen.threads, "Worker threads (default: all cores)");

    std::vector<std::string> verify_files;
    auto* v = app.add_subcommand("verify", "Re-certify labels and witnesses in JSONL files");
    v->add_option("files", verify_files, "Record files")->required();

    std::vector<std::string> stats_files;
    bool stats_json = false;
    auto* s = app.add_subcommand("stats", "Per-split, per-domain label counts");
    s->add_option("files", stats_files, "Record files")->required();
    s->add_flag("--json", stats_json, "Emit JSON instead of a table");

    std::string instances, responses, grade_out, grade_summary;
    std::int64_t step = 0;
    RewardArgs grade_reward;
    auto* gr = app.add_subcommand("grade", "Score responses against instances");
    gr->add_option("--instances", instances, "Instance JSONL")->required();
    gr->add_option("--responses", responses, "JSONL of {instance_id, response|responses}")->required();
    gr->add_option("--step", step, "Training step for the tau schedule")->capture_default_str();
    gr->add_option("--out", grade_out, "Breakdown JSONL path (default stdout)");
    gr->add_option("--summary", grade_summary, "Summary JSON path (default stderr)");
    add_reward_flags(gr, grade_reward);

    SimArgs sim_args;
    auto* sm = app.add_subcommand("sim", "Run the refusal-calibration simulator, CSV out");
    add_reward_flags(sm, sim_args.reward);
    sm->add_option("--mix", sim_args.mix, "solvable-easy,unsolvable,hard fractions")->delimiter(',')->expected(3);
    sm->add_option("--capability-easy", sim_args.easy)->capture_default_str();
    sm->add_option("--capability-hard", sim_args.hard)->capture_default_str();
    sm->add_flag("--no-unsolvable", sim_args.no_unsolvable, "Drop unsolvable instances from training");
    sm->add_option("--group-size", sim_args.group)->capture_default_str();
    sm->add_option("--lr", sim_args.lr)->capture_default_str();
    sm->add_option("--steps", sim_args.steps)->capture_default_str();
    sm->add_option("--seed", sim_args.seed)->capture_default_str();
    sm->add_option("--out", sim_args.out, "CSV path (default stdout)");

    RevArgs rev;
    auto* rv = app.add_subcommand("revgen", "Build unsolvable math problems with a remote model");
    rv->add_option("--seeds", rev.seeds, "JSON list of {statement, reference_rationale, reference_answer}")->required();
    rv->add_option("--oracle", rev.oracle, "Oracle config JSON (endpoint, model, api_key_env, ...)")->required();
    rv->add_option("--out", rev.out, "Output JSONL path (default stdout)");
    rv->add_option("--split", rev.split)->capture_default_str();
    rv->add_option("--max-in-flight", rev.max_in_flight)->capture_default_str();
    rv->add_option("--tier1-samples", rev.tier1_samples)->capture_default_str();
    rv->add_flag("--validate-seeds", rev.validate_seeds, "Drop seeds the model cannot solve first");
    rv->add_flag("--debug", rev.debug, "Log request and response bodies (key redacted)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (*g) return cmd_gen(gen, out, err);
        if (*v) return cmd_verify(verify_files, out, err);
        if (*s) return cmd_stats(stats_files, stats_json, out);
        if (*gr) return cmd_grade(instances, responses, step, grade_reward, grade_out, grade_summary, out, err);
        if (*sm) return cmd_sim(sim_args, out, err);
        if (*rv) return cmd_revgen(rev, out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitUsage;
}

}  // namespace unsolv::cli
