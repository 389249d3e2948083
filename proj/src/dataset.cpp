#include "unsolv/dataset.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "unsolv/error.hpp"
#include "unsolv/game24.hpp"
#include "unsolv/hamiltonian.hpp"
#include "unsolv/hitori.hpp"
#include "unsolv/maze.hpp"
#include "unsolv/rng.hpp"

namespace unsolv::dataset {

namespace {

const char* const kRequired[] = {"id", "domain", "split", "label", "difficulty", "prompt", "payload", "witness", "seed", "provenance"};

template <typename T>
T field_as(const Json& doc, const char* key, std::size_t line) {
    try {
        return doc.at(key).get<T>();
    } catch (const Json::exception&) {
        throw SchemaError(line, std::string("field '") + key + "' has the wrong type");
    }
}

template <typename F>
auto enum_field(const Json& doc, const char* key, std::size_t line, F parse) {
    const auto text = field_as<std::string>(doc, key, line);
    try {
        return parse(text);
    } catch (const Error&) {
        throw SchemaError(line, std::string("field '") + key + "' has unknown value '" + text + "'");
    }
}

std::string hex64(std::uint64_t v) {
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << v;
    return out.str();
}

// Empty string when the record checks out.
std::string check_puzzle(const PuzzleInstance& inst) {
    const bool solvable = inst.label == Label::Solvable;
    if (solvable != inst.witness.has_value()) return solvable ? "solvable instance has no witness" : "unsolvable instance carries a witness";
    switch (inst.domain) {
        case Domain::Game24: {
            const auto set = game24::numbers_from_payload(inst.payload);
            const bool found = std::holds_alternative<game24::Solvable>(game24::classify(set));
            if (found != solvable) return "label mismatch: solver says " + std::string(found ? "solvable" : "unsolvable");
            if (solvable && !std::holds_alternative<game24::Correct>(game24::check_answer(set, inst.witness->get<std::string>())))
                return "witness expression does not make 24";
            return {};
        }
        case Domain::HamCycle:
        case Domain::HamPath: {
            const auto graph = ham::graph_from_payload(inst.payload);
            const auto mode = ham::mode_from_payload(inst.payload);
            if ((mode == ham::Mode::Cycle) != (inst.domain == Domain::HamCycle)) return "payload mode disagrees with domain";
            const bool found = std::holds_alternative<ham::Solvable>(ham::decide(graph, mode));
            if (found != solvable) return "label mismatch: solver says " + std::string(found ? "solvable" : "unsolvable");
            if (solvable && !ham::check_sequence(graph, inst.witness->get<std::vector<int>>(), mode)) return "witness order is not a valid tour";
            return {};
        }
        case Domain::Hitori: {
            const auto grid = hitori::grid_from_payload(inst.payload);
            const auto count = hitori::count_solutions(grid, 2);
            if (count >= 2) return "grid has several solutions";
            if ((count == 1) != solvable) return "label mismatch: counter found " + std::to_string(count) + " solutions";
            if (solvable) {
                const auto cells = inst.witness->get<std::vector<hitori::Cell>>();
                if (!std::holds_alternative<hitori::Valid>(hitori::check_shading(grid, hitori::Shading::from_cells(grid.size(), cells))))
                    return "witness shading is invalid";
            }
            return {};
        }
        case Domain::Maze: {
            const auto maze = maze::maze_from_payload(inst.payload);
            const bool found = std::holds_alternative<maze::Reachable>(maze::solve_bfs(maze));
            if (found != solvable) return "label mismatch: BFS says " + std::string(found ? "reachable" : "unreachable");
            if (solvable) {
                const auto moves = maze::parse_moves(inst.witness->get<std::string>());
                if (!moves || !maze::check_moves(maze, *moves)) return "witness moves do not reach the exit";
            }
            return {};
        }
        case Domain::Math:
            if (inst.provenance.value("verification", "") != "model-verified") return "math instance lacks model verification";
            if (inst.label == Label::Unsolvable && !inst.provenance.contains("verdict")) return "math instance has no verdict";
            return {};
    }
    return "unknown domain";
}

}  // namespace

Json to_json(const DatasetRecord& record) {
    const auto& inst = record.instance;
    Json doc = record.extra.is_object() ? record.extra : Json::object();
    doc["id"] = inst.id;
    doc["domain"] = to_string(inst.domain);
    doc["split"] = to_string(record.split);
    doc["label"] = to_string(inst.label);
    doc["difficulty"] = Json{{"level", to_string(inst.difficulty.level)}, {"scale", inst.difficulty.scale}};
    doc["prompt"] = inst.prompt;
    doc["payload"] = inst.payload;
    doc["witness"] = inst.witness ? *inst.witness : Json(nullptr);
    doc["seed"] = inst.seed;
    doc["provenance"] = inst.provenance;
    return doc;
}

DatasetRecord from_json(const Json& doc, std::size_t line) {
    if (!doc.is_object()) throw SchemaError(line, "record is not a JSON object");
    for (const char* key : kRequired)
        if (!doc.contains(key)) throw SchemaError(line, std::string("missing required field '") + key + "'");
    DatasetRecord rec;
    auto& inst = rec.instance;
    inst.id = field_as<std::string>(doc, "id", line);
    inst.domain = enum_field(doc, "domain", line, parse_domain);
    rec.split = enum_field(doc, "split", line, parse_split);
    inst.label = enum_field(doc, "label", line, parse_label);
    const Json& diff = doc.at("difficulty");
    if (!diff.is_object() || !diff.contains("level") || !diff.contains("scale"))
        throw SchemaError(line, "difficulty needs 'level' and 'scale'");
    inst.difficulty.level = enum_field(diff, "level", line, parse_level);
    inst.difficulty.scale = field_as<int>(diff, "scale", line);
    inst.prompt = field_as<std::string>(doc, "prompt", line);
    inst.payload = doc.at("payload");
    if (!doc.at("witness").is_null()) inst.witness = doc.at("witness");
    if (!doc.at("seed").is_number_unsigned() && !(doc.at("seed").is_number_integer() && doc.at("seed").get<std::int64_t>() >= 0))
        throw SchemaError(line, "field 'seed' must be a non-negative integer");
    inst.seed = doc.at("seed").get<std::uint64_t>();
    inst.provenance = doc.at("provenance");
    for (const auto& [key, value] : doc.items()) {
        bool known = false;
        for (const char* k : kRequired) known = known || key == k;
        if (!known) rec.extra[key] = value;
    }
    return rec;
}

void write_jsonl(std::span<const DatasetRecord> records, std::ostream& out) {
    for (const auto& r : records) out << to_json(r).dump() << '\n';
}

std::vector<DatasetRecord> read_jsonl(std::istream& in) {
    std::vector<DatasetRecord> out;
    std::string line;
    for (std::size_t number = 1; std::getline(in, line); ++number) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Json doc;
        try {
            doc = Json::parse(line);
        } catch (const Json::parse_error& e) {
            throw SchemaError(number, std::string("invalid JSON: ") + e.what());
        }
        out.push_back(from_json(doc, number));
    }
    return out;
}

Manifest Manifest::of(std::span<const DatasetRecord> records, const Json& config) {
    Manifest m;
    for (const auto& r : records) ++m.counts[CountKey{r.split, r.instance.domain, r.instance.label}];
    m.total = records.size();
    m.config_digest = hex64(fnv1a64(config.dump()));
    return m;
}

Json Manifest::to_json() const {
    Json list = Json::array();
    for (const auto& [key, n] : counts)
        list.push_back(Json{{"split", to_string(key.split)}, {"domain", to_string(key.domain)}, {"label", to_string(key.label)}, {"count", n}});
    return Json{{"counts", list}, {"total", total}, {"config_digest", config_digest}, {"tool_version", tool_version}};
}

Manifest Manifest::from_json(const Json& doc) {
    Manifest m;
    for (const auto& item : doc.at("counts"))
        m.counts[CountKey{parse_split(item.at("split").get<std::string>()), parse_domain(item.at("domain").get<std::string>()),
                          parse_label(item.at("label").get<std::string>())}] = item.at("count").get<std::uint64_t>();
    m.total = doc.at("total").get<std::uint64_t>();
    m.config_digest = doc.value("config_digest", "");
    m.tool_version = doc.value("tool_version", "");
    return m;
}

bool Manifest::matches(std::span<const DatasetRecord> records) const {
    const Manifest recount = of(records, Json::object());
    return recount.counts == counts && recount.total == total;
}

std::filesystem::path manifest_path(const std::filesystem::path& records_path) {
    return records_path.string() + ".manifest.json";
}

Manifest write_records(std::span<const DatasetRecord> records, const std::filesystem::path& path, const Json& config) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_jsonl(records, out);
    out.close();
    if (!out) throw IoError("failed writing " + path.string());

    Manifest m = Manifest::of(records, config);
    std::ofstream mf(manifest_path(path), std::ios::binary | std::ios::trunc);
    if (!mf) throw IoError("cannot open " + manifest_path(path).string() + " for writing");
    mf << m.to_json().dump(2) << '\n';
    if (!mf) throw IoError("failed writing manifest");
    return m;
}

std::vector<DatasetRecord> read_records(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return read_jsonl(in);
}

Manifest read_manifest(const std::filesystem::path& records_path) {
    std::ifstream in(manifest_path(records_path));
    if (!in) throw IoError("cannot open " + manifest_path(records_path).string());
    try {
        return Manifest::from_json(Json::parse(in));
    } catch (const Json::exception& e) {
        throw SchemaError(0, std::string("bad manifest: ") + e.what());
    }
}

StatsTable stats(std::span<const DatasetRecord> records) {
    StatsTable table;
    for (const auto& r : records) {
        auto& split = table.splits[r.split];
        auto& row = split.rows[r.instance.domain];
        const bool s = r.instance.label == Label::Solvable;
        (s ? row.solvable : row.unsolvable) += 1;
        (s ? split.totals.solvable : split.totals.unsolvable) += 1;
        (s ? table.grand_total.solvable : table.grand_total.unsolvable) += 1;
    }
    return table;
}

std::string format_stats(const StatsTable& table) {
    std::ostringstream out;
    const auto row = [&](std::string_view name, const Row& r) {
        out << std::left << std::setw(12) << name << std::right << std::setw(10) << r.solvable << std::setw(12) << r.unsolvable
            << std::setw(8) << r.total() << '\n';
    };
    if (table.splits.empty()) out << "(no records)\n";
    for (const auto& [split, sub] : table.splits) {
        out << "[" << to_string(split) << "]\n"
            << std::left << std::setw(12) << "domain" << std::right << std::setw(10) << "solvable" << std::setw(12) << "unsolvable"
            << std::setw(8) << "total" << '\n';
        for (const auto& [domain, r] : sub.rows) row(to_string(domain), r);
        row("total", sub.totals);
        out << '\n';
    }
    row("all", table.grand_total);
    return out.str();
}

std::vector<VerifyIssue> verify(std::span<const DatasetRecord> records) {
    std::vector<VerifyIssue> issues;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& inst = records[i].instance;
        std::string problem;
        try {
            problem = check_puzzle(inst);
        } catch (const std::exception& e) {
            problem = std::string("verifier error: ") + e.what();
        }
        if (!problem.empty()) issues.push_back({i, inst.id, problem});
        if (inst.id != instance_id(inst.domain, inst.difficulty, inst.label, inst.seed))
            issues.push_back({i, inst.id, "id does not match (domain, difficulty, label, seed)"});
        if (inst.prompt.empty()) issues.push_back({i, inst.id, "empty prompt"});
    }
    return issues;
}

}  // namespace unsolv::dataset
