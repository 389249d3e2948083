#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "unsolv/dataset.hpp"
#include "unsolv/instance.hpp"

using namespace unsolv;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "unsolv_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);)
        if (!l.empty()) out.push_back(l);
    return out;
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("gen then verify, per domain") {
        for (const std::string domain : {"game24", "hamcycle", "hampath", "hitori", "maze"}) {
            CAPTURE(domain);
            const auto path = scratch(domain + ".jsonl").string();
            const auto g = call({"gen", "--domain", domain, "--solvable", "4", "--unsolvable", "3", "--seed", "11", "--out", path});
            REQUIRE(g.code == 0);
            CHECK(g.err.find("wrote 7 records") != std::string::npos);
            const auto v = call({"verify", path});
            CHECK(v.code == 0);
            CHECK(v.out.find("verified 7 records, 0 problems") != std::string::npos);
            const auto records = dataset::read_records(path);
            CHECK(records.size() == 7);
        }
    }

    TEST_CASE("gen is deterministic and stdout works") {
        const auto a = call({"gen", "--domain", "game24,maze", "--solvable", "2", "--unsolvable", "2", "--seed", "5", "--threads", "1"});
        const auto b = call({"gen", "--domain", "game24,maze", "--solvable", "2", "--unsolvable", "2", "--seed", "5", "--threads", "4"});
        REQUIRE(a.code == 0);
        CHECK(a.out == b.out);
        CHECK(lines(a.out).size() == 8);
        const auto c = call({"gen", "--domain", "game24,maze", "--solvable", "2", "--unsolvable", "2", "--seed", "6"});
        CHECK(c.out != a.out);
    }

    TEST_CASE("verify catches a flipped label") {
        const auto path = scratch("flip.jsonl").string();
        REQUIRE(call({"gen", "--domain", "maze", "--solvable", "2", "--unsolvable", "2", "--seed", "3", "--out", path}).code == 0);
        auto records = dataset::read_records(path);
        for (auto& r : records)
            if (r.instance.label == Label::Unsolvable) {
                r.instance.label = Label::Solvable;
                r.instance.witness = Json("R");
                break;
            }
        const auto bad = scratch("flip_bad.jsonl").string();
        dataset::write_records(records, bad);
        const auto v = call({"verify", bad});
        CHECK(v.code == 1);
        CHECK(v.err.find("label mismatch") != std::string::npos);

        // Records edited behind the manifest's back: counts no longer agree.
        std::ofstream(path, std::ios::app) << dataset::to_json(records.front()).dump() << "\n";
        CHECK(call({"verify", path}).code == 1);
    }

    TEST_CASE("usage errors exit 2") {
        CHECK(call({}).code == 2);
        CHECK(call({"frobnicate"}).code == 2);
        CHECK(call({"gen", "--domain", "maze"}).code == 2);
        CHECK(call({"gen", "--domain", "sudoku", "--seed", "1"}).code == 2);
        CHECK(call({"gen", "--domain", "math", "--seed", "1"}).code == 2);
        CHECK(call({"sim", "--rho", "0.5"}).code == 2);
        CHECK(call({"verify", scratch("nope.jsonl").string()}).code == 1);
        const auto v = call({"--version"});
        CHECK(v.code == 0);
        CHECK(v.out.find(dataset::kToolVersion) != std::string::npos);
    }

    TEST_CASE("stats") {
        const auto path = scratch("stats.jsonl").string();
        REQUIRE(call({"gen", "--domain", "all", "--solvable", "3", "--unsolvable", "2", "--seed", "9", "--split", "test", "--out", path}).code == 0);
        const auto s = call({"stats", "--json", path});
        REQUIRE(s.code == 0);
        const auto doc = Json::parse(s.out);
        int rows = 0;
        for (const auto& row : doc)
            if (row.contains("domain") && row.at("domain") != "math" && row.value("split", "") == "test") {
                ++rows;
                CHECK(row.at("solvable") == 3);
                CHECK(row.at("unsolvable") == 2);
            }
        CHECK(rows == 5);
        const auto table = call({"stats", path});
        CHECK(table.out.find("hitori") != std::string::npos);
        CHECK(table.out.find("test") != std::string::npos);
    }

    TEST_CASE("grade") {
        const auto inst = scratch("grade.jsonl").string();
        REQUIRE(call({"gen", "--domain", "game24", "--solvable", "1", "--unsolvable", "1", "--seed", "2", "--out", inst}).code == 0);
        const auto records = dataset::read_records(inst);
        std::ofstream resp(scratch("responses.jsonl"));
        for (const auto& r : records) {
            if (r.instance.label == Label::Solvable)
                resp << Json{{"instance_id", r.instance.id},
                             {"responses", {"\\boxed{" + r.instance.witness->get<std::string>() + "}", "\\boxed{1+1}", "<unsolvable>"}}}
                            .dump()
                     << "\n";
            else
                resp << Json{{"instance_id", r.instance.id}, {"response", "no way, <unsolvable>"}}.dump() << "\n";
        }
        resp.close();
        const auto summary = scratch("summary.json").string();
        const auto g = call({"grade", "--instances", inst, "--responses", scratch("responses.jsonl").string(), "--summary", summary,
                             "--fixed-tau", "0.5"});
        REQUIRE(g.code == 0);
        const auto rows = lines(g.out);
        REQUIRE(rows.size() == 4);
        std::ifstream sf(summary);
        const auto sum = Json::parse(sf);
        CHECK(sum.at("responses") == 4);
        CHECK(sum.at("u_rate").get<double>() == 1.0);
        CHECK(sum.at("s_rate").get<double>() == doctest::Approx(1.0 / 3));

        for (const auto& row : rows) {
            const auto j = Json::parse(row);
            const double parts = j.at("r_acc").get<double>() + j.at("r_detect").get<double>() + j.at("r_cal").get<double>();
            CHECK(j.at("total").get<double>() == doctest::Approx(parts));
            if (j.at("kind") == "unsolvable" && j.at("r_detect").get<double>() < 0) CHECK(j.at("r_detect").get<double>() == -0.5);
        }

        std::ofstream(scratch("unknown.jsonl")) << R"({"instance_id":"nope","response":"x"})" << "\n";
        CHECK(call({"grade", "--instances", inst, "--responses", scratch("unknown.jsonl").string()}).code == 1);
    }

    TEST_CASE("sim") {
        const auto s = call({"sim", "--steps", "20", "--seed", "1"});
        REQUIRE(s.code == 0);
        const auto rows = lines(s.out);
        CHECK(rows.size() == 21);
        CHECK(rows[0].rfind("step,", 0) == 0);
        CHECK(Json::parse(s.err).contains("refusal_rate"));
        CHECK(call({"sim", "--mix", "0.5,0.5,0.5"}).code == 2);
    }
}
