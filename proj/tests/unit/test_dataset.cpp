#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "unsolv/dataset.hpp"
#include "unsolv/error.hpp"
#include "unsolv/game24.hpp"
#include "unsolv/hamiltonian.hpp"
#include "unsolv/hitori.hpp"
#include "unsolv/maze.hpp"

using namespace unsolv;
using namespace unsolv::dataset;

namespace {

std::vector<DatasetRecord> small_set() {
    std::vector<DatasetRecord> out;
    out.push_back({game24::sample(4, Label::Solvable, 1, 10000), Split::Train, Json::object()});
    out.push_back({game24::sample(4, Label::Unsolvable, 2, 10000), Split::Test, Json::object()});
    out.push_back({ham::generate(ham::Mode::Cycle, 7, Label::Unsolvable, ham::Strategy::Disconnect, 3), Split::Train, Json::object()});
    out.push_back({ham::generate(ham::Mode::Path, 7, Label::Solvable, std::nullopt, 4), Split::Train, Json::object()});
    out.push_back({hitori::generate(4, Label::Solvable, 5, 200000, hitori::Sampler::Planted), Split::Test, Json::object()});
    out.push_back({maze::generate(7, 7, Label::Unsolvable, 6), Split::Train, Json::object()});
    out.push_back({maze::generate(7, 7, Label::Solvable, 7), Split::Train, Json::object()});
    return out;
}

std::filesystem::path temp_file(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "unsolv_dataset_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_SUITE("dataset") {
    TEST_CASE("jsonl round-trip keeps unknown fields") {
        auto records = small_set();
        records[0].extra = Json{{"annotator", "x"}, {"notes", {1, 2}}};
        std::ostringstream out;
        write_jsonl(records, out);
        std::istringstream in(out.str());
        const auto back = read_jsonl(in);
        CHECK(back == records);
        CHECK(to_json(back[0]).at("annotator") == "x");

        std::istringstream blank("\n  \n");
        CHECK(read_jsonl(blank).empty());
    }

    TEST_CASE("schema errors carry the line number") {
        const auto records = small_set();
        std::ostringstream good;
        write_jsonl(std::span(records).first(1), good);
        std::istringstream bad(good.str() + "{not json\n");
        try {
            read_jsonl(bad);
            FAIL("expected SchemaError");
        } catch (const SchemaError& e) {
            CHECK(e.line() == 2);
        }

        auto doc = to_json(records[0]);
        doc.erase("label");
        try {
            from_json(doc, 7);
            FAIL("expected SchemaError");
        } catch (const SchemaError& e) {
            CHECK(e.line() == 7);
            CHECK(std::string(e.what()).find("label") != std::string::npos);
        }
        auto typo = to_json(records[0]);
        typo["domain"] = "sudoku";
        CHECK_THROWS_AS(from_json(typo), SchemaError);
        auto neg = to_json(records[0]);
        neg["seed"] = -1;
        CHECK_THROWS_AS(from_json(neg), SchemaError);
        CHECK_THROWS_AS(from_json(Json::array()), SchemaError);
    }

    TEST_CASE("manifest counts and file io") {
        const auto records = small_set();
        const auto path = temp_file("small.jsonl");
        const auto written = write_records(records, path, Json{{"seed", 1}});
        CHECK(written.total == records.size());
        CHECK(written.matches(records));
        CHECK(std::filesystem::exists(manifest_path(path)));
        CHECK(read_records(path) == records);

        const auto m = read_manifest(path);
        CHECK(m.total == written.total);
        CHECK(m.config_digest == written.config_digest);
        CHECK(m.counts.at(CountKey{Split::Train, Domain::Maze, Label::Unsolvable}) == 1);
        CHECK(Manifest::of(records, Json{{"seed", 2}}).config_digest != m.config_digest);

        auto fewer = records;
        fewer.pop_back();
        CHECK_FALSE(m.matches(fewer));
        auto relabeled = records;
        relabeled[0].split = Split::Test;
        CHECK_FALSE(m.matches(relabeled));

        CHECK_THROWS_AS(read_records(temp_file("does_not_exist.jsonl")), IoError);
        std::filesystem::remove(path);
        std::filesystem::remove(manifest_path(path));
    }

    TEST_CASE("stats partition the records") {
        const auto records = small_set();
        const auto t = stats(records);
        CHECK(t.grand_total.total() == records.size());
        std::uint64_t sum = 0;
        for (const auto& [split, table] : t.splits) {
            Row r;
            for (const auto& [domain, row] : table.rows) {
                r.solvable += row.solvable;
                r.unsolvable += row.unsolvable;
            }
            CHECK(r == table.totals);
            sum += table.totals.total();
        }
        CHECK(sum == records.size());
        CHECK(t.splits.at(Split::Train).rows.at(Domain::Maze) == Row{1, 1});
        CHECK(t.splits.at(Split::Test).rows.at(Domain::Hitori) == Row{1, 0});

        const auto text = format_stats(t);
        CHECK(text.find("maze") != std::string::npos);
        CHECK(stats({}).grand_total.total() == 0);
        CHECK_NOTHROW(format_stats(stats({})));
    }

    TEST_CASE("verify passes generated data and flags tampering") {
        const auto records = small_set();
        CHECK(verify(records).empty());

        auto flipped = records;
        flipped[1].instance.label = Label::Solvable;
        flipped[1].instance.witness = Json("1+2+3+4");
        const auto a = verify(flipped);
        REQUIRE_FALSE(a.empty());
        CHECK(a[0].index == 1);

        auto wrong_id = records;
        wrong_id[2].instance.id = "ham_cycle-0000000000000000";
        const auto b = verify(wrong_id);
        REQUIRE(b.size() == 1);
        CHECK(b[0].message.find("id") != std::string::npos);

        auto no_witness = records;
        no_witness[6].instance.witness.reset();
        CHECK(verify(no_witness).size() == 1);

        auto bad_moves = records;
        bad_moves[6].instance.witness = Json("U");
        CHECK(verify(bad_moves).size() == 1);

        auto walled = records;
        // Relabel the cut maze as solvable: the verifier has to disagree.
        walled[5].instance.label = Label::Solvable;
        walled[5].instance.witness = Json("R");
        CHECK_FALSE(verify(walled).empty());
    }
}
