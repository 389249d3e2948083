#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace unsolv {

using Json = nlohmann::json;

enum class Label : std::uint8_t { Solvable, Unsolvable };
enum class Domain : std::uint8_t { Game24, HamCycle, HamPath, Hitori, Maze, Math };
enum class Level : std::uint8_t { Easy, Hard };
enum class Split : std::uint8_t { Train, Test };

/// Coarse level plus the domain's own size knob (Game24 count, vertex count, grid size).
struct Difficulty {
    Level level = Level::Easy;
    int scale = 0;

    friend bool operator==(const Difficulty&, const Difficulty&) = default;
};

std::string_view to_string(Label label) noexcept;
std::string_view to_string(Domain domain) noexcept;
std::string_view to_string(Level level) noexcept;
std::string_view to_string(Split split) noexcept;

// Parsers throw UnknownDomain / InvalidArgument on unrecognized names.
Label parse_label(std::string_view text);
Domain parse_domain(std::string_view text);
Level parse_level(std::string_view text);
Split parse_split(std::string_view text);

struct PuzzleInstance {
    std::string id;
    Domain domain = Domain::Game24;
    Label label = Label::Solvable;
    Difficulty difficulty;
    Json payload = Json::object();
    std::string prompt;
    std::optional<Json> witness;
    std::uint64_t seed = 0;
    Json provenance = Json::object();

    friend bool operator==(const PuzzleInstance&, const PuzzleInstance&) = default;
};

struct DatasetRecord {
    PuzzleInstance instance;
    Split split = Split::Train;
    /// Fields present on read that this schema does not know; written back verbatim.
    Json extra = Json::object();

    friend bool operator==(const DatasetRecord&, const DatasetRecord&) = default;
};

/// Stable id: domain name plus a hash of (domain, difficulty, label, seed).
std::string instance_id(Domain domain, const Difficulty& difficulty, Label label, std::uint64_t seed);

}  // namespace unsolv
