#include "unsolv/instance.hpp"

#include <array>
#include <cstdio>

#include "unsolv/error.hpp"
#include "unsolv/rng.hpp"

namespace unsolv {

namespace {

constexpr std::array<std::string_view, 6> kDomainNames = {"game24", "hamcycle", "hampath", "hitori", "maze", "math"};

std::string lower(std::string_view text) {
    std::string out(text);
    for (auto& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

}  // namespace

std::string_view to_string(Label label) noexcept {
    return label == Label::Solvable ? "solvable" : "unsolvable";
}

std::string_view to_string(Domain domain) noexcept {
    return kDomainNames[static_cast<std::size_t>(domain)];
}

std::string_view to_string(Level level) noexcept {
    return level == Level::Easy ? "easy" : "hard";
}

std::string_view to_string(Split split) noexcept {
    return split == Split::Train ? "train" : "test";
}

Label parse_label(std::string_view text) {
    const auto t = lower(text);
    if (t == "solvable") return Label::Solvable;
    if (t == "unsolvable") return Label::Unsolvable;
    throw InvalidArgument("unknown label '" + std::string(text) + "'");
}

Domain parse_domain(std::string_view text) {
    const auto t = lower(text);
    for (std::size_t i = 0; i < kDomainNames.size(); ++i)
        if (t == kDomainNames[i]) return static_cast<Domain>(i);
    throw UnknownDomain(std::string(text));
}

Level parse_level(std::string_view text) {
    const auto t = lower(text);
    if (t == "easy") return Level::Easy;
    if (t == "hard") return Level::Hard;
    throw InvalidArgument("unknown difficulty '" + std::string(text) + "'");
}

Split parse_split(std::string_view text) {
    const auto t = lower(text);
    if (t == "train") return Split::Train;
    if (t == "test") return Split::Test;
    throw InvalidArgument("unknown split '" + std::string(text) + "'");
}

std::string instance_id(Domain domain, const Difficulty& difficulty, Label label, std::uint64_t seed) {
    std::string key;
    key.append(to_string(domain)).append("|");
    key.append(to_string(difficulty.level)).append("|");
    key.append(std::to_string(difficulty.scale)).append("|");
    key.append(to_string(label)).append("|");
    key.append(std::to_string(seed));
    std::uint64_t state = fnv1a64(key);
    const std::uint64_t h = splitmix64(state);
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return std::string(to_string(domain)) + "-" + hex;
}

}  // namespace unsolv
