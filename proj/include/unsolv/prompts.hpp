#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "unsolv/instance.hpp"

namespace unsolv {

/// Per-domain prompt templates. `{puzzle}` is replaced by the rendered payload,
/// `{unsolvable}` and `{refusal}` by the response markers.
struct TemplateSet {
    std::map<Domain, std::vector<std::string>> templates;

    /// One fixed template per domain, used for training prompts.
    static TemplateSet train_defaults();
    /// Several phrasings per domain; the variant is picked from the instance seed.
    static TemplateSet test_defaults();
    /// Reads {"game24": "..." | [...], ...}; missing domains fall back to `fallback`.
    static TemplateSet from_json(const Json& doc, const TemplateSet& fallback);
};

/// Human-readable puzzle body for a payload (number list, edge list, grid rows, ...).
std::string render_puzzle(Domain domain, const Json& payload);

std::string render_prompt(Domain domain, const Json& payload, const TemplateSet& templates, std::size_t variant);
std::string render_prompt(Domain domain, const Json& payload);

}  // namespace unsolv
