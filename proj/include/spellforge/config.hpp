#pragma once

// Engine-wide tunables: spell types, range sequences, mana pricing, effect
// magnitudes and arena parameters. Every field has a built-in default; a JSON
// config overrides only the keys it names.

#include <filesystem>

#include "spellforge/binding.hpp"
#include "spellforge/core.hpp"
#include "spellforge/paramize.hpp"
#include "spellforge/sim.hpp"

namespace spellforge {

struct EngineConfig {
    SpellTypeRegistry registry = SpellTypeRegistry::defaults();
    StatusRanges ranges = StatusRanges::defaults();
    CostConfig cost = CostConfig::defaults();
    EffectConfig effects;
    ArenaConfig arena;

    static EngineConfig defaults() { return {}; }

    // Throws ValidationError on any inconsistency, e.g. base costs that do not
    // line up with the registry.
    void check() const;

    bool operator==(const EngineConfig&) const = default;
};

// Unknown keys are rejected so a misspelled override does not go unnoticed.
// Replacing "types" also resets the per-type base costs to the new entries.
EngineConfig config_from_json(const Json& j);
OrderedJson config_to_json(const EngineConfig& config);
EngineConfig load_config(const std::filesystem::path& path);

} // namespace spellforge
