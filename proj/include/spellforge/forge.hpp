#pragma once

// prompt -> prediction -> SpellSpec + trigger bindings.

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "spellforge/backend.hpp"
#include "spellforge/binding.hpp"
#include "spellforge/config.hpp"
#include "spellforge/paramize.hpp"

namespace spellforge {

struct ForgeTiming {
    double predict_ms = 0.0;
    double total_ms = 0.0;
};

struct ForgedSpell {
    SpellSpec spec;
    RawPrediction prediction;
    CostBreakdown cost;
    std::vector<TriggerBinding> bindings;
    ForgeTiming timing;
    std::string model_id;
};

// Empty or blank prompts are rejected with InputError before the backend is
// called. A prediction that fails validation raises ValidationError with code
// "invalid_prediction"; backend failures propagate as BackendError.
ForgedSpell forge(std::string_view prompt, const Backend& backend, const SpellTypeRegistry& registry,
                  const StatusRanges& ranges, const CostConfig& cost, const EffectConfig& effects);
ForgedSpell forge(std::string_view prompt, const Backend& backend, const EngineConfig& config);

// Spec fields plus type name, behavior, raw prediction, cost breakdown,
// bindings and timing.
OrderedJson forged_to_json(const ForgedSpell& spell, const SpellTypeRegistry& registry);

} // namespace spellforge
