#include "spellforge/forge.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>

#include "spellforge/error.hpp"

namespace spellforge {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

} // namespace

ForgedSpell forge(std::string_view prompt, const Backend& backend, const SpellTypeRegistry& registry,
                  const StatusRanges& ranges, const CostConfig& cost, const EffectConfig& effects) {
    const auto start = Clock::now();
    if (std::all_of(prompt.begin(), prompt.end(), [](unsigned char c) { return std::isspace(c); })) {
        throw InputError("prompt is empty");
    }

    ForgedSpell out;
    const auto predict_start = Clock::now();
    out.prediction = backend.predict(prompt);
    out.timing.predict_ms = ms_since(predict_start);
    out.model_id = backend.model_id();

    // The backend validated against its own bounds; the engine's registry and
    // ranges are what the spell has to fit.
    const auto check = validate_prediction(out.prediction, registry.size(), ranges);
    if (!check.ok()) throw ValidationError("backend returned an invalid prediction: " + check.summary(), "invalid_prediction");

    auto& spec = out.spec;
    spec.type_index = out.prediction.argmax_type();
    spec.statuses = resolve_statuses(out.prediction.status_raws, ranges);
    spec.effects = out.prediction.effects;
    out.cost = cost_breakdown(spec.type_index, out.prediction.status_raws, spec.effects, cost, ranges);
    spec.cost = out.cost.total;
    spec.prompt = std::string(prompt);
    spec.model_id = out.model_id;

    const auto valid = validate_spec(spec, registry, ranges);
    if (!valid.ok()) throw ValidationError("forged spell is invalid: " + valid.summary(), "invalid_prediction");
    out.bindings = bind(spec.effects, spec.statuses.power, ranges.power, effects);
    out.timing.total_ms = ms_since(start);
    return out;
}

ForgedSpell forge(std::string_view prompt, const Backend& backend, const EngineConfig& config) {
    return forge(prompt, backend, config.registry, config.ranges, config.cost, config.effects);
}

OrderedJson forged_to_json(const ForgedSpell& spell, const SpellTypeRegistry& registry) {
    OrderedJson j;
    j["spec"] = spec_to_json(spell.spec);
    const auto& type = registry.at(spell.spec.type_index);
    j["type_name"] = type.name;
    j["behavior"] = to_string(type.behavior);
    j["prediction"] = prediction_to_json(spell.prediction);
    j["cost_breakdown"] = {{"base", spell.cost.base},
                           {"statuses", spell.cost.statuses},
                           {"effects", spell.cost.effects},
                           {"total", spell.cost.total}};
    j["bindings"] = bindings_to_json(spell.bindings);
    j["timing"] = {{"predict_ms", spell.timing.predict_ms}, {"total_ms", spell.timing.total_ms}};
    j["model_id"] = spell.model_id;
    return j;
}

} // namespace spellforge
