#pragma once

#include <string_view>
#include <vector>

#include "spellforge/core.hpp"

namespace spellforge {

// Matrix rows, in row order.
enum class TriggerKind { OnEnemyCollision = 0, OnAnyPlayerCollision = 1, OnAllyCollision = 2, OnAreaTick = 3 };

// Matrix columns, in column order.
enum class StatKind { Health = 0, Speed = 1, Defense = 2, Mana = 3 };

std::string_view to_string(TriggerKind t);
std::string_view to_string(StatKind s);

struct EffectInstance {
    StatKind stat = StatKind::Health;
    int sign = 0;                       // +1 buff, -1 debuff
    double magnitude_per_second = 0.0; // >= 0
    double duration = 0.0;              // seconds, > 0

    bool operator==(const EffectInstance&) const = default;
};

struct TriggerBinding {
    TriggerKind trigger = TriggerKind::OnEnemyCollision;
    std::vector<EffectInstance> effects;

    bool operator==(const TriggerBinding&) const = default;
};

struct EffectConfig {
    double base_magnitude = 4.0; // per second, before the power bonus
    double duration = 3.0;       // seconds

    void check() const;
    bool operator==(const EffectConfig&) const = default;
};

// One binding per row holding a nonzero cell, one effect per nonzero cell, in
// row-major order. Magnitude is base_magnitude * (1 + p) where p is the
// resolved power normalized to [0, 1] over `power_range`.
// Throws ValidationError on a non-ternary matrix.
std::vector<TriggerBinding> bind(const EffectsMatrix& matrix, double resolved_power, const RangeSequence& power_range,
                                 const EffectConfig& config);

OrderedJson bindings_to_json(const std::vector<TriggerBinding>& bindings);

} // namespace spellforge
