#include "spellforge/binding.hpp"

#include <algorithm>
#include <cmath>

#include "spellforge/error.hpp"

namespace spellforge {

std::string_view to_string(TriggerKind t) {
    switch (t) {
        case TriggerKind::OnEnemyCollision: return "OnEnemyCollision";
        case TriggerKind::OnAnyPlayerCollision: return "OnAnyPlayerCollision";
        case TriggerKind::OnAllyCollision: return "OnAllyCollision";
        case TriggerKind::OnAreaTick: return "OnAreaTick";
    }
    return "Unknown";
}

std::string_view to_string(StatKind s) {
    switch (s) {
        case StatKind::Health: return "Health";
        case StatKind::Speed: return "Speed";
        case StatKind::Defense: return "Defense";
        case StatKind::Mana: return "Mana";
    }
    return "Unknown";
}

void EffectConfig::check() const {
    if (!(base_magnitude >= 0.0) || !std::isfinite(base_magnitude)) throw ValidationError("effect base magnitude must be >= 0");
    if (!(duration > 0.0) || !std::isfinite(duration)) throw ValidationError("effect duration must be > 0");
}

std::vector<TriggerBinding> bind(const EffectsMatrix& matrix, double resolved_power, const RangeSequence& power_range,
                                 const EffectConfig& config) {
    if (!matrix.is_ternary()) throw ValidationError("effects matrix has non-ternary cells");
    config.check();
    const double lo = power_range.min();
    const double hi = power_range.max();
    const double p = hi > lo ? std::clamp((resolved_power - lo) / (hi - lo), 0.0, 1.0) : 0.0;
    const double magnitude = config.base_magnitude * (1.0 + p);

    std::vector<TriggerBinding> out;
    for (int row = 0; row < kTriggerRows; ++row) {
        TriggerBinding b{static_cast<TriggerKind>(row), {}};
        for (int col = 0; col < kStatColumns; ++col) {
            const int m = matrix.at(row, col);
            if (m != 0) b.effects.push_back({static_cast<StatKind>(col), m, magnitude, config.duration});
        }
        if (!b.effects.empty()) out.push_back(std::move(b));
    }
    return out;
}

OrderedJson bindings_to_json(const std::vector<TriggerBinding>& bindings) {
    OrderedJson out = OrderedJson::array();
    for (const auto& b : bindings) {
        OrderedJson jb;
        jb["trigger"] = to_string(b.trigger);
        OrderedJson effects = OrderedJson::array();
        for (const auto& e : b.effects) {
            OrderedJson je;
            je["stat"] = to_string(e.stat);
            je["sign"] = e.sign;
            je["magnitude_per_second"] = e.magnitude_per_second;
            je["duration"] = e.duration;
            effects.push_back(std::move(je));
        }
        jb["effects"] = std::move(effects);
        out.push_back(std::move(jb));
    }
    return out;
}

} // namespace spellforge
