#include "spellforge/paramize.hpp"

#include <algorithm>
#include <cmath>

#include "spellforge/error.hpp"

namespace spellforge {

double resolve_status(double raw, const RangeSequence& ranges) {
    ranges.check();
    if (!std::isfinite(raw)) throw InputError("raw value for '" + ranges.status + "' is not finite");
    const auto& v = ranges.values;
    const double top = static_cast<double>(v.size() - 1);
    const double x = std::clamp(raw, 0.0, top);
    const double i = std::floor(x);
    const auto idx = static_cast<std::size_t>(i);
    if (idx >= v.size() - 1) return v.back();
    const double j = x - i;
    return v[idx] + (v[idx + 1] - v[idx]) * j;
}

Rgb resolve_color(double raw, const ColorPalette& palette) {
    palette.check();
    std::array<int, 3> out{};
    for (int c = 0; c < 3; ++c) {
        const double value = resolve_status(raw, palette.channel(c));
        out[static_cast<std::size_t>(c)] = static_cast<int>(std::clamp(std::floor(value + 0.5), 0.0, 255.0));
    }
    return {out[0], out[1], out[2]};
}

ResolvedStatuses resolve_statuses(const StatusVector& raw, const StatusRanges& ranges) {
    return {resolve_status(raw[StatusKind::Power], ranges.power),
            resolve_status(raw[StatusKind::Speed], ranges.speed),
            resolve_status(raw[StatusKind::Area], ranges.area),
            resolve_color(raw[StatusKind::Color], ranges.color)};
}

CostConfig CostConfig::defaults(const SpellTypeRegistry& registry) {
    CostConfig c;
    for (const auto& e : registry.entries()) c.base_costs.push_back(e.base_cost);
    // Harming enemies and helping players is paid for; harming yourself or
    // allies earns a discount.
    c.set_row_weights(0, 5.0, -2.0);
    c.set_row_weights(1, -3.0, 3.0);
    c.set_row_weights(2, -3.0, 4.0);
    c.set_row_weights(3, 4.0, 2.0);
    return c;
}

void CostConfig::set_row_weights(int row, double negative, double positive) {
    for (auto& cell : effect_weights.at(row)) cell = {negative, positive};
}

void CostConfig::check() const {
    if (base_costs.empty()) throw ValidationError("cost config has no base costs");
    for (double b : base_costs) {
        if (!(b > 0.0) || !std::isfinite(b)) throw ValidationError("base costs must be positive");
    }
    if (!(floor >= 0.0) || !std::isfinite(floor)) throw ValidationError("cost floor must be >= 0");
    for (double w : status_weights) {
        if (!std::isfinite(w)) throw ValidationError("status weights must be finite");
    }
    for (const auto& row : effect_weights) {
        for (const auto& cell : row) {
            for (double u : cell) {
                if (!std::isfinite(u)) throw ValidationError("effect weights must be finite");
            }
        }
    }
}

CostBreakdown cost_breakdown(int type_index, const StatusVector& raw, const EffectsMatrix& effects,
                             const CostConfig& config, const StatusRanges& ranges) {
    if (type_index < 0 || static_cast<std::size_t>(type_index) >= config.base_costs.size()) {
        throw InputError("unknown type index " + std::to_string(type_index) + " in cost table");
    }
    CostBreakdown b;
    b.base = config.base_costs[static_cast<std::size_t>(type_index)];
    const StatusVector clamped = clamp_to_bounds(raw, ranges);
    for (auto k : kAllStatuses) {
        b.statuses += config.status_weights[static_cast<std::size_t>(k)] * (clamped[k] / ranges.bound(k));
    }
    for (int i = 0; i < kTriggerRows; ++i) {
        for (int j = 0; j < kStatColumns; ++j) {
            const int m = effects.at(i, j);
            if (m != 0) b.effects += config.effect_weight(i, j, m);
        }
    }
    b.total = std::max(config.floor, b.base + b.statuses + b.effects);
    return b;
}

double compute_cost(int type_index, const StatusVector& raw, const EffectsMatrix& effects, const CostConfig& config,
                    const StatusRanges& ranges) {
    return cost_breakdown(type_index, raw, effects, config, ranges).total;
}

} // namespace spellforge
