#pragma once

#include <array>
#include <vector>

#include "spellforge/core.hpp"

namespace spellforge {

// Piecewise-linear lookup into `ranges`: with i = floor(raw) and j = raw - i,
// returns v_i + (v_{i+1} - v_i) * j. Raw is clamped to [0, n-1]; the top knot
// maps to v_{n-1}. Throws InputError on a non-finite raw value and
// ValidationError on a sequence shorter than 2.
double resolve_status(double raw, const RangeSequence& ranges);

// Interpolates each channel independently, rounding half up into [0, 255].
Rgb resolve_color(double raw, const ColorPalette& palette);

ResolvedStatuses resolve_statuses(const StatusVector& raw, const StatusRanges& ranges);

// Mana pricing table.
struct CostConfig {
    // Indexed by type index.
    std::vector<double> base_costs;
    // Mana per unit of normalized status, indexed by StatusKind.
    std::array<double, kStatusCount> status_weights{0.5, 0.3, 0.4, 0.0};
    // effect_weights[row][col][s] is the mana charged for a nonzero cell,
    // s = 0 for a -1 cell and s = 1 for a +1 cell.
    std::array<std::array<std::array<double, 2>, kStatColumns>, kTriggerRows> effect_weights{};
    double floor = 1.0;

    // Base costs from the registry plus the default (row, sign) table.
    static CostConfig defaults(const SpellTypeRegistry& registry = SpellTypeRegistry::defaults());

    double effect_weight(int row, int col, int sign) const {
        return effect_weights.at(row).at(col).at(sign < 0 ? 0 : 1);
    }
    void set_row_weights(int row, double negative, double positive);
    void check() const;

    bool operator==(const CostConfig&) const = default;
};

struct CostBreakdown {
    double base = 0.0;
    double statuses = 0.0;
    double effects = 0.0;
    double total = 0.0; // max(floor, base + statuses + effects)
};

// cost = max(floor, base(type) + sum_k w_k * raw_k / (L_k - 1) + sum_{M_ij != 0} u_ij(sign M_ij)).
// Raw values are clamped to their bounds first. Throws InputError for an
// unknown type index.
CostBreakdown cost_breakdown(int type_index, const StatusVector& raw, const EffectsMatrix& effects,
                             const CostConfig& config, const StatusRanges& ranges);

double compute_cost(int type_index, const StatusVector& raw, const EffectsMatrix& effects, const CostConfig& config,
                    const StatusRanges& ranges = StatusRanges::defaults());

} // namespace spellforge
