#pragma once

// Domain types shared by every stage of the spell pipeline: the spell-type
// registry, status values and their range sequences, the 4x4 status-effects
// matrix, and the resolved SpellSpec, plus their validation and JSON forms.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace spellforge {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Spell types
// ---------------------------------------------------------------------------

// Runtime behavior a spell type maps onto in the arena.
enum class Behavior { Projectile, Fireball, Thunder, Trap, AreaEffect };

std::string_view to_string(Behavior b);
std::optional<Behavior> behavior_from_string(std::string_view name);

struct SpellTypeEntry {
    int index = 0;
    std::string name;
    double base_cost = 1.0;
    Behavior behavior = Behavior::Projectile;

    bool operator==(const SpellTypeEntry&) const = default;
};

// Ordered list of spell types; entry i has index i. Construction validates
// contiguity, unique non-empty names and positive base costs.
class SpellTypeRegistry {
public:
    explicit SpellTypeRegistry(std::vector<SpellTypeEntry> entries);

    // Projectile, Fireball, Thunder, Trap, AreaEffect at indices 0..4.
    static SpellTypeRegistry defaults();

    std::size_t size() const noexcept { return entries_.size(); }
    bool contains(int index) const noexcept { return index >= 0 && static_cast<std::size_t>(index) < entries_.size(); }
    const SpellTypeEntry& at(int index) const;
    const std::vector<SpellTypeEntry>& entries() const noexcept { return entries_; }
    std::optional<int> find(std::string_view name) const;

    bool operator==(const SpellTypeRegistry&) const = default;

private:
    std::vector<SpellTypeEntry> entries_;
};

// ---------------------------------------------------------------------------
// Statuses
// ---------------------------------------------------------------------------

enum class StatusKind { Power = 0, Speed = 1, Area = 2, Color = 3 };
inline constexpr std::size_t kStatusCount = 4;
inline constexpr std::array<StatusKind, kStatusCount> kAllStatuses{
    StatusKind::Power, StatusKind::Speed, StatusKind::Area, StatusKind::Color};

std::string_view to_string(StatusKind k);

// Raw status values as produced by a model, each in [0, L_k - 1].
struct StatusVector {
    std::array<double, kStatusCount> values{};

    double operator[](StatusKind k) const { return values[static_cast<std::size_t>(k)]; }
    double& operator[](StatusKind k) { return values[static_cast<std::size_t>(k)]; }

    bool operator==(const StatusVector&) const = default;
};

struct Rgb {
    int r = 0;
    int g = 0;
    int b = 0;

    bool operator==(const Rgb&) const = default;
};

// Knots v_0..v_{n-1} a raw status interpolates between.
struct RangeSequence {
    std::string status;
    std::vector<double> values;

    std::size_t length() const noexcept { return values.size(); }
    double min() const;
    double max() const;
    // Throws ValidationError unless n >= 2 and every knot is finite.
    void check() const;

    bool operator==(const RangeSequence&) const = default;
};

struct ColorPalette {
    std::vector<Rgb> colors;

    std::size_t length() const noexcept { return colors.size(); }
    // One scalar RangeSequence per channel (0 = red, 1 = green, 2 = blue).
    RangeSequence channel(int c) const;
    void check() const;

    bool operator==(const ColorPalette&) const = default;
};

struct StatusRanges {
    RangeSequence power;
    RangeSequence speed;
    RangeSequence area;
    ColorPalette color;

    static StatusRanges defaults();

    std::size_t length(StatusKind k) const;
    // Upper bound of the raw domain: L_k - 1.
    double bound(StatusKind k) const { return static_cast<double>(length(k)) - 1.0; }
    std::array<double, kStatusCount> bounds() const;
    const RangeSequence& scalar(StatusKind k) const;
    void check() const;

    bool operator==(const StatusRanges&) const = default;
};

StatusVector clamp_to_bounds(const StatusVector& raw, const StatusRanges& ranges);

// ---------------------------------------------------------------------------
// Status-effects matrix
// ---------------------------------------------------------------------------

inline constexpr int kTriggerRows = 4;
inline constexpr int kStatColumns = 4;
inline constexpr int kEffectCells = kTriggerRows * kStatColumns;

// Rows are triggers (enemy hit, any-player hit, ally hit, area), columns are
// stats (Health, Speed, Defense, Mana). Cells are stored unchecked so that
// parsed input can be validated and reported rather than rejected on sight.
struct EffectsMatrix {
    std::array<std::array<int, kStatColumns>, kTriggerRows> cells{};

    int at(int row, int col) const { return cells.at(row).at(col); }
    int& at(int row, int col) { return cells.at(row).at(col); }
    int cell(int flat) const { return at(flat / kStatColumns, flat % kStatColumns); }
    int& cell(int flat) { return at(flat / kStatColumns, flat % kStatColumns); }

    bool is_ternary() const;
    int nonzero_count() const;

    bool operator==(const EffectsMatrix&) const = default;
};

// ---------------------------------------------------------------------------
// Resolved spell and raw prediction
// ---------------------------------------------------------------------------

struct ResolvedStatuses {
    double power = 0.0; // damage scale
    double speed = 0.0; // units per second
    double area = 0.0;  // radius in world units
    Rgb color;

    bool operator==(const ResolvedStatuses&) const = default;
};

struct SpellSpec {
    int type_index = 0;
    ResolvedStatuses statuses;
    EffectsMatrix effects;
    double cost = 1.0;
    std::string prompt;
    std::string model_id;

    bool operator==(const SpellSpec&) const = default;
};

struct RawPrediction {
    std::vector<double> type_probs;
    StatusVector status_raws;
    EffectsMatrix effects;

    // Index of the most probable type; ties go to the lower index.
    int argmax_type() const;

    bool operator==(const RawPrediction&) const = default;
};

// One labeled prompt: what a model is trained on and evaluated against.
struct Example {
    std::string prompt;
    int type_index = 0;
    StatusVector status_raws;
    EffectsMatrix effects;

    bool operator==(const Example&) const = default;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct ValidationResult {
    std::vector<std::string> violations;

    bool ok() const noexcept { return violations.empty(); }
    std::string summary() const;
};

ValidationResult validate_spec(const SpellSpec& spec, const SpellTypeRegistry& registry,
                               const StatusRanges& ranges = StatusRanges::defaults());

// Checks a decoded prediction: probability simplex, raw bounds and ternary cells.
ValidationResult validate_prediction(const RawPrediction& pred, std::size_t type_count,
                                     const StatusRanges& ranges);
ValidationResult validate_prediction(const RawPrediction& pred, std::size_t type_count,
                                     const std::array<double, kStatusCount>& bounds);

// Label checks for a training example (type, raw bounds, ternary cells, prompt).
ValidationResult validate_example(const Example& ex, const SpellTypeRegistry& registry, const StatusRanges& ranges);

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

OrderedJson matrix_to_json(const EffectsMatrix& m);
// Requires exactly 4 rows of 4 integers; throws FormatError naming `field`.
EffectsMatrix matrix_from_json(const Json& j, std::string_view field = "effects");

OrderedJson spec_to_json(const SpellSpec& spec);
SpellSpec spec_from_json(const Json& j);
std::string serialize_spec(const SpellSpec& spec);
SpellSpec parse_spec(std::string_view text);

OrderedJson prediction_to_json(const RawPrediction& pred);

} // namespace spellforge
