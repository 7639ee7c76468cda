#include "spellforge/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "spellforge/error.hpp"

namespace spellforge {

std::string_view to_string(Behavior b) {
    switch (b) {
        case Behavior::Projectile: return "Projectile";
        case Behavior::Fireball: return "Fireball";
        case Behavior::Thunder: return "Thunder";
        case Behavior::Trap: return "Trap";
        case Behavior::AreaEffect: return "AreaEffect";
    }
    return "Unknown";
}

std::optional<Behavior> behavior_from_string(std::string_view name) {
    for (auto b : {Behavior::Projectile, Behavior::Fireball, Behavior::Thunder, Behavior::Trap,
                   Behavior::AreaEffect}) {
        if (to_string(b) == name) return b;
    }
    return std::nullopt;
}

SpellTypeRegistry::SpellTypeRegistry(std::vector<SpellTypeEntry> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw ValidationError("spell type registry is empty");
    std::set<std::string, std::less<>> names;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (e.index != static_cast<int>(i)) {
            throw ValidationError("spell type indices must be contiguous from 0; entry " + std::to_string(i) +
                                  " has index " + std::to_string(e.index));
        }
        if (e.name.empty()) throw ValidationError("spell type " + std::to_string(i) + " has an empty name");
        if (!names.insert(e.name).second) throw ValidationError("duplicate spell type name '" + e.name + "'");
        if (!(e.base_cost > 0.0) || !std::isfinite(e.base_cost)) {
            throw ValidationError("spell type '" + e.name + "' needs a positive base cost");
        }
    }
}

SpellTypeRegistry SpellTypeRegistry::defaults() {
    return SpellTypeRegistry({
        {0, "Projectile", 10.0, Behavior::Projectile},
        {1, "Fireball", 18.0, Behavior::Fireball},
        {2, "Thunder", 22.0, Behavior::Thunder},
        {3, "Trap", 20.0, Behavior::Trap},
        {4, "AreaEffect", 25.0, Behavior::AreaEffect},
    });
}

const SpellTypeEntry& SpellTypeRegistry::at(int index) const {
    if (!contains(index)) throw InputError("unknown type index " + std::to_string(index));
    return entries_[static_cast<std::size_t>(index)];
}

std::optional<int> SpellTypeRegistry::find(std::string_view name) const {
    for (const auto& e : entries_) {
        if (e.name == name) return e.index;
    }
    return std::nullopt;
}

std::string_view to_string(StatusKind k) {
    switch (k) {
        case StatusKind::Power: return "power";
        case StatusKind::Speed: return "speed";
        case StatusKind::Area: return "area";
        case StatusKind::Color: return "color";
    }
    return "unknown";
}

double RangeSequence::min() const {
    check();
    return *std::min_element(values.begin(), values.end());
}

double RangeSequence::max() const {
    check();
    return *std::max_element(values.begin(), values.end());
}

void RangeSequence::check() const {
    if (values.size() < 2) {
        throw ValidationError("range sequence '" + status + "' needs at least 2 values, has " +
                              std::to_string(values.size()));
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw ValidationError("range sequence '" + status + "' has a non-finite value");
    }
}

RangeSequence ColorPalette::channel(int c) const {
    RangeSequence seq{std::string("color.") + "rgb"[c], {}};
    seq.values.reserve(colors.size());
    for (const auto& rgb : colors) seq.values.push_back(c == 0 ? rgb.r : c == 1 ? rgb.g : rgb.b);
    return seq;
}

void ColorPalette::check() const {
    if (colors.size() < 2) throw ValidationError("color palette needs at least 2 colors");
    for (const auto& rgb : colors) {
        for (int v : {rgb.r, rgb.g, rgb.b}) {
            if (v < 0 || v > 255) throw ValidationError("color palette channel out of [0,255]");
        }
    }
}

StatusRanges StatusRanges::defaults() {
    StatusRanges r;
    r.power = {"power", {5, 10, 20, 35, 55, 80}};
    r.speed = {"speed", {2, 5, 9, 14, 20}};
    r.area = {"area", {0.5, 1, 1.5, 2.5, 4, 6}};
    r.color = {{{220, 40, 30},
                {255, 140, 0},
                {250, 220, 40},
                {240, 240, 240},
                {60, 200, 80},
                {40, 200, 220},
                {50, 90, 230},
                {150, 60, 210}}};
    return r;
}

std::size_t StatusRanges::length(StatusKind k) const {
    switch (k) {
        case StatusKind::Power: return power.length();
        case StatusKind::Speed: return speed.length();
        case StatusKind::Area: return area.length();
        case StatusKind::Color: return color.length();
    }
    return 0;
}

const RangeSequence& StatusRanges::scalar(StatusKind k) const {
    switch (k) {
        case StatusKind::Power: return power;
        case StatusKind::Speed: return speed;
        case StatusKind::Area: return area;
        case StatusKind::Color: break;
    }
    throw InputError("color has no scalar range sequence");
}

void StatusRanges::check() const {
    power.check();
    speed.check();
    area.check();
    color.check();
}

std::array<double, kStatusCount> StatusRanges::bounds() const {
    return {bound(StatusKind::Power), bound(StatusKind::Speed), bound(StatusKind::Area), bound(StatusKind::Color)};
}

StatusVector clamp_to_bounds(const StatusVector& raw, const StatusRanges& ranges) {
    StatusVector out;
    for (auto k : kAllStatuses) out[k] = std::clamp(raw[k], 0.0, ranges.bound(k));
    return out;
}

bool EffectsMatrix::is_ternary() const {
    for (const auto& row : cells) {
        for (int v : row) {
            if (v < -1 || v > 1) return false;
        }
    }
    return true;
}

int EffectsMatrix::nonzero_count() const {
    int n = 0;
    for (const auto& row : cells) {
        for (int v : row) n += v != 0;
    }
    return n;
}

int RawPrediction::argmax_type() const {
    if (type_probs.empty()) throw InputError("prediction has no type probabilities");
    return static_cast<int>(std::max_element(type_probs.begin(), type_probs.end()) - type_probs.begin());
}

std::string ValidationResult::summary() const {
    std::string out;
    for (const auto& v : violations) {
        if (!out.empty()) out += "; ";
        out += v;
    }
    return out;
}

namespace {

bool within(double v, double lo, double hi) { return std::isfinite(v) && v >= lo && v <= hi; }

void check_matrix(const EffectsMatrix& m, std::vector<std::string>& out) {
    for (int i = 0; i < kTriggerRows; ++i) {
        for (int j = 0; j < kStatColumns; ++j) {
            const int v = m.at(i, j);
            if (v < -1 || v > 1) {
                out.push_back("non-ternary effect cell M[" + std::to_string(i) + "][" + std::to_string(j) +
                              "] = " + std::to_string(v));
            }
        }
    }
}

} // namespace

ValidationResult validate_spec(const SpellSpec& spec, const SpellTypeRegistry& registry,
                               const StatusRanges& ranges) {
    ValidationResult r;
    auto& out = r.violations;
    if (!registry.contains(spec.type_index)) out.push_back("unknown type index " + std::to_string(spec.type_index));

    const auto check_scalar = [&](std::string_view name, double v, const RangeSequence& seq) {
        if (seq.values.size() < 2) {
            out.push_back("range sequence for " + std::string(name) + " is degenerate");
            return;
        }
        const auto [lo, hi] = std::minmax_element(seq.values.begin(), seq.values.end());
        if (!within(v, *lo, *hi)) {
            std::ostringstream os;
            os << "status " << name << " = " << v << " outside [" << *lo << ", " << *hi << "]";
            out.push_back(os.str());
        }
    };
    check_scalar("power", spec.statuses.power, ranges.power);
    check_scalar("speed", spec.statuses.speed, ranges.speed);
    check_scalar("area", spec.statuses.area, ranges.area);
    for (int v : {spec.statuses.color.r, spec.statuses.color.g, spec.statuses.color.b}) {
        if (v < 0 || v > 255) {
            out.push_back("color channel " + std::to_string(v) + " outside [0, 255]");
            break;
        }
    }
    check_matrix(spec.effects, out);
    if (!std::isfinite(spec.cost) || spec.cost < 1.0) {
        std::ostringstream os;
        os << "cost " << spec.cost << " below 1";
        out.push_back(os.str());
    }
    return r;
}

ValidationResult validate_prediction(const RawPrediction& pred, std::size_t type_count, const StatusRanges& ranges) {
    return validate_prediction(pred, type_count, ranges.bounds());
}

ValidationResult validate_prediction(const RawPrediction& pred, std::size_t type_count,
                                     const std::array<double, kStatusCount>& bounds) {
    ValidationResult r;
    auto& out = r.violations;
    if (pred.type_probs.size() != type_count) {
        out.push_back("type_probs has " + std::to_string(pred.type_probs.size()) + " entries, expected " +
                      std::to_string(type_count));
    }
    double sum = 0.0;
    bool finite = true;
    for (double p : pred.type_probs) {
        if (!std::isfinite(p)) {
            finite = false;
        } else if (p < 0.0) {
            out.push_back("type_probs contains a negative probability");
        }
        sum += p;
    }
    if (!finite) {
        out.push_back("type_probs contains a non-finite value");
    } else if (!pred.type_probs.empty() && std::abs(sum - 1.0) > 1e-6) {
        std::ostringstream os;
        os.precision(17);
        os << "type_probs sums to " << sum << ", expected 1";
        out.push_back(os.str());
    }
    for (auto k : kAllStatuses) {
        const double hi = bounds[static_cast<std::size_t>(k)];
        if (!within(pred.status_raws[k], 0.0, hi)) {
            std::ostringstream os;
            os << "status " << to_string(k) << " raw " << pred.status_raws[k] << " outside [0, " << hi << "]";
            out.push_back(os.str());
        }
    }
    check_matrix(pred.effects, out);
    return r;
}

ValidationResult validate_example(const Example& ex, const SpellTypeRegistry& registry, const StatusRanges& ranges) {
    ValidationResult r;
    auto& out = r.violations;
    if (ex.prompt.find_first_not_of(" \t\r\n") == std::string::npos) out.push_back("empty prompt");
    if (!registry.contains(ex.type_index)) out.push_back("unknown type index " + std::to_string(ex.type_index));
    for (auto k : kAllStatuses) {
        if (!within(ex.status_raws[k], 0.0, ranges.bound(k))) {
            std::ostringstream os;
            os << "status " << to_string(k) << " raw " << ex.status_raws[k] << " outside [0, " << ranges.bound(k)
               << "]";
            out.push_back(os.str());
        }
    }
    check_matrix(ex.effects, out);
    return r;
}

OrderedJson matrix_to_json(const EffectsMatrix& m) {
    OrderedJson rows = OrderedJson::array();
    for (const auto& row : m.cells) rows.push_back(OrderedJson(row));
    return rows;
}

EffectsMatrix matrix_from_json(const Json& j, std::string_view field) {
    const std::string f(field);
    if (!j.is_array() || j.size() != kTriggerRows) {
        throw FormatError(f + ": expected " + std::to_string(kTriggerRows) + " rows");
    }
    EffectsMatrix m;
    for (int i = 0; i < kTriggerRows; ++i) {
        const auto& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || row.size() != kStatColumns) {
            throw FormatError(f + ": row " + std::to_string(i) + " must have " + std::to_string(kStatColumns) +
                              " cells");
        }
        for (int c = 0; c < kStatColumns; ++c) {
            const auto& cell = row[static_cast<std::size_t>(c)];
            if (!cell.is_number_integer()) {
                throw FormatError(f + ": cell [" + std::to_string(i) + "][" + std::to_string(c) +
                                  "] must be an integer");
            }
            m.at(i, c) = cell.get<int>();
        }
    }
    return m;
}

OrderedJson spec_to_json(const SpellSpec& spec) {
    OrderedJson j;
    j["type"] = spec.type_index;
    OrderedJson st;
    st["power"] = spec.statuses.power;
    st["speed"] = spec.statuses.speed;
    st["area"] = spec.statuses.area;
    st["color"] = {spec.statuses.color.r, spec.statuses.color.g, spec.statuses.color.b};
    j["statuses"] = std::move(st);
    j["effects"] = matrix_to_json(spec.effects);
    j["cost"] = spec.cost;
    j["prompt"] = spec.prompt;
    j["model_id"] = spec.model_id;
    return j;
}

namespace {

const Json& require(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
    return j.at(key);
}

double require_number(const Json& j, const char* key) {
    const auto& v = require(j, key);
    if (!v.is_number()) throw FormatError(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

} // namespace

SpellSpec spec_from_json(const Json& j) {
    SpellSpec s;
    const auto& type = require(j, "type");
    if (!type.is_number_integer()) throw FormatError("field 'type' must be an integer");
    s.type_index = type.get<int>();
    const auto& st = require(j, "statuses");
    s.statuses.power = require_number(st, "power");
    s.statuses.speed = require_number(st, "speed");
    s.statuses.area = require_number(st, "area");
    const auto& color = require(st, "color");
    if (!color.is_array() || color.size() != 3 || !std::all_of(color.begin(), color.end(), [](const Json& c) {
            return c.is_number_integer();
        })) {
        throw FormatError("field 'color' must be [r,g,b] integers");
    }
    s.statuses.color = {color[0].get<int>(), color[1].get<int>(), color[2].get<int>()};
    s.effects = matrix_from_json(require(j, "effects"));
    s.cost = require_number(j, "cost");
    if (j.contains("prompt")) s.prompt = j.at("prompt").get<std::string>();
    if (j.contains("model_id")) s.model_id = j.at("model_id").get<std::string>();
    return s;
}

std::string serialize_spec(const SpellSpec& spec) { return spec_to_json(spec).dump(); }

SpellSpec parse_spec(std::string_view text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw FormatError(std::string("spell spec is not valid JSON: ") + e.what());
    }
    try {
        return spec_from_json(j);
    } catch (const Json::exception& e) {
        throw FormatError(std::string("spell spec has a mistyped field: ") + e.what());
    }
}

OrderedJson prediction_to_json(const RawPrediction& pred) {
    OrderedJson j;
    j["type_probs"] = pred.type_probs;
    j["statuses"] = pred.status_raws.values;
    j["effects"] = matrix_to_json(pred.effects);
    return j;
}

} // namespace spellforge
