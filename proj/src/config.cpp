#include "spellforge/config.hpp"

#include <fstream>
#include <set>

#include "spellforge/error.hpp"

namespace spellforge {

namespace {

void only_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw FormatError(where + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items()) {
        if (!ok.contains(key)) throw FormatError(where + ": unknown key '" + key + "'");
    }
}

double number(const Json& j, const std::string& where) {
    if (!j.is_number()) throw FormatError(where + ": expected a number");
    return j.get<double>();
}

void read_number(const Json& j, const char* key, const std::string& where, double& out) {
    if (j.contains(key)) out = number(j[key], where + "." + key);
}

std::vector<double> numbers(const Json& j, const std::string& where) {
    if (!j.is_array()) throw FormatError(where + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) out.push_back(number(v, where));
    return out;
}

SpellTypeRegistry registry_from_json(const Json& j) {
    if (!j.is_array()) throw FormatError("types: expected an array");
    std::vector<SpellTypeEntry> entries;
    for (const auto& t : j) {
        only_keys(t, "types[]", {"name", "base_cost", "behavior"});
        SpellTypeEntry e;
        e.index = static_cast<int>(entries.size());
        e.name = t.at("name").get<std::string>();
        e.base_cost = number(t.at("base_cost"), "types[].base_cost");
        const auto behavior = behavior_from_string(t.at("behavior").get<std::string>());
        if (!behavior) throw FormatError("types[].behavior: unknown behavior '" + t["behavior"].get<std::string>() + "'");
        e.behavior = *behavior;
        entries.push_back(std::move(e));
    }
    return SpellTypeRegistry(std::move(entries));
}

void ranges_from_json(const Json& j, StatusRanges& r) {
    only_keys(j, "ranges", {"power", "speed", "area", "color"});
    if (j.contains("power")) r.power.values = numbers(j["power"], "ranges.power");
    if (j.contains("speed")) r.speed.values = numbers(j["speed"], "ranges.speed");
    if (j.contains("area")) r.area.values = numbers(j["area"], "ranges.area");
    if (j.contains("color")) {
        if (!j["color"].is_array()) throw FormatError("ranges.color: expected an array of [r, g, b]");
        r.color.colors.clear();
        for (const auto& c : j["color"]) {
            if (!c.is_array() || c.size() != 3) throw FormatError("ranges.color: expected [r, g, b] triples");
            r.color.colors.push_back({c[0].get<int>(), c[1].get<int>(), c[2].get<int>()});
        }
    }
}

void cost_from_json(const Json& j, CostConfig& c) {
    only_keys(j, "cost", {"status_weights", "effect_weights", "floor"});
    read_number(j, "floor", "cost", c.floor);
    if (j.contains("status_weights")) {
        const auto& w = j["status_weights"];
        only_keys(w, "cost.status_weights", {"power", "speed", "area", "color"});
        for (auto k : kAllStatuses) {
            read_number(w, std::string(to_string(k)).c_str(), "cost.status_weights", c.status_weights[static_cast<std::size_t>(k)]);
        }
    }
    if (j.contains("effect_weights")) {
        // One entry per trigger row: either [neg, pos] for the whole row or
        // four [neg, pos] pairs, one per stat column.
        const auto& rows = j["effect_weights"];
        if (!rows.is_array() || rows.size() != kTriggerRows) throw FormatError("cost.effect_weights: expected 4 rows");
        for (int row = 0; row < kTriggerRows; ++row) {
            const auto& r = rows[static_cast<std::size_t>(row)];
            if (r.is_array() && r.size() == 2 && r[0].is_number()) {
                c.set_row_weights(row, number(r[0], "cost.effect_weights"), number(r[1], "cost.effect_weights"));
                continue;
            }
            if (!r.is_array() || r.size() != kStatColumns) {
                throw FormatError("cost.effect_weights: each row is [neg, pos] or 4 such pairs");
            }
            for (int col = 0; col < kStatColumns; ++col) {
                const auto pair = numbers(r[static_cast<std::size_t>(col)], "cost.effect_weights");
                if (pair.size() != 2) throw FormatError("cost.effect_weights: each cell is [neg, pos]");
                c.effect_weights[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)] = {pair[0], pair[1]};
            }
        }
    }
}

void arena_from_json(const Json& j, ArenaConfig& a) {
    only_keys(j, "arena", {"tick_seconds", "half_extent", "entity_radius", "base_stats", "mana_regen", "aim_jitter", "intrinsic"});
    read_number(j, "tick_seconds", "arena", a.tick_seconds);
    read_number(j, "half_extent", "arena", a.half_extent);
    read_number(j, "entity_radius", "arena", a.entity_radius);
    read_number(j, "mana_regen", "arena", a.mana_regen);
    read_number(j, "aim_jitter", "arena", a.aim_jitter);
    if (j.contains("base_stats")) {
        const auto& s = j["base_stats"];
        only_keys(s, "arena.base_stats", {"health", "speed", "defense", "mana"});
        read_number(s, "health", "arena.base_stats", a.base_stats.health);
        read_number(s, "speed", "arena.base_stats", a.base_stats.speed);
        read_number(s, "defense", "arena.base_stats", a.base_stats.defense);
        read_number(s, "mana", "arena.base_stats", a.base_stats.mana);
    }
    if (j.contains("intrinsic")) {
        const auto& in = j["intrinsic"];
        only_keys(in, "arena.intrinsic",
                  {"projectile_max_range", "fireball_burst_bonus", "thunder_delay", "trap_arm_delay", "area_duration",
                   "area_tick_interval"});
        auto& p = a.intrinsic;
        read_number(in, "projectile_max_range", "arena.intrinsic", p.projectile_max_range);
        read_number(in, "fireball_burst_bonus", "arena.intrinsic", p.fireball_burst_bonus);
        read_number(in, "thunder_delay", "arena.intrinsic", p.thunder_delay);
        read_number(in, "trap_arm_delay", "arena.intrinsic", p.trap_arm_delay);
        read_number(in, "area_duration", "arena.intrinsic", p.area_duration);
        read_number(in, "area_tick_interval", "arena.intrinsic", p.area_tick_interval);
    }
}

} // namespace

void EngineConfig::check() const {
    ranges.check();
    cost.check();
    effects.check();
    arena.check();
    if (cost.base_costs.size() != registry.size()) {
        throw ValidationError("cost config has " + std::to_string(cost.base_costs.size()) + " base costs for " +
                              std::to_string(registry.size()) + " spell types");
    }
}

EngineConfig config_from_json(const Json& j) {
    only_keys(j, "config", {"types", "ranges", "cost", "effects", "arena"});
    EngineConfig c;
    try {
        if (j.contains("types")) {
            c.registry = registry_from_json(j["types"]);
            c.cost.base_costs.clear();
            for (const auto& e : c.registry.entries()) c.cost.base_costs.push_back(e.base_cost);
        }
        if (j.contains("ranges")) ranges_from_json(j["ranges"], c.ranges);
        if (j.contains("cost")) cost_from_json(j["cost"], c.cost);
        if (j.contains("effects")) {
            only_keys(j["effects"], "effects", {"base_magnitude", "duration"});
            read_number(j["effects"], "base_magnitude", "effects", c.effects.base_magnitude);
            read_number(j["effects"], "duration", "effects", c.effects.duration);
        }
        if (j.contains("arena")) arena_from_json(j["arena"], c.arena);
    } catch (const Json::exception& e) {
        throw FormatError(std::string("config: ") + e.what());
    }
    c.check();
    return c;
}

OrderedJson config_to_json(const EngineConfig& c) {
    OrderedJson j;
    OrderedJson types = OrderedJson::array();
    for (const auto& e : c.registry.entries()) {
        types.push_back({{"name", e.name},
                         {"base_cost", c.cost.base_costs.at(static_cast<std::size_t>(e.index))},
                         {"behavior", to_string(e.behavior)}});
    }
    j["types"] = std::move(types);

    OrderedJson colors = OrderedJson::array();
    for (const auto& rgb : c.ranges.color.colors) colors.push_back({rgb.r, rgb.g, rgb.b});
    j["ranges"] = {{"power", c.ranges.power.values},
                   {"speed", c.ranges.speed.values},
                   {"area", c.ranges.area.values},
                   {"color", std::move(colors)}};

    OrderedJson weights;
    for (auto k : kAllStatuses) weights[std::string(to_string(k))] = c.cost.status_weights[static_cast<std::size_t>(k)];
    OrderedJson rows = OrderedJson::array();
    for (const auto& row : c.cost.effect_weights) {
        OrderedJson r = OrderedJson::array();
        for (const auto& cell : row) r.push_back({cell[0], cell[1]});
        rows.push_back(std::move(r));
    }
    j["cost"] = {{"status_weights", std::move(weights)}, {"effect_weights", std::move(rows)}, {"floor", c.cost.floor}};

    j["effects"] = {{"base_magnitude", c.effects.base_magnitude}, {"duration", c.effects.duration}};

    const auto& a = c.arena;
    const auto& in = a.intrinsic;
    j["arena"] = {{"tick_seconds", a.tick_seconds},
                  {"half_extent", a.half_extent},
                  {"entity_radius", a.entity_radius},
                  {"base_stats",
                   {{"health", a.base_stats.health},
                    {"speed", a.base_stats.speed},
                    {"defense", a.base_stats.defense},
                    {"mana", a.base_stats.mana}}},
                  {"mana_regen", a.mana_regen},
                  {"aim_jitter", a.aim_jitter},
                  {"intrinsic",
                   {{"projectile_max_range", in.projectile_max_range},
                    {"fireball_burst_bonus", in.fireball_burst_bonus},
                    {"thunder_delay", in.thunder_delay},
                    {"trap_arm_delay", in.trap_arm_delay},
                    {"area_duration", in.area_duration},
                    {"area_tick_interval", in.area_tick_interval}}}};
    return j;
}

EngineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

} // namespace spellforge
