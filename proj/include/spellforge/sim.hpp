#pragma once

// Deterministic fixed-timestep 2D arena.
//
// One tick runs, in order: mana regeneration, active modifiers, modifier
// expiry, entity movement, spell objects (in id order, firing triggers as they
// touch entities), then defeat checks. Entities and spells are always visited
// in ascending id order and the RNG is consulted only when aim jitter is on,
// so a fixed (initial state, actions, seed) always yields the same trace.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spellforge/binding.hpp"
#include "spellforge/core.hpp"
#include "spellforge/rng.hpp"

namespace spellforge {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double length() const { return std::hypot(x, y); }

    bool operator==(const Vec2&) const = default;
};

struct Stats {
    double health = 100.0;
    double speed = 5.0; // units per second
    double defense = 0.0;
    double mana = 100.0;

    double get(StatKind s) const;
    double& get(StatKind s);

    bool operator==(const Stats&) const = default;
};

struct IntrinsicParams {
    double projectile_max_range = 30.0;
    double fireball_burst_bonus = 1.0;
    double thunder_delay = 0.75;
    double trap_arm_delay = 0.5;
    double area_duration = 4.0;
    double area_tick_interval = 0.5;

    bool operator==(const IntrinsicParams&) const = default;
};

struct ArenaConfig {
    double tick_seconds = 0.05;
    double half_extent = 20.0;
    double entity_radius = 0.5;
    Stats base_stats;
    double mana_regen = 2.0; // per second
    IntrinsicParams intrinsic;
    // Random aim offset radius applied at cast time; 0 keeps the RNG idle.
    double aim_jitter = 0.0;

    // Seconds quantized to whole ticks, at least one.
    std::uint64_t ticks(double seconds) const;
    void check() const;

    bool operator==(const ArenaConfig&) const = default;
};

// A spell ready for the arena: validated spec, compiled bindings and the
// behavior its type maps to.
struct CompiledSpell {
    SpellSpec spec;
    Behavior behavior = Behavior::Projectile;
    std::vector<TriggerBinding> bindings;

    bool operator==(const CompiledSpell&) const = default;
};

// Throws ValidationError if the spec breaks any invariant.
CompiledSpell compile_spell(const SpellSpec& spec, const SpellTypeRegistry& registry, const StatusRanges& ranges,
                            const EffectConfig& effects);

// Signed over-time change to one stat. Health and Mana are pools and keep
// what was applied; Speed and Defense are attributes and get the applied
// amount reverted on expiry.
struct Modifier {
    StatKind stat = StatKind::Health;
    double rate = 0.0; // signed units per second
    std::uint64_t remaining_ticks = 0;
    int source = -1;
    double applied = 0.0; // net change so far (attributes only)
    std::uint64_t last_applied_tick = 0;

    bool operator==(const Modifier&) const = default;
};

struct Entity {
    int id = 0;
    int team = 0;
    Vec2 position;
    std::optional<Vec2> destination;
    Stats base;
    Stats current;
    std::vector<Modifier> modifiers;
    bool alive = true;

    bool operator==(const Entity&) const = default;
};

enum class SpellPhase { Flying, Charging, Arming, Armed, Bursting, ZoneActive, Done };
std::string_view to_string(SpellPhase p);

struct SpellObject {
    int id = 0;
    int owner = 0;
    int source = 0; // spell definition id
    Behavior behavior = Behavior::Projectile;
    SpellPhase phase = SpellPhase::Flying;
    Vec2 position;
    Vec2 velocity;
    double radius = 0.0;
    double traveled = 0.0;
    std::uint64_t age = 0; // ticks since spawn

    bool operator==(const SpellObject&) const = default;
};

enum class EventKind { Cast, CastRejected, TriggerFired, EffectApplied, SpellExpired, EntityDefeated };
std::string_view to_string(EventKind k);

struct SimEvent {
    std::uint64_t tick = 0;
    EventKind kind = EventKind::Cast;
    int entity = -1; // caster, target or defeated entity
    int spell = -1;  // spell object
    int source = -1; // spell definition
    std::optional<TriggerKind> trigger;
    std::optional<StatKind> stat;
    int sign = 0;
    double value = 0.0; // cost (Cast, CastRejected) or magnitude per second (EffectApplied)
    double extra = 0.0; // mana after (Cast), mana held (CastRejected) or duration (EffectApplied)

    bool operator==(const SimEvent&) const = default;
};

OrderedJson event_to_json(const SimEvent& e);
std::string trace_to_jsonl(const std::vector<SimEvent>& trace);

struct EntityFrame {
    int id = 0;
    Vec2 position;
    Stats stats;
    bool alive = true;
};

struct SpellFrame {
    int id = 0;
    int owner = 0;
    Behavior behavior = Behavior::Projectile;
    SpellPhase phase = SpellPhase::Flying;
    Vec2 position;
    double radius = 0.0;
};

struct Frame {
    std::uint64_t tick = 0;
    std::vector<EntityFrame> entities;
    std::vector<SpellFrame> spells;
};

OrderedJson frame_to_json(const Frame& f);

class Arena {
public:
    explicit Arena(ArenaConfig config = {}, std::uint64_t seed = 0);

    int add_entity(int team, Vec2 position);
    const Entity& entity(int id) const;
    const std::vector<Entity>& entities() const noexcept { return entities_; }
    const std::vector<SpellObject>& spells() const noexcept { return spells_; }
    const ArenaConfig& config() const noexcept { return config_; }
    std::uint64_t tick_count() const noexcept { return tick_; }
    const std::vector<SimEvent>& trace() const noexcept { return trace_; }
    const CompiledSpell& definition(int source) const { return definitions_.at(static_cast<std::size_t>(source)).spell; }

    // Walk toward `target` at the entity's Speed; nullopt holds position.
    void set_destination(int id, std::optional<Vec2> target);

    // Spends mana and spawns the spell, or records CastRejected and changes
    // nothing. Throws InputError for an unknown or defeated caster.
    SimEvent cast(int caster, const CompiledSpell& spell, Vec2 aim);

    // Advances one tick and returns the events it produced.
    std::vector<SimEvent> tick();

    Frame snapshot() const;

private:
    struct Definition {
        int owner;
        CompiledSpell spell;
    };

    Entity& entity_mut(int id);
    int intern(int owner, const CompiledSpell& spell);
    Vec2 clamp_to_arena(Vec2 p) const;

    void regenerate();
    void apply_modifiers();
    void expire_modifiers();
    void move_entities();
    void advance(SpellObject& s, std::vector<SimEvent>& events);
    void defeat(std::vector<SimEvent>& events);

    // Contact: relation rows plus the area row. Pulse: area row only.
    void strike(const SpellObject& s, Entity& target, std::vector<SimEvent>& events);
    void pulse(const SpellObject& s, Entity& target, std::vector<SimEvent>& events);
    void fire(const SpellObject& s, Entity& target, TriggerKind trigger, std::vector<SimEvent>& events);
    // Alive entities overlapping a circle, by id; optionally skipping the owner.
    std::vector<int> inside(Vec2 center, double radius, int skip) const;
    void expire(SpellObject& s, std::vector<SimEvent>& events);

    ArenaConfig config_;
    Rng rng_;
    std::uint64_t tick_ = 0;
    std::vector<Entity> entities_;
    std::vector<SpellObject> spells_;
    std::vector<Definition> definitions_;
    std::vector<SimEvent> trace_;
    int next_spell_id_ = 0;
};

// ---------------------------------------------------------------------------
// Duels
// ---------------------------------------------------------------------------

struct ScriptedAction {
    enum class Kind { Cast, Move, Hold };

    std::uint64_t tick = 0;
    int entity = 0; // 0 casts spell A, 1 casts spell B
    Kind kind = Kind::Cast;
    Vec2 point;
};

struct ChaseParams {
    double preferred_range = 8.0;
    double cast_interval = 1.0; // seconds between attempted casts
};

struct DuelPolicy {
    enum class Kind { Chase, Scripted };

    Kind kind = Kind::Chase;
    ChaseParams chase;
    std::vector<ScriptedAction> script;
};

struct DuelOptions {
    ArenaConfig arena;
    std::uint64_t seed = 0;
    std::uint64_t max_ticks = 2400;
    DuelPolicy policy;
    bool record_frames = true;
};

enum class DuelOutcome { WinnerA, WinnerB, Draw };

struct DuelResult {
    DuelOutcome outcome = DuelOutcome::Draw;
    std::uint64_t ticks = 0;
    std::vector<Entity> finals;
    std::vector<SimEvent> trace;
    std::vector<Frame> frames;
};

// Entity 0 (team 0) spawns at (-10, 0) with spell A, entity 1 (team 1) at
// (10, 0) with spell B. Ends at the first defeat or after max_ticks (draw);
// a simultaneous defeat is a draw. Throws InputError for max_ticks == 0.
DuelResult run_duel(const CompiledSpell& a, const CompiledSpell& b, const DuelOptions& options);

OrderedJson duel_to_json(const DuelResult& result);
DuelPolicy policy_from_json(const Json& j);

} // namespace spellforge
