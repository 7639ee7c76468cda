#include "spellforge/sim.hpp"

#include <algorithm>
#include <numbers>

#include "spellforge/error.hpp"

namespace spellforge {

double Stats::get(StatKind s) const {
    switch (s) {
        case StatKind::Health: return health;
        case StatKind::Speed: return speed;
        case StatKind::Defense: return defense;
        case StatKind::Mana: return mana;
    }
    return 0.0;
}

double& Stats::get(StatKind s) {
    switch (s) {
        case StatKind::Health: return health;
        case StatKind::Speed: return speed;
        case StatKind::Defense: return defense;
        case StatKind::Mana: break;
    }
    return mana;
}

std::uint64_t ArenaConfig::ticks(double seconds) const {
    const auto n = std::llround(seconds / tick_seconds);
    return n < 1 ? 1 : static_cast<std::uint64_t>(n);
}

void ArenaConfig::check() const {
    const auto positive = [](double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string("arena ") + what + " must be > 0");
    };
    const auto non_negative = [](double v, const char* what) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError(std::string("arena ") + what + " must be >= 0");
    };
    positive(tick_seconds, "tick");
    positive(half_extent, "half extent");
    positive(entity_radius, "entity radius");
    positive(base_stats.health, "base health");
    non_negative(base_stats.speed, "base speed");
    non_negative(base_stats.defense, "base defense");
    non_negative(base_stats.mana, "base mana");
    non_negative(mana_regen, "mana regeneration");
    non_negative(aim_jitter, "aim jitter");
    positive(intrinsic.projectile_max_range, "projectile max range");
    non_negative(intrinsic.fireball_burst_bonus, "fireball burst bonus");
    positive(intrinsic.thunder_delay, "thunder delay");
    positive(intrinsic.trap_arm_delay, "trap arm delay");
    positive(intrinsic.area_duration, "area duration");
    positive(intrinsic.area_tick_interval, "area tick interval");
}

CompiledSpell compile_spell(const SpellSpec& spec, const SpellTypeRegistry& registry, const StatusRanges& ranges,
                            const EffectConfig& effects) {
    const auto check = validate_spec(spec, registry, ranges);
    if (!check.ok()) throw ValidationError("invalid spell: " + check.summary(), "invalid_spell");
    return {spec, registry.at(spec.type_index).behavior, bind(spec.effects, spec.statuses.power, ranges.power, effects)};
}

std::string_view to_string(SpellPhase p) {
    switch (p) {
        case SpellPhase::Flying: return "flying";
        case SpellPhase::Charging: return "charging";
        case SpellPhase::Arming: return "arming";
        case SpellPhase::Armed: return "armed";
        case SpellPhase::Bursting: return "bursting";
        case SpellPhase::ZoneActive: return "zone-active";
        case SpellPhase::Done: return "done";
    }
    return "unknown";
}

std::string_view to_string(EventKind k) {
    switch (k) {
        case EventKind::Cast: return "Cast";
        case EventKind::CastRejected: return "CastRejected";
        case EventKind::TriggerFired: return "TriggerFired";
        case EventKind::EffectApplied: return "EffectApplied";
        case EventKind::SpellExpired: return "SpellExpired";
        case EventKind::EntityDefeated: return "EntityDefeated";
    }
    return "Unknown";
}

OrderedJson event_to_json(const SimEvent& e) {
    OrderedJson j;
    j["tick"] = e.tick;
    j["kind"] = to_string(e.kind);
    switch (e.kind) {
        case EventKind::Cast:
            j["caster"] = e.entity;
            j["spell"] = e.spell;
            j["source"] = e.source;
            j["cost"] = e.value;
            j["mana_after"] = e.extra;
            break;
        case EventKind::CastRejected:
            j["caster"] = e.entity;
            j["source"] = e.source;
            j["cost"] = e.value;
            j["mana"] = e.extra;
            break;
        case EventKind::TriggerFired:
            j["spell"] = e.spell;
            j["source"] = e.source;
            j["target"] = e.entity;
            j["trigger"] = to_string(*e.trigger);
            break;
        case EventKind::EffectApplied:
            j["spell"] = e.spell;
            j["source"] = e.source;
            j["target"] = e.entity;
            j["trigger"] = to_string(*e.trigger);
            j["stat"] = to_string(*e.stat);
            j["sign"] = e.sign;
            j["magnitude"] = e.value;
            j["duration"] = e.extra;
            break;
        case EventKind::SpellExpired:
            j["spell"] = e.spell;
            j["source"] = e.source;
            j["owner"] = e.entity;
            break;
        case EventKind::EntityDefeated:
            j["entity"] = e.entity;
            break;
    }
    return j;
}

std::string trace_to_jsonl(const std::vector<SimEvent>& trace) {
    std::string out;
    for (const auto& e : trace) {
        out += event_to_json(e).dump();
        out += '\n';
    }
    return out;
}

OrderedJson frame_to_json(const Frame& f) {
    OrderedJson j;
    j["tick"] = f.tick;
    OrderedJson ents = OrderedJson::array();
    for (const auto& e : f.entities) {
        OrderedJson je;
        je["id"] = e.id;
        je["position"] = {e.position.x, e.position.y};
        je["health"] = e.stats.health;
        je["speed"] = e.stats.speed;
        je["defense"] = e.stats.defense;
        je["mana"] = e.stats.mana;
        je["alive"] = e.alive;
        ents.push_back(std::move(je));
    }
    j["entities"] = std::move(ents);
    OrderedJson spells = OrderedJson::array();
    for (const auto& s : f.spells) {
        OrderedJson js;
        js["id"] = s.id;
        js["owner"] = s.owner;
        js["behavior"] = to_string(s.behavior);
        js["phase"] = to_string(s.phase);
        js["position"] = {s.position.x, s.position.y};
        js["radius"] = s.radius;
        spells.push_back(std::move(js));
    }
    j["spells"] = std::move(spells);
    return j;
}

// ---------------------------------------------------------------------------
// Arena
// ---------------------------------------------------------------------------

Arena::Arena(ArenaConfig config, std::uint64_t seed) : config_(config), rng_(seed) { config_.check(); }

int Arena::add_entity(int team, Vec2 position) {
    Entity e;
    e.id = static_cast<int>(entities_.size());
    e.team = team;
    e.position = clamp_to_arena(position);
    e.base = config_.base_stats;
    e.current = config_.base_stats;
    entities_.push_back(std::move(e));
    return entities_.back().id;
}

const Entity& Arena::entity(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= entities_.size()) throw InputError("unknown entity id " + std::to_string(id));
    return entities_[static_cast<std::size_t>(id)];
}

Entity& Arena::entity_mut(int id) { return const_cast<Entity&>(static_cast<const Arena&>(*this).entity(id)); }

void Arena::set_destination(int id, std::optional<Vec2> target) {
    entity_mut(id).destination = target ? std::optional(clamp_to_arena(*target)) : std::nullopt;
}

Vec2 Arena::clamp_to_arena(Vec2 p) const {
    const double h = config_.half_extent;
    return {std::clamp(p.x, -h, h), std::clamp(p.y, -h, h)};
}

int Arena::intern(int owner, const CompiledSpell& spell) {
    for (std::size_t i = 0; i < definitions_.size(); ++i) {
        if (definitions_[i].owner == owner && definitions_[i].spell == spell) return static_cast<int>(i);
    }
    definitions_.push_back({owner, spell});
    return static_cast<int>(definitions_.size() - 1);
}

SimEvent Arena::cast(int caster, const CompiledSpell& spell, Vec2 aim) {
    Entity& e = entity_mut(caster);
    if (!e.alive) throw InputError("entity " + std::to_string(caster) + " is defeated and cannot cast");
    const int source = intern(caster, spell);
    const double cost = spell.spec.cost;

    SimEvent ev;
    ev.tick = tick_;
    ev.entity = caster;
    ev.source = source;
    ev.value = cost;
    if (!(e.current.mana >= cost)) {
        ev.kind = EventKind::CastRejected;
        ev.extra = e.current.mana;
        trace_.push_back(ev);
        return ev;
    }
    e.current.mana -= cost;

    if (config_.aim_jitter > 0.0) {
        const double angle = rng_.uniform(0.0, 2.0 * std::numbers::pi);
        const double r = config_.aim_jitter * std::sqrt(rng_.uniform01());
        aim = aim + Vec2{std::cos(angle) * r, std::sin(angle) * r};
    }

    SpellObject s;
    s.id = next_spell_id_++;
    s.owner = caster;
    s.source = source;
    s.behavior = spell.behavior;
    s.radius = spell.spec.statuses.area;
    switch (spell.behavior) {
        case Behavior::Projectile:
        case Behavior::Fireball: {
            s.phase = SpellPhase::Flying;
            s.position = e.position;
            Vec2 dir = aim - e.position;
            const double len = dir.length();
            dir = len > 0.0 ? dir * (1.0 / len) : Vec2{e.position.x <= 0.0 ? 1.0 : -1.0, 0.0};
            s.velocity = dir * spell.spec.statuses.speed;
            break;
        }
        case Behavior::Thunder:
            s.phase = SpellPhase::Charging;
            s.position = clamp_to_arena(aim);
            break;
        case Behavior::Trap:
            s.phase = SpellPhase::Arming;
            s.position = clamp_to_arena(aim);
            break;
        case Behavior::AreaEffect:
            s.phase = SpellPhase::ZoneActive;
            s.position = clamp_to_arena(aim);
            break;
    }
    spells_.push_back(s);

    ev.kind = EventKind::Cast;
    ev.spell = s.id;
    ev.extra = e.current.mana;
    trace_.push_back(ev);
    return ev;
}

std::vector<SimEvent> Arena::tick() {
    ++tick_;
    std::vector<SimEvent> events;
    regenerate();
    apply_modifiers();
    expire_modifiers();
    move_entities();
    for (auto& s : spells_) {
        if (s.phase != SpellPhase::Done) advance(s, events);
    }
    defeat(events);
    std::erase_if(spells_, [](const SpellObject& s) { return s.phase == SpellPhase::Done; });
    trace_.insert(trace_.end(), events.begin(), events.end());
    return events;
}

void Arena::regenerate() {
    const double dt = config_.tick_seconds;
    for (auto& e : entities_) {
        if (e.alive) e.current.mana = std::min(e.base.mana, e.current.mana + config_.mana_regen * dt);
    }
}

void Arena::apply_modifiers() {
    const double dt = config_.tick_seconds;
    for (auto& e : entities_) {
        if (!e.alive) continue;
        // Attributes first so this tick's Defense shields this tick's damage.
        double damage = 0.0;
        double heal = 0.0;
        for (auto& m : e.modifiers) {
            if (m.remaining_ticks == 0) continue;
            switch (m.stat) {
                case StatKind::Speed:
                case StatKind::Defense: {
                    double& v = e.current.get(m.stat);
                    const double before = v;
                    v = std::max(0.0, v + m.rate * dt);
                    m.applied += v - before;
                    break;
                }
                case StatKind::Mana:
                    e.current.mana = std::clamp(e.current.mana + m.rate * dt, 0.0, e.base.mana);
                    break;
                case StatKind::Health:
                    (m.rate < 0.0 ? damage : heal) += std::abs(m.rate);
                    break;
            }
            --m.remaining_ticks;
            m.last_applied_tick = tick_;
        }
        if (damage > 0.0 || heal > 0.0) {
            const double net = heal - std::max(0.0, damage - e.current.defense);
            e.current.health = std::clamp(e.current.health + net * dt, 0.0, e.base.health);
        }
    }
}

void Arena::expire_modifiers() {
    for (auto& e : entities_) {
        std::erase_if(e.modifiers, [&](const Modifier& m) {
            if (m.remaining_ticks != 0 || m.last_applied_tick == tick_) return false;
            if (m.stat == StatKind::Speed || m.stat == StatKind::Defense) {
                double& v = e.current.get(m.stat);
                v = std::max(0.0, v - m.applied);
            }
            return true;
        });
    }
}

void Arena::move_entities() {
    const double dt = config_.tick_seconds;
    for (auto& e : entities_) {
        if (!e.alive || !e.destination) continue;
        const Vec2 d = *e.destination - e.position;
        const double dist = d.length();
        const double step = e.current.speed * dt;
        if (dist <= step) {
            e.position = *e.destination;
            e.destination.reset();
        } else {
            e.position = clamp_to_arena(e.position + d * (step / dist));
        }
    }
}

namespace {

// Distance from `p` to segment [a, b] and the closest point on it.
std::pair<double, Vec2> segment_distance(Vec2 a, Vec2 b, Vec2 p) {
    const Vec2 ab = b - a;
    const double len2 = ab.x * ab.x + ab.y * ab.y;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2, 0.0, 1.0);
    const Vec2 q = a + ab * t;
    return {(p - q).length(), q};
}

} // namespace

void Arena::advance(SpellObject& s, std::vector<SimEvent>& events) {
    ++s.age;
    const auto& in = config_.intrinsic;
    switch (s.behavior) {
        case Behavior::Projectile:
        case Behavior::Fireball: {
            const Vec2 from = s.position;
            const Vec2 to = from + s.velocity * config_.tick_seconds;
            int hit = -1;
            double best = 0.0;
            Vec2 contact = to;
            for (const auto& e : entities_) {
                if (!e.alive || e.id == s.owner) continue;
                const auto [dist, q] = segment_distance(from, to, e.position);
                if (dist > s.radius + config_.entity_radius) continue;
                const double along = (q - from).length();
                if (hit < 0 || along < best) {
                    hit = e.id;
                    best = along;
                    contact = q;
                }
            }
            s.traveled += (to - from).length();
            s.position = hit >= 0 ? contact : to;
            if (hit >= 0) {
                if (s.behavior == Behavior::Projectile) {
                    strike(s, entity_mut(hit), events);
                } else {
                    s.phase = SpellPhase::Bursting;
                    for (int id : inside(s.position, s.radius + in.fireball_burst_bonus, -1)) strike(s, entity_mut(id), events);
                }
                expire(s, events);
            } else if (s.traveled >= in.projectile_max_range || clamp_to_arena(s.position) != s.position) {
                expire(s, events);
            }
            break;
        }
        case Behavior::Thunder:
            if (s.age >= config_.ticks(in.thunder_delay)) {
                s.phase = SpellPhase::Bursting;
                for (int id : inside(s.position, s.radius, -1)) strike(s, entity_mut(id), events);
                expire(s, events);
            }
            break;
        case Behavior::Trap:
            if (s.phase == SpellPhase::Arming && s.age >= config_.ticks(in.trap_arm_delay)) s.phase = SpellPhase::Armed;
            if (s.phase == SpellPhase::Armed && !inside(s.position, s.radius, s.owner).empty()) {
                s.phase = SpellPhase::Bursting;
                for (int id : inside(s.position, s.radius, -1)) strike(s, entity_mut(id), events);
                expire(s, events);
            }
            break;
        case Behavior::AreaEffect:
            if (s.age % config_.ticks(in.area_tick_interval) == 0) {
                for (int id : inside(s.position, s.radius, -1)) pulse(s, entity_mut(id), events);
            }
            if (s.age >= config_.ticks(in.area_duration)) expire(s, events);
            break;
    }
}

std::vector<int> Arena::inside(Vec2 center, double radius, int skip) const {
    std::vector<int> out;
    for (const auto& e : entities_) {
        if (!e.alive || e.id == skip) continue;
        if ((e.position - center).length() <= radius + config_.entity_radius) out.push_back(e.id);
    }
    return out;
}

void Arena::strike(const SpellObject& s, Entity& target, std::vector<SimEvent>& events) {
    if (target.id != s.owner) {
        const bool enemy = target.team != entity(s.owner).team;
        if (enemy) {
            fire(s, target, TriggerKind::OnEnemyCollision, events);
            fire(s, target, TriggerKind::OnAnyPlayerCollision, events);
        } else {
            fire(s, target, TriggerKind::OnAnyPlayerCollision, events);
            fire(s, target, TriggerKind::OnAllyCollision, events);
        }
    }
    fire(s, target, TriggerKind::OnAreaTick, events);
}

void Arena::pulse(const SpellObject& s, Entity& target, std::vector<SimEvent>& events) {
    fire(s, target, TriggerKind::OnAreaTick, events);
}

void Arena::fire(const SpellObject& s, Entity& target, TriggerKind trigger, std::vector<SimEvent>& events) {
    const auto& bindings = definition(s.source).bindings;
    const auto it = std::find_if(bindings.begin(), bindings.end(), [&](const auto& b) { return b.trigger == trigger; });
    if (it == bindings.end()) return;

    SimEvent fired;
    fired.tick = tick_;
    fired.kind = EventKind::TriggerFired;
    fired.entity = target.id;
    fired.spell = s.id;
    fired.source = s.source;
    fired.trigger = trigger;
    events.push_back(fired);

    for (const auto& eff : it->effects) {
        const auto duration = config_.ticks(eff.duration);
        auto existing = std::find_if(target.modifiers.begin(), target.modifiers.end(), [&](const Modifier& m) {
            return m.source == s.source && m.stat == eff.stat && (m.rate < 0.0) == (eff.sign < 0);
        });
        if (existing != target.modifiers.end()) {
            existing->remaining_ticks = duration;
        } else {
            Modifier m;
            m.stat = eff.stat;
            m.rate = eff.sign * eff.magnitude_per_second;
            m.remaining_ticks = duration;
            m.source = s.source;
            m.last_applied_tick = tick_;
            target.modifiers.push_back(m);
        }
        SimEvent applied = fired;
        applied.kind = EventKind::EffectApplied;
        applied.stat = eff.stat;
        applied.sign = eff.sign;
        applied.value = eff.magnitude_per_second;
        applied.extra = eff.duration;
        events.push_back(applied);
    }
}

void Arena::expire(SpellObject& s, std::vector<SimEvent>& events) {
    s.phase = SpellPhase::Done;
    SimEvent ev;
    ev.tick = tick_;
    ev.kind = EventKind::SpellExpired;
    ev.entity = s.owner;
    ev.spell = s.id;
    ev.source = s.source;
    events.push_back(ev);
}

void Arena::defeat(std::vector<SimEvent>& events) {
    for (auto& e : entities_) {
        if (e.alive && e.current.health <= 0.0) {
            e.alive = false;
            e.destination.reset();
            SimEvent ev;
            ev.tick = tick_;
            ev.kind = EventKind::EntityDefeated;
            ev.entity = e.id;
            events.push_back(ev);
        }
    }
}

Frame Arena::snapshot() const {
    Frame f;
    f.tick = tick_;
    for (const auto& e : entities_) f.entities.push_back({e.id, e.position, e.current, e.alive});
    for (const auto& s : spells_) f.spells.push_back({s.id, s.owner, s.behavior, s.phase, s.position, s.radius});
    return f;
}

// ---------------------------------------------------------------------------
// Duels
// ---------------------------------------------------------------------------

DuelResult run_duel(const CompiledSpell& a, const CompiledSpell& b, const DuelOptions& options) {
    if (options.max_ticks == 0) throw InputError("max_ticks must be positive");
    Arena arena(options.arena, options.seed);
    const std::array<int, 2> ids{arena.add_entity(0, {-10.0, 0.0}), arena.add_entity(1, {10.0, 0.0})};
    const std::array<const CompiledSpell*, 2> spells{&a, &b};

    DuelResult result;
    if (options.record_frames) result.frames.push_back(arena.snapshot());

    auto script = options.policy.script;
    std::stable_sort(script.begin(), script.end(), [](const auto& x, const auto& y) { return x.tick < y.tick; });
    std::size_t next_action = 0;

    const auto& chase = options.policy.chase;
    const auto interval = arena.config().ticks(chase.cast_interval);
    std::array<std::optional<std::uint64_t>, 2> last_cast{};

    for (std::uint64_t t = 0; t < options.max_ticks; ++t) {
        if (options.policy.kind == DuelPolicy::Kind::Chase) {
            for (int side = 0; side < 2; ++side) {
                const auto& me = arena.entity(ids[static_cast<std::size_t>(side)]);
                const auto& foe = arena.entity(ids[static_cast<std::size_t>(1 - side)]);
                if (!me.alive || !foe.alive) continue;
                const double dist = (foe.position - me.position).length();
                arena.set_destination(me.id, dist > chase.preferred_range ? std::optional(foe.position) : std::nullopt);
                const auto& spell = *spells[static_cast<std::size_t>(side)];
                auto& last = last_cast[static_cast<std::size_t>(side)];
                const bool ready = !last || t - *last >= interval;
                if (ready && dist <= chase.preferred_range && me.current.mana >= spell.spec.cost) {
                    arena.cast(me.id, spell, foe.position);
                    last = t;
                }
            }
        } else {
            for (; next_action < script.size() && script[next_action].tick <= t; ++next_action) {
                const auto& act = script[next_action];
                if (act.entity < 0 || act.entity > 1) throw InputError("scripted action names entity " + std::to_string(act.entity));
                const int id = ids[static_cast<std::size_t>(act.entity)];
                if (!arena.entity(id).alive) continue;
                switch (act.kind) {
                    case ScriptedAction::Kind::Cast: arena.cast(id, *spells[static_cast<std::size_t>(act.entity)], act.point); break;
                    case ScriptedAction::Kind::Move: arena.set_destination(id, act.point); break;
                    case ScriptedAction::Kind::Hold: arena.set_destination(id, std::nullopt); break;
                }
            }
        }
        arena.tick();
        if (options.record_frames) result.frames.push_back(arena.snapshot());
        if (!arena.entity(ids[0]).alive || !arena.entity(ids[1]).alive) break;
    }

    const bool a_alive = arena.entity(ids[0]).alive;
    const bool b_alive = arena.entity(ids[1]).alive;
    result.outcome = a_alive && !b_alive ? DuelOutcome::WinnerA : !a_alive && b_alive ? DuelOutcome::WinnerB : DuelOutcome::Draw;
    result.ticks = arena.tick_count();
    result.finals = arena.entities();
    result.trace = arena.trace();
    return result;
}

OrderedJson duel_to_json(const DuelResult& r) {
    OrderedJson j;
    j["outcome"] = r.outcome == DuelOutcome::WinnerA ? "A" : r.outcome == DuelOutcome::WinnerB ? "B" : "draw";
    j["winner"] = r.outcome == DuelOutcome::WinnerA ? OrderedJson(0) : r.outcome == DuelOutcome::WinnerB ? OrderedJson(1) : OrderedJson();
    j["ticks"] = r.ticks;
    OrderedJson finals = OrderedJson::array();
    for (const auto& e : r.finals) {
        OrderedJson je;
        je["id"] = e.id;
        je["team"] = e.team;
        je["position"] = {e.position.x, e.position.y};
        je["health"] = e.current.health;
        je["speed"] = e.current.speed;
        je["defense"] = e.current.defense;
        je["mana"] = e.current.mana;
        je["alive"] = e.alive;
        finals.push_back(std::move(je));
    }
    j["final"] = std::move(finals);
    OrderedJson trace = OrderedJson::array();
    for (const auto& e : r.trace) trace.push_back(event_to_json(e));
    j["trace"] = std::move(trace);
    OrderedJson frames = OrderedJson::array();
    for (const auto& f : r.frames) frames.push_back(frame_to_json(f));
    j["frames"] = std::move(frames);
    return j;
}

DuelPolicy policy_from_json(const Json& j) {
    DuelPolicy p;
    if (j.is_null()) return p;
    if (j.is_string()) {
        if (j.get<std::string>() == "chase") return p;
        throw InputError("unknown policy '" + j.get<std::string>() + "'");
    }
    if (!j.is_object()) throw InputError("policy must be \"chase\" or an object");
    const auto kind = j.value("kind", std::string("chase"));
    if (kind == "chase") {
        p.chase.preferred_range = j.value("preferred_range", p.chase.preferred_range);
        p.chase.cast_interval = j.value("cast_interval", p.chase.cast_interval);
        if (!(p.chase.preferred_range > 0.0) || !(p.chase.cast_interval > 0.0)) throw InputError("chase parameters must be positive");
        return p;
    }
    if (kind != "scripted") throw InputError("unknown policy kind '" + kind + "'");
    p.kind = DuelPolicy::Kind::Scripted;
    if (!j.contains("script") || !j["script"].is_array()) throw InputError("scripted policy needs a script array");
    for (const auto& a : j["script"]) {
        ScriptedAction act;
        act.tick = a.at("tick").get<std::uint64_t>();
        act.entity = a.at("entity").get<int>();
        if (act.entity < 0 || act.entity > 1) throw InputError("script entity must be 0 or 1");
        const auto action = a.at("action").get<std::string>();
        if (action == "cast") {
            act.kind = ScriptedAction::Kind::Cast;
        } else if (action == "move") {
            act.kind = ScriptedAction::Kind::Move;
        } else if (action == "hold") {
            act.kind = ScriptedAction::Kind::Hold;
        } else {
            throw InputError("unknown script action '" + action + "'");
        }
        if (a.contains("point")) act.point = {a["point"].at(0).get<double>(), a["point"].at(1).get<double>()};
        p.script.push_back(act);
    }
    return p;
}

} // namespace spellforge
