// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Thresholds are fixed; nothing here is tuned to the current numbers.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "spellforge/backend.hpp"
#include "spellforge/binding.hpp"
#include "spellforge/cli.hpp"
#include "spellforge/dataset.hpp"
#include "spellforge/error.hpp"
#include "spellforge/forge.hpp"
#include "spellforge/paramize.hpp"
#include "spellforge/sim.hpp"
#include "spellforge/textmodel.hpp"
#include "support.hpp"

using namespace spellforge;

namespace {

const SpellTypeRegistry kRegistry = SpellTypeRegistry::defaults();
const StatusRanges kRanges = StatusRanges::defaults();
const char* const kTrapPrompt = "A trap that holds the enemy to the ground";

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), f, a, b, c);
    return buf;
}

int cli(std::vector<std::string> args, std::string* out = nullptr) {
    args.insert(args.begin(), "spellforge");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream o, e;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
    if (out) *out = o.str();
    if (code != 0) std::fprintf(stderr, "  cli exit %d: %s", code, e.str().c_str());
    return code;
}

// The dataset and model the end-to-end criterion builds through the CLI.
struct Workspace {
    std::filesystem::path dir = sftest::temp_dir("acceptance");
    std::string data = (dir / "d.jsonl").string();
    std::string model = (dir / "m.bin").string();
    bool ok = false;

    Workspace() {
        ok = cli({"dataset", "gen", "--count", "2000", "--seed", "1", "--out", data}) == 0 &&
             cli({"train", "--data", data, "--out", model, "--seed", "42"}) == 0;
    }
};

const Workspace& workspace() {
    static const Workspace w;
    return w;
}

Outcome latency() {
    const auto& w = workspace();
    if (!w.ok) return {false, "could not build the model"};
    std::ifstream in(sftest::source_dir() / "tests" / "data" / "reference_prompts.txt");
    std::vector<std::string> prompts;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty()) prompts.push_back(line);
    }
    if (prompts.size() != 200) return {false, "reference corpus has " + std::to_string(prompts.size()) + " prompts"};
    const BuiltinBackend backend(std::make_shared<const LinearSpellModel>(load_model(w.model)));
    const auto config = EngineConfig::defaults();
    std::vector<double> ms;
    for (const auto& p : prompts) ms.push_back(forge(p, backend, config).timing.total_ms);
    std::sort(ms.begin(), ms.end());
    // Nearest-rank p95.
    const double p95 = ms[static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(ms.size()))) - 1];
    const double mean = std::accumulate(ms.begin(), ms.end(), 0.0) / static_cast<double>(ms.size());
    return {p95 < 200.0 && mean < 50.0, fmt("p95 %.3f ms (< 200), mean %.3f ms (< 50)", p95, mean)};
}

Outcome trap_example() {
    const auto& w = workspace();
    if (!w.ok) return {false, "dataset gen or train failed"};
    std::string out;
    if (cli({"forge", kTrapPrompt, "--model", w.model, "--json"}, &out) != 0) return {false, "forge failed"};
    const auto spec = parse_spec(out);
    return {spec.type_index == 3, "type_index " + std::to_string(spec.type_index) + " (want 3)"};
}

Outcome model_quality() {
    const auto data = generate(2000, 1, TemplateGrammar::builtin(), kRegistry, kRanges);
    const auto parts = split(data, 0.2, 1);
    TrainOptions o;
    o.seed = 42;
    const auto model = train(parts.train, o, kRegistry, kRanges);
    const auto m = evaluate(model, parts.test);
    const double min_cell = *std::min_element(m.cell_accuracy.begin(), m.cell_accuracy.end());
    const double max_mae = *std::max_element(m.status_mae.begin(), m.status_mae.end());
    const bool pass = m.type_accuracy >= 0.90 && min_cell >= 0.90 && max_mae <= 0.5;
    return {pass, fmt("type acc %.4f (>= 0.90), worst cell acc %.4f (>= 0.90), ", m.type_accuracy, min_cell) +
                      fmt("worst status MAE %.4f (<= 0.5) on %.0f held-out", max_mae, static_cast<double>(m.count))};
}

Outcome gradient_check() {
    const auto examples = generate(5, 11, TemplateGrammar::builtin(), kRegistry, kRanges);
    std::vector<TrainingRow> rows;
    for (const auto& ex : examples) rows.push_back(make_training_row(ex, kRanges.bounds()));
    const auto check = sftest::gradient_check(sftest::random_weights(kRegistry.size(), rows, 5), rows, 1e-4);
    bool pass = true;
    for (std::size_t h = 0; h < 3; ++h) pass = pass && check.checked[h] > 0 && check.max_rel_error[h] < 1e-4;
    return {pass, fmt("max rel err type %.2e, status %.2e, effect %.2e (< 1e-4)", check.max_rel_error[0],
                      check.max_rel_error[1], check.max_rel_error[2])};
}

Outcome interpolation() {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t failures = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto v = sftest::random_knots(gen, 2 + gen() % 9);
        const RangeSequence r{"random", v};
        const auto n = v.size();
        for (std::size_t k = 0; k < n; ++k) {
            if (resolve_status(static_cast<double>(k), r) != v[k]) ++failures;
        }
        for (std::size_t k = 0; k + 1 < n; ++k) {
            const double mid = resolve_status(static_cast<double>(k) + 0.5, r);
            const double expect = (v[k] + v[k + 1]) / 2.0;
            if (std::abs(mid - expect) > 1e-9 * std::max(1.0, std::abs(expect))) ++failures;
        }
        const double below = -1.0 - u(gen) * 10.0;
        const double above = static_cast<double>(n - 1) + 1e-9 + u(gen) * 10.0;
        if (resolve_status(below, r) != v.front() || resolve_status(0.0, r) != v.front()) ++failures;
        if (resolve_status(above, r) != v.back() || resolve_status(static_cast<double>(n - 1), r) != v.back()) ++failures;
    }
    return {failures == 0, std::to_string(failures) + " mismatches over 1000 sequences"};
}

Outcome cost_properties() {
    const auto config = CostConfig::defaults();
    const auto bounds = kRanges.bounds();
    std::size_t failures = 0;
    for (int t = 0; t < static_cast<int>(kRegistry.size()); ++t) {
        if (compute_cost(t, {}, {}, config, kRanges) != config.base_costs[static_cast<std::size_t>(t)]) ++failures;
    }
    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double lowest = INFINITY;
    for (int i = 0; i < 10000; ++i) {
        StatusVector s;
        for (std::size_t k = 0; k < 4; ++k) s.values[k] = u(gen) * bounds[k];
        auto m = sftest::random_matrix(gen, u(gen));
        const int type = static_cast<int>(gen() % kRegistry.size());
        const double cost = compute_cost(type, s, m, config, kRanges);
        lowest = std::min(lowest, cost);
        if (cost < config.floor) ++failures;
        // Add every negative-weight cell still empty, one at a time.
        for (int row = 0; row < 4; ++row) {
            for (int col = 0; col < 4; ++col) {
                if (m.at(row, col) != 0) continue;
                for (int sign : {-1, 1}) {
                    if (config.effect_weight(row, col, sign) >= 0.0) continue;
                    auto more = m;
                    more.at(row, col) = sign;
                    if (compute_cost(type, s, more, config, kRanges) > cost) ++failures;
                }
            }
        }
    }
    return {failures == 0, std::to_string(failures) + " violations over 10000 random spells; lowest cost " + fmt("%.2f", lowest)};
}

Outcome binding_oracle() {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t failures = 0, effects = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto m = sftest::random_matrix(gen, u(gen));
        const auto bindings = bind(m, 5.0 + 75.0 * u(gen), kRanges.power, EffectConfig{});
        std::vector<std::tuple<int, int, int>> got, want;
        for (const auto& b : bindings) {
            for (const auto& e : b.effects) got.emplace_back(static_cast<int>(b.trigger), static_cast<int>(e.stat), e.sign);
        }
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) {
                if (m.at(r, c) != 0) want.emplace_back(r, c, m.at(r, c));
            }
        }
        effects += got.size();
        if (got != want) ++failures;
    }
    return {failures == 0, std::to_string(failures) + " mismatching matrices, " + std::to_string(effects) + " effects checked"};
}

CompiledSpell spell_of(int type, const StatusVector& raw, const EffectsMatrix& m) {
    SpellSpec spec;
    spec.type_index = type;
    spec.statuses = resolve_statuses(raw, kRanges);
    spec.effects = m;
    spec.cost = compute_cost(type, raw, m, CostConfig::defaults(), kRanges);
    return compile_spell(spec, kRegistry, kRanges, EffectConfig{});
}

// Enemy walks through an armed trap; returns the Speed samples for the
// configured duration after the trigger plus the one after it.
std::optional<std::vector<double>> trap_speeds(const CompiledSpell& trap) {
    Arena arena;
    arena.add_entity(0, {-10, 0});
    const int enemy = arena.add_entity(1, {10, 0});
    arena.cast(0, trap, {0, 0});
    arena.set_destination(enemy, Vec2{-10, 0});
    const auto duration = arena.config().ticks(EffectConfig{}.duration);
    const auto armed_at = arena.config().ticks(arena.config().intrinsic.trap_arm_delay);
    bool fired = false;
    std::vector<double> speeds;
    while (arena.tick_count() < 1000 && speeds.size() <= duration) {
        const auto events = arena.tick();
        if (fired) {
            speeds.push_back(arena.entity(enemy).current.speed);
            continue;
        }
        for (const auto& e : events) {
            if (e.kind == EventKind::EffectApplied && e.entity == enemy && *e.trigger == TriggerKind::OnEnemyCollision &&
                *e.stat == StatKind::Speed && e.sign < 0 && e.tick > armed_at) {
                fired = true;
            }
        }
    }
    if (!fired) return std::nullopt;
    return speeds;
}

Outcome simulator() {
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_real_distribution<double> coord(-20.0, 20.0);
    const auto bounds = kRanges.bounds();
    std::size_t differing = 0;
    for (int i = 0; i < 100; ++i) {
        std::array<CompiledSpell, 2> spells;
        for (auto& s : spells) {
            StatusVector raw;
            for (std::size_t k = 0; k < 4; ++k) raw.values[k] = u(gen) * bounds[k];
            s = spell_of(static_cast<int>(gen() % 5), raw, sftest::random_matrix(gen, 0.3));
        }
        DuelOptions o;
        o.seed = gen();
        o.max_ticks = 600;
        o.arena.aim_jitter = i % 2 == 0 ? 0.0 : 1.0;
        o.policy.kind = DuelPolicy::Kind::Scripted;
        for (int k = 0; k < 40; ++k) {
            ScriptedAction a;
            a.tick = gen() % o.max_ticks;
            a.entity = static_cast<int>(gen() % 2);
            a.kind = gen() % 3 == 0 ? ScriptedAction::Kind::Move : ScriptedAction::Kind::Cast;
            a.point = {coord(gen), coord(gen)};
            o.policy.script.push_back(a);
        }
        const auto first = trace_to_jsonl(run_duel(spells[0], spells[1], o).trace);
        const auto second = trace_to_jsonl(run_duel(spells[0], spells[1], o).trace);
        if (first != second) ++differing;
    }

    EffectsMatrix m;
    m.at(0, 1) = -1;
    StatusVector raw;
    raw.values = {2.5, 0.0, 2.0, 1.4};
    const auto speeds = trap_speeds(spell_of(3, raw, m));
    const double base = ArenaConfig{}.base_stats.speed;
    const auto duration = ArenaConfig{}.ticks(EffectConfig{}.duration);
    bool trap_ok = speeds && speeds->size() == duration + 1;
    if (trap_ok) {
        for (std::size_t k = 0; k < duration; ++k) trap_ok = trap_ok && (*speeds)[k] < base;
    }
    const std::string trap_detail =
        !speeds ? "trap never fired"
                : "Speed below " + fmt("%.1f", base) + " for " + std::to_string(duration) + " ticks: " + (trap_ok ? "yes" : "no");
    return {differing == 0 && trap_ok, std::to_string(differing) + "/100 traces differ; " + trap_detail};
}

Outcome distribution() {
    const auto data = generate(1000, 1, TemplateGrammar::builtin(), kRegistry, kRanges);
    const auto report = stats(data, kRegistry.size(), kRanges);
    bool pass = report.total == 1000;
    std::vector<std::size_t> recount(kRegistry.size(), 0);
    for (const auto& ex : data) ++recount[static_cast<std::size_t>(ex.type_index)];
    pass = pass && recount == report.type_counts;
    std::string counts;
    for (auto c : report.type_counts) {
        pass = pass && c >= 150 && c <= 250;
        counts += (counts.empty() ? "" : "/") + std::to_string(c);
    }
    for (const auto& h : report.status_histograms) {
        pass = pass && std::accumulate(h.begin(), h.end(), std::size_t{0}) == 1000;
    }
    return {pass, "type counts " + counts + " (each in [150, 250]), histograms sum to 1000"};
}

Outcome external_protocol() {
    const auto& w = workspace();
    if (!w.ok) return {false, "no builtin model"};
    std::vector<std::string> prompts = sftest::contract_prompts();
    const BuiltinBackend builtin(std::make_shared<const LinearSpellModel>(load_model(w.model)));
    const auto builtin_bad = sftest::backend_contract(builtin, prompts);

    std::unique_ptr<ExternalBackend> stub;
    try {
        stub = spawn_external_backend({sftest::stub_backend_path().string()});
    } catch (const std::exception& e) {
        return {false, std::string("stub did not start: ") + e.what()};
    }
    const auto stub_bad = sftest::backend_contract(*stub, prompts);

    std::size_t protocol = 0, wrong = 0, lost = 0;
    const auto still_alive = [&] {
        try {
            stub->predict("still there?");
        } catch (...) {
            ++lost;
        }
    };
    const char* malformed[] = {"garbage", "empty",  "array",   "nan",       "cells17", "rows3",    "flat16",
                               "noprobs", "strprobs", "statuses3", "strstatus", "noeffects", "fraccell", "hello"};
    for (const char* name : malformed) {
        try {
            stub->predict(std::string("!") + name);
            ++wrong;
        } catch (const ProtocolError&) {
            ++protocol;
        } catch (...) {
            ++wrong;
        }
        still_alive();
    }
    // Well-formed but semantically wrong replies fail validation instead.
    for (const char* name : {"!nonternary", "!badsum", "!negprob", "!fourtypes"}) {
        try {
            stub->predict(name);
            ++wrong;
        } catch (const ValidationError& e) {
            if (e.code() != "invalid_prediction") ++wrong;
        } catch (...) {
            ++wrong;
        }
        still_alive();
    }
    const bool alive = lost == 0;
    const bool pass = builtin_bad.empty() && stub_bad.empty() && wrong == 0 && alive;
    return {pass, std::to_string(builtin_bad.size()) + " builtin / " + std::to_string(stub_bad.size()) +
                      " stub contract violations; " + std::to_string(protocol) + "/" +
                      std::to_string(std::size(malformed)) + " malformed replies raised protocol errors" +
                      (alive ? "" : "; stub unusable afterwards")};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"latency", latency},
        {"trap prompt forges a Trap", trap_example},
        {"held-out model quality", model_quality},
        {"gradient check", gradient_check},
        {"range interpolation", interpolation},
        {"cost properties", cost_properties},
        {"binding oracle", binding_oracle},
        {"simulator determinism and trap", simulator},
        {"dataset distribution", distribution},
        {"external backend protocol", external_protocol},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
