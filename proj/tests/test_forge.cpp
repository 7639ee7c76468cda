#include <gtest/gtest.h>

#include "spellforge/error.hpp"
#include "spellforge/forge.hpp"
#include "support.hpp"

using namespace spellforge;

namespace {

const EngineConfig kConfig = EngineConfig::defaults();

} // namespace

TEST(Forge, TrapPredictionBecomesTrapSpell) {
    const sftest::FixedBackend backend(sftest::trap_prediction());
    const auto s = forge("A trap that holds the enemy to the ground", backend, kConfig);
    EXPECT_EQ(s.spec.type_index, 3);
    EXPECT_NEAR(s.spec.cost, 25.45, 1e-12);
    EXPECT_DOUBLE_EQ(s.cost.base, 20.0);
    EXPECT_DOUBLE_EQ(s.cost.effects, 5.0);
    // Half way along each range: power between 20 and 35, area between 1.5 and 2.5.
    EXPECT_DOUBLE_EQ(s.spec.statuses.power, 27.5);
    EXPECT_DOUBLE_EQ(s.spec.statuses.speed, 2.0);
    EXPECT_DOUBLE_EQ(s.spec.statuses.area, 2.0);
    EXPECT_EQ(s.spec.prompt, "A trap that holds the enemy to the ground");
    EXPECT_EQ(s.spec.model_id, "fixed");
    ASSERT_EQ(s.bindings.size(), 1u);
    EXPECT_EQ(s.bindings[0].trigger, TriggerKind::OnEnemyCollision);
    EXPECT_EQ(s.bindings[0].effects[0].stat, StatKind::Speed);
    EXPECT_TRUE(validate_spec(s.spec, kConfig.registry).ok());
    EXPECT_GE(s.timing.total_ms, s.timing.predict_ms);
    EXPECT_GE(s.timing.predict_ms, 0.0);
}

TEST(Forge, BlankPromptNeverReachesBackend) {
    const sftest::FixedBackend backend(sftest::trap_prediction());
    EXPECT_THROW(forge("", backend, kConfig), InputError);
    EXPECT_THROW(forge(" \t\n", backend, kConfig), InputError);
    EXPECT_EQ(backend.calls, 0);
}

TEST(Forge, InvalidPredictionIsReported) {
    auto p = sftest::trap_prediction();
    p.type_probs = {0.5, 0.5};
    const sftest::FixedBackend two_types(p);
    try {
        forge("x", two_types, kConfig);
        FAIL() << "two-type prediction accepted";
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.code(), "invalid_prediction");
    }
    p = sftest::trap_prediction();
    p.status_raws.values[0] = 9.0;
    EXPECT_THROW(forge("x", sftest::FixedBackend(p), kConfig), ValidationError);
}

TEST(Forge, JsonShape) {
    const sftest::FixedBackend backend(sftest::trap_prediction());
    const auto j = forged_to_json(forge("trap", backend, kConfig), kConfig.registry);
    EXPECT_EQ(j["type_name"], "Trap");
    EXPECT_EQ(j["behavior"], "Trap");
    EXPECT_EQ(j["spec"]["type"], 3);
    EXPECT_NEAR(j["cost_breakdown"]["total"].get<double>(), 25.45, 1e-12);
    EXPECT_EQ(j["bindings"][0]["trigger"], "OnEnemyCollision");
    EXPECT_TRUE(j["timing"].contains("total_ms"));
    EXPECT_EQ(j["model_id"], "fixed");
}

TEST(Forge, StubExternalBackendEndToEnd) {
    const auto b = spawn_external_backend({sftest::stub_backend_path().string()});
    const auto s = forge("canned", *b, kConfig);
    EXPECT_EQ(s.spec.type_index, 3);
    EXPECT_EQ(s.spec.model_id, "stub-1");
    EXPECT_EQ(s.spec.effects.at(0, 1), -1);
}
