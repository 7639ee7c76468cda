#include <gtest/gtest.h>

#include <random>
#include <tuple>

#include "spellforge/binding.hpp"
#include "spellforge/error.hpp"
#include "support.hpp"

using namespace spellforge;

namespace {

const RangeSequence kPower = StatusRanges::defaults().power;
const EffectConfig kEffects{};

using Triple = std::tuple<int, int, int>; // row, column, sign

std::vector<Triple> cells_of(const EffectsMatrix& m) {
    std::vector<Triple> out;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            if (m.at(r, c) != 0) out.emplace_back(r, c, m.at(r, c));
        }
    }
    return out;
}

std::vector<Triple> triples_of(const std::vector<TriggerBinding>& bindings) {
    std::vector<Triple> out;
    for (const auto& b : bindings) {
        for (const auto& e : b.effects) out.emplace_back(static_cast<int>(b.trigger), static_cast<int>(e.stat), e.sign);
    }
    return out;
}

} // namespace

TEST(Bind, SingleHealthDebuffOnEnemyCollision) {
    EffectsMatrix m;
    m.at(0, 0) = -1;
    const auto b = bind(m, 5.0, kPower, kEffects);
    ASSERT_EQ(b.size(), 1u);
    EXPECT_EQ(b[0].trigger, TriggerKind::OnEnemyCollision);
    ASSERT_EQ(b[0].effects.size(), 1u);
    EXPECT_EQ(b[0].effects[0].stat, StatKind::Health);
    EXPECT_EQ(b[0].effects[0].sign, -1);
    // Minimum power: no bonus.
    EXPECT_DOUBLE_EQ(b[0].effects[0].magnitude_per_second, 4.0);
    EXPECT_DOUBLE_EQ(b[0].effects[0].duration, 3.0);
}

TEST(Bind, AllZeroMatrixBindsNothing) { EXPECT_TRUE(bind({}, 40.0, kPower, kEffects).empty()); }

TEST(Bind, FullMatrixIsRowMajor) {
    EffectsMatrix m;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) m.at(r, c) = (r + c) % 2 == 0 ? 1 : -1;
    }
    const auto b = bind(m, 80.0, kPower, kEffects);
    ASSERT_EQ(b.size(), 4u);
    for (int r = 0; r < 4; ++r) {
        EXPECT_EQ(static_cast<int>(b[static_cast<std::size_t>(r)].trigger), r);
        ASSERT_EQ(b[static_cast<std::size_t>(r)].effects.size(), 4u);
    }
    EXPECT_EQ(triples_of(b), cells_of(m));
    // Maximum power doubles the base magnitude.
    EXPECT_DOUBLE_EQ(b[2].effects[1].magnitude_per_second, 8.0);
}

TEST(Bind, MagnitudeScalesWithNormalizedPower) {
    EffectsMatrix m;
    m.at(3, 2) = 1;
    const RangeSequence power{"power", {0.0, 50.0, 100.0}};
    const EffectConfig cfg{2.0, 1.5};
    EXPECT_DOUBLE_EQ(bind(m, 25.0, power, cfg)[0].effects[0].magnitude_per_second, 2.5);
    EXPECT_DOUBLE_EQ(bind(m, 150.0, power, cfg)[0].effects[0].magnitude_per_second, 4.0);
    EXPECT_DOUBLE_EQ(bind(m, -3.0, power, cfg)[0].effects[0].magnitude_per_second, 2.0);
    EXPECT_DOUBLE_EQ(bind(m, 25.0, power, cfg)[0].effects[0].duration, 1.5);
}

TEST(Bind, RandomMatricesMatchBruteForce) {
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> power(5.0, 80.0);
    for (int i = 0; i < 10000; ++i) {
        const auto m = sftest::random_matrix(gen, static_cast<double>(i % 11) / 10.0);
        const double p = power(gen);
        const auto b = bind(m, p, kPower, kEffects);
        const auto expect = cells_of(m);
        ASSERT_EQ(triples_of(b), expect);
        ASSERT_EQ(static_cast<int>(expect.size()), m.nonzero_count());
        for (std::size_t k = 1; k < b.size(); ++k) ASSERT_LT(b[k - 1].trigger, b[k].trigger);
        for (const auto& binding : b) ASSERT_FALSE(binding.effects.empty());
        // Power changes magnitudes only, never which bindings exist.
        ASSERT_EQ(triples_of(bind(m, 80.0, kPower, kEffects)), expect);
    }
}

TEST(Bind, RejectsBadInput) {
    EffectsMatrix m;
    m.at(1, 1) = 2;
    EXPECT_THROW(bind(m, 10.0, kPower, kEffects), ValidationError);
    EXPECT_THROW(bind({}, 10.0, kPower, EffectConfig{-1.0, 3.0}), ValidationError);
    EXPECT_THROW(bind({}, 10.0, kPower, EffectConfig{1.0, 0.0}), ValidationError);
}

TEST(Bind, JsonShape) {
    EffectsMatrix m;
    m.at(0, 1) = -1;
    const auto j = bindings_to_json(bind(m, 5.0, kPower, kEffects));
    ASSERT_EQ(j.size(), 1u);
    EXPECT_EQ(j[0]["trigger"], "OnEnemyCollision");
    EXPECT_EQ(j[0]["effects"][0]["stat"], "Speed");
    EXPECT_EQ(j[0]["effects"][0]["sign"], -1);
}
