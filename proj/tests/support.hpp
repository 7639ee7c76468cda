#pragma once

// Helpers shared by the unit tests and the acceptance runner. The oracles
// here are written independently of the library code they check.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "spellforge/backend.hpp"
#include "spellforge/core.hpp"
#include "spellforge/textmodel.hpp"

namespace sftest {

inline std::filesystem::path stub_backend_path() { return SPELLFORGE_STUB_BACKEND; }
inline std::filesystem::path source_dir() { return SPELLFORGE_SOURCE_DIR; }

inline std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("spellforge-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// Piecewise-linear lookup by scanning segments for the one containing raw.
inline double oracle_interpolate(double raw, const std::vector<double>& v) {
    const double top = static_cast<double>(v.size() - 1);
    if (raw <= 0.0) return v.front();
    if (raw >= top) return v.back();
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        const double lo = static_cast<double>(i);
        if (raw >= lo && raw < lo + 1.0) {
            const double t = raw - lo;
            return (1.0 - t) * v[i] + t * v[i + 1];
        }
    }
    return v.back();
}

inline std::vector<double> random_knots(std::mt19937_64& gen, std::size_t n) {
    std::uniform_real_distribution<double> step(0.1, 10.0);
    std::vector<double> v{std::uniform_real_distribution<double>(-50.0, 50.0)(gen)};
    for (std::size_t i = 1; i < n; ++i) v.push_back(v.back() + step(gen) * (gen() % 4 == 0 ? -1.0 : 1.0));
    return v;
}

inline spellforge::EffectsMatrix random_matrix(std::mt19937_64& gen, double density = 0.4) {
    spellforge::EffectsMatrix m;
    std::bernoulli_distribution nonzero(density);
    for (auto& row : m.cells) {
        for (auto& c : row) c = nonzero(gen) ? (gen() % 2 == 0 ? -1 : 1) : 0;
    }
    return m;
}

// The prediction contract every backend must meet, checked from first
// principles. Returns a list of violations (empty when the contract holds).
inline std::vector<std::string> prediction_contract(const spellforge::RawPrediction& p, std::size_t types,
                                                    const std::array<double, 4>& bounds) {
    std::vector<std::string> bad;
    if (p.type_probs.size() != types) bad.push_back("type_probs has " + std::to_string(p.type_probs.size()) + " entries");
    double sum = 0.0;
    for (double q : p.type_probs) {
        if (!(q > 0.0) || !std::isfinite(q)) bad.push_back("type probability not strictly positive");
        sum += q;
    }
    if (std::abs(sum - 1.0) > 1e-6) bad.push_back("type_probs sum to " + std::to_string(sum));
    for (std::size_t k = 0; k < 4; ++k) {
        const double v = p.status_raws.values[k];
        if (!(v >= 0.0 && v <= bounds[k])) bad.push_back("status " + std::to_string(k) + " = " + std::to_string(v));
    }
    for (const auto& row : p.effects.cells) {
        for (int c : row) {
            if (c < -1 || c > 1) bad.push_back("effect cell " + std::to_string(c));
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < p.type_probs.size(); ++i) {
        if (p.type_probs[i] > p.type_probs[best]) best = i;
    }
    if (!p.type_probs.empty() && static_cast<std::size_t>(p.argmax_type()) != best) bad.push_back("argmax disagrees");
    return bad;
}

inline std::vector<std::string> backend_contract(const spellforge::Backend& backend, const std::vector<std::string>& prompts) {
    std::vector<std::string> bad;
    for (const auto& prompt : prompts) {
        const auto first = backend.predict(prompt);
        for (auto& v : prediction_contract(first, backend.type_count(), backend.status_bounds())) {
            bad.push_back("'" + prompt + "': " + v);
        }
        if (!(backend.predict(prompt) == first)) bad.push_back("'" + prompt + "': repeated prediction differs");
    }
    if (backend.model_id().empty()) bad.push_back("empty model_id");
    return bad;
}

inline std::vector<std::string> contract_prompts() {
    return {"A trap that holds the enemy to the ground",
            "a fast fireball",
            "huge purple storm",
            "x",
            "Ein Zauber \xc3\xbc" "ber alles",
            "a mighty red missile that hurts anyone it touches and shields allies and drains mana",
            "?!?",
            "12345 67890"};
}


// Returns one canned prediction for every prompt and counts calls.
class FixedBackend final : public spellforge::Backend {
public:
    explicit FixedBackend(spellforge::RawPrediction p) : prediction_(std::move(p)) {}
    spellforge::BackendKind kind() const noexcept override { return spellforge::BackendKind::External; }
    const std::string& model_id() const noexcept override { return id_; }
    std::size_t type_count() const noexcept override { return prediction_.type_probs.size(); }
    std::array<double, spellforge::kStatusCount> status_bounds() const override {
        return spellforge::StatusRanges::defaults().bounds();
    }
    spellforge::RawPrediction predict(std::string_view) const override {
        ++calls;
        return prediction_;
    }

    mutable int calls = 0;

private:
    spellforge::RawPrediction prediction_;
    std::string id_ = "fixed";
};

// The trap prediction: Trap type, half-range statuses, enemy Speed debuff.
inline spellforge::RawPrediction trap_prediction() {
    spellforge::RawPrediction p;
    p.type_probs = {0.05, 0.05, 0.05, 0.8, 0.05};
    p.status_raws.values = {2.5, 0.0, 2.5, 1.4};
    p.effects.at(0, 1) = -1;
    return p;
}


struct GradientCheck {
    std::array<double, 3> max_rel_error{}; // by Head
    std::array<std::size_t, 3> checked{};
};

// Central finite differences (step eps) of batch_loss against batch_gradient
// for every parameter the batch touches. Relative error is
// |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
inline GradientCheck gradient_check(spellforge::HeadWeights<double> w, const std::vector<spellforge::TrainingRow>& rows,
                                    double eps = 1e-4) {
    using namespace spellforge;
    GradientCheck out;
    const auto g = batch_gradient(w, rows);
    // Map each touched flat index back to its head.
    std::vector<Head> head_of(w.params.size(), Head::Type);
    for (std::size_t o = 0; o < w.outputs(); ++o) {
        head_of[w.bias_index(o)] = w.head_of_output(o);
        for (const auto& row : rows) {
            for (const auto& [f, _] : row.features.entries) head_of[w.weight_index(o, f)] = w.head_of_output(o);
        }
    }
    for (std::size_t i = 0; i < g.index.size(); ++i) {
        const std::size_t p = g.index[i];
        const double saved = w.params[p];
        w.params[p] = saved + eps;
        const double up = batch_loss(w, rows);
        w.params[p] = saved - eps;
        const double down = batch_loss(w, rows);
        w.params[p] = saved;
        const double numeric = (up - down) / (2.0 * eps);
        const double analytic = g.value[i];
        const double rel = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-8});
        const auto h = static_cast<std::size_t>(head_of[p]);
        out.max_rel_error[h] = std::max(out.max_rel_error[h], rel);
        ++out.checked[h];
    }
    return out;
}

// Small random weights on the parameters `rows` touch; everything else zero.
inline spellforge::HeadWeights<double> random_weights(std::size_t types, const std::vector<spellforge::TrainingRow>& rows,
                                                      std::uint64_t seed) {
    spellforge::HeadWeights<double> w(spellforge::kFeatureBuckets, types);
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> n(0.0, 0.3);
    for (std::size_t o = 0; o < w.outputs(); ++o) {
        w.params[w.bias_index(o)] = n(gen);
        for (const auto& row : rows) {
            for (const auto& [f, _] : row.features.entries) w.params[w.weight_index(o, f)] = n(gen);
        }
    }
    return w;
}

} // namespace sftest
