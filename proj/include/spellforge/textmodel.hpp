#pragma once

// Bundled text model: hashed n-gram features feeding three linear heads
// (spell type softmax, bounded status regressors, 3-class effect cells),
// trained with seeded mini-batch SGD.

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spellforge/core.hpp"

namespace spellforge {

inline constexpr std::uint32_t kFeatureBuckets = 32768;
inline constexpr int kEffectClasses = 3; // -1, 0, +1

// ---------------------------------------------------------------------------
// Features
// ---------------------------------------------------------------------------

std::uint64_t fnv1a64(std::string_view bytes);

// Lowercased ASCII alphanumeric runs; bytes >= 0x80 count as word characters
// so UTF-8 words stay whole.
std::vector<std::string> tokenize(std::string_view prompt);

struct FeatureVector {
    // (bucket, weight), strictly increasing bucket, no zero weights.
    std::vector<std::pair<std::uint32_t, double>> entries;

    std::size_t nonzero() const noexcept { return entries.size(); }
    double weight(std::uint32_t bucket) const;

    bool operator==(const FeatureVector&) const = default;
};

// Unigrams plus adjacent bigrams ("a b"), bucketed by FNV-1a 64 mod D and
// weighted by term count. Throws InputError on an empty prompt.
FeatureVector extract_features(std::string_view prompt);

// ---------------------------------------------------------------------------
// Weights
// ---------------------------------------------------------------------------

enum class Head { Type, Status, Effect };

// All parameters in one flat buffer, laid out as
//   type weights   [types x D], type biases   [types]
//   status weights [4 x D],     status biases [4]
//   effect weights [48 x D],    effect biases [48]
// where effect output (cell c, class k) is row c * 3 + k.
template <class T>
struct HeadWeights {
    std::size_t dims = kFeatureBuckets;
    std::size_t types = 0;
    std::vector<T> params;

    HeadWeights() = default;
    HeadWeights(std::size_t dims_, std::size_t types_)
        : dims(dims_), types(types_), params(total_size(dims_, types_), T{}) {}

    static constexpr std::size_t kStatusOutputs = kStatusCount;
    static constexpr std::size_t kEffectOutputs = kEffectCells * kEffectClasses;

    static std::size_t total_size(std::size_t d, std::size_t n) {
        return (n + kStatusOutputs + kEffectOutputs) * (d + 1);
    }

    std::size_t outputs() const { return types + kStatusOutputs + kEffectOutputs; }

    // Global output index: types first, then statuses, then effect classes.
    std::size_t weight_index(std::size_t output, std::size_t feature) const {
        if (output < types) return output * dims + feature;
        output -= types;
        std::size_t base = types * (dims + 1);
        if (output < kStatusOutputs) return base + output * dims + feature;
        output -= kStatusOutputs;
        base += kStatusOutputs * (dims + 1);
        return base + output * dims + feature;
    }

    std::size_t bias_index(std::size_t output) const {
        if (output < types) return types * dims + output;
        output -= types;
        std::size_t base = types * (dims + 1);
        if (output < kStatusOutputs) return base + kStatusOutputs * dims + output;
        output -= kStatusOutputs;
        base += kStatusOutputs * (dims + 1);
        return base + kEffectOutputs * dims + output;
    }

    Head head_of_output(std::size_t output) const {
        if (output < types) return Head::Type;
        if (output < types + kStatusOutputs) return Head::Status;
        return Head::Effect;
    }

    // Logit of every output for one feature vector.
    std::vector<double> logits(const FeatureVector& x) const {
        std::vector<double> z(outputs());
        for (std::size_t o = 0; o < z.size(); ++o) {
            double acc = static_cast<double>(params[bias_index(o)]);
            for (const auto& [f, w] : x.entries) acc += static_cast<double>(params[weight_index(o, f)]) * w;
            z[o] = acc;
        }
        return z;
    }

    bool operator==(const HeadWeights&) const = default;
};

// ---------------------------------------------------------------------------
// Training objective
// ---------------------------------------------------------------------------

// Example labels in the form the heads are trained on.
struct TrainingTarget {
    int type = 0;
    std::array<double, kStatusCount> status01{}; // raw / (L_k - 1)
    std::array<int, kEffectCells> cell_class{};  // cell value + 1
};

struct TrainingRow {
    FeatureVector features;
    TrainingTarget target;
};

TrainingRow make_training_row(const Example& ex, const std::array<double, kStatusCount>& bounds);

struct LossTerms {
    double type = 0.0;   // cross-entropy
    double status = 0.0; // squared error summed over the 4 normalized statuses
    double effect = 0.0; // mean cross-entropy over the 16 cells
    double total() const { return type + status + effect; }
};

LossTerms example_loss(const HeadWeights<double>& w, const TrainingRow& row);

// Mean of example_loss().total() over the batch.
double batch_loss(const HeadWeights<double>& w, std::span<const TrainingRow> batch);

// dLoss/dlogit for every output of one example.
std::vector<double> output_gradient(const HeadWeights<double>& w, const TrainingRow& row);

// Gradient of batch_loss with respect to every parameter it touches, sorted by
// flat parameter index.
struct SparseGradient {
    std::vector<std::size_t> index;
    std::vector<double> value;
};

SparseGradient batch_gradient(const HeadWeights<double>& w, std::span<const TrainingRow> batch);

// ---------------------------------------------------------------------------
// Model
// ---------------------------------------------------------------------------

struct TrainingInfo {
    std::uint64_t seed = 0;
    std::uint32_t epochs = 0;
    std::uint32_t batch = 0;
    double learning_rate = 0.0;
    // Full training-set loss before the first epoch, then after each epoch.
    std::vector<double> loss_trace;

    double initial_loss() const { return loss_trace.empty() ? 0.0 : loss_trace.front(); }
    double final_loss() const { return loss_trace.empty() ? 0.0 : loss_trace.back(); }

    bool operator==(const TrainingInfo&) const = default;
};

struct LinearSpellModel {
    std::string model_id;
    std::array<std::uint32_t, kStatusCount> status_lengths{}; // L_k
    HeadWeights<float> weights;
    TrainingInfo training;

    std::size_t type_count() const { return weights.types; }
    std::array<double, kStatusCount> status_bounds() const;

    RawPrediction predict(const FeatureVector& x) const;
    RawPrediction predict(std::string_view prompt) const { return predict(extract_features(prompt)); }

    bool operator==(const LinearSpellModel&) const = default;
};

struct TrainOptions {
    int epochs = 50;
    int batch = 32;
    double learning_rate = 0.1;
    // Must be set; there is no clock-derived default.
    std::optional<std::uint64_t> seed;
};

// Mini-batch SGD over the combined loss. Shuffling is driven only by the seed
// so identical inputs give identical models. Throws InputError on empty data or
// missing seed, ValidationError on bad labels and TrainingError on divergence.
LinearSpellModel train(std::span<const Example> data, const TrainOptions& options, const SpellTypeRegistry& registry,
                       const StatusRanges& ranges);

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct Metrics {
    std::size_t count = 0;
    double type_accuracy = 0.0;
    std::array<double, kStatusCount> status_mae{}; // raw units
    std::array<double, kEffectCells> cell_accuracy{};
    double effect_accuracy = 0.0; // macro average over cells
};

using PredictFn = std::function<RawPrediction(std::string_view prompt)>;

Metrics evaluate(const PredictFn& predict, std::span<const Example> test_set);
Metrics evaluate(const LinearSpellModel& model, std::span<const Example> test_set);

// ---------------------------------------------------------------------------
// Model file
// ---------------------------------------------------------------------------

inline constexpr std::uint16_t kModelFormatVersion = 1;

std::vector<std::uint8_t> encode_model(const LinearSpellModel& model);
// Throws FormatError on wrong magic, version mismatch, truncation or checksum failure.
LinearSpellModel decode_model(std::span<const std::uint8_t> bytes);

void save_model(const LinearSpellModel& model, const std::filesystem::path& path);
LinearSpellModel load_model(const std::filesystem::path& path);

} // namespace spellforge
