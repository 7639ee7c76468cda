#include "spellforge/textmodel.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>

#include "spellforge/error.hpp"
#include "spellforge/rng.hpp"

namespace spellforge {

// ---------------------------------------------------------------------------
// Features
// ---------------------------------------------------------------------------

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<std::string> tokenize(std::string_view prompt) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : prompt) {
        if (std::isalnum(c) != 0 || c >= 0x80) {
            current.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

double FeatureVector::weight(std::uint32_t bucket) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), bucket,
                               [](const auto& e, std::uint32_t b) { return e.first < b; });
    return it != entries.end() && it->first == bucket ? it->second : 0.0;
}

FeatureVector extract_features(std::string_view prompt) {
    if (prompt.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos) throw InputError("prompt is empty");
    // Punctuation-only prompts yield no features; the model answers from its biases.
    const auto tokens = tokenize(prompt);
    std::map<std::uint32_t, double> counts;
    const auto add = [&](std::string_view term) {
        counts[static_cast<std::uint32_t>(fnv1a64(term) % kFeatureBuckets)] += 1.0;
    };
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        add(tokens[i]);
        if (i + 1 < tokens.size()) add(tokens[i] + " " + tokens[i + 1]);
    }
    FeatureVector fv;
    fv.entries.assign(counts.begin(), counts.end());
    return fv;
}

// ---------------------------------------------------------------------------
// Objective
// ---------------------------------------------------------------------------

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// Softmax of z[first, first + n) written to out; returns log-sum-exp.
double softmax(std::span<const double> z, std::span<double> out) {
    const double m = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        out[i] = std::exp(z[i] - m);
        sum += out[i];
    }
    for (double& p : out) p /= sum;
    return m + std::log(sum);
}

constexpr std::size_t kStatusOut = kStatusCount;
constexpr std::size_t kEffectOut = static_cast<std::size_t>(kEffectCells) * kEffectClasses;

} // namespace

TrainingRow make_training_row(const Example& ex, const std::array<double, kStatusCount>& bounds) {
    TrainingRow row;
    row.features = extract_features(ex.prompt);
    row.target.type = ex.type_index;
    for (std::size_t k = 0; k < kStatusCount; ++k) row.target.status01[k] = ex.status_raws.values[k] / bounds[k];
    for (int c = 0; c < kEffectCells; ++c) row.target.cell_class[static_cast<std::size_t>(c)] = ex.effects.cell(c) + 1;
    return row;
}

LossTerms example_loss(const HeadWeights<double>& w, const TrainingRow& row) {
    const auto z = w.logits(row.features);
    const std::span<const double> zs(z);
    LossTerms loss;

    std::vector<double> p(w.types);
    const double lse = softmax(zs.subspan(0, w.types), p);
    loss.type = lse - z[static_cast<std::size_t>(row.target.type)];

    for (std::size_t k = 0; k < kStatusOut; ++k) {
        const double d = sigmoid(z[w.types + k]) - row.target.status01[k];
        loss.status += d * d;
    }

    std::array<double, kEffectClasses> q{};
    for (int c = 0; c < kEffectCells; ++c) {
        const std::size_t base = w.types + kStatusOut + static_cast<std::size_t>(c) * kEffectClasses;
        const double cell_lse = softmax(zs.subspan(base, kEffectClasses), q);
        loss.effect += cell_lse - z[base + static_cast<std::size_t>(row.target.cell_class[static_cast<std::size_t>(c)])];
    }
    loss.effect /= static_cast<double>(kEffectCells);
    return loss;
}

double batch_loss(const HeadWeights<double>& w, std::span<const TrainingRow> batch) {
    if (batch.empty()) return 0.0;
    double total = 0.0;
    for (const auto& row : batch) total += example_loss(w, row).total();
    return total / static_cast<double>(batch.size());
}

std::vector<double> output_gradient(const HeadWeights<double>& w, const TrainingRow& row) {
    const auto z = w.logits(row.features);
    const std::span<const double> zs(z);
    std::vector<double> g(z.size());

    softmax(zs.subspan(0, w.types), std::span(g).subspan(0, w.types));
    g[static_cast<std::size_t>(row.target.type)] -= 1.0;

    for (std::size_t k = 0; k < kStatusOut; ++k) {
        const double s = sigmoid(z[w.types + k]);
        g[w.types + k] = 2.0 * (s - row.target.status01[k]) * s * (1.0 - s);
    }

    for (int c = 0; c < kEffectCells; ++c) {
        const std::size_t base = w.types + kStatusOut + static_cast<std::size_t>(c) * kEffectClasses;
        auto cell = std::span(g).subspan(base, kEffectClasses);
        softmax(zs.subspan(base, kEffectClasses), cell);
        cell[static_cast<std::size_t>(row.target.cell_class[static_cast<std::size_t>(c)])] -= 1.0;
        for (double& v : cell) v /= static_cast<double>(kEffectCells);
    }
    return g;
}

namespace {

// Dense scratch buffer plus the list of touched slots, reused across batches.
class GradientAccumulator {
public:
    explicit GradientAccumulator(std::size_t size) : dense_(size, 0.0), touched_flag_(size, 0) {}

    void add(const HeadWeights<double>& w, std::span<const TrainingRow> batch) {
        const double scale = 1.0 / static_cast<double>(batch.size());
        for (const auto& row : batch) {
            const auto g = output_gradient(w, row);
            for (std::size_t o = 0; o < g.size(); ++o) {
                const double d = g[o] * scale;
                bump(w.bias_index(o), d);
                for (const auto& [f, x] : row.features.entries) bump(w.weight_index(o, f), d * x);
            }
        }
        std::sort(touched_.begin(), touched_.end());
    }

    template <class Fn>
    void drain(Fn&& fn) {
        for (std::size_t i : touched_) {
            fn(i, dense_[i]);
            dense_[i] = 0.0;
            touched_flag_[i] = 0;
        }
        touched_.clear();
    }

private:
    void bump(std::size_t i, double v) {
        if (touched_flag_[i] == 0) {
            touched_flag_[i] = 1;
            touched_.push_back(i);
        }
        dense_[i] += v;
    }

    std::vector<double> dense_;
    std::vector<std::uint8_t> touched_flag_;
    std::vector<std::size_t> touched_;
};

} // namespace

SparseGradient batch_gradient(const HeadWeights<double>& w, std::span<const TrainingRow> batch) {
    SparseGradient out;
    if (batch.empty()) return out;
    GradientAccumulator acc(w.params.size());
    acc.add(w, batch);
    acc.drain([&](std::size_t i, double v) {
        out.index.push_back(i);
        out.value.push_back(v);
    });
    return out;
}

// ---------------------------------------------------------------------------
// Model
// ---------------------------------------------------------------------------

std::array<double, kStatusCount> LinearSpellModel::status_bounds() const {
    std::array<double, kStatusCount> b{};
    for (std::size_t k = 0; k < kStatusCount; ++k) b[k] = static_cast<double>(status_lengths[k]) - 1.0;
    return b;
}

RawPrediction LinearSpellModel::predict(const FeatureVector& x) const {
    const auto z = weights.logits(x);
    const std::span<const double> zs(z);
    const std::size_t n = weights.types;
    RawPrediction pred;
    pred.type_probs.resize(n);
    softmax(zs.subspan(0, n), pred.type_probs);

    const auto bounds = status_bounds();
    for (std::size_t k = 0; k < kStatusCount; ++k) {
        pred.status_raws.values[k] = std::clamp(sigmoid(z[n + k]) * bounds[k], 0.0, bounds[k]);
    }
    for (int c = 0; c < kEffectCells; ++c) {
        const std::size_t base = n + kStatusOut + static_cast<std::size_t>(c) * kEffectClasses;
        // Ties resolve toward "no effect".
        int best = 1;
        for (int k : {0, 2}) {
            if (z[base + static_cast<std::size_t>(k)] > z[base + static_cast<std::size_t>(best)]) best = k;
        }
        pred.effects.cell(c) = best - 1;
    }
    return pred;
}

namespace {

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
    uLong crc = crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed large buffers in chunks.
    constexpr std::size_t kChunk = 1u << 30;
    for (std::size_t off = 0; off < bytes.size(); off += kChunk) {
        const auto len = static_cast<uInt>(std::min(kChunk, bytes.size() - off));
        crc = crc32(crc, bytes.data() + off, len);
    }
    return static_cast<std::uint32_t>(crc);
}

std::string hex32(std::uint32_t v) {
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", v);
    return buf;
}

} // namespace

LinearSpellModel train(std::span<const Example> data, const TrainOptions& options, const SpellTypeRegistry& registry,
                       const StatusRanges& ranges) {
    if (data.empty()) throw InputError("training set is empty");
    if (!options.seed) throw InputError("training requires an explicit seed");
    if (options.epochs <= 0 || options.batch <= 0 || !(options.learning_rate > 0.0)) {
        throw InputError("epochs, batch and learning rate must be positive");
    }
    ranges.check();
    const auto bounds = ranges.bounds();

    std::vector<TrainingRow> rows;
    rows.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto check = validate_example(data[i], registry, ranges);
        if (!check.ok()) throw ValidationError("example " + std::to_string(i) + ": " + check.summary());
        rows.push_back(make_training_row(data[i], bounds));
    }

    HeadWeights<double> w(kFeatureBuckets, registry.size());
    GradientAccumulator acc(w.params.size());
    Rng rng(*options.seed);
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainingInfo info;
    info.seed = *options.seed;
    info.epochs = static_cast<std::uint32_t>(options.epochs);
    info.batch = static_cast<std::uint32_t>(options.batch);
    info.learning_rate = options.learning_rate;
    info.loss_trace.push_back(batch_loss(w, rows));

    std::vector<TrainingRow> batch;
    const auto batch_size = static_cast<std::size_t>(options.batch);
    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        rng.shuffle(std::span(order));
        for (std::size_t start = 0; start < order.size(); start += batch_size) {
            batch.clear();
            for (std::size_t i = start; i < std::min(order.size(), start + batch_size); ++i) batch.push_back(rows[order[i]]);
            acc.add(w, batch);
            bool finite = true;
            acc.drain([&](std::size_t i, double g) {
                w.params[i] -= options.learning_rate * g;
                finite = finite && std::isfinite(w.params[i]);
            });
            if (!finite) {
                throw TrainingError("parameters diverged in epoch " + std::to_string(epoch + 1) +
                                    "; lower the learning rate");
            }
        }
        const double loss = batch_loss(w, rows);
        if (!std::isfinite(loss)) {
            throw TrainingError("loss became non-finite after epoch " + std::to_string(epoch + 1) +
                                "; lower the learning rate");
        }
        info.loss_trace.push_back(loss);
    }

    LinearSpellModel model;
    for (std::size_t k = 0; k < kStatusCount; ++k) {
        model.status_lengths[k] = static_cast<std::uint32_t>(ranges.length(kAllStatuses[k]));
    }
    model.weights = HeadWeights<float>(w.dims, w.types);
    std::transform(w.params.begin(), w.params.end(), model.weights.params.begin(),
                   [](double v) { return static_cast<float>(v); });
    model.training = std::move(info);
    const auto* raw = reinterpret_cast<const std::uint8_t*>(model.weights.params.data());
    model.model_id = "linear-" + hex32(crc32_of({raw, model.weights.params.size() * sizeof(float)}));
    return model;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

Metrics evaluate(const PredictFn& predict, std::span<const Example> test_set) {
    if (test_set.empty()) throw InputError("test set is empty");
    Metrics m;
    m.count = test_set.size();
    std::size_t type_hits = 0;
    std::array<std::size_t, kEffectCells> cell_hits{};
    for (const auto& ex : test_set) {
        const auto pred = predict(ex.prompt);
        type_hits += pred.argmax_type() == ex.type_index;
        for (std::size_t k = 0; k < kStatusCount; ++k) {
            m.status_mae[k] += std::abs(pred.status_raws.values[k] - ex.status_raws.values[k]);
        }
        for (int c = 0; c < kEffectCells; ++c) cell_hits[static_cast<std::size_t>(c)] += pred.effects.cell(c) == ex.effects.cell(c);
    }
    const auto n = static_cast<double>(m.count);
    m.type_accuracy = static_cast<double>(type_hits) / n;
    for (double& mae : m.status_mae) mae /= n;
    for (std::size_t c = 0; c < cell_hits.size(); ++c) {
        m.cell_accuracy[c] = static_cast<double>(cell_hits[c]) / n;
        m.effect_accuracy += m.cell_accuracy[c];
    }
    m.effect_accuracy /= static_cast<double>(kEffectCells);
    return m;
}

Metrics evaluate(const LinearSpellModel& model, std::span<const Example> test_set) {
    return evaluate([&model](std::string_view prompt) { return model.predict(prompt); }, test_set);
}

// ---------------------------------------------------------------------------
// Model file
// ---------------------------------------------------------------------------

namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'S', 'P', 'F', 'M'};

class Writer {
public:
    std::vector<std::uint8_t> bytes;

    template <class U>
    void uint(U v) {
        for (std::size_t i = 0; i < sizeof(U); ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f32(float v) { uint(std::bit_cast<std::uint32_t>(v)); }
    void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }
    void str(const std::string& s) {
        uint(static_cast<std::uint32_t>(s.size()));
        bytes.insert(bytes.end(), s.begin(), s.end());
    }
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> b) : bytes_(b) {}

    template <class U>
    U uint() {
        need(sizeof(U));
        U v = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(static_cast<U>(bytes_[pos_ + i]) << (8 * i));
        pos_ += sizeof(U);
        return v;
    }
    float f32() { return std::bit_cast<float>(uint<std::uint32_t>()); }
    double f64() { return std::bit_cast<double>(uint<std::uint64_t>()); }
    std::string str() {
        const auto n = uint<std::uint32_t>();
        need(n);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
        pos_ += n;
        return s;
    }
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) throw FormatError("model file is truncated");
    }
    std::size_t pos() const { return pos_; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

} // namespace

std::vector<std::uint8_t> encode_model(const LinearSpellModel& model) {
    Writer w;
    w.bytes.assign(kMagic.begin(), kMagic.end());
    w.uint(kModelFormatVersion);
    w.uint(static_cast<std::uint32_t>(model.weights.dims));
    w.uint(static_cast<std::uint32_t>(model.weights.types));
    for (auto len : model.status_lengths) w.uint(len);
    w.str(model.model_id);
    w.uint(model.training.seed);
    w.uint(model.training.epochs);
    w.uint(model.training.batch);
    w.f64(model.training.learning_rate);
    w.uint(static_cast<std::uint32_t>(model.training.loss_trace.size()));
    for (double l : model.training.loss_trace) w.f64(l);
    w.bytes.reserve(w.bytes.size() + model.weights.params.size() * 4 + 4);
    for (float p : model.weights.params) w.f32(p);
    w.uint(crc32_of(w.bytes));
    return std::move(w.bytes);
}

LinearSpellModel decode_model(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kMagic.size() || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
        throw FormatError("not a spellforge model (bad magic bytes)");
    }
    Reader r(bytes.subspan(kMagic.size()));
    const auto version = r.uint<std::uint16_t>();
    if (version != kModelFormatVersion) {
        throw FormatError("unsupported model format version " + std::to_string(version) + " (expected " +
                          std::to_string(kModelFormatVersion) + ")");
    }
    LinearSpellModel m;
    const auto dims = r.uint<std::uint32_t>();
    const auto types = r.uint<std::uint32_t>();
    if (dims != kFeatureBuckets) throw FormatError("model feature dimension " + std::to_string(dims) + " unsupported");
    if (types == 0 || types > 4096) throw FormatError("model has an implausible type count");
    for (auto& len : m.status_lengths) {
        len = r.uint<std::uint32_t>();
        if (len < 2) throw FormatError("model status range length below 2");
    }
    m.model_id = r.str();
    m.training.seed = r.uint<std::uint64_t>();
    m.training.epochs = r.uint<std::uint32_t>();
    m.training.batch = r.uint<std::uint32_t>();
    m.training.learning_rate = r.f64();
    const auto trace = r.uint<std::uint32_t>();
    r.need(static_cast<std::size_t>(trace) * 8);
    m.training.loss_trace.resize(trace);
    for (double& l : m.training.loss_trace) l = r.f64();

    const std::size_t count = HeadWeights<float>::total_size(dims, types);
    r.need(count * 4 + 4);
    const std::size_t body_end = kMagic.size() + r.pos() + count * 4;
    if (bytes.size() != body_end + 4) throw FormatError("model file has unexpected length");
    const auto stored_crc = Reader(bytes.subspan(body_end)).uint<std::uint32_t>();
    if (stored_crc != crc32_of(bytes.subspan(0, body_end))) throw FormatError("model file checksum mismatch");

    m.weights = HeadWeights<float>(dims, types);
    for (float& p : m.weights.params) p = r.f32();
    return m;
}

void save_model(const LinearSpellModel& model, const std::filesystem::path& path) {
    const auto bytes = encode_model(model);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing model to '" + path.string() + "'");
}

LinearSpellModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file '" + path.string() + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_model(bytes);
}

} // namespace spellforge
