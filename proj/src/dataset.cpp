#include "spellforge/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include "spellforge/error.hpp"
#include "spellforge/rng.hpp"

namespace spellforge {

namespace detail {
extern const char* const kBuiltinGrammarJson;
}

// ---------------------------------------------------------------------------
// Grammar parsing
// ---------------------------------------------------------------------------

namespace {

StatusKind status_from_key(const std::string& key) {
    for (auto k : kAllStatuses) {
        if (to_string(k) == key) return k;
    }
    throw FormatError("grammar: unknown status '" + key + "'");
}

StatusInterval interval_from_json(const Json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw FormatError("grammar: " + where + " must be [lo, hi]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

LabelImpact impact_from_json(const Json& j, const std::string& where) {
    LabelImpact impact;
    if (j.contains("status")) {
        for (const auto& [key, value] : j["status"].items()) {
            impact.status[status_from_key(key)] = interval_from_json(value, where + ".status." + key);
        }
    }
    if (j.contains("effects")) {
        for (const auto& cell : j["effects"]) {
            if (!cell.is_array() || cell.size() != 3) throw FormatError("grammar: " + where + " effects need [row, col, value]");
            impact.effects.push_back({cell[0].get<int>(), cell[1].get<int>(), cell[2].get<int>()});
        }
    }
    return impact;
}

std::vector<SlotFiller> fillers_from_json(const Json& j, const std::string& slot) {
    if (!j.is_array()) throw FormatError("grammar: slot '" + slot + "' must be an array");
    std::vector<SlotFiller> out;
    for (const auto& f : j) {
        if (!f.is_object() || !f.contains("text") || !f["text"].is_string()) {
            throw FormatError("grammar: slot '" + slot + "' filler needs a text field");
        }
        out.push_back({f["text"].get<std::string>(), impact_from_json(f, "slot " + slot)});
    }
    return out;
}

std::vector<Template> templates_from_json(const Json& j, const std::string& where) {
    std::vector<Template> out;
    if (j.is_null()) return out;
    if (!j.is_array()) throw FormatError("grammar: " + where + " must be an array");
    for (const auto& t : j) {
        if (!t.is_object() || !t.contains("pattern") || !t["pattern"].is_string()) {
            throw FormatError("grammar: " + where + " entries need a pattern");
        }
        out.push_back({t["pattern"].get<std::string>(), impact_from_json(t, where)});
    }
    return out;
}

// Slot names referenced by a pattern, in order of appearance.
std::vector<std::string> slots_in(const std::string& pattern) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while ((pos = pattern.find('{', pos)) != std::string::npos) {
        const auto end = pattern.find('}', pos);
        if (end == std::string::npos) throw ValidationError("grammar: unterminated slot in '" + pattern + "'");
        out.push_back(pattern.substr(pos + 1, end - pos - 1));
        pos = end + 1;
    }
    return out;
}

} // namespace

TemplateGrammar grammar_from_json(const Json& j) {
    try {
        TemplateGrammar g;
        if (!j.is_object()) throw FormatError("grammar: top level must be an object");
        if (j.value("version", 1) != 1) throw FormatError("grammar: unsupported version");
        if (j.contains("defaults")) {
            for (const auto& [key, value] : j["defaults"].items()) {
                g.defaults[static_cast<std::size_t>(status_from_key(key))] = interval_from_json(value, "defaults." + key);
            }
        }
        if (j.contains("slots")) {
            for (const auto& [name, fillers] : j["slots"].items()) g.slots[name] = fillers_from_json(fillers, name);
        }
        g.common_templates = templates_from_json(j.value("common_templates", Json()), "common_templates");
        if (!j.contains("types") || !j["types"].is_array()) throw FormatError("grammar: missing types array");
        for (const auto& t : j["types"]) {
            TypeTemplates tt;
            tt.type_index = t.at("type").get<int>();
            tt.templates = templates_from_json(t.value("templates", Json()), "type " + std::to_string(tt.type_index));
            if (t.contains("slots")) {
                for (const auto& [name, fillers] : t["slots"].items()) tt.slots[name] = fillers_from_json(fillers, name);
            }
            g.types.push_back(std::move(tt));
        }
        return g;
    } catch (const Json::exception& e) {
        throw FormatError(std::string("grammar: ") + e.what());
    }
}

TemplateGrammar load_grammar(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open grammar file '" + path.string() + "'");
    try {
        return grammar_from_json(Json::parse(in));
    } catch (const Json::parse_error& e) {
        throw FormatError("grammar file '" + path.string() + "' is not valid JSON: " + e.what());
    }
}

const TemplateGrammar& TemplateGrammar::builtin() {
    static const TemplateGrammar g = grammar_from_json(Json::parse(detail::kBuiltinGrammarJson));
    return g;
}

const TypeTemplates* TemplateGrammar::for_type(int type_index) const {
    for (const auto& t : types) {
        if (t.type_index == type_index) return &t;
    }
    return nullptr;
}

namespace {

const std::vector<SlotFiller>* find_slot(const TemplateGrammar& g, const TypeTemplates& t, const std::string& name) {
    if (auto it = t.slots.find(name); it != t.slots.end()) return &it->second;
    if (auto it = g.slots.find(name); it != g.slots.end()) return &it->second;
    return nullptr;
}

void check_impact(const LabelImpact& impact, const StatusRanges& ranges, const std::string& where) {
    for (const auto& [k, iv] : impact.status) {
        if (!(iv.lo <= iv.hi) || iv.lo < 0.0 || iv.hi > ranges.bound(k)) {
            throw ValidationError("grammar: " + where + " has an invalid " + std::string(to_string(k)) + " interval");
        }
    }
    for (const auto& c : impact.effects) {
        if (c.row < 0 || c.row >= kTriggerRows || c.col < 0 || c.col >= kStatColumns || c.value < -1 || c.value > 1) {
            throw ValidationError("grammar: " + where + " has an invalid effect cell");
        }
    }
}

} // namespace

void check_grammar(const TemplateGrammar& grammar, const SpellTypeRegistry& registry, const StatusRanges& ranges) {
    for (auto k : kAllStatuses) {
        const auto& iv = grammar.defaults[static_cast<std::size_t>(k)];
        if (!(iv.lo <= iv.hi) || iv.lo < 0.0 || iv.hi > ranges.bound(k)) {
            throw ValidationError("grammar: default " + std::string(to_string(k)) + " interval is invalid");
        }
    }
    for (const auto& e : registry.entries()) {
        const auto* t = grammar.for_type(e.index);
        if (t == nullptr) throw ValidationError("grammar has no entry for spell type " + std::to_string(e.index) + " (" + e.name + ")");
        if (t->templates.empty() && grammar.common_templates.empty()) {
            throw ValidationError("grammar has no templates for spell type " + std::to_string(e.index));
        }
        const auto check_template = [&](const Template& tpl) {
            check_impact(tpl.impact, ranges, "template '" + tpl.pattern + "'");
            for (const auto& slot : slots_in(tpl.pattern)) {
                const auto* fillers = find_slot(grammar, *t, slot);
                if (fillers == nullptr || fillers->empty()) {
                    throw ValidationError("grammar slot '" + slot + "' has no fillers for type " + std::to_string(e.index));
                }
                for (const auto& f : *fillers) check_impact(f.impact, ranges, "filler '" + f.text + "'");
            }
        };
        for (const auto& tpl : grammar.common_templates) check_template(tpl);
        for (const auto& tpl : t->templates) check_template(tpl);
    }
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

namespace {

struct Draft {
    std::string prompt;
    std::array<StatusInterval, kStatusCount> intervals;
    EffectsMatrix effects;
};

void apply(const LabelImpact& impact, Draft& d) {
    for (const auto& [k, iv] : impact.status) d.intervals[static_cast<std::size_t>(k)] = iv;
    for (const auto& c : impact.effects) d.effects.at(c.row, c.col) = c.value;
}

std::string tidy(const std::string& raw) {
    std::string out;
    bool space = false;
    for (char c : raw) {
        if (c == ' ') {
            space = !out.empty();
            continue;
        }
        if (space) out.push_back(' ');
        space = false;
        out.push_back(c);
    }
    if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 'a' + 'A');
    return out;
}

Draft draw(const TemplateGrammar& g, const TypeTemplates& t, Rng& rng) {
    const std::size_t n_common = g.common_templates.size();
    const auto pick = static_cast<std::size_t>(rng.uniform_index(n_common + t.templates.size()));
    const Template& tpl = pick < n_common ? g.common_templates[pick] : t.templates[pick - n_common];

    Draft d;
    d.intervals = g.defaults;
    apply(tpl.impact, d);
    std::string text;
    std::size_t pos = 0;
    while (true) {
        const auto open = tpl.pattern.find('{', pos);
        if (open == std::string::npos) {
            text += tpl.pattern.substr(pos);
            break;
        }
        const auto close = tpl.pattern.find('}', open);
        text += tpl.pattern.substr(pos, open - pos);
        const auto* fillers = find_slot(g, t, tpl.pattern.substr(open + 1, close - open - 1));
        const auto& f = (*fillers)[static_cast<std::size_t>(rng.uniform_index(fillers->size()))];
        text += f.text;
        apply(f.impact, d);
        pos = close + 1;
    }
    d.prompt = tidy(text);
    return d;
}

} // namespace

std::vector<Example> generate(std::size_t count, std::uint64_t seed, const TemplateGrammar& grammar,
                              const SpellTypeRegistry& registry, const StatusRanges& ranges,
                              const GenerateOptions& options) {
    if (count == 0) throw InputError("count must be positive");
    check_grammar(grammar, registry, ranges);
    const std::size_t n_types = registry.size();
    std::vector<double> cumulative;
    if (!options.type_weights.empty()) {
        if (options.type_weights.size() != n_types) throw InputError("type weights must have one entry per spell type");
        double acc = 0.0;
        for (double w : options.type_weights) {
            if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("type weights must be non-negative");
            acc += w;
            cumulative.push_back(acc);
        }
        if (!(acc > 0.0)) throw InputError("type weights sum to zero");
    }

    Rng rng(seed);
    std::unordered_set<std::string> seen;
    std::vector<Example> out;
    out.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        int type = 0;
        if (cumulative.empty()) {
            type = static_cast<int>(rng.uniform_index(n_types));
        } else {
            const double u = rng.uniform01() * cumulative.back();
            type = static_cast<int>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
            type = std::min(type, static_cast<int>(n_types) - 1);
        }
        const auto& tt = *grammar.for_type(type);

        std::optional<Draft> accepted;
        for (int attempt = 0; attempt <= options.max_retries && !accepted; ++attempt) {
            auto d = draw(grammar, tt, rng);
            if (seen.insert(d.prompt).second) accepted = std::move(d);
        }
        if (!accepted) {
            throw Error("retry_budget_exhausted", "could not draw a fresh prompt for type " + std::to_string(type) +
                                                      " after " + std::to_string(options.max_retries) + " retries");
        }
        Example ex;
        ex.prompt = std::move(accepted->prompt);
        ex.type_index = type;
        ex.effects = accepted->effects;
        for (auto k : kAllStatuses) {
            const auto& iv = accepted->intervals[static_cast<std::size_t>(k)];
            ex.status_raws[k] = std::clamp(rng.uniform(iv.lo, iv.hi), 0.0, ranges.bound(k));
        }
        out.push_back(std::move(ex));
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSONL
// ---------------------------------------------------------------------------

OrderedJson example_to_json(const Example& ex) {
    OrderedJson j;
    j["prompt"] = ex.prompt;
    j["type"] = ex.type_index;
    j["statuses"] = ex.status_raws.values;
    j["effects"] = matrix_to_json(ex.effects);
    return j;
}

std::string example_to_line(const Example& ex) { return example_to_json(ex).dump(); }

void write_jsonl(std::span<const Example> examples, std::ostream& out) {
    for (const auto& ex : examples) out << example_to_line(ex) << '\n';
}

void write_jsonl(std::span<const Example> examples, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    write_jsonl(examples, out);
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::vector<Example> read_jsonl(std::istream& in, const SpellTypeRegistry& registry, const StatusRanges& ranges) {
    std::vector<Example> out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = "line " + std::to_string(number) + ": ";
        Example ex;
        try {
            const auto j = Json::parse(line);
            if (!j.is_object()) throw FormatError("expected a JSON object");
            ex.prompt = j.at("prompt").get<std::string>();
            const auto& type = j.at("type");
            if (!type.is_number_integer()) throw FormatError("type must be an integer");
            ex.type_index = type.get<int>();
            const auto& st = j.at("statuses");
            if (!st.is_array() || st.size() != kStatusCount) throw FormatError("statuses must hold 4 numbers");
            for (std::size_t k = 0; k < kStatusCount; ++k) ex.status_raws.values[k] = st[k].get<double>();
            ex.effects = matrix_from_json(j.at("effects"));
        } catch (const Json::exception& e) {
            throw FormatError(where + e.what());
        } catch (const FormatError& e) {
            throw FormatError(where + e.what());
        }
        const auto check = validate_example(ex, registry, ranges);
        if (!check.ok()) throw ValidationError(where + check.summary());
        out.push_back(std::move(ex));
    }
    return out;
}

std::vector<Example> read_jsonl(const std::filesystem::path& path, const SpellTypeRegistry& registry,
                                const StatusRanges& ranges) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset '" + path.string() + "'");
    return read_jsonl(in, registry, ranges);
}

// ---------------------------------------------------------------------------
// Split / stats
// ---------------------------------------------------------------------------

DatasetSplit split(std::span<const Example> examples, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw InputError("test fraction must lie in (0, 1)");

    std::map<int, std::size_t> per_type;
    for (const auto& ex : examples) ++per_type[ex.type_index];

    // Largest-remainder apportionment of the test quota.
    const auto quota_total = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(examples.size())));
    std::map<int, std::size_t> quota;
    std::vector<std::pair<double, int>> remainders;
    std::size_t assigned = 0;
    for (const auto& [type, n] : per_type) {
        const double exact = test_fraction * static_cast<double>(n);
        quota[type] = static_cast<std::size_t>(std::floor(exact));
        assigned += quota[type];
        remainders.emplace_back(exact - std::floor(exact), type);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < quota_total && i < remainders.size(); ++i, ++assigned) {
        ++quota[remainders[i].second];
    }

    std::vector<std::size_t> order(examples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(std::span(order));

    DatasetSplit out;
    for (std::size_t i : order) {
        auto& q = quota[examples[i].type_index];
        if (q > 0) {
            --q;
            out.test.push_back(examples[i]);
        } else {
            out.train.push_back(examples[i]);
        }
    }
    return out;
}

DistributionReport stats(std::span<const Example> examples, std::size_t type_count, const StatusRanges& ranges) {
    DistributionReport r;
    r.total = examples.size();
    r.type_counts.assign(type_count, 0);
    for (const auto& ex : examples) {
        if (ex.type_index >= 0 && static_cast<std::size_t>(ex.type_index) < type_count) {
            ++r.type_counts[static_cast<std::size_t>(ex.type_index)];
        }
        for (auto k : kAllStatuses) {
            const double bound = ranges.bound(k);
            const double t = std::clamp(ex.status_raws[k] / bound, 0.0, 1.0);
            const auto bin = std::min(kHistogramBins - 1, static_cast<std::size_t>(t * static_cast<double>(kHistogramBins)));
            ++r.status_histograms[static_cast<std::size_t>(k)][bin];
        }
        for (int c = 0; c < kEffectCells; ++c) r.cell_nonzero[static_cast<std::size_t>(c)] += ex.effects.cell(c) != 0;
    }
    r.unbalanced = r.total == 0 || std::any_of(r.type_counts.begin(), r.type_counts.end(), [&](std::size_t n) {
                       return static_cast<double>(n) < 0.1 * static_cast<double>(r.total);
                   });
    return r;
}

OrderedJson report_to_json(const DistributionReport& report, const SpellTypeRegistry& registry) {
    OrderedJson j;
    j["total"] = report.total;
    OrderedJson types = OrderedJson::array();
    for (std::size_t i = 0; i < report.type_counts.size(); ++i) {
        OrderedJson t;
        t["type"] = i;
        t["name"] = registry.contains(static_cast<int>(i)) ? registry.at(static_cast<int>(i)).name : "";
        t["count"] = report.type_counts[i];
        types.push_back(std::move(t));
    }
    j["types"] = std::move(types);
    OrderedJson hist;
    for (auto k : kAllStatuses) hist[std::string(to_string(k))] = report.status_histograms[static_cast<std::size_t>(k)];
    j["status_histograms"] = std::move(hist);
    OrderedJson cells = OrderedJson::array();
    for (int r = 0; r < kTriggerRows; ++r) {
        OrderedJson row = OrderedJson::array();
        for (int c = 0; c < kStatColumns; ++c) row.push_back(report.cell_nonzero[static_cast<std::size_t>(r * kStatColumns + c)]);
        cells.push_back(std::move(row));
    }
    j["cell_nonzero"] = std::move(cells);
    j["unbalanced"] = report.unbalanced;
    return j;
}

std::string render_report(const DistributionReport& report, const SpellTypeRegistry& registry) {
    std::ostringstream os;
    os << "examples: " << report.total << (report.unbalanced ? "  [UNBALANCED]" : "") << "\n\nby type\n";
    const std::size_t peak = report.type_counts.empty() ? 0 : *std::max_element(report.type_counts.begin(), report.type_counts.end());
    for (std::size_t i = 0; i < report.type_counts.size(); ++i) {
        const std::string name = registry.contains(static_cast<int>(i)) ? registry.at(static_cast<int>(i)).name : "?";
        const std::size_t n = report.type_counts[i];
        const std::size_t bar = peak == 0 ? 0 : n * 40 / peak;
        os << "  " << i << " " << name << std::string(name.size() < 12 ? 12 - name.size() : 1, ' ') << n << "\t"
           << std::string(bar, '#') << '\n';
    }
    os << "\nstatus histograms (10 bins over the raw range)\n";
    for (auto k : kAllStatuses) {
        os << "  " << to_string(k) << "\t";
        for (auto v : report.status_histograms[static_cast<std::size_t>(k)]) os << v << ' ';
        os << '\n';
    }
    os << "\nnonzero effect cells (rows T0..T3, cols Health Speed Defense Mana)\n";
    for (int r = 0; r < kTriggerRows; ++r) {
        os << "  T" << r << "\t";
        for (int c = 0; c < kStatColumns; ++c) os << report.cell_nonzero[static_cast<std::size_t>(r * kStatColumns + c)] << '\t';
        os << '\n';
    }
    return os.str();
}

} // namespace spellforge
