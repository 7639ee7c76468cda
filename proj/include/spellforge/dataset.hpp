#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spellforge/core.hpp"

namespace spellforge {

// ---------------------------------------------------------------------------
// Template grammar
// ---------------------------------------------------------------------------

// Closed raw-value interval a slot choice implies for one status.
struct StatusInterval {
    double lo = 0.0;
    double hi = 0.0;

    bool operator==(const StatusInterval&) const = default;
};

struct CellLabel {
    int row = 0;
    int col = 0;
    int value = 0;

    bool operator==(const CellLabel&) const = default;
};

// Text plus the labels choosing it implies.
struct LabelImpact {
    std::map<StatusKind, StatusInterval> status;
    std::vector<CellLabel> effects;

    bool operator==(const LabelImpact&) const = default;
};

struct SlotFiller {
    std::string text;
    LabelImpact impact;

    bool operator==(const SlotFiller&) const = default;
};

struct Template {
    // Literal text with {slot} placeholders; a slot may repeat, each
    // occurrence drawn independently.
    std::string pattern;
    LabelImpact impact;

    bool operator==(const Template&) const = default;
};

struct TypeTemplates {
    int type_index = 0;
    std::vector<Template> templates;
    // Type-local slots shadow the global ones (e.g. the type's nouns).
    std::map<std::string, std::vector<SlotFiller>> slots;

    bool operator==(const TypeTemplates&) const = default;
};

struct TemplateGrammar {
    std::array<StatusInterval, kStatusCount> defaults{};
    std::map<std::string, std::vector<SlotFiller>> slots;
    std::vector<Template> common_templates; // offered to every type
    std::vector<TypeTemplates> types;

    // The grammar shipped in config/grammar.json.
    static const TemplateGrammar& builtin();

    const TypeTemplates* for_type(int type_index) const;

    bool operator==(const TemplateGrammar&) const = default;
};

TemplateGrammar grammar_from_json(const Json& j);
TemplateGrammar load_grammar(const std::filesystem::path& path);

// Throws ValidationError if a registry type has no templates, a slot is
// missing or empty, or an interval/cell falls outside the label domain.
void check_grammar(const TemplateGrammar& grammar, const SpellTypeRegistry& registry, const StatusRanges& ranges);

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

struct GenerateOptions {
    // Relative type weights indexed by type; empty means uniform.
    std::vector<double> type_weights;
    // Redraws allowed per example when a duplicate prompt comes up.
    int max_retries = 64;
};

// Deterministic under `seed`. Types are drawn first (uniform by default),
// then template and slot fillers; exact-duplicate prompts are redrawn within
// the same type. Throws ValidationError on a bad grammar and Error with code
// "retry_budget_exhausted" when no fresh prompt can be found.
std::vector<Example> generate(std::size_t count, std::uint64_t seed, const TemplateGrammar& grammar,
                              const SpellTypeRegistry& registry, const StatusRanges& ranges,
                              const GenerateOptions& options = {});

// ---------------------------------------------------------------------------
// JSONL storage
// ---------------------------------------------------------------------------

OrderedJson example_to_json(const Example& ex);
std::string example_to_line(const Example& ex);

void write_jsonl(std::span<const Example> examples, std::ostream& out);
void write_jsonl(std::span<const Example> examples, const std::filesystem::path& path);

// Blank lines are skipped. Malformed lines raise FormatError and label
// violations raise ValidationError; both messages start with "line N:".
std::vector<Example> read_jsonl(std::istream& in, const SpellTypeRegistry& registry, const StatusRanges& ranges);
std::vector<Example> read_jsonl(const std::filesystem::path& path, const SpellTypeRegistry& registry,
                                const StatusRanges& ranges);

// ---------------------------------------------------------------------------
// Split and statistics
// ---------------------------------------------------------------------------

struct DatasetSplit {
    std::vector<Example> train;
    std::vector<Example> test;
};

// Seeded, stratified by type. The test set holds round(fraction * n) examples,
// apportioned across types by largest remainder so that each type's share is
// within one example of fraction * its count.
DatasetSplit split(std::span<const Example> examples, double test_fraction, std::uint64_t seed);

inline constexpr std::size_t kHistogramBins = 10;

struct DistributionReport {
    std::size_t total = 0;
    std::vector<std::size_t> type_counts;
    std::array<std::array<std::size_t, kHistogramBins>, kStatusCount> status_histograms{};
    std::array<std::size_t, kEffectCells> cell_nonzero{};
    // Set when the set is empty or any type holds under 10% of it.
    bool unbalanced = true;

    double cell_frequency(int cell) const {
        return total == 0 ? 0.0 : static_cast<double>(cell_nonzero[static_cast<std::size_t>(cell)]) / static_cast<double>(total);
    }
};

DistributionReport stats(std::span<const Example> examples, std::size_t type_count, const StatusRanges& ranges);

OrderedJson report_to_json(const DistributionReport& report, const SpellTypeRegistry& registry);
// Human-readable report with a per-type bar chart.
std::string render_report(const DistributionReport& report, const SpellTypeRegistry& registry);

} // namespace spellforge
