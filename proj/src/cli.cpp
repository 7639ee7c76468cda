#include "spellforge/cli.hpp"

#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "spellforge/backend.hpp"
#include "spellforge/config.hpp"
#include "spellforge/dataset.hpp"
#include "spellforge/error.hpp"
#include "spellforge/forge.hpp"
#include "spellforge/service.hpp"
#include "spellforge/sim.hpp"
#include "spellforge/textmodel.hpp"

namespace spellforge {

namespace {

std::vector<std::string> split_command(const std::string& command) {
    std::istringstream in(command);
    std::vector<std::string> argv;
    for (std::string word; in >> word;) argv.push_back(word);
    if (argv.empty()) throw InputError("backend command is empty");
    return argv;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string hex_color(const Rgb& c) {
    std::ostringstream ss;
    ss << '#' << std::hex << std::setfill('0') << std::setw(2) << c.r << std::setw(2) << c.g << std::setw(2) << c.b;
    return ss.str();
}

void print_spell(std::ostream& out, const ForgedSpell& s, const SpellTypeRegistry& registry) {
    const auto& spec = s.spec;
    out << "type     " << registry.at(spec.type_index).name << " (" << spec.type_index << ")\n"
        << "power    " << spec.statuses.power << "\n"
        << "speed    " << spec.statuses.speed << "\n"
        << "area     " << spec.statuses.area << "\n"
        << "color    " << hex_color(spec.statuses.color) << "\n"
        << "cost     " << spec.cost << " (base " << s.cost.base << ", statuses " << s.cost.statuses << ", effects "
        << s.cost.effects << ")\n";
    out << "effects";
    if (s.bindings.empty()) out << "  none";
    out << "\n";
    for (const auto& b : s.bindings) {
        out << "  " << to_string(b.trigger) << ":";
        for (const auto& e : b.effects) {
            out << " " << (e.sign > 0 ? "+" : "-") << to_string(e.stat) << " " << e.magnitude_per_second << "/s for "
                << e.duration << "s";
        }
        out << "\n";
    }
    out << "model    " << s.model_id << "\n"
        << "time     " << s.timing.total_ms << " ms\n";
}

void print_metrics(std::ostream& out, const Metrics& m) {
    out << "examples         " << m.count << "\n"
        << "type accuracy    " << m.type_accuracy << "\n"
        << "effect accuracy  " << m.effect_accuracy << "\n";
    for (auto k : kAllStatuses) {
        out << "mae " << std::left << std::setw(13) << to_string(k) << m.status_mae[static_cast<std::size_t>(k)] << "\n";
    }
}

OrderedJson metrics_to_json(const Metrics& m) {
    OrderedJson j;
    j["count"] = m.count;
    j["type_accuracy"] = m.type_accuracy;
    j["effect_accuracy"] = m.effect_accuracy;
    OrderedJson mae;
    for (auto k : kAllStatuses) mae[std::string(to_string(k))] = m.status_mae[static_cast<std::size_t>(k)];
    j["status_mae"] = std::move(mae);
    j["cell_accuracy"] = m.cell_accuracy;
    return j;
}

HttpServer* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Compile natural-language prompts into spells and duel them."};
    app.name("spellforge");
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "Engine config JSON (types, ranges, cost, arena)")->check(CLI::ExistingFile);

    // dataset
    auto* dataset = app.add_subcommand("dataset", "Generate or inspect labeled prompt datasets");
    dataset->require_subcommand(1);
    std::size_t gen_count = 0;
    std::uint64_t gen_seed = 0;
    std::string gen_out, gen_grammar;
    auto* gen = dataset->add_subcommand("gen", "Generate a synthetic dataset as JSONL");
    gen->add_option("--count", gen_count, "Number of examples")->required()->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "RNG seed")->required();
    gen->add_option("--out", gen_out, "Output JSONL path")->required();
    gen->add_option("--grammar", gen_grammar, "Template grammar JSON (default: built-in)")->check(CLI::ExistingFile);

    std::string stats_file;
    bool stats_json = false;
    auto* stats_cmd = dataset->add_subcommand("stats", "Report the label distribution of a dataset");
    stats_cmd->add_option("file", stats_file, "Dataset JSONL")->required();
    stats_cmd->add_flag("--json", stats_json, "Machine-readable output");

    // train
    std::string train_data, train_out;
    std::uint64_t train_seed = 0;
    TrainOptions train_opts;
    auto* train_cmd = app.add_subcommand("train", "Train the built-in linear model");
    train_cmd->add_option("--data", train_data, "Training JSONL")->required();
    train_cmd->add_option("--out", train_out, "Model output path")->required();
    train_cmd->add_option("--seed", train_seed, "Shuffle seed")->required();
    train_cmd->add_option("--epochs", train_opts.epochs, "Epochs")->capture_default_str()->check(CLI::PositiveNumber);
    train_cmd->add_option("--batch", train_opts.batch, "Mini-batch size")->capture_default_str()->check(CLI::PositiveNumber);
    train_cmd->add_option("--lr", train_opts.learning_rate, "Learning rate")->capture_default_str()->check(CLI::PositiveNumber);

    // eval
    std::string eval_model, eval_data;
    bool eval_json = false;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model on a labeled dataset");
    eval_cmd->add_option("--model", eval_model, "Model file")->required();
    eval_cmd->add_option("--data", eval_data, "Test JSONL")->required();
    eval_cmd->add_flag("--json", eval_json, "Machine-readable output");

    // forge
    std::string forge_prompt, forge_model, forge_backend;
    bool forge_json = false, forge_full = false;
    auto* forge_cmd = app.add_subcommand("forge", "Compile one prompt into a spell");
    forge_cmd->add_option("prompt", forge_prompt, "Spell description")->required();
    auto* model_opt = forge_cmd->add_option("--model", forge_model, "Model file for the built-in backend");
    auto* backend_opt = forge_cmd->add_option("--backend", forge_backend, "External backend command line");
    model_opt->excludes(backend_opt);
    forge_cmd->add_flag("--json", forge_json, "Print the SpellSpec as JSON");
    forge_cmd->add_flag("--full", forge_full, "With --json, include prediction, cost breakdown, bindings and timing");

    // duel
    std::string duel_a, duel_b, duel_trace, duel_policy;
    std::uint64_t duel_seed = 0;
    std::uint64_t duel_ticks = 2400;
    bool duel_json = false;
    auto* duel_cmd = app.add_subcommand("duel", "Simulate a duel between two spells");
    duel_cmd->add_option("--spell-a", duel_a, "SpellSpec JSON file for entity 0")->required();
    duel_cmd->add_option("--spell-b", duel_b, "SpellSpec JSON file for entity 1")->required();
    duel_cmd->add_option("--seed", duel_seed, "Arena seed")->required();
    duel_cmd->add_option("--max-ticks", duel_ticks, "Tick cap")->capture_default_str()->check(CLI::PositiveNumber);
    duel_cmd->add_option("--policy", duel_policy, "Policy JSON file (default: chase)");
    duel_cmd->add_option("--trace", duel_trace, "Write the event trace as JSONL");
    duel_cmd->add_flag("--json", duel_json, "Print the full duel result as JSON");

    // serve
    ServerOptions serve_opts;
    std::string serve_model, serve_backend, serve_static;
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
    serve_cmd->add_option("--port", serve_opts.port, "Listen port (0 picks one)")->capture_default_str();
    serve_cmd->add_option("--host", serve_opts.host, "Listen address")->capture_default_str();
    auto* serve_model_opt = serve_cmd->add_option("--model", serve_model, "Model file for the built-in backend");
    auto* serve_backend_opt = serve_cmd->add_option("--backend", serve_backend, "External backend command line");
    serve_model_opt->excludes(serve_backend_opt);
    serve_cmd->add_option("--static", serve_static, "Directory served at /");
    serve_cmd->add_flag("--cors", serve_opts.cors, "Allow cross-origin requests (UI dev server)");

    auto* config_cmd = app.add_subcommand("config", "Print the effective engine config as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 1;
    }

    const auto need_backend = [&](const std::string& model, const std::string& command,
                                  const EngineConfig& config) -> std::shared_ptr<const Backend> {
        if (!command.empty()) {
            ExternalBackendOptions o;
            o.type_count = config.registry.size();
            o.status_bounds = config.ranges.bounds();
            return spawn_external_backend(split_command(command), o);
        }
        return std::make_shared<BuiltinBackend>(std::make_shared<const LinearSpellModel>(load_model(model)));
    };

    try {
        const EngineConfig config = config_path.empty() ? EngineConfig::defaults() : load_config(config_path);

        if (*config_cmd) {
            out << config_to_json(config).dump(2) << "\n";
        } else if (*gen) {
            const auto grammar = gen_grammar.empty() ? TemplateGrammar::builtin() : load_grammar(gen_grammar);
            const auto examples = generate(gen_count, gen_seed, grammar, config.registry, config.ranges);
            write_jsonl(examples, gen_out);
            err << "wrote " << examples.size() << " examples to " << gen_out << "\n";
        } else if (*stats_cmd) {
            const auto examples = read_jsonl(stats_file, config.registry, config.ranges);
            const auto report = stats(examples, config.registry.size(), config.ranges);
            if (stats_json) {
                out << report_to_json(report, config.registry).dump(2) << "\n";
            } else {
                out << render_report(report, config.registry);
            }
        } else if (*train_cmd) {
            const auto data = read_jsonl(train_data, config.registry, config.ranges);
            train_opts.seed = train_seed;
            const auto model = train(data, train_opts, config.registry, config.ranges);
            save_model(model, train_out);
            out << "trained " << model.model_id << " on " << data.size() << " examples, loss "
                << model.training.initial_loss() << " -> " << model.training.final_loss() << "\n";
        } else if (*eval_cmd) {
            const auto model = load_model(eval_model);
            const auto data = read_jsonl(eval_data, config.registry, config.ranges);
            const auto metrics = evaluate(model, data);
            if (eval_json) {
                out << metrics_to_json(metrics).dump(2) << "\n";
            } else {
                print_metrics(out, metrics);
            }
        } else if (*forge_cmd) {
            if (forge_model.empty() && forge_backend.empty()) {
                err << "forge: one of --model or --backend is required\n";
                return 1;
            }
            const auto backend = need_backend(forge_model, forge_backend, config);
            const auto spell = forge(forge_prompt, *backend, config);
            if (forge_json) {
                out << (forge_full ? forged_to_json(spell, config.registry) : spec_to_json(spell.spec)).dump(2) << "\n";
            } else {
                print_spell(out, spell, config.registry);
            }
        } else if (*duel_cmd) {
            const auto a = compile_spell(parse_spec(read_file(duel_a)), config.registry, config.ranges, config.effects);
            const auto b = compile_spell(parse_spec(read_file(duel_b)), config.registry, config.ranges, config.effects);
            DuelOptions options;
            options.arena = config.arena;
            options.seed = duel_seed;
            options.max_ticks = duel_ticks;
            options.record_frames = duel_json;
            if (!duel_policy.empty()) {
                const auto text = read_file(duel_policy);
                const auto j = Json::parse(text, nullptr, false);
                if (j.is_discarded()) throw FormatError(duel_policy + ": not valid JSON");
                options.policy = policy_from_json(j);
            }
            const auto result = run_duel(a, b, options);
            if (!duel_trace.empty()) {
                std::ofstream t(duel_trace, std::ios::binary);
                if (!t) throw IoError("cannot write " + duel_trace);
                t << trace_to_jsonl(result.trace);
            }
            if (duel_json) {
                out << duel_to_json(result).dump() << "\n";
            } else {
                const char* outcome = result.outcome == DuelOutcome::WinnerA   ? "spell A wins"
                                      : result.outcome == DuelOutcome::WinnerB ? "spell B wins"
                                                                               : "draw";
                out << outcome << " after " << result.ticks << " ticks (" << result.trace.size() << " events)\n";
                for (const auto& e : result.finals) {
                    out << "  entity " << e.id << ": health " << e.current.health << ", mana " << e.current.mana
                        << (e.alive ? "" : ", defeated") << "\n";
                }
            }
        } else if (*serve_cmd) {
            if (serve_model.empty() && serve_backend.empty()) {
                err << "serve: one of --model or --backend is required\n";
                return 1;
            }
            if (!serve_static.empty()) serve_opts.static_dir = serve_static;
            const Service service(need_backend(serve_model, serve_backend, config), config);
            HttpServer server(service, serve_opts);
            const int port = server.bind();
            err << "listening on http://" << serve_opts.host << ":" << port << "\n";
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            server.run();
            g_server = nullptr;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

} // namespace spellforge
