#include <gtest/gtest.h>

#include <atomic>
#include <functional>
#include <thread>

#include "spellforge/backend.hpp"
#include "spellforge/dataset.hpp"
#include "spellforge/error.hpp"
#include "support.hpp"

using namespace spellforge;

namespace {

std::unique_ptr<ExternalBackend> stub(const std::string& mode = "ok", int timeout_ms = 2000) {
    ExternalBackendOptions o;
    o.timeout = std::chrono::milliseconds(timeout_ms);
    return spawn_external_backend({sftest::stub_backend_path().string(), mode}, o);
}

std::shared_ptr<const LinearSpellModel> tiny_model() {
    static const auto m = [] {
        TrainOptions o;
        o.seed = 1;
        o.epochs = 3;
        const auto data = generate(100, 2, TemplateGrammar::builtin(), SpellTypeRegistry::defaults(),
                                   StatusRanges::defaults());
        return std::make_shared<const LinearSpellModel>(
            train(data, o, SpellTypeRegistry::defaults(), StatusRanges::defaults()));
    }();
    return m;
}

std::string error_code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "no error";
}

} // namespace

TEST(Builtin, MeetsPredictionContract) {
    const BuiltinBackend b(tiny_model());
    EXPECT_EQ(b.kind(), BackendKind::Builtin);
    EXPECT_TRUE(sftest::backend_contract(b, sftest::contract_prompts()).empty());
}

TEST(External, HandshakeAndCannedReply) {
    const auto b = stub();
    EXPECT_EQ(b->model_id(), "stub-1");
    EXPECT_EQ(b->kind(), BackendKind::External);
    const auto p = b->predict("canned");
    EXPECT_EQ(p.type_probs, (std::vector<double>{0.1, 0.1, 0.1, 0.6, 0.1}));
    EXPECT_EQ(p.status_raws.values, (std::array<double, 4>{1.0, 2.0, 3.0, 4.0}));
    EXPECT_EQ(p.effects.at(0, 1), -1);
    EXPECT_EQ(p.effects.nonzero_count(), 1);
    EXPECT_EQ(p.argmax_type(), 3);
}

TEST(External, MeetsPredictionContract) {
    const auto b = stub();
    EXPECT_TRUE(sftest::backend_contract(*b, sftest::contract_prompts()).empty());
}

TEST(External, ImmediateExitIsSpawnError) {
    EXPECT_THROW(stub("exit"), BackendError);
}

TEST(External, MissingExecutable) {
    EXPECT_EQ(error_code_of([] { spawn_external_backend({"/nonexistent/backend"}); }), "backend_spawn_failed");
    EXPECT_THROW(spawn_external_backend({}), InputError);
}

TEST(External, BadHandshakeIsProtocolError) {
    EXPECT_THROW(stub("bad-hello"), ProtocolError);
}

TEST(External, SilentBackendTimesOut) {
    const auto b = stub("silent", 300);
    EXPECT_EQ(error_code_of([&] { b->predict("anything"); }), "backend_timeout");
    // The handle is unusable afterwards rather than reading a stale reply.
    EXPECT_THROW(b->predict("anything"), BackendError);
}

TEST(External, DyingBackendIsReported) {
    const auto b = stub("die");
    EXPECT_EQ(error_code_of([&] { b->predict("anything"); }), "backend_exited");
}

TEST(External, SeventeenCellsNamesTheField) {
    const auto b = stub();
    try {
        b->predict("!cells17");
        FAIL() << "17 cells accepted";
    } catch (const ProtocolError& e) {
        EXPECT_NE(std::string(e.what()).find("effects"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("17"), std::string::npos) << e.what();
        EXPECT_EQ(e.code(), "protocol_error");
    }
}

TEST(External, MalformedRepliesAreProtocolErrorsAndRecoverable) {
    const auto b = stub();
    const std::vector<std::pair<std::string, std::string>> cases = {
        {"garbage", "JSON"},       {"empty", "JSON"},          {"array", "object"},    {"nan", "JSON"},
        {"rows3", "effects"},      {"flat16", "effects"},      {"noprobs", "type_probs"},
        {"strprobs", "type_probs"}, {"statuses3", "statuses"}, {"strstatus", "statuses"},
        {"noeffects", "effects"},  {"fraccell", "effects"},    {"hello", "type_probs"},
    };
    for (const auto& [name, field] : cases) {
        try {
            b->predict("!" + name);
            ADD_FAILURE() << name << " accepted";
        } catch (const ProtocolError& e) {
            EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << name << ": " << e.what();
        }
        EXPECT_NO_THROW(b->predict("still alive?")) << "after " << name;
    }
}

TEST(External, SemanticallyInvalidRepliesAreDistinct) {
    const auto b = stub();
    for (const char* name : {"!nonternary", "!badsum", "!negprob", "!fourtypes"}) {
        EXPECT_EQ(error_code_of([&] { b->predict(name); }), "invalid_prediction") << name;
    }
}

TEST(External, OutOfRangeStatusesAreClamped) {
    const auto b = stub();
    const auto p = b->predict("!highstatus");
    EXPECT_EQ(p.status_raws.values, (std::array<double, 4>{5.0, 0.0, 2.0, 1.0}));
}

TEST(External, ConcurrentCallersAreSerialized) {
    const auto b = stub();
    const auto prompts = sftest::contract_prompts();
    std::vector<RawPrediction> expected;
    for (const auto& p : prompts) expected.push_back(b->predict(p));
    std::atomic<int> mismatches{0};
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&, t] {
            for (int i = 0; i < 50; ++i) {
                const std::size_t k = static_cast<std::size_t>(t + i) % prompts.size();
                if (!(b->predict(prompts[k]) == expected[k])) ++mismatches;
            }
        });
    }
    for (auto& th : threads) th.join();
    EXPECT_EQ(mismatches.load(), 0);
}

TEST(ParseReply, AcceptsWellFormed) {
    const auto p = parse_prediction_reply(
        R"({"type_probs":[0.5,0.5],"statuses":[0,1,2,3],"effects":[[1,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,-1]]})");
    EXPECT_EQ(p.type_probs.size(), 2u);
    EXPECT_EQ(p.effects.at(3, 3), -1);
    EXPECT_EQ(p.status_raws.values[3], 3.0);
}

TEST(ParseReply, RejectsWithFieldNames) {
    EXPECT_THROW(parse_prediction_reply("{}"), ProtocolError);
    EXPECT_THROW(parse_prediction_reply(R"({"type_probs":[1],"statuses":[0,0,0,0],"effects":[[0,0,0,0]]})"),
                 ProtocolError);
    EXPECT_THROW(parse_prediction_reply("\xff\xfe"), ProtocolError);
}
