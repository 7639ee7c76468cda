// Test double for the external backend protocol.
//
//   stub_backend [mode]
//
// Modes: ok (default), exit (dies before the handshake), bad-hello, silent
// (handshakes, then never answers), die (exits on the first predict).
// In ok mode a prompt starting with '!' names a malformed reply to send
// instead of a prediction, e.g. "!cells17".

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <thread>

#include "json.hpp"

using nlohmann::json;

namespace {

std::uint64_t hash(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

json canned() {
    return {{"type_probs", {0.1, 0.1, 0.1, 0.6, 0.1}},
            {"statuses", {1.0, 2.0, 3.0, 4.0}},
            {"effects", {{0, -1, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}}}};
}

// A valid prediction that depends only on the prompt.
json predict(const std::string& prompt) {
    if (prompt == "canned") return canned();
    std::uint64_t h = hash(prompt);
    const int type = static_cast<int>(h % 5);
    json probs = json::array();
    double total = 0.0;
    double z[5];
    for (int i = 0; i < 5; ++i) {
        z[i] = (i == type ? 2.0 : 0.0) + static_cast<double>((h >> (8 * i)) & 0xff) / 255.0;
        total += std::exp(z[i]);
    }
    for (double v : z) probs.push_back(std::exp(v) / total);
    const double bounds[4] = {5, 4, 5, 7};
    json statuses = json::array();
    for (int k = 0; k < 4; ++k) statuses.push_back(bounds[k] * static_cast<double>((h >> (5 * k)) & 31) / 31.0);
    json effects = json::array();
    std::uint64_t bits = h * 0x9e3779b97f4a7c15ull;
    for (int r = 0; r < 4; ++r) {
        json row = json::array();
        for (int c = 0; c < 4; ++c) {
            row.push_back(static_cast<int>(bits % 3) - 1);
            bits /= 3;
        }
        effects.push_back(row);
    }
    return {{"type_probs", probs}, {"statuses", statuses}, {"effects", effects}};
}

std::string malformed(const std::string& name) {
    json r = canned();
    if (name == "garbage") return "this is not json";
    if (name == "empty") return "";
    if (name == "array") return "[1,2,3]";
    if (name == "nan") return R"({"type_probs":[NaN],"statuses":[0,0,0,0],"effects":[]})";
    if (name == "cells17") {
        r["effects"][3].push_back(0);
    } else if (name == "rows3") {
        r["effects"].erase(3);
    } else if (name == "flat16") {
        r["effects"] = json::array();
        for (int i = 0; i < 16; ++i) r["effects"].push_back(0);
    } else if (name == "noprobs") {
        r.erase("type_probs");
    } else if (name == "strprobs") {
        r["type_probs"] = {"a", "b", "c", "d", "e"};
    } else if (name == "statuses3") {
        r["statuses"].erase(3);
    } else if (name == "strstatus") {
        r["statuses"][0] = "high";
    } else if (name == "noeffects") {
        r.erase("effects");
    } else if (name == "fraccell") {
        r["effects"][0][0] = 0.5;
    } else if (name == "nonternary") {
        r["effects"][0][0] = 2;
    } else if (name == "badsum") {
        r["type_probs"] = {0.5, 0.5, 0.5, 0.5, 0.5};
    } else if (name == "negprob") {
        r["type_probs"] = {1.2, -0.2, 0.0, 0.0, 0.0};
    } else if (name == "fourtypes") {
        r["type_probs"] = {0.25, 0.25, 0.25, 0.25};
    } else if (name == "highstatus") {
        r["statuses"] = {99.0, -3.0, 2.0, 1.0};
    } else if (name == "hello") {
        return R"({"op":"hello","model_id":"again"})";
    } else {
        return "unknown malformed case";
    }
    return r.dump();
}

} // namespace

int main(int argc, char** argv) {
    const std::string mode = argc > 1 ? argv[1] : "ok";
    if (mode == "exit") return 3;

    std::string line;
    if (!std::getline(std::cin, line)) return 0;
    if (mode == "bad-hello") {
        std::cout << "{\"op\":\"howdy\"}" << std::endl;
    } else {
        std::cout << json{{"op", "hello"}, {"model_id", "stub-1"}}.dump() << std::endl;
    }

    while (std::getline(std::cin, line)) {
        if (mode == "silent") {
            std::this_thread::sleep_for(std::chrono::seconds(30));
            return 0;
        }
        if (mode == "die") return 4;
        const auto req = json::parse(line, nullptr, false);
        if (req.is_discarded() || req.value("op", "") != "predict") {
            std::cout << "{\"error\":\"bad request\"}" << std::endl;
            continue;
        }
        const auto prompt = req.value("prompt", std::string());
        if (!prompt.empty() && prompt[0] == '!') {
            std::cout << malformed(prompt.substr(1)) << std::endl;
        } else {
            std::cout << predict(prompt).dump() << std::endl;
        }
    }
    return 0;
}
