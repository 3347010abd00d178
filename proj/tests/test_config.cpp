#include <doctest.h>

#include <random>

#include "pathlab/config.hpp"

using namespace pathlab;
using namespace pathlab::cli;

TEST_CASE("minimal document gets every default") {
    const auto s = parse_config(R"({"command": "equivalence"})");
    CHECK(s.command == Command::Equivalence);
    CHECK(s.a == 1.0);
    CHECK(s.b == 2.0);
    CHECK(s.hbar == 1.0);
    CHECK(s.T == 1.0);
    CHECK(s.N == 32);
    CHECK(s.sampler.x0 == 0.0);
    CHECK(s.sampler.n_samples == 100000);
    CHECK(s.sampler.seed == 42);
    CHECK(s.sampler.blowup_threshold == 1e6);
    CHECK(s.format == Format::Csv);
    CHECK(s.branch == Branch::Plus);
    CHECK_FALSE(s.proposal_width_set);
    CHECK(s.observables.size() == 3);
}

TEST_CASE("validation errors name the field") {
    auto field_of = [](const char* doc) {
        try {
            (void)parse_config(doc);
        } catch (const ValidationError& e) {
            return e.field();
        }
        return std::string("<none>");
    };
    CHECK(field_of(R"({"command": "equivalence", "lattice": {"N": 0}})") == "lattice.N");
    CHECK(field_of(R"({"command": "equivalence", "lattice": {"N": 33}})") == "lattice.N");
    CHECK(field_of(R"({"command": "equivalence", "params": {"a": -1}})") == "params.a");
    CHECK(field_of(R"({"command": "equivalence", "params": {"c": 1}})") == "params.c");
    CHECK(field_of(R"({"command": "equivalence", "colour": 1})") == "colour");
    CHECK(field_of(R"({"command": "nope"})") == "command");
    CHECK(field_of(R"({"params": {}})") == "command");
    CHECK(field_of(R"({"command": "kink", "branch": "SIDEWAYS"})") == "branch");
    CHECK(field_of(R"({"command": "kink", "format": "XML"})") == "format");
    CHECK(field_of(R"({"command": "kink", "hbar_list": [0.1, 0.2]})") == "hbar_list");
    CHECK(field_of(R"({"command": "kink", "sampler": {"n_samples": 1.5}})") == "sampler.n_samples");
    CHECK(field_of(R"({"command": "kink", "observables": ["MEDIAN"]})") == "observables");
    CHECK(field_of(R"({"command": "kink", "lattice": {"T": "long"}})") == "lattice.T");
}

TEST_CASE("malformed documents report line and column") {
    try {
        (void)parse_config("{\n  \"command\": \"kink\",\n  \"lattice\": {\"N\": }\n}");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(e.column() > 1);
    }
}

TEST_CASE("overrides use dotted keys") {
    auto doc = parse_document(R"({"command": "equivalence"})");
    apply_override(doc, "lattice.N=64");
    apply_override(doc, "branch=MINUS");
    apply_override(doc, "sampler.x0=0.5");
    apply_override(doc, "hbar_list=[0.4,0.1]");
    const auto s = validate(doc);
    CHECK(s.N == 64);
    CHECK(s.branch == Branch::Minus);
    CHECK(s.sampler.x0 == 0.5);
    CHECK(s.hbar_list == std::vector<double>{0.4, 0.1});
    CHECK_THROWS((void)apply_override(doc, "no-equals-sign"));
}

TEST_CASE("parse, serialize, parse is the identity") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> u(0.01, 5.0);
    const char* commands[] = {"equivalence", "classical-limit", "bvp", "kink", "ito-check", "jacobian-check"};
    for (int trial = 0; trial < 100; ++trial) {
        nlohmann::json doc = {{"command", commands[trial % 6]},
                              {"params", {{"a", u(rng)}, {"b", u(rng)}, {"hbar", u(rng)}}},
                              {"lattice", {{"T", u(rng)}, {"N", 2 * (1 + rng() % 40)}}},
                              {"sampler", {{"seed", rng()}, {"x0", u(rng) - 2.5}}},
                              {"branch", trial % 2 ? "PLUS" : "MINUS"},
                              {"format", trial % 3 ? "CSV" : "JSON"}};
        if (trial % 4 == 0) doc["sampler"]["proposal_width"] = u(rng);
        if (trial % 5 == 0) doc["hbar_list"] = {0.5, 0.25, 0.125};
        if (trial % 7 == 0) doc["observables"] = {"MEAN_PATH", "ENDPOINT"};
        const auto s = validate(doc);
        const auto again = parse_config(serialize(s).dump());
        CHECK(again == s);
        CHECK(serialize(again) == serialize(s));
    }
}
