#include <catch_amalgamated.hpp>

#include "config.hpp"

using namespace memkernel;
using namespace memkernel::cli;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

TEST_CASE("Unknown keys are rejected with their path") {
    const json j = json::parse(R"({"eps": 1.0, "a": 0.5, "bb": 0.5})");
    CHECK_THROWS_WITH(operator_params(j), ContainsSubstring("params.bb"));
    CHECK_THROWS_AS(series_control(json::parse(R"({"quad_tol": 1e-9, "images": 3})")), ConfigError);
}

TEST_CASE("Defaults and validation") {
    const OperatorParams p = operator_params(json::object());
    CHECK(p.eps == 1.0);
    CHECK(p.a == 0.5);
    CHECK_THROWS_AS(operator_params(json::parse(R"({"eps": -1})")), ConfigError);
    CHECK_THROWS_AS(operator_params(json::parse(R"({"eps": "one"})")), ConfigError);
    CHECK_THROWS_AS(grid_spec(json::parse(R"({"nx_cells": 2})")), ConfigError);
    CHECK_THROWS_AS(grid_spec(json::parse(R"({"nx_cells": 8.5})")), ConfigError);
    CHECK_THROWS_WITH(esjj_params(json::parse(R"({"eps": 0.5, "alpha": 3.0})")), ContainsSubstring("alpha*eps"));
}

TEST_CASE("Data presets") {
    const SpaceFn lin = space_preset(json::parse(R"({"type": "linear", "left": 1, "right": 3})"), "u0", 2.0);
    CHECK(lin(1.0) == 2.0);
    const SpaceFn sine = space_preset(json::parse(R"({"type": "sine", "amplitude": 2, "mode": 2})"), "u0", 1.0);
    CHECK_THAT(sine(0.25), WithinAbs(2.0, 1e-15));
    const SpaceFn tab = space_preset(json::parse(R"({"type": "table", "points": [[0, 0], [0.5, 1], [1, 0]]})"), "u0", 1.0);
    CHECK_THAT(tab(0.25), WithinAbs(0.5, 1e-15));
    CHECK_THROWS_AS(space_preset(json::parse(R"({"type": "table", "points": [[0.1, 0], [1, 0]]})"), "u0", 1.0),
                    ConfigError);
    CHECK(!space_preset(json::parse(R"({"type": "zero"})"), "u0", 1.0));
    CHECK_THROWS_AS(space_preset(json::parse(R"({"type": "sine", "phase": 1})"), "u0", 1.0), ConfigError);

    const json step = json::parse(R"({"type": "step", "limit": 2, "rate": 3})");
    const TimeFn g = time_preset(step, "g1");
    CHECK(g(0.0) == 0.0);
    CHECK_THAT(g(20.0), WithinAbs(2.0, 1e-15));
    CHECK(*time_limit(step) == 2.0);
    CHECK_THROWS_AS(time_preset(json::parse(R"({"type": "step", "limit": 1, "rate": -1})"), "g1"), ConfigError);
    CHECK_THROWS_AS(time_preset(json::parse(R"({"type": "ramp"})"), "g1"), ConfigError);
}
