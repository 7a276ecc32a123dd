#include <doctest.h>

#include <variant>

#include "ckdv/config.hpp"

using namespace ckdv;
using nlohmann::json;

namespace {

json base() { return json{{"kind", "simulate"}}; }

ExperimentConfig with(const std::string& key, json value) {
    json d = base();
    d[key] = std::move(value);
    return parse_config(d);
}

}  // namespace

TEST_CASE("defaults and resolved round-trip") {
    const ExperimentConfig c = parse_config(base());
    CHECK(c.kind == ExperimentKind::Simulate);
    CHECK(c.n == 512);
    CHECK(c.period == 40.0);
    CHECK(c.dt == 1e-4);
    CHECK(std::holds_alternative<HirotaSatsuma>(c.system));
    const json resolved = to_json(c);
    CHECK(to_json(parse_config(resolved)) == resolved);
    const json sol = to_json(with("initial", {{"type", "soliton"}, {"c", 8.0}}));
    CHECK_FALSE(sol.at("initial").contains("u_amp"));
    CHECK(to_json(parse_config(sol)) == sol);
}

TEST_CASE("kind handling") {
    CHECK_THROWS_AS(parse_config(json::object()), ConfigError);
    CHECK(parse_config(json::object(), ExperimentKind::KernelSuite).kind == ExperimentKind::KernelSuite);
    CHECK_THROWS_AS(parse_config(base(), ExperimentKind::KernelSuite), ConfigError);
    CHECK_THROWS_AS(parse_config(json{{"kind", "dance"}}), ConfigError);
    for (auto k : {ExperimentKind::Simulate, ExperimentKind::LipschitzProbe, ExperimentKind::Nonequivalence,
                   ExperimentKind::BourgainSuite})
        CHECK(kind_from_name(kind_name(k)) == k);
    CHECK(kind_from_name("lipschitz") == ExperimentKind::LipschitzProbe);
    CHECK(kind_from_name("noneq") == ExperimentKind::Nonequivalence);
}

TEST_CASE("unknown keys, wrong types and ranges are rejected") {
    json d = base();
    d["colour"] = 1;
    CHECK_THROWS_AS(parse_config(d), ConfigError);
    CHECK_THROWS_AS(with("grid", {{"n", 512}, {"size", 3}}), ConfigError);
    CHECK_THROWS_AS(with("lipschitz", {{"deltas", {0.1}}, {"extra", true}}), ConfigError);
    CHECK_THROWS_AS(with("grid", {{"n", "big"}}), ConfigError);
    CHECK_THROWS_AS(with("grid", {{"n", 500}}), ConfigError);
    CHECK_THROWS_AS(with("grid", {{"n", 8}}), ConfigError);
    CHECK_THROWS_AS(with("grid", {{"period", -1.0}}), ConfigError);
    CHECK_THROWS_AS(with("stepper", {{"dt", 0.0}}), ConfigError);
    CHECK_THROWS_AS(with("kernels", {{"lemmas", {"L3.99"}}}), ConfigError);
    CHECK_THROWS_AS(parse_config(json::object(), ExperimentKind::Diagnose), ConfigError);
}

TEST_CASE("every system type parses") {
    CHECK(std::holds_alternative<Feng>(with("system", {{"type", "feng"}, {"a", 1}, {"b", 1}, {"c", 1}, {"d", 1}}).system));
    CHECK(std::holds_alternative<GearGrimshaw>(
        with("system", {{"type", "gear_grimshaw"}, {"a1", 0.5}, {"a2", 0.3}, {"b1", 1}, {"b2", 0.8}}).system));
    const auto g = with("system", {{"type", "general_coupled"}, {"A", {{1, 0}, {0, 2}}}, {"b", {1, 0, 0, 0, 0, 1}}});
    REQUIRE(std::holds_alternative<GeneralCoupled>(g.system));
    CHECK(std::get<GeneralCoupled>(g.system).A(1, 1) == 2.0);
    CHECK(std::get<GeneralCoupled>(g.system).b[5] == 1.0);
    CHECK(std::holds_alternative<Sakovich>(with("system", {{"type", "sakovich"}, {"A0", {{1, 0}, {0, 1}}}}).system));
    CHECK(std::holds_alternative<Bilinear>(with("system", {{"type", "canonical"}, {"D", {{-1, 0}, {0, -1}}}}).system));
    CHECK_THROWS_AS(with("system", {{"type", "burgers"}}), ConfigError);
    CHECK_THROWS_AS(with("system", {{"type", "feng"}, {"e", 1}}), ConfigError);
    CHECK_THROWS_AS(with("system", {{"type", "general_coupled"}, {"b", {1, 2}}}), ConfigError);
}

TEST_CASE("initial keys must match the initial type") {
    CHECK(with("initial", {{"type", "soliton"}, {"c", 8.0}}).initial.c == 8.0);
    CHECK_THROWS_AS(with("initial", {{"type", "soliton"}, {"u_amp", 1.0}}), ConfigError);
    CHECK_THROWS_AS(with("initial", {{"type", "zero"}, {"c", 1.0}}), ConfigError);
    CHECK_THROWS_AS(with("initial", {{"type", "snapshot"}}), ConfigError);
}

TEST_CASE("shipped configs load") {
    const std::string dir = CKDV_SOURCE_DIR "/configs/";
    CHECK(load_config(dir + "hs_soliton.json").initial.type == "soliton");
    for (auto k : {ExperimentKind::Simulate, ExperimentKind::KernelSuite, ExperimentKind::PicardStudy,
                   ExperimentKind::ScalingProbe, ExperimentKind::Nonequivalence})
        CHECK(load_config(dir + "defaults.json", k).kind == k);
    CHECK_THROWS_AS(load_config(dir + "missing.json"), ConfigError);
}
