#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tsvf/io.hpp"
#include "tsvf/numerics.hpp"
#include "tsvf/scenarios.hpp"

using namespace tsvf;
using nlohmann::json;

namespace {

const Check* find_check(const ScenarioResult& r, const std::string& name) {
    for (const auto& c : r.checks)
        if (c.name == name) return &c;
    return nullptr;
}

std::string failed(const ScenarioResult& r) {
    std::string s;
    for (const auto& c : r.checks)
        if (!c.passed) s += c.name + " (" + c.detail + ") ";
    return s;
}

}  // namespace

TEST_SUITE("scenarios") {

TEST_CASE("registry lists nine scenarios in a fixed order") {
    const auto& reg = scenario_registry();
    const std::vector<std::string> want = {"three_box", "n_box", "epr_product_rule", "spin_xi_weak", "n_spin_single_system",
                                           "negative_kinetic_energy", "spin_cone", "time_machine", "protective_measurement"};
    REQUIRE(reg.size() == want.size());
    for (std::size_t k = 0; k < want.size(); ++k) CHECK(reg[k].name == want[k]);
}

TEST_CASE("every scenario runs with defaults and passes its embedded checks") {
    for (const auto& info : scenario_registry()) {
        const ScenarioResult r = run_scenario(info.name);
        CHECK_MESSAGE(r.all_passed(), info.name << ": " << failed(r));
        CHECK_MESSAGE(!r.checks.empty(), info.name);
        CHECK_MESSAGE(!r.summary.empty(), info.name);
        for (const auto& s : r.series) {
            CHECK_MESSAGE(std::find(info.series.begin(), info.series.end(), s.name) != info.series.end(), info.name << " emits undeclared " << s.name);
            for (const auto& row : s.rows) REQUIRE(row.size() == s.columns.size());
        }
        const json j = r.to_json();
        CHECK(j["schema_version"] == kResultSchemaVersion);
        CHECK(j["scenario"] == info.name);
    }
}

TEST_CASE("results are byte-stable for identical requests") {
    for (const std::string name : {"spin_xi_weak", "three_box", "spin_cone"}) {
        const json o = name == "spin_xi_weak" ? json{{"ensemble", 300}} : json::object();
        const ScenarioResult a = run_scenario(name, o, 9);
        const ScenarioResult b = run_scenario(name, o, 9);
        CHECK(dump_json(a.to_json()) == dump_json(b.to_json()));
        REQUIRE(a.series.size() == b.series.size());
        for (std::size_t k = 0; k < a.series.size(); ++k) CHECK(to_csv(a.series[k]) == to_csv(b.series[k]));
    }
}

TEST_CASE("unknown scenario and bad parameters are rejected with the offending key") {
    try {
        run_scenario("nope");
        FAIL("expected unknown_scenario");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::unknown_scenario);
    }
    try {
        run_scenario("three_box", {{"boxes", 4}});
        FAIL("expected bad_param");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::bad_param);
        CHECK(std::string(e.what()).find("boxes") != std::string::npos);
    }
    try {
        run_scenario("n_box", {{"n", 2}});
        FAIL("expected bad_param");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::bad_param);
        CHECK(std::string(e.what()).find("'n'") != std::string::npos);
    }
    CHECK_THROWS_AS(run_scenario("spin_xi_weak", {{"delta", "wide"}}), Error);
    CHECK_THROWS_AS(run_scenario("n_box", {{"n", 3.5}}), Error);
    CHECK_THROWS_AS(run_scenario("n_spin_single_system", {{"centers", "other"}}), Error);
}

TEST_CASE("command-line values are parsed by declared type") {
    const ScenarioInfo& info = find_scenario("spin_xi_weak");
    CHECK(parse_param_value(info, "delta", "0.25").get<double>() == 0.25);
    CHECK(parse_param_value(info, "ensemble", "42").get<long long>() == 42);
    CHECK(parse_param_value(info, "postselect", "false").get<bool>() == false);
    CHECK_THROWS_AS(parse_param_value(info, "ensemble", "4.5"), Error);
    CHECK_THROWS_AS(parse_param_value(info, "delta", "1e"), Error);
    CHECK_THROWS_AS(parse_param_value(info, "postselect", "maybe"), Error);
    CHECK_THROWS_AS(parse_param_value(info, "width", "1"), Error);
}

TEST_CASE("three boxes") {
    const ScenarioResult r = run_scenario("three_box");
    CHECK(r.results["prob_p1"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.results["product_rule"]["p1p2_certain"].get<double>() == doctest::Approx(0.0));
    CHECK(r.results["n3_weak_value"]["tensor"]["re"].get<double>() == doctest::Approx(-5.0).epsilon(1e-10));
    for (double p : r.results["joint_opening"]["probabilities"]) CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    // A weak pointer for the box-3 count sits near -N.
    CHECK(r.results["pointer_n3"]["mean"].get<double>() == doctest::Approx(-5.0).epsilon(0.05));
}

TEST_CASE("N boxes") {
    for (int n : {3, 5, 10}) {
        const ScenarioResult r = run_scenario("n_box", {{"n", n}});
        CHECK_MESSAGE(r.all_passed(), failed(r));
        const auto probs = r.results["prob_box_open"].get<std::vector<double>>();
        for (int i = 0; i < n - 1; ++i) CHECK(std::abs(probs[static_cast<std::size_t>(i)] - 1.0) <= 1e-10);
    }
    CHECK(find_check(run_scenario("n_box", {{"n", 3}}), "reduces_to_three_box") != nullptr);
}

TEST_CASE("EPR pair: certain values and product-rule failure") {
    const ScenarioResult r = run_scenario("epr_product_rule");
    CHECK(r.results["sigma1y_certain"].get<double>() == doctest::Approx(-1.0));
    CHECK(r.results["sigma2x_certain"].get<double>() == doctest::Approx(-1.0));
    CHECK(r.results["product_certain"].get<double>() == doctest::Approx(-1.0));
    CHECK(r.results["product_rule_holds"] == false);
}

TEST_CASE("spin_xi_weak panels") {
    const ScenarioResult post = run_scenario("spin_xi_weak");
    const auto& panels = post.results["fig3"];
    REQUIRE(panels.size() == 5);
    CHECK(std::abs(panels[4]["peak"].get<double>() - std::numbers::sqrt2) <= 0.05);
    const ScenarioResult pre = run_scenario("spin_xi_weak", {{"postselect", false}});
    const auto peaks = pre.results["fig2a_maxima"].get<std::vector<double>>();
    REQUIRE(peaks.size() == 2);
    CHECK(peaks[0] == doctest::Approx(-1.0).epsilon(0.01));
    CHECK(peaks[1] == doctest::Approx(1.0).epsilon(0.01));
    bool has2c = false;
    for (const auto& s : pre.series) has2c = has2c || s.name == "fig2c";
    CHECK(has2c);
}

TEST_CASE("n_spin_single_system reports peaks and cross-checks small n") {
    const ScenarioResult small = run_scenario("n_spin_single_system", {{"n", 4}});
    REQUIRE(find_check(small, "closed_form_matches_tensor") != nullptr);
    CHECK(find_check(small, "closed_form_matches_tensor")->passed);
    const ScenarioResult big = run_scenario("n_spin_single_system");
    CHECK(big.results.contains("single_peaked"));
    CHECK(big.results["local_maxima"].size() >= 1);
    const ScenarioResult printed = run_scenario("n_spin_single_system", {{"centers", "printed"}});
    CHECK(printed.results["peak"].get<double>() != big.results["peak"].get<double>());
}

TEST_CASE("negative kinetic energy") {
    const ScenarioResult r = run_scenario("negative_kinetic_energy");
    CHECK(r.results["kinetic_weak_value"].get<double>() < 0.0);
    CHECK(std::abs(r.results["kinetic_minus_e0"].get<double>()) <= 1e-10);
    CHECK_THROWS_AS(run_scenario("negative_kinetic_energy", {{"postselect_x", 0.5}}), Error);
    const ScenarioResult inside = run_scenario("negative_kinetic_energy", {{"postselect_x", 0.5}, {"allow_inside", true}});
    CHECK(inside.all_passed());
    CHECK(inside.results["kinetic_weak_value"].get<double>() > 0.0);
}

TEST_CASE("spin cone records both angle formulas") {
    const ScenarioResult r = run_scenario("spin_cone", {{"chi", std::numbers::pi / 16}});
    CHECK(r.all_passed());
    const double half = r.results["half_angle"].get<double>();
    CHECK(half == doctest::Approx(r.results["half_angle_derived"].get<double>()).epsilon(1e-12));
    CHECK(r.results["full_angle_printed_formula"].get<double>() == doctest::Approx(2 * half).epsilon(1e-12));
    const ScenarioResult flat = run_scenario("spin_cone", {{"chi", 0.0}});
    CHECK(flat.results["kind"] == "single_direction");
    const ScenarioResult div = run_scenario("spin_cone", {{"chi", std::numbers::pi / 4}});
    CHECK(div.results["kind"] == "divergent");
}

TEST_CASE("time machine scenario") {
    const ScenarioResult r = run_scenario("time_machine");
    CHECK(r.results["distortion"].get<double>() == doctest::Approx(0.24686077610073902).epsilon(1e-10));
    CHECK(r.results["log10_success_probability"].get<double>() == doctest::Approx(-33.467791278594987).epsilon(1e-10));
    const ScenarioResult z = run_scenario("time_machine", {{"delta_t", 0.0}, {"n_terms", 5}});
    CHECK(z.results["distortion"].get<double>() <= 1e-12);
    CHECK_THROWS_AS(run_scenario("time_machine", {{"eta", 60}}), Error);
}

TEST_CASE("protective scenario flags the two-state regime") {
    const ScenarioResult r = run_scenario("protective_measurement", {{"times", "10,20"}});
    CHECK(r.all_passed());
    CHECK(r.results["two_state"]["within_2pct"] == true);
    CHECK(r.results["control"]["within_2pct"] == false);
    CHECK_THROWS_AS(run_scenario("protective_measurement", {{"times", "10,x"}}), Error);
}

}  // TEST_SUITE
