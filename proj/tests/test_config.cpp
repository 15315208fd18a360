#include <gtest/gtest.h>

#include <islm/config.hpp>
#include <islm/presets.hpp>

#include "support.hpp"

#include <string>

using namespace islm;

namespace {

const char* kInlineModel = R"(model:
  params: {alpha: 1, beta: 1, epsilon: 0.001, m_stock: 2, maturity_premium: 0.02, expected_inflation: 0.02}
  is: {i0: 2.16, i_y: 0.3, i_r: 6, s0: 0.5, s_y: 0.5, s_r: 4}
  money:
    l_y: 0.5
    m_y: 0.25
    l_slope: 10
    m_slope: 5
    l0: 1
    m0: 0
    skirt_fraction: 0.25
    windows:
      - {p: 0.04, q: 0.08, amp_l: 8, amp_m: 6}
)";

config::ConfigError parse_error(const std::string& text) {
    try {
        (void)config::parse_config_string(text, "test.yaml");
    } catch (const config::ConfigError& e) {
        return e;
    }
    ADD_FAILURE() << "expected a ConfigError";
    return config::ConfigError("", 0, 0, "", "");
}

}  // namespace

TEST(Config, InlineModelMatchesThePreset) {
    const auto c = config::parse_config_string(kInlineModel);
    EXPECT_EQ(c.model, presets::reference());
    EXPECT_EQ(c.y_range, (Interval{0.0, 20.0}));
    EXPECT_FALSE(c.scenario.has_value());
}

TEST(Config, ShippedFilesMatchThePresets) {
    EXPECT_EQ(support::load("reference.yaml").model, presets::reference());
    EXPECT_EQ(support::load("steep.yaml").model, presets::steep());
    EXPECT_EQ(support::load("no_trap.yaml").model, presets::no_trap());
    EXPECT_EQ(support::load("twice_bent.yaml").model, presets::twice_bent());
    EXPECT_EQ(support::load("thrice_bent.yaml").model, presets::thrice_bent());
}

TEST(Config, ReferenceSettings) {
    const auto c = support::load("reference.yaml");
    EXPECT_EQ(c.simulate.mode, Mode::singular_limit);
    EXPECT_EQ(c.simulate.branch, 0);
    EXPECT_DOUBLE_EQ(c.simulate.stride, 0.002);
    EXPECT_TRUE(c.output.csv);
    EXPECT_TRUE(c.output.json);
    EXPECT_FALSE(c.output.svg);
}

TEST(Config, ScenarioStepsParse) {
    const auto c = support::load("scenarios/monetary_step.yaml");
    ASSERT_TRUE(c.scenario.has_value());
    const auto& sc = c.scenario->scenario;
    ASSERT_EQ(sc.steps.size(), 2u);
    EXPECT_TRUE(std::holds_alternative<FiscalDrive>(sc.steps[0]));
    const auto& m = std::get<MonetaryStep>(sc.steps[1]);
    EXPECT_DOUBLE_EQ(m.time, 4.0);
    EXPECT_DOUBLE_EQ(m.d_pi, 0.03);
    EXPECT_EQ(c.scenario->initial.branch, 0);
}

TEST(Config, StabilizeSectionParses) {
    const auto c = support::load("scenarios/stabilize_money.yaml");
    ASSERT_TRUE(c.stabilize.has_value());
    EXPECT_EQ(c.stabilize->instrument, Instrument::money_stock);
    EXPECT_EQ(c.stabilize->catch_jump, Direction::up);
    EXPECT_DOUBLE_EQ(c.stabilize->margin, 0.05);
    EXPECT_EQ(c.stabilize->ramp.knots.size(), 2u);
}

TEST(Config, SerializationRoundTripsEveryShippedFile) {
    for (const auto& e : std::filesystem::recursive_directory_iterator(support::source_dir() / "configs")) {
        if (e.path().extension() != ".yaml" || e.path().parent_path().filename() == "models") continue;
        const auto c = config::parse_config(e.path());
        const auto text = config::serialize_config(c);
        const auto back = config::parse_config_string(text);
        EXPECT_EQ(back, c) << e.path();
        EXPECT_EQ(config::serialize_config(back), text) << e.path();
    }
}

TEST(Config, NegativeEpsilonReportsItsPosition) {
    std::string text = kInlineModel;
    text.replace(text.find("epsilon: 0.001"), 14, "epsilon: -1");
    const auto e = parse_error(text);
    EXPECT_EQ(e.line(), 2);
    EXPECT_GT(e.column(), 0);
    EXPECT_NE(std::string(e.what()).find("test.yaml:2:"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("epsilon"), std::string::npos) << e.what();
}

TEST(Config, UnknownKeyIsRejected) {
    const auto e = parse_error(std::string(kInlineModel) + "simulate:\n  t_end: 5\n  colour: red\n");
    EXPECT_EQ(e.line(), 16);
    EXPECT_NE(std::string(e.what()).find("simulate.colour"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("unknown key"), std::string::npos);
}

TEST(Config, ValueErrors) {
    const std::string m = kInlineModel;
    EXPECT_EQ(parse_error(m + "domain: {y: [-1, 5]}\n").field(), "domain.y");
    EXPECT_EQ(parse_error(m + "validate: {grid: 10}\n").field(), "validate.grid");
    EXPECT_EQ(parse_error(m + "simulate: {t_end: -1}\n").field(), "simulate.t_end");
    EXPECT_EQ(parse_error(m + "simulate: {mode: sideways}\n").field(), "simulate.mode");
    EXPECT_EQ(parse_error(m + "simulate: {epsilon_ladder: [0.1, 2]}\n").field(), "simulate.epsilon_ladder[1]");
    EXPECT_EQ(parse_error(m + "output: {formats: [pdf]}\n").field(), "output.formats");
    EXPECT_EQ(parse_error("domain: {y: [0, 5]}\n").reason(), "missing 'model'");
    EXPECT_EQ(parse_error("").reason(), "empty configuration");
}

TEST(Config, SyntaxErrorCarriesAPosition) {
    const auto e = parse_error("model: [1, 2\n");
    EXPECT_GT(e.line(), 0);
}

TEST(Config, MissingIncludeIsAConfigError) {
    const auto e = parse_error("model: does/not/exist.yaml\n");
    EXPECT_NE(std::string(e.what()).find("cannot load"), std::string::npos);
}

TEST(Config, StructuralModelErrorsAreConfigErrors) {
    std::string text = kInlineModel;
    text.replace(text.find("i_y: 0.3"), 8, "i_y: 1.2");
    const auto e = parse_error(text);
    EXPECT_NE(std::string(e.what()).find("i_y"), std::string::npos) << e.what();
}
