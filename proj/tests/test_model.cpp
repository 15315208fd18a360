#include <gtest/gtest.h>

#include <islm/model.hpp>
#include <islm/presets.hpp>

#include "oracles.hpp"

using namespace islm;

namespace {

// Reference block below the first skirt (i < 0.03): E = -1 + 0.25 Y - 15 i.
constexpr double kLinearRegion = 0.02;

}  // namespace

TEST(ShortRate, SubtractsPremiumAndAddsInflation) {
    ModelParams p;
    p.maturity_premium = 0.03;
    p.expected_inflation = 0.01;
    EXPECT_DOUBLE_EQ(short_rate(0.05, p), 0.03);
    EXPECT_DOUBLE_EQ(short_rate(-0.02, p), -0.04);
    EXPECT_DOUBLE_EQ(short_rate(0.0, presets::reference_params()), 0.0);
}

TEST(ExcessGoods, HandValues) {
    const auto s = presets::reference();
    // I - S = 1.66 - 0.2 Y - 10 R
    EXPECT_NEAR(excess_goods(0.0, 0.0, s), 1.66, 1e-15);
    EXPECT_NEAR(excess_goods(5.0, 0.1, s), -0.34, 1e-14);
    EXPECT_NEAR(excess_goods(8.3, 0.0, s), 0.0, 1e-14);
}

TEST(ExcessGoods, NegativeIncomeIsADomainError) {
    const auto s = presets::reference();
    EXPECT_THROW((void)excess_goods(-1e-9, 0.0, s), DomainError);
    EXPECT_THROW((void)excess_money(-1.0, 0.0, s), DomainError);
}

TEST(ExcessMoney, LinearRegionHandValues) {
    const auto s = presets::reference();
    EXPECT_NEAR(excess_money(4.0, 0.0, s), 0.0, 1e-14);
    EXPECT_NEAR(excess_money(6.0, kLinearRegion, s), 0.2, 1e-14);
    EXPECT_NEAR(excess_money(0.0, -0.1, s), 0.5, 1e-14);
    EXPECT_DOUBLE_EQ(excess_money_dr(kLinearRegion, s), -15.0);
    EXPECT_DOUBLE_EQ(excess_money_dy(s), 0.25);
}

TEST(ExcessMoney, MatchesQuadratureOracle) {
    for (const auto& s : {presets::reference(), presets::twice_bent(), presets::thrice_bent()}) {
        for (int k = 0; k <= 400; ++k) {
            const double r = -0.2 + 0.6 * k / 400.0;
            EXPECT_NEAR(excess_money(7.0, r, s), oracle::excess_money(s, 7.0, r), 1e-12) << "r=" << r;
            EXPECT_NEAR(excess_money_dr(r, s), oracle::excess_money_dr(s, r), 1e-12) << "r=" << r;
        }
    }
}

TEST(MoneyProfile, SlopesVanishAtWindowEdges) {
    const auto s = presets::reference();
    for (double i : {0.04, 0.08}) {
        EXPECT_EQ(s.money.demand_di(i), 0.0) << i;
        EXPECT_EQ(s.money.supply_di(i), 0.0) << i;
    }
}

TEST(MoneyProfile, SignPatternAroundTheWindow) {
    const auto s = presets::reference();
    const auto& m = s.money;
    for (double i : {-0.1, 0.0, 0.025, 0.035, 0.085, 0.095, 0.3}) {
        EXPECT_LT(m.demand_di(i), 0.0) << i;
        EXPECT_GT(m.supply_di(i), 0.0) << i;
        EXPECT_LT(excess_money_dr(i, s), 0.0) << i;
    }
    for (double i : {0.041, 0.05, 0.06, 0.079}) {
        EXPECT_GT(m.demand_di(i), 0.0) << i;
        EXPECT_LT(m.supply_di(i), 0.0) << i;
        EXPECT_GT(excess_money_dr(i, s), 0.0) << i;
        EXPECT_TRUE(m.in_window(i));
    }
    EXPECT_FALSE(m.in_window(0.04));
    EXPECT_FALSE(m.in_window(0.08));
}

TEST(MoneyProfile, ProfilesStartAtZero) {
    const auto s = presets::thrice_bent();
    EXPECT_NEAR(s.money.demand(0.0, 0.0), s.money.l0(), 1e-15);
    EXPECT_NEAR(s.money.supply(0.0, 0.0), s.money.m0(), 1e-15);
}

TEST(MoneyProfile, ValueIsTheIntegralOfTheSlope) {
    const auto s = presets::thrice_bent();
    const auto m = oracle::money_of(s);
    for (double i : {0.02, 0.045, 0.0799, 0.115, 0.2, 0.25}) {
        const double want = oracle::integrate([&](double x) { return oracle::slope_at(m, x, true); }, 0.0, i,
                                              oracle::breakpoints(m), 16);
        EXPECT_NEAR(s.money.demand(0.0, i) - s.money.l0(), want, 1e-12) << i;
    }
}

TEST(BuildMoney, RejectsBadShapes) {
    const auto build = [](std::vector<TrapWindow> w, double skirt = 0.25, double l_slope = 10.0) {
        return build_three_phase_money(0.5, 0.25, l_slope, 5.0, 1.0, 0.0, std::move(w), skirt);
    };
    const auto field = [&](auto&& fn) {
        try {
            fn();
        } catch (const ModelError& e) {
            return e.field();
        }
        return std::string("<no throw>");
    };
    EXPECT_EQ(field([&] { build({}, 0.0); }), "skirt_fraction");
    EXPECT_EQ(field([&] { build({}, 0.25, 0.0); }), "l_slope");
    EXPECT_EQ(field([&] { build({{0.0, 0.08, 8, 6}}); }), "windows[0].p");
    EXPECT_EQ(field([&] { build({{0.08, 0.04, 8, 6}}); }), "windows[0].q");
    EXPECT_EQ(field([&] { build({{0.04, 0.08, 1e-12, 6}}); }), "windows[0].amp_l");
    EXPECT_EQ(field([&] { build({{0.04, 0.08, 8, 0}}); }), "windows[0].amp_m");
    // Second window starts inside the first one's exit skirt.
    EXPECT_EQ(field([&] { build({{0.04, 0.08, 8, 6}, {0.085, 0.12, 8, 6}}); }), "windows[1]");
    EXPECT_EQ(field([&] { build({{0.10, 0.12, 8, 6}, {0.04, 0.08, 8, 6}}); }), "windows[1]");
}

TEST(ValidateSpec, NamesTheOffendingField) {
    const auto field = [](ModelSpec s) {
        try {
            validate_spec(s);
        } catch (const ModelError& e) {
            return e.field();
        }
        return std::string("<valid>");
    };
    EXPECT_EQ(field(presets::reference()), "<valid>");
    auto s = presets::reference();
    s.params.epsilon = 0.0;
    EXPECT_EQ(field(s), "epsilon");
    s = presets::reference();
    s.params.epsilon = 1.5;
    EXPECT_EQ(field(s), "epsilon");
    s = presets::reference();
    s.params.m_stock = -1.0;
    EXPECT_EQ(field(s), "m_stock");
    s = presets::reference();
    s.is_block.i_y = 0.6;
    EXPECT_EQ(field(s), "i_y");
    s = presets::reference();
    s.is_block.s_r = -1.0;
    EXPECT_EQ(field(s), "s_r");
    s = presets::reference();
    s.money = build_three_phase_money(0.5, 0.75, 10, 5, 1, 0, {});
    EXPECT_EQ(field(s), "m_y");
}

TEST(Params, SlowFastThreshold) {
    ModelParams p;
    p.epsilon = 1e-3;
    EXPECT_TRUE(p.slow_fast());
    p.epsilon = 0.01;
    EXPECT_FALSE(p.slow_fast());
}

TEST(InflationShift, MovesExcessMoneyByExactlyTheShift) {
    auto s = presets::reference();
    auto t = s;
    t.params.expected_inflation += 0.03;
    for (double r : {-0.1, 0.01, 0.05, 0.07, 0.2})
        EXPECT_NEAR(excess_money(5.0, r - 0.03, t), excess_money(5.0, r, s), 1e-12) << r;
}
