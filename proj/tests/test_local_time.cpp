#include "skewlab/error.hpp"
#include "skewlab/local_time.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace skewlab;
using namespace skewlab::testing;

namespace {

/// Two paths on the grid of [-1, 1] with h = 0.1: path 0 sits at node 11
/// (x = 0.1) for 0.4, path 1 sits at node 0 for 0.4.
struct HandBuilt {
    Medium medium{uniform_spec(1.0, 1.0, -1.0, 1.0)};
    Grid grid = build_grid(medium, 0.1);
    PathEnsemble ensemble{grid.size(), 0.4, 10, 1, HoldingMode::fixed, 0.1};

    HandBuilt() {
        ensemble.append(PathRecord{11, {0.4}, 11, false});
        ensemble.append(PathRecord{0, {0.4}, 0, true});
    }
};

PathEnsemble run(const MediumSpec& spec, double h, double t, std::size_t paths, std::uint64_t seed,
                 Grid* grid_out = nullptr) {
    const ScaleSpeed s{Medium(spec)};
    const auto chain = chain_parameters(s, build_grid(s.medium(), h));
    if (grid_out) *grid_out = chain.grid;
    return simulate_paths(chain, 0.0, t, paths, seed);
}

}  // namespace

TEST(WindowOccupation, HandBuiltEnsemble) {
    const HandBuilt hb;
    const auto w = window_occupation(hb.ensemble, hb.grid, 0.0, Side::right, 0.2);
    EXPECT_NEAR(w.covered, 0.2, 1e-15);
    EXPECT_NEAR(w.center_offset, 0.1, 1e-15);
    ASSERT_EQ(w.per_path.size(), 2u);
    EXPECT_DOUBLE_EQ(w.per_path[0], 0.4);
    EXPECT_EQ(w.per_path[1], 0.0);
    EXPECT_DOUBLE_EQ(w.mean, 0.2);

    const auto never = window_occupation(hb.ensemble, hb.grid, -0.5, Side::left, 0.2);
    EXPECT_EQ(never.mean, 0.0);
    EXPECT_EQ(never.std_error, 0.0);
}

TEST(WindowOccupation, RejectsBadWindows) {
    const HandBuilt hb;
    EXPECT_THROW((void)window_occupation(hb.ensemble, hb.grid, 0.0, Side::right, 0.0), UsageError);

    const Medium m(two_diffusivity_spec());
    const auto grid = build_grid(m, 0.1);
    const PathEnsemble e(grid.size(), 1.0, 30, 1, HoldingMode::fixed, 0.1);
    EXPECT_THROW((void)window_occupation(e, grid, -0.1, Side::right, 0.3), UsageError);
    EXPECT_THROW((void)window_occupation(e, grid, -0.2, Side::right, 0.17), UsageError);
    EXPECT_NO_THROW((void)window_occupation(e, grid, 0.0, Side::right, 0.3));
    EXPECT_NO_THROW((void)window_occupation(e, grid, 0.0, Side::left, 0.3));
}

TEST(NltEstimate, HandBuiltConstantAcrossWindows) {
    const HandBuilt hb;
    const auto est = nlt_estimate(hb.ensemble, hb.grid, 0.0, Side::right, {0.2, 0.1});
    ASSERT_EQ(est.values.size(), 2u);
    EXPECT_NEAR(est.values[0], 1.0, 1e-14);
    EXPECT_NEAR(est.values[1], 1.0, 1e-14);
    EXPECT_NEAR(est.value, 1.0, 1e-13);
    EXPECT_NEAR(est.per_path[0], 2.0, 1e-13);
    EXPECT_NEAR(est.per_path[1], 0.0, 1e-13);
    EXPECT_THROW((void)nlt_estimate(hb.ensemble, hb.grid, 0.0, Side::right, {0.1, 0.2}), UsageError);
    EXPECT_THROW((void)nlt_estimate(hb.ensemble, hb.grid, 0.0, Side::right, {}), UsageError);
}

TEST(ConvertLt, Examples) {
    // Right of the interface: q = D / eta = 2/3 and m' = eta / phi = 3.
    const ScaleSpeed s{Medium(capacity_jump_spec())};
    LocalTimeEstimate est;
    est.x = 0.0;
    est.side = Side::right;
    est.values = {3.0};
    est.std_errors = {0.3};
    est.per_path = {3.0, 6.0};
    est.value = 3.0;
    est.std_error = 0.3;
    const auto smlt = convert_lt(est, LocalTimeNotion::smlt, s);
    EXPECT_NEAR(smlt.value, 2.0, 1e-14);
    EXPECT_NEAR(smlt.per_path[1], 4.0, 1e-14);
    const auto dlt = convert_lt(est, LocalTimeNotion::dlt, s);
    EXPECT_NEAR(dlt.value, 1.0, 1e-14);
    EXPECT_NEAR(dlt.std_error, 0.1, 1e-15);
    const auto back = convert_lt(convert_lt(dlt, LocalTimeNotion::smlt, s), LocalTimeNotion::nlt, s);
    EXPECT_NEAR(back.value, 3.0, 1e-12);
    EXPECT_EQ(back.notion, LocalTimeNotion::nlt);

    const ScaleSpeed two{Medium(two_diffusivity_spec())};
    est.side = Side::left;
    EXPECT_NEAR(convert_lt(est, LocalTimeNotion::smlt, two).value, 3.0, 1e-14);
    est.side = Side::right;
    EXPECT_NEAR(convert_lt(est, LocalTimeNotion::smlt, two).value, 6.0, 1e-14);
}

TEST(ConvertLt, RoundTripOnRandomMedia) {
    RandomMedia media(8);
    for (int trial = 0; trial < 30; ++trial) {
        const ScaleSpeed s{Medium(media.next())};
        LocalTimeEstimate est;
        est.x = media.uniform(-1.9, 1.9);
        est.side = trial % 2 ? Side::left : Side::right;
        est.value = media.uniform(0.1, 5.0);
        for (auto a : {LocalTimeNotion::nlt, LocalTimeNotion::smlt, LocalTimeNotion::dlt}) {
            for (auto b : {LocalTimeNotion::nlt, LocalTimeNotion::smlt, LocalTimeNotion::dlt}) {
                auto start = est;
                start.notion = a;
                const auto there = convert_lt(start, b, s);
                EXPECT_NEAR(convert_lt(there, a, s).value, est.value, 1e-12 * est.value);
            }
        }
    }
}

TEST(ParseNotion, KnownAndUnknown) {
    EXPECT_EQ(parse_notion("smlt"), LocalTimeNotion::smlt);
    EXPECT_STREQ(to_string(LocalTimeNotion::dlt), "dlt");
    EXPECT_THROW((void)parse_notion("xlt"), ConfigError);
}

TEST(PredictedRatio, Examples) {
    EXPECT_NEAR(predicted_ratio(Medium(capacity_jump_spec()), 0), 3.0, 1e-14);
    EXPECT_NEAR(predicted_ratio(Medium(two_diffusivity_spec()), 0), 1.0, 1e-14);
    const Medium skew(
        piecewise_constant_spec({-3.0, 3.0}, {0.5, 2.0}, {lambda_interface(0.0, 0.7)}, {1.0, 1.0}, {1.0, 1.0}));
    EXPECT_NEAR(predicted_ratio(skew, 0), 0.7 / 0.3, 1e-14);
    EXPECT_NEAR(cross_section_ratio(skew, 0), 0.7 / 0.3, 1e-14);
}

TEST(PredictedRatio, CrossSectionFormAgreesOnRandomMedia) {
    RandomMedia media(61);
    int interfaces = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Medium m(media.next());
        for (std::size_t j = 0; j < m.interface_count(); ++j, ++interfaces) {
            const double p = predicted_ratio(m, j);
            EXPECT_GT(p, 0.0);
            EXPECT_NEAR(cross_section_ratio(m, j), p, 1e-12 * p);
        }
    }
    EXPECT_GT(interfaces, 50);
}

TEST(EstimateRatio, ZeroLeftOccupationIsAnError) {
    const Medium m(
        piecewise_constant_spec({-1.0, 1.0}, {0.5, 2.0}, {lambda_interface(0.0, 0.5)}, {1.0, 1.0}, {1.0, 1.0}));
    const auto grid = build_grid(m, 0.1);
    PathEnsemble e(grid.size(), 0.4, 10, 1, HoldingMode::fixed, 0.1);
    e.append(PathRecord{12, {0.4}, 12, false});
    EXPECT_THROW((void)estimate_ratio(e, grid, m, 0, {0.3, 0.2}), NumericalError);
    EXPECT_THROW((void)estimate_ratio(e, grid, m, 1, {0.3, 0.2}), UsageError);
}

TEST(EstimateRatio, SymmetricMediumGivesOne) {
    const auto spec =
        piecewise_constant_spec({-3.0, 3.0}, {0.5, 2.0}, {lambda_interface(0.0, 0.5)}, {1.0, 1.0}, {1.0, 1.0});
    Grid grid;
    const auto e = run(spec, 0.02, 0.5, 20000, 11, &grid);
    const auto rep = estimate_ratio(e, grid, Medium(spec), 0, default_epsilons(0.02));
    EXPECT_EQ(rep.predicted, 1.0);
    EXPECT_LT(std::abs(rep.estimated - 1.0), std::max(0.1, rep.half_width));
    EXPECT_LE(rep.per_path_q25, rep.per_path_median);
    EXPECT_LE(rep.per_path_median, rep.per_path_q75);
    EXPECT_EQ(rep.per_path_ratios.size(), rep.per_path_count);
}

TEST(EstimateRatio, SkewMediumWithinTenPercent) {
    const auto spec =
        piecewise_constant_spec({-3.0, 3.0}, {0.5, 2.0}, {lambda_interface(0.0, 0.7)}, {1.0, 1.0}, {1.0, 1.0});
    Grid grid;
    const auto e = run(spec, 0.02, 0.5, 20000, 12, &grid);
    const auto rep = estimate_ratio(e, grid, Medium(spec), 0, default_epsilons(0.02));
    EXPECT_LT(std::abs(rep.estimated / (7.0 / 3.0) - 1.0), 0.1) << rep.estimated;
    EXPECT_GT(rep.half_width, 0.0);
}

TEST(SmltDirect, MatchesConversionOnConstantPieces) {
    Grid grid;
    const auto spec = capacity_jump_spec();
    const auto e = run(spec, 0.05, 0.3, 2000, 4, &grid);
    const ScaleSpeed s{Medium(spec)};
    const auto eps = default_epsilons(0.05);
    for (Side side : {Side::left, Side::right}) {
        const auto direct = smlt_direct_estimate(e, grid, s, 0.0, side, eps);
        const auto conv = convert_lt(nlt_estimate(e, grid, 0.0, side, eps), LocalTimeNotion::smlt, s);
        EXPECT_NEAR(direct.value, conv.value, 1e-12 * std::abs(conv.value));
    }
}

TEST(ContinuityProbe, SmoothPointOfBrownianMotion) {
    Grid grid;
    const auto spec = uniform_spec(1.0, 1.0);
    const auto e = run(spec, 0.02, 0.5, 5000, 9, &grid);
    const ScaleSpeed s{Medium(spec)};
    const auto probe = continuity_probe(e, grid, s, 0.5, default_epsilons(0.02), false);
    EXPECT_LT(std::abs(probe.difference), 3.0 * probe.std_error);
    EXPECT_NEAR(probe.difference, probe.right - probe.left, 1e-15);
}

TEST(LogHistogram, Bins) {
    const auto bins = log_histogram({1.0, 5.0, 50.0, 100.0, 0.0, -2.0}, 2);
    ASSERT_EQ(bins.size(), 2u);
    EXPECT_EQ(bins[0].count, 2u);
    EXPECT_EQ(bins[1].count, 2u);
    EXPECT_DOUBLE_EQ(bins[0].lo, 1.0);
    EXPECT_DOUBLE_EQ(bins[1].hi, 100.0);
    EXPECT_NEAR(bins[0].hi, 10.0, 1e-12);
    EXPECT_TRUE(log_histogram({0.0}, 3).empty());
    EXPECT_EQ(log_histogram({2.0, 2.0}, 3).size(), 1u);
    EXPECT_THROW((void)log_histogram({1.0}, 0), UsageError);
}
