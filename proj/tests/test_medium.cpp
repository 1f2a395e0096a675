#include "skewlab/error.hpp"
#include "skewlab/medium.hpp"
#include "skewlab/medium_json.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace skewlab;
using namespace skewlab::testing;

TEST(ValidateModel, SingleInterfaceIsClean) {
    const auto spec =
        piecewise_constant_spec({-1.0, 1.0}, {0.25, 4.0}, {lambda_interface(0.0, 2.0 / 3.0)}, {1.0, 2.0}, {1.0, 1.0});
    const auto report = validate_model(spec);
    EXPECT_TRUE(report.ok()) << report.summary();
    EXPECT_TRUE(report.capacity_continuous);
    EXPECT_NEAR(report.lambda_decay_sum, 0.5, 1e-15);
}

TEST(ValidateModel, DiffusionVanishingInsidePiece) {
    auto spec = uniform_spec(1.0, 1.0, -1.0, 1.0);
    spec.pieces[0].diffusion = Cubic{{0.0, 0.0, 1.0, 0.0}};  // D = x^2
    const auto report = validate_model(spec);
    EXPECT_TRUE(report.has("diffusion-bound")) << report.summary();
}

TEST(ValidateModel, InterfacesOutOfOrder) {
    MediumSpec spec = piecewise_constant_spec({-1.0, 1.0}, {0.5, 2.0},
                                              {lambda_interface(0.0, 0.5), lambda_interface(0.5, 0.5)},
                                              {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0});
    std::swap(spec.interfaces[0], spec.interfaces[1]);
    EXPECT_TRUE(validate_model(spec).has("interface-order"));
}

TEST(ValidateModel, LambdaRangeIsOpen) {
    for (double lam : {0.0, 1.0, -0.2, 1.5}) {
        const auto spec =
            piecewise_constant_spec({-1.0, 1.0}, {0.5, 2.0}, {lambda_interface(0.0, lam)}, {1.0, 1.0}, {1.0, 1.0});
        const auto report = validate_model(spec);
        ASSERT_TRUE(report.has("lambda-range")) << lam;
        EXPECT_NE(report.summary().find("(0,1)"), std::string::npos);
    }
}

TEST(ValidateModel, LambdaMustAgreeWithBetas) {
    Interface itf = beta_interface(0.0, 1.0, 1.0);
    itf.lambda = 2.0 / 3.0;
    auto spec = piecewise_constant_spec({-1.0, 1.0}, {0.5, 4.0}, {itf}, {1.0, 2.0}, {1.0, 1.0});
    EXPECT_TRUE(validate_model(spec).ok());
    spec.interfaces[0].lambda = 2.0 / 3.0 + 1e-9;
    EXPECT_TRUE(validate_model(spec).has("lambda-beta-mismatch"));
}

TEST(ValidateModel, StructuralViolations) {
    auto spec = two_diffusivity_spec();
    spec.pieces.pop_back();
    EXPECT_TRUE(validate_model(spec).has("piece-count"));

    spec = two_diffusivity_spec();
    spec.pieces[1].left = 0.1;
    EXPECT_TRUE(validate_model(spec).has("piece-endpoints"));

    spec = two_diffusivity_spec();
    spec.interfaces[0].beta_plus.reset();
    EXPECT_TRUE(validate_model(spec).has("interface-parameters-missing"));

    spec = two_diffusivity_spec();
    spec.bounds = {2.0, 1.0};
    EXPECT_TRUE(validate_model(spec).has("bounds-range"));

    spec = two_diffusivity_spec();
    spec.interfaces[0].beta_minus = -1.0;
    EXPECT_TRUE(validate_model(spec).has("beta-positive"));

    spec = two_diffusivity_spec();
    spec.pieces[1].capacity = Cubic::constant(5.0);
    EXPECT_TRUE(validate_model(spec).has("capacity-bound"));
}

TEST(ValidateModel, RecordsCapacityJump) {
    const auto report = validate_model(capacity_jump_spec());
    EXPECT_TRUE(report.ok());
    EXPECT_FALSE(report.capacity_continuous);
}

TEST(ValidateModel, IsIdempotent) {
    RandomMedia media(11);
    for (int i = 0; i < 50; ++i) {
        auto spec = media.next();
        spec.pieces[0].diffusion.c[0] = i % 7 == 0 ? 0.01 : spec.pieces[0].diffusion.c[0];
        const auto a = validate_model(spec);
        const auto b = validate_model(spec);
        EXPECT_EQ(a.summary(), b.summary());
        EXPECT_EQ(a.violations.size(), b.violations.size());
    }
}

TEST(CoeffAt, OneSidedValues) {
    const auto spec = two_diffusivity_spec();
    EXPECT_EQ(coeff_at(spec, 0.0, Side::left).diffusion, 1.0);
    EXPECT_EQ(coeff_at(spec, 0.0, Side::right).diffusion, 2.0);
    EXPECT_EQ(coeff_at(spec, -3.0, Side::left).diffusion, 1.0);
    EXPECT_EQ(coeff_at(spec, 3.0, Side::right).diffusion, 2.0);
    EXPECT_THROW((void)coeff_at(spec, 3.5, Side::left), DomainError);

    auto linear = uniform_spec(2.0, 1.0, -1.0, 1.0);
    EXPECT_EQ(coeff_at(linear, 0.3, Side::left).diffusion, 2.0);
    linear.pieces[0].diffusion = Cubic{{1.0, 1.0, 0.0, 0.0}};
    EXPECT_DOUBLE_EQ(coeff_at(linear, 0.5, Side::left).diffusion, 1.5);
    EXPECT_DOUBLE_EQ(coeff_at(linear, 0.5, Side::right).diffusion, 1.5);
}

TEST(DeriveLambdas, FromBetaWeights) {
    auto sym = piecewise_constant_spec({-1.0, 1.0}, {0.5, 4.0}, {beta_interface(0.0, 1.0, 1.0)}, {1.0, 1.0},
                                       {1.0, 1.0});
    EXPECT_DOUBLE_EQ(*derive_lambdas(sym).interfaces[0].lambda, 0.5);

    EXPECT_NEAR(*derive_lambdas(two_diffusivity_spec()).interfaces[0].lambda, 2.0 / 3.0, 1e-15);

    // Cross sections A- = 2, A+ = 1 (beta = 1/A), equal diffusivities.
    auto areas = piecewise_constant_spec({-1.0, 1.0}, {0.5, 4.0}, {beta_interface(0.0, 0.5, 1.0)}, {1.0, 1.0},
                                         {1.0, 1.0});
    EXPECT_NEAR(*derive_lambdas(areas).interfaces[0].lambda, 1.0 / 3.0, 1e-15);

    auto missing = areas;
    missing.interfaces[0].beta_plus.reset();
    EXPECT_THROW((void)derive_lambdas(missing), ConfigError);
}

TEST(PhiSequence, NoInterfaces) {
    const Medium m(uniform_spec(1.0, 1.0));
    ASSERT_EQ(m.phi().phi.size(), 1u);
    EXPECT_EQ(m.phi_of_piece(0), 1.0);
}

TEST(PhiSequence, SingleInterfaceCrossSections) {
    const Medium m(piecewise_constant_spec({-1.0, 1.0}, {0.5, 4.0}, {beta_interface(0.0, 0.5, 1.0)}, {1.0, 1.0},
                                           {1.0, 1.0}));
    EXPECT_NEAR(m.phi_of_piece(0), 0.5, 1e-15);
    EXPECT_EQ(m.phi_of_piece(1), 1.0);
    EXPECT_EQ(m.phi().anchor_piece, 1u);
}

TEST(PhiSequence, TwoInterfacesRecurseBothWays) {
    const Medium m(piecewise_constant_spec({-1.0, 1.0}, {0.1, 4.0},
                                           {beta_interface(0.0, 1.0, 2.0), beta_interface(0.5, 1.0, 3.0)},
                                           {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}));
    EXPECT_NEAR(m.phi_of_piece(0), 0.5, 1e-15);
    EXPECT_EQ(m.phi_of_piece(1), 1.0);
    EXPECT_NEAR(m.phi_of_piece(2), 3.0, 1e-14);
}

TEST(PhiSequence, AnchorIsNearestOriginTiesLeft) {
    auto spec = piecewise_constant_spec({-2.0, 2.0}, {0.1, 4.0},
                                        {lambda_interface(-0.5, 0.5), lambda_interface(0.5, 0.5)}, {1.0, 1.0, 1.0},
                                        {1.0, 1.0, 1.0});
    EXPECT_EQ(anchor_interface(spec), 0u);
    spec.interfaces[0].x = -0.7;
    spec.pieces[0].right = spec.pieces[1].left = -0.7;
    EXPECT_EQ(anchor_interface(spec), 1u);
}

TEST(PhiSequence, RandomMediaSatisfyRecursionAndRecoverBetas) {
    RandomMedia media(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const auto spec = media.next();
        const Medium m(spec);
        for (std::size_t j = 0; j < m.interface_count(); ++j) {
            const double x = m.interface_position(j);
            const double dm = m.diffusion(x, Side::left);
            const double dp = m.diffusion(x, Side::right);
            const double lam = m.lambda(j);
            const double expect = dp * (1.0 - lam) / (dm * lam);
            EXPECT_NEAR(m.phi_of_piece(j + 1) / m.phi_of_piece(j), expect, 1e-12 * expect);
            EXPECT_GT(m.phi_of_piece(j), 0.0);
            if (spec.interfaces[j].beta_plus) {
                const double want = *spec.interfaces[j].beta_plus / *spec.interfaces[j].beta_minus;
                EXPECT_NEAR(m.beta_ratio(j), want, 1e-12 * want);
            }
        }
    }
}

TEST(Medium, ConstructorRejectsInvalidSpec) {
    auto spec = two_diffusivity_spec();
    spec.interfaces[0].x = 5.0;
    EXPECT_THROW(Medium{spec}, ConfigError);
}

TEST(Medium, PieceLookupBySide) {
    const Medium m(piecewise_constant_spec({-1.0, 1.0}, {0.1, 4.0},
                                           {lambda_interface(0.0, 0.5), lambda_interface(0.5, 0.5)},
                                           {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}));
    EXPECT_EQ(m.piece_index(-1.0, Side::left), 0u);
    EXPECT_EQ(m.piece_index(0.0, Side::left), 0u);
    EXPECT_EQ(m.piece_index(0.0, Side::right), 1u);
    EXPECT_EQ(m.piece_index(0.25, Side::left), 1u);
    EXPECT_EQ(m.piece_index(0.5, Side::right), 2u);
    EXPECT_EQ(m.piece_index(1.0, Side::right), 2u);
    EXPECT_EQ(m.interface_at(0.5), 1u);
    EXPECT_FALSE(m.interface_at(0.25).has_value());
}

TEST(MediumJson, ParsesSchema) {
    const auto doc = parse_json_text(R"({
      "window": [-1, 1], "bounds": [0.5, 3],
      "interfaces": [{"x": 0, "lambda": 0.25}],
      "pieces": [{"left": -1, "right": 0, "D": [1], "eta": [1, 0.1]},
                 {"left": 0, "right": 1, "D": [2, 0, 0, 0.5], "eta": [1]}]})");
    const auto spec = medium_from_json(doc);
    EXPECT_EQ(spec.window.lo, -1.0);
    EXPECT_EQ(*spec.interfaces[0].lambda, 0.25);
    EXPECT_EQ(spec.pieces[0].capacity.c[1], 0.1);
    EXPECT_EQ(spec.pieces[1].diffusion.c[3], 0.5);
    const auto again = medium_from_json(medium_to_json(spec));
    EXPECT_EQ(again.pieces[1].diffusion.c, spec.pieces[1].diffusion.c);
    EXPECT_EQ(again.interfaces[0].lambda, spec.interfaces[0].lambda);
}

TEST(MediumJson, ErrorsNameTheProblem) {
    try {
        (void)parse_json_text("{\n  \"window\": [1,\n}", "bad.json");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
    try {
        (void)medium_from_json(parse_json_text(R"({"window": [-1, 1], "bounds": [0.5, 2], "interfaces": []})"));
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("'pieces'"), std::string::npos) << e.what();
    }
    EXPECT_THROW((void)medium_from_json(parse_json_text(
                     R"({"window": [-1, 1], "bounds": [0.5, 2], "interfaces": [], "pieces": [], "extra": 1})")),
                 ConfigError);
    EXPECT_THROW((void)medium_from_json(parse_json_text(
                     R"({"window": [-1, 1], "bounds": [0.5, 2], "interfaces": [],
                         "pieces": [{"left": -1, "right": 1, "D": [1, 2, 3, 4, 5], "eta": [1]}]})")),
                 ConfigError);
}
