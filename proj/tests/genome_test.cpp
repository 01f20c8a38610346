#include <array>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "orbitplan/genome.hpp"

using namespace orbitplan;

namespace {

const GravModel kEarth{};

StateVector circular_equatorial_7000() {
    return {{7000.0, 0.0, 0.0}, {0.0, std::sqrt(kEarthMu / 7000.0), 0.0}, 0.0};
}

StateVector generic_orbit() {
    return state_from_elements({12000.0, 0.1, 1.2, 0.3, 2.0, 1.0}, kEarth);
}

ManeuverSequence idle(std::size_t n) { return ManeuverSequence(std::vector<Maneuver>(n, Maneuver::Idle)); }

}  // namespace

TEST(ManeuverDirection, SignedAxisBijection) {
    const std::array<Vec3, 6> expected = {
        Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}, Vec3{-1, 0, 0}, Vec3{0, -1, 0}, Vec3{0, 0, -1}};
    for (int k = 1; k <= 6; ++k) {
        EXPECT_EQ(maneuver_direction(static_cast<Maneuver>(k)), expected[k - 1]);
    }
    for (int k = 1; k <= 3; ++k) {
        const Vec3 sum = maneuver_direction(static_cast<Maneuver>(k)) +
                         maneuver_direction(static_cast<Maneuver>(k + 3));
        EXPECT_EQ(sum, (Vec3{0, 0, 0}));
    }
    EXPECT_EQ(maneuver_direction(Maneuver::Idle), (Vec3{0, 0, 0}));
}

TEST(ManeuverSequence, TextForm) {
    const auto seq = ManeuverSequence::parse("0123456");
    ASSERT_EQ(seq.size(), 7u);
    EXPECT_EQ(seq[3], Maneuver::PlusZ);
    EXPECT_EQ(seq.to_string(), "0123456");
    EXPECT_EQ(seq.impulse_count(), 6u);
    EXPECT_THROW(ManeuverSequence::parse(""), std::invalid_argument);
    EXPECT_THROW(ManeuverSequence::parse("0127"), std::invalid_argument);
    EXPECT_THROW(ManeuverSequence::parse("01a"), std::invalid_argument);
}

TEST(RandomSequence, ContractAndDeterminism) {
    Rng a(1);
    Rng b(1);
    const auto s1 = random_sequence(a, 30);
    const auto s2 = random_sequence(b, 30);
    ASSERT_EQ(s1.size(), 30u);
    for (const auto g : s1.genes()) EXPECT_LE(static_cast<int>(g), 6);
    EXPECT_EQ(s1, s2);
    EXPECT_THROW(random_sequence(a, 0), std::invalid_argument);
}

TEST(RandomSequence, SymbolFrequencies) {
    Rng rng(2024);
    constexpr std::uint64_t draws = 100000;
    std::array<std::uint64_t, 7> counts{};
    const auto seq = random_sequence(rng, draws);
    for (const auto g : seq.genes()) ++counts[static_cast<int>(g)];
    for (const auto c : counts) EXPECT_TRUE(oracle::within_3_sigma(c, draws, 1.0 / 7.0)) << c;
}

TEST(SeededSequence, DegenerateProbabilities) {
    Rng rng(3);
    const auto seed = random_sequence(rng, 30);
    EXPECT_EQ(seeded_sequence(rng, seed, 1.0), seed);

    // p_keep = 0 ignores the seed entirely.
    constexpr std::uint64_t trials = 100000;
    const auto all_threes = ManeuverSequence(std::vector<Maneuver>(1, Maneuver::PlusZ));
    std::array<std::uint64_t, 7> counts{};
    for (std::uint64_t i = 0; i < trials; ++i) ++counts[static_cast<int>(seeded_sequence(rng, all_threes, 0.0)[0])];
    for (const auto c : counts) EXPECT_TRUE(oracle::within_3_sigma(c, trials, 1.0 / 7.0)) << c;

    EXPECT_THROW(seeded_sequence(rng, seed, 1.5), std::invalid_argument);
    EXPECT_THROW(seeded_sequence(rng, seed, -0.1), std::invalid_argument);
}

TEST(SeededSequence, HalfKeepMatchRate) {
    Rng rng(4);
    constexpr std::uint64_t trials = 100000;
    const auto seed = ManeuverSequence::parse("5");
    std::uint64_t matches = 0;
    for (std::uint64_t i = 0; i < trials; ++i) matches += seeded_sequence(rng, seed, 0.5)[0] == seed[0];
    EXPECT_TRUE(oracle::within_3_sigma(matches, trials, 0.5 + 0.5 / 7.0)) << matches;
}

TEST(Simulate, AllIdlePreservesElements) {
    const auto initial = generic_orbit();
    const auto k0 = elements_from_state(initial, kEarth);
    const auto out = simulate(initial, idle(30), SimParams{});
    ASSERT_TRUE(out.feasible);
    EXPECT_NEAR(out.final_elements.semi_major_axis, k0.semi_major_axis, 1e-9 * k0.semi_major_axis);
    EXPECT_NEAR(out.final_elements.eccentricity, k0.eccentricity, 1e-9 * k0.eccentricity);
    EXPECT_NEAR(out.final_elements.inclination, k0.inclination, 1e-9);
    EXPECT_NEAR(out.final_elements.raan, k0.raan, 1e-9);
    EXPECT_NEAR(out.final_elements.arg_periapsis, k0.arg_periapsis, 1e-9);
    EXPECT_DOUBLE_EQ(out.final_state.epoch, 30 * 1200.0);
    EXPECT_EQ(out.steps_executed, 30u);
}

TEST(Simulate, SinglePlusZImpulseTiltsThePlane) {
    auto genes = std::vector<Maneuver>(30, Maneuver::Idle);
    genes[0] = Maneuver::PlusZ;
    const auto out = simulate(circular_equatorial_7000(), ManeuverSequence(genes), SimParams{});
    ASSERT_TRUE(out.feasible);
    const double expected = std::atan(0.1 / std::sqrt(kEarthMu / 7000.0));
    EXPECT_NEAR(out.final_elements.inclination, expected, 1e-12);
    EXPECT_NEAR(out.final_elements.inclination, 0.013251, 5e-7);
}

TEST(Simulate, MatchesHandRolledLoopBitwise) {
    Rng rng(77);
    const SimParams params{};
    for (int n = 0; n < 50; ++n) {
        const auto seq = random_sequence(rng, 30);
        const auto out = simulate(generic_orbit(), seq, params);
        if (!out.feasible) continue;
        StateVector s = generic_orbit();
        for (std::size_t i = 0; i < seq.size(); ++i) {
            if (seq[i] != Maneuver::Idle) s = apply_impulse(s, maneuver_direction(seq[i]), params.dv_magnitude);
            s = propagate(s, params.step_duration, params.grav);
        }
        EXPECT_EQ(out.final_state, s);
        EXPECT_EQ(out.final_elements, elements_from_state(s, params.grav));
    }
}

TEST(Simulate, IsDeterministic) {
    Rng rng(8);
    const auto seq = random_sequence(rng, 30);
    const auto a = simulate(generic_orbit(), seq, SimParams{});
    const auto b = simulate(generic_orbit(), seq, SimParams{});
    EXPECT_EQ(a.final_state, b.final_state);
    EXPECT_EQ(a.final_elements, b.final_elements);
    EXPECT_EQ(a.feasible, b.feasible);
    EXPECT_EQ(a.infeasibility_reason, b.infeasibility_reason);
}

TEST(Simulate, HaltsBelowPeriapsisFloor) {
    // Repeated retrograde burns from a 7000 km circular orbit drop the
    // periapsis under 6578 km within a few impulses.
    const auto seq = ManeuverSequence::parse(std::string(30, '5'));
    SimParams params;
    params.step_duration = 1.0;
    const auto out = simulate(circular_equatorial_7000(), seq, params);
    EXPECT_FALSE(out.feasible);
    EXPECT_EQ(out.infeasibility_reason, Infeasibility::SubPeriapsis);
    EXPECT_GT(out.steps_executed, 0u);
    EXPECT_LT(out.steps_executed, 30u);
}

TEST(Simulate, TotalImpulseEqualsExecutedBurns) {
    Rng rng(12);
    SimParams params;
    params.dv_magnitude = 0.4;
    int halted = 0;
    for (int n = 0; n < 40; ++n) {
        const auto seq = random_sequence(rng, 30);
        const auto initial = circular_equatorial_7000();
        const auto out = simulate(initial, seq, params);
        halted += !out.feasible;
        // Replay the executed prefix, summing the applied velocity changes.
        StateVector s = initial;
        double total = 0.0;
        std::size_t burns = 0;
        for (std::size_t i = 0; i < out.steps_executed; ++i) {
            if (seq[i] != Maneuver::Idle) {
                const auto after = apply_impulse(s, maneuver_direction(seq[i]), params.dv_magnitude);
                total += (after.velocity - s.velocity).norm();
                s = after;
                ++burns;
            }
            if (i + 1 < out.steps_executed || out.feasible) s = propagate(s, params.step_duration, params.grav);
        }
        EXPECT_NEAR(total, params.dv_magnitude * static_cast<double>(burns), 1e-12);
        EXPECT_EQ(out.final_state, s);
    }
    EXPECT_GT(halted, 0);
}

TEST(Simulate, InfeasibleInitialState) {
    const StateVector low{{6500.0, 0.0, 0.0}, {0.0, std::sqrt(kEarthMu / 6500.0), 0.0}, 0.0};
    const auto out = simulate(low, idle(30), SimParams{});
    EXPECT_FALSE(out.feasible);
    EXPECT_EQ(out.infeasibility_reason, Infeasibility::SubPeriapsis);
    EXPECT_EQ(check_state(low, kEarth), Infeasibility::SubPeriapsis);

    const StateVector radial{{7000.0, 0.0, 0.0}, {3.0, 0.0, 0.0}, 0.0};
    EXPECT_EQ(check_state(radial, kEarth), Infeasibility::Degenerate);
    const StateVector parabolic{{7000.0, 0.0, 0.0}, {0.0, std::sqrt(2.0 * kEarthMu / 7000.0), 0.0}, 0.0};
    EXPECT_EQ(check_state(parabolic, kEarth), Infeasibility::Parabolic);
}

TEST(SimParams, Validation) {
    EXPECT_NO_THROW(SimParams{}.validate());
    SimParams p;
    p.dv_magnitude = -1.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = SimParams{};
    p.step_duration = 0.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
}
