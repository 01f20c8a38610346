#pragma once

// Maneuver genomes and their evaluation into final orbits.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "orbitplan/orbit.hpp"
#include "orbitplan/random.hpp"

namespace orbitplan {

// One gene: idle or a fixed-magnitude impulse along a signed inertial axis.
enum class Maneuver : std::uint8_t {
    Idle = 0,
    PlusX = 1,
    PlusY = 2,
    PlusZ = 3,
    MinusX = 4,
    MinusY = 5,
    MinusZ = 6,
};

inline constexpr int kManeuverSymbols = 7;
inline constexpr std::size_t kDefaultSequenceLength = 30;

// Unit inertial axis for a non-idle gene; the zero vector for Idle.
Vec3 maneuver_direction(Maneuver m);

// Symbol drawn uniformly over all seven genes.
Maneuver random_maneuver(Rng& rng);

class ManeuverSequence {
public:
    ManeuverSequence() = default;
    explicit ManeuverSequence(std::vector<Maneuver> genes) : genes_(std::move(genes)) {}

    // Parses a string of digits '0'-'6'. Throws std::invalid_argument.
    static ManeuverSequence parse(std::string_view text);

    std::string to_string() const;

    std::size_t size() const { return genes_.size(); }
    Maneuver operator[](std::size_t i) const { return genes_[i]; }
    Maneuver& operator[](std::size_t i) { return genes_[i]; }
    const std::vector<Maneuver>& genes() const { return genes_; }

    std::size_t impulse_count() const;

    friend bool operator==(const ManeuverSequence&, const ManeuverSequence&) = default;

private:
    std::vector<Maneuver> genes_;
};

ManeuverSequence random_sequence(Rng& rng, std::size_t length);

// Copies each gene of `seed` with probability p_keep, otherwise draws a fresh
// uniform gene.
ManeuverSequence seeded_sequence(Rng& rng, const ManeuverSequence& seed, double p_keep);

struct SimParams {
    double dv_magnitude = 0.1;     // km/s per impulse
    double step_duration = 1200.0; // s between maneuvers
    GravModel grav;

    void validate() const;

    friend bool operator==(const SimParams&, const SimParams&) = default;
};

enum class Infeasibility { None, SubPeriapsis, Parabolic, Degenerate };

std::string_view to_string(Infeasibility reason);

struct SimOutcome {
    StateVector final_state;
    KeplerianElements final_elements;
    bool feasible = true;
    Infeasibility infeasibility_reason = Infeasibility::None;
    // Genes whose impulse was applied, including the one that triggered a
    // halt. Equals the sequence length for a feasible run.
    std::size_t steps_executed = 0;
};

// Why `s` would be rejected as an orbit to fly, or None.
Infeasibility check_state(const StateVector& s, const GravModel& g);

// Flies the sequence: per gene, impulse (unless idle) then coast for
// step_duration. Orbit-core failures and sub-floor periapsis halt the run and
// are reported through the outcome rather than thrown.
SimOutcome simulate(const StateVector& initial, const ManeuverSequence& seq, const SimParams& params);

}  // namespace orbitplan
