#pragma once

#include <string>
#include <string_view>

#include "orbitplan/genome.hpp"

namespace orbitplan {

enum class ObjectiveKind {
    PolarCircular,  // |i - pi/2| + e
    SmaCircular,    // |a - target| / target + e
    RaanCircular,   // wrapped distance of raan from 0, plus e
};

// "polar-circular", "sma-circular", "raan-circular".
std::string_view to_string(ObjectiveKind kind);
// Throws std::invalid_argument for unknown names.
ObjectiveKind parse_objective_kind(std::string_view name);

struct Objective {
    ObjectiveKind kind = ObjectiveKind::PolarCircular;
    double target_sma = 15000.0;       // km, SmaCircular only
    double infeasible_penalty = 1e3;

    void validate() const;

    friend bool operator==(const Objective&, const Objective&) = default;
};

// Fitness of a final orbit, lower is better and zero is an exact hit.
double fitness(const KeplerianElements& k, const Objective& obj);

// Infeasible outcomes score obj.infeasible_penalty.
double fitness(const SimOutcome& outcome, const Objective& obj);

}  // namespace orbitplan
