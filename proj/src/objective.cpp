#include "orbitplan/objective.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace orbitplan {

std::string_view to_string(ObjectiveKind kind) {
    switch (kind) {
        case ObjectiveKind::PolarCircular: return "polar-circular";
        case ObjectiveKind::SmaCircular: return "sma-circular";
        case ObjectiveKind::RaanCircular: return "raan-circular";
    }
    return "unknown";
}

ObjectiveKind parse_objective_kind(std::string_view name) {
    for (const auto kind :
         {ObjectiveKind::PolarCircular, ObjectiveKind::SmaCircular, ObjectiveKind::RaanCircular}) {
        if (name == to_string(kind)) return kind;
    }
    throw std::invalid_argument(fmt::format(
        "unknown objective '{}' (expected polar-circular, sma-circular or raan-circular)", name));
}

void Objective::validate() const {
    if (!(target_sma > 0.0)) throw std::invalid_argument("objective.target_sma_km must be positive");
    // A feasible PolarCircular/RaanCircular score is bounded by pi + e; the
    // penalty has to sit well above anything a bound orbit can reach.
    if (!(infeasible_penalty >= 10.0)) {
        throw std::invalid_argument("objective.infeasible_penalty must be at least 10");
    }
}

double fitness(const KeplerianElements& k, const Objective& obj) {
    switch (obj.kind) {
        case ObjectiveKind::PolarCircular:
            return std::abs(k.inclination - 0.5 * std::numbers::pi) + k.eccentricity;
        case ObjectiveKind::SmaCircular:
            return std::abs(k.semi_major_axis - obj.target_sma) / obj.target_sma + k.eccentricity;
        case ObjectiveKind::RaanCircular: {
            const double raan = wrap_two_pi(k.raan);
            return std::min(raan, kTwoPi - raan) + k.eccentricity;
        }
    }
    throw std::invalid_argument("invalid objective kind");
}

double fitness(const SimOutcome& outcome, const Objective& obj) {
    if (!outcome.feasible) return obj.infeasible_penalty;
    // Feasible hyperbolic finals can score arbitrarily high on the sma term;
    // clamp so infeasible genomes are never preferred.
    const double score = fitness(outcome.final_elements, obj);
    return std::isfinite(score) ? std::min(score, obj.infeasible_penalty) : obj.infeasible_penalty;
}

}  // namespace orbitplan
