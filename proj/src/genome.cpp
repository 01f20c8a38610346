#include "orbitplan/genome.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace orbitplan {

Vec3 maneuver_direction(Maneuver m) {
    switch (m) {
        case Maneuver::Idle: return {0.0, 0.0, 0.0};
        case Maneuver::PlusX: return {1.0, 0.0, 0.0};
        case Maneuver::PlusY: return {0.0, 1.0, 0.0};
        case Maneuver::PlusZ: return {0.0, 0.0, 1.0};
        case Maneuver::MinusX: return {-1.0, 0.0, 0.0};
        case Maneuver::MinusY: return {0.0, -1.0, 0.0};
        case Maneuver::MinusZ: return {0.0, 0.0, -1.0};
    }
    throw std::invalid_argument("invalid maneuver symbol");
}

Maneuver random_maneuver(Rng& rng) {
    return static_cast<Maneuver>(rng.uniform_below(kManeuverSymbols));
}

ManeuverSequence ManeuverSequence::parse(std::string_view text) {
    if (text.empty()) throw std::invalid_argument("genome string is empty");
    std::vector<Maneuver> genes;
    genes.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (ch < '0' || ch > '6') {
            throw std::invalid_argument(
                fmt::format("genome character {} at position {} is not a digit 0-6", ch, i));
        }
        genes.push_back(static_cast<Maneuver>(ch - '0'));
    }
    return ManeuverSequence(std::move(genes));
}

std::string ManeuverSequence::to_string() const {
    std::string out;
    out.reserve(genes_.size());
    for (const Maneuver m : genes_) out.push_back(static_cast<char>('0' + static_cast<int>(m)));
    return out;
}

std::size_t ManeuverSequence::impulse_count() const {
    return static_cast<std::size_t>(
        std::count_if(genes_.begin(), genes_.end(), [](Maneuver m) { return m != Maneuver::Idle; }));
}

ManeuverSequence random_sequence(Rng& rng, std::size_t length) {
    if (length == 0) throw std::invalid_argument("sequence length must be at least 1");
    std::vector<Maneuver> genes(length);
    for (auto& g : genes) g = random_maneuver(rng);
    return ManeuverSequence(std::move(genes));
}

ManeuverSequence seeded_sequence(Rng& rng, const ManeuverSequence& seed, double p_keep) {
    if (!(p_keep >= 0.0 && p_keep <= 1.0)) {
        throw std::invalid_argument("p_keep must lie in [0, 1]");
    }
    std::vector<Maneuver> genes(seed.size());
    for (std::size_t i = 0; i < seed.size(); ++i) {
        genes[i] = rng.bernoulli(p_keep) ? seed[i] : random_maneuver(rng);
    }
    return ManeuverSequence(std::move(genes));
}

void SimParams::validate() const {
    if (!(dv_magnitude >= 0.0)) throw std::invalid_argument("sim.dv_km_s must be non-negative");
    if (!(step_duration > 0.0)) throw std::invalid_argument("sim.step_duration_s must be positive");
    grav.validate();
}

std::string_view to_string(Infeasibility reason) {
    switch (reason) {
        case Infeasibility::None: return "none";
        case Infeasibility::SubPeriapsis: return "sub-periapsis";
        case Infeasibility::Parabolic: return "parabolic";
        case Infeasibility::Degenerate: return "degenerate";
    }
    return "unknown";
}

Infeasibility check_state(const StateVector& s, const GravModel& g) {
    try {
        const KeplerianElements k = elements_from_state(s, g);
        if (k.periapsis_radius() < g.min_periapsis) return Infeasibility::SubPeriapsis;
    } catch (const ParabolicUnsupported&) {
        return Infeasibility::Parabolic;
    } catch (const DegenerateOrbit&) {
        return Infeasibility::Degenerate;
    }
    return Infeasibility::None;
}

SimOutcome simulate(const StateVector& initial, const ManeuverSequence& seq, const SimParams& params) {
    SimOutcome out;
    StateVector state = initial;

    auto halt = [&](Infeasibility reason) {
        out.final_state = state;
        out.feasible = false;
        out.infeasibility_reason = reason;
        return out;
    };

    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (seq[i] != Maneuver::Idle) {
            state = apply_impulse(state, maneuver_direction(seq[i]), params.dv_magnitude);
        }
        out.steps_executed = i + 1;
        // The conic only changes at impulses, so checking here covers the
        // whole coast that follows.
        if (i == 0 || seq[i] != Maneuver::Idle) {
            if (const auto reason = check_state(state, params.grav); reason != Infeasibility::None) {
                return halt(reason);
            }
        }
        try {
            state = propagate(state, params.step_duration, params.grav);
        } catch (const KeplerNonConvergence&) {
            return halt(Infeasibility::Degenerate);
        } catch (const DegenerateOrbit&) {
            return halt(Infeasibility::Degenerate);
        }
    }

    out.final_state = state;
    try {
        out.final_elements = elements_from_state(state, params.grav);
    } catch (const ParabolicUnsupported&) {
        return halt(Infeasibility::Parabolic);
    } catch (const DegenerateOrbit&) {
        return halt(Infeasibility::Degenerate);
    }
    return out;
}

}  // namespace orbitplan
