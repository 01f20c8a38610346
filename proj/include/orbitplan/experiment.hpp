#pragma once

// Experiment orchestration: JSON configs, per-orbit evolution runs, result
// manifests, fitness histories and sampled orbit traces.
//
// Angles are degrees in config files and radians everywhere else; the
// conversion happens only in this layer.

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "orbitplan/evolution.hpp"

namespace orbitplan {

inline constexpr std::string_view kToolName = "orbitplan";
inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr std::size_t kTraceSamplesPerPeriod = 360;

// Validation failure; what() names the offending field.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An initial orbit as written in a config file (angles in degrees).
struct InitialOrbit {
    std::string name;
    double sma_km = 0.0;
    double eccentricity = 0.0;
    double inclination_deg = 0.0;
    double raan_deg = 0.0;
    double arg_periapsis_deg = 0.0;
    double true_anomaly_deg = 0.0;

    KeplerianElements to_elements() const;

    friend bool operator==(const InitialOrbit&, const InitialOrbit&) = default;
};

struct ExperimentConfig {
    std::vector<InitialOrbit> orbits;
    EvolutionConfig evolution;
    std::string output_dir = "results";

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// The four non-polar, non-circular starting orbits used by the bundled
// configs.
std::vector<InitialOrbit> default_orbits();
ExperimentConfig default_experiment();

// Parses and validates. Missing keys take their defaults; unknown keys and
// invalid values raise ConfigError.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

// Both radians and degrees for the angular fields.
nlohmann::json elements_to_json(const KeplerianElements& k);

// One polyline sample per (period / samples) seconds over one orbit period,
// propagated directly from `start`. Hyperbolic orbits use 2 pi sqrt(|a|^3/mu)
// as the span.
std::vector<StateVector> sample_trace(const StateVector& start, const GravModel& g,
                                      std::size_t samples = kTraceSamplesPerPeriod);
std::string trace_csv(const std::vector<StateVector>& trace);

struct RunSummary {
    std::string name;
    EvolutionResult result;
    double seconds = 0.0;
};

struct PlanOutput {
    std::vector<RunSummary> runs;
    std::filesystem::path manifest_path;
};

// Runs every configured orbit and writes, under output_dir:
//   manifest.json, timings.json and per orbit <name>.genome.txt,
//   <name>.history.csv, <name>.initial.csv, <name>.final.csv.
// Throws ConfigError, or InfeasibleInitialOrbit before any run starts.
PlanOutput run_plan(const ExperimentConfig& config, const std::filesystem::path& output_dir,
                    unsigned threads = 1);

// Writes through a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

struct GenomeEvaluation {
    SimOutcome outcome;
    double fitness = 0.0;
};

GenomeEvaluation evaluate_genome(const ManeuverSequence& genome, const InitialOrbit& orbit,
                                 const SimParams& sim, const Objective& objective);

// "sma_km,eccentricity,inclination_deg,raan_deg,arg_periapsis_deg,true_anomaly_deg".
InitialOrbit parse_orbit_spec(std::string_view spec);

}  // namespace orbitplan
