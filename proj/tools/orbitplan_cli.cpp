// orbitplan command line: plan, evaluate, export-plot.
//
// Exit codes: 0 success, 2 usage or validation error, 3 infeasible initial
// orbit (or any other runtime failure).

#include <cstdio>
#include <iostream>
#include <numbers>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "orbitplan/experiment.hpp"
#include "orbitplan/plot.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

void print_elements(const orbitplan::KeplerianElements& k) {
    constexpr double r2d = 180.0 / std::numbers::pi;
    fmt::print("sma_km          {:.6f}\n", k.semi_major_axis);
    fmt::print("eccentricity    {:.9f}\n", k.eccentricity);
    fmt::print("inclination     {:.9f} rad ({:.6f} deg)\n", k.inclination, k.inclination * r2d);
    fmt::print("raan            {:.9f} rad ({:.6f} deg)\n", k.raan, k.raan * r2d);
    fmt::print("arg_periapsis   {:.9f} rad ({:.6f} deg)\n", k.arg_periapsis, k.arg_periapsis * r2d);
    fmt::print("true_anomaly    {:.9f} rad ({:.6f} deg)\n", k.true_anomaly, k.true_anomaly * r2d);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evolutionary impulsive maneuver planner"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_override;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    auto* plan = app.add_subcommand("plan", "Evolve maneuver plans for every orbit in a config");
    plan->add_option("config", config_path, "Experiment config (JSON)")->required();
    plan->add_option("-o,--output", output_override, "Output directory (overrides output_dir)");
    plan->add_option("-j,--threads", threads, "Fitness evaluation threads");

    std::string genome;
    std::string orbit_spec;
    std::string objective_name = "polar-circular";
    orbitplan::Objective objective;
    orbitplan::SimParams sim;
    std::size_t length = orbitplan::kDefaultSequenceLength;
    auto* eval = app.add_subcommand("evaluate", "Fly one genome and print its final orbit and fitness");
    eval->add_option("--genome", genome, "Digits 0-6, one per maneuver slot")->required();
    eval->add_option("--orbit", orbit_spec,
                     "sma_km,eccentricity,inclination_deg,raan_deg,arg_periapsis_deg,true_anomaly_deg")
        ->required();
    eval->add_option("--objective", objective_name, "polar-circular | sma-circular | raan-circular");
    eval->add_option("--target-sma-km", objective.target_sma, "Target for sma-circular");
    eval->add_option("--dv-km-s", sim.dv_magnitude, "Impulse magnitude");
    eval->add_option("--step-s", sim.step_duration, "Seconds between maneuvers");
    eval->add_option("--mu", sim.grav.mu, "Gravitational parameter, km^3/s^2");
    eval->add_option("--min-periapsis-km", sim.grav.min_periapsis, "Periapsis floor");
    eval->add_option("--length", length, "Expected genome length");

    std::string manifest_path;
    std::string which = "final";
    std::string plot_output;
    auto* plot = app.add_subcommand("export-plot", "Render initial or final orbits of a run to SVG");
    plot->add_option("manifest", manifest_path, "manifest.json written by plan")->required();
    plot->add_option("--which", which, "initial | final");
    plot->add_option("-o,--output", plot_output, "SVG file to write")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    if (*plan) {
        orbitplan::ExperimentConfig config;
        try {
            config = orbitplan::load_config(config_path);
        } catch (const orbitplan::ConfigError& e) {
            std::cerr << "config error: " << e.what() << '\n';
            return kExitUsage;
        }
        const std::string out_dir = output_override.empty() ? config.output_dir : output_override;
        try {
            const auto result = orbitplan::run_plan(config, out_dir, threads);
            for (const auto& run : result.runs) {
                fmt::print("{:<12} fitness {:.6f}  genome {}  ({:.1f} s)\n", run.name,
                           run.result.best_fitness, run.result.best_sequence.to_string(), run.seconds);
            }
            fmt::print("manifest: {}\n", result.manifest_path.string());
        } catch (const orbitplan::ConfigError& e) {
            std::cerr << "config error: " << e.what() << '\n';
            return kExitUsage;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitRuntime;
        }
        return 0;
    }

    if (*eval) {
        orbitplan::ManeuverSequence seq;
        orbitplan::InitialOrbit orbit;
        try {
            seq = orbitplan::ManeuverSequence::parse(genome);
            if (seq.size() != length) {
                throw std::invalid_argument(
                    fmt::format("genome has {} genes, expected {}", seq.size(), length));
            }
            orbit = orbitplan::parse_orbit_spec(orbit_spec);
            objective.kind = orbitplan::parse_objective_kind(objective_name);
            objective.validate();
            sim.validate();
        } catch (const std::invalid_argument& e) {
            std::cerr << "usage error: " << e.what() << '\n';
            return kExitUsage;
        }
        try {
            const auto initial = orbitplan::state_from_elements(orbit.to_elements(), sim.grav);
            if (const auto reason = orbitplan::check_state(initial, sim.grav);
                reason != orbitplan::Infeasibility::None) {
                std::cerr << "error: initial orbit is not flyable (" << orbitplan::to_string(reason)
                          << ")\n";
                return kExitRuntime;
            }
            const auto result = orbitplan::evaluate_genome(seq, orbit, sim, objective);
            fmt::print("genome          {}\n", seq.to_string());
            fmt::print("feasible        {}\n", result.outcome.feasible ? "yes" : "no");
            if (!result.outcome.feasible) {
                fmt::print("halt_reason     {}\n", orbitplan::to_string(result.outcome.infeasibility_reason));
            } else {
                print_elements(result.outcome.final_elements);
            }
            fmt::print("objective       {}\n", orbitplan::to_string(objective.kind));
            fmt::print("fitness         {:.9f}\n", result.fitness);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitRuntime;
        }
        return 0;
    }

    if (*plot) {
        try {
            orbitplan::export_plot(manifest_path, orbitplan::parse_trace_set(which), plot_output);
        } catch (const std::invalid_argument& e) {
            std::cerr << "usage error: " << e.what() << '\n';
            return kExitUsage;
        } catch (const orbitplan::PlotError& e) {
            std::cerr << "plot error: " << e.what() << '\n';
            return kExitUsage;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitRuntime;
        }
        fmt::print("wrote {}\n", plot_output);
        return 0;
    }
    return kExitUsage;
}
