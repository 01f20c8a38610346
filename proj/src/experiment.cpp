#include "orbitplan/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace orbitplan {

namespace {

using nlohmann::json;

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Field-path aware reader over one JSON object. Rejects unknown keys so a
// misspelt field never silently falls back to its default.
class ObjectReader {
public:
    ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ConfigError(fmt::format("{} must be a JSON object", name()));
    }

    std::string field(std::string_view key) const {
        return path_.empty() ? std::string(key) : fmt::format("{}.{}", path_, key);
    }

    template <typename T>
    void read(std::string_view key, T& out) {
        seen_.insert(std::string(key));
        const auto it = obj_.find(std::string(key));
        if (it == obj_.end()) return;
        try {
            if constexpr (std::is_floating_point_v<T>) {
                if (!it->is_number()) throw ConfigError("");
                out = it->template get<T>();
                if (!std::isfinite(out)) throw ConfigError("");
            } else if constexpr (std::is_integral_v<T>) {
                if (!it->is_number_integer()) throw ConfigError("");
                if (it->is_number_unsigned()) {
                    out = it->template get<T>();
                } else {
                    const auto v = it->template get<std::int64_t>();
                    if (v < 0) throw ConfigError("");
                    out = static_cast<T>(v);
                }
            } else {
                if (!it->is_string()) throw ConfigError("");
                out = it->template get<T>();
            }
        } catch (const std::exception&) {
            throw ConfigError(fmt::format("{} has an invalid value {}", field(key), it->dump()));
        }
    }

    const json* child(std::string_view key) {
        seen_.insert(std::string(key));
        const auto it = obj_.find(std::string(key));
        return it == obj_.end() ? nullptr : &*it;
    }

    void finish() const {
        for (const auto& [key, value] : obj_.items()) {
            if (!seen_.contains(key)) throw ConfigError(fmt::format("unknown field {}", field(key)));
        }
    }

private:
    std::string name() const { return path_.empty() ? "config" : path_; }

    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

bool valid_name(std::string_view name) {
    if (name.empty() || name.size() > 64) return false;
    for (const char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                        c == '_' || c == '-';
        if (!ok) return false;
    }
    return true;
}

void validate_orbit(const InitialOrbit& o, const std::string& path) {
    if (!valid_name(o.name)) {
        throw ConfigError(fmt::format("{}.name must be 1-64 characters of [A-Za-z0-9_-]", path));
    }
    if (!(o.sma_km > 0.0)) throw ConfigError(fmt::format("{}.sma_km must be positive", path));
    if (!(o.eccentricity >= 0.0 && o.eccentricity < 1.0)) {
        throw ConfigError(fmt::format("{}.eccentricity must lie in [0, 1)", path));
    }
    if (!(o.inclination_deg >= 0.0 && o.inclination_deg <= 180.0)) {
        throw ConfigError(fmt::format("{}.inclination_deg must lie in [0, 180]", path));
    }
}

void validate(const ExperimentConfig& config) {
    if (config.orbits.empty()) throw ConfigError("orbits must list at least one initial orbit");
    std::set<std::string> names;
    for (std::size_t i = 0; i < config.orbits.size(); ++i) {
        const std::string path = fmt::format("orbits[{}]", i);
        validate_orbit(config.orbits[i], path);
        if (!names.insert(config.orbits[i].name).second) {
            throw ConfigError(fmt::format("{}.name '{}' is duplicated", path, config.orbits[i].name));
        }
    }
    if (config.output_dir.empty()) throw ConfigError("output_dir must not be empty");
    try {
        config.evolution.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

std::string history_csv(const EvolutionResult& r) {
    std::string out = "generation,island0_best,island1_best\n";
    for (std::size_t g = 0; g < r.history[0].size(); ++g) {
        out += fmt::format("{},{},{}\n", g + 1, r.history[0][g], r.history[1][g]);
    }
    return out;
}

}  // namespace

KeplerianElements InitialOrbit::to_elements() const {
    KeplerianElements k;
    k.semi_major_axis = sma_km;
    k.eccentricity = eccentricity;
    k.inclination = inclination_deg * kDegToRad;
    k.raan = wrap_two_pi(raan_deg * kDegToRad);
    k.arg_periapsis = wrap_two_pi(arg_periapsis_deg * kDegToRad);
    k.true_anomaly = wrap_two_pi(true_anomaly_deg * kDegToRad);
    return k;
}

std::vector<InitialOrbit> default_orbits() {
    return {
        {"sc1", 10500.0, 0.06, 76.0, 10.0, 40.0, 0.0},
        {"sc2", 11500.0, 0.10, 74.0, 350.0, 120.0, 90.0},
        {"sc3", 13000.0, 0.10, 75.0, 12.0, 250.0, 180.0},
        {"sc4", 16000.0, 0.06, 72.0, 345.0, 300.0, 270.0},
    };
}

ExperimentConfig default_experiment() {
    ExperimentConfig config;
    config.orbits = default_orbits();
    return config;
}

ExperimentConfig parse_config(const json& doc) {
    ExperimentConfig config;
    ObjectReader top(doc, "");
    top.read("output_dir", config.output_dir);

    if (const json* obj = top.child("objective")) {
        ObjectReader r(*obj, "objective");
        std::string kind(to_string(config.evolution.objective.kind));
        r.read("kind", kind);
        try {
            config.evolution.objective.kind = parse_objective_kind(kind);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(fmt::format("objective.kind: {}", e.what()));
        }
        r.read("target_sma_km", config.evolution.objective.target_sma);
        r.read("infeasible_penalty", config.evolution.objective.infeasible_penalty);
        r.finish();
    }

    if (const json* sim = top.child("sim")) {
        ObjectReader r(*sim, "sim");
        r.read("dv_km_s", config.evolution.sim.dv_magnitude);
        r.read("step_duration_s", config.evolution.sim.step_duration);
        r.read("mu_km3_s2", config.evolution.sim.grav.mu);
        r.read("min_periapsis_km", config.evolution.sim.grav.min_periapsis);
        r.finish();
    }

    if (const json* evo = top.child("evolution")) {
        ObjectReader r(*evo, "evolution");
        auto& e = config.evolution;
        r.read("population_size", e.population_size);
        r.read("generations", e.generations);
        r.read("sequence_length", e.sequence_length);
        r.read("mutation_rate", e.mutation_rate);
        r.read("island_interbreed_period", e.island_interbreed_period);
        r.read("stagnation_window", e.stagnation_window);
        r.read("stagnation_epsilon", e.stagnation_epsilon);
        r.read("immigrant_p_keep", e.immigrant_p_keep);
        r.read("elitism_count", e.elitism_count);
        r.read("rng_seed", e.rng_seed);
        r.finish();
    }

    if (const json* orbits = top.child("orbits")) {
        if (!orbits->is_array()) throw ConfigError("orbits must be an array");
        for (std::size_t i = 0; i < orbits->size(); ++i) {
            ObjectReader r((*orbits)[i], fmt::format("orbits[{}]", i));
            InitialOrbit o;
            r.read("name", o.name);
            r.read("sma_km", o.sma_km);
            r.read("eccentricity", o.eccentricity);
            r.read("inclination_deg", o.inclination_deg);
            r.read("raan_deg", o.raan_deg);
            r.read("arg_periapsis_deg", o.arg_periapsis_deg);
            r.read("true_anomaly_deg", o.true_anomaly_deg);
            r.finish();
            config.orbits.push_back(std::move(o));
        }
    }
    top.finish();

    validate(config);
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot read config file {}", path.string()));
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("config file {} is not valid JSON: {}", path.string(), e.what()));
    }
    return parse_config(doc);
}

json to_json(const ExperimentConfig& config) {
    const auto& e = config.evolution;
    json orbits = json::array();
    for (const auto& o : config.orbits) {
        orbits.push_back({{"name", o.name},
                          {"sma_km", o.sma_km},
                          {"eccentricity", o.eccentricity},
                          {"inclination_deg", o.inclination_deg},
                          {"raan_deg", o.raan_deg},
                          {"arg_periapsis_deg", o.arg_periapsis_deg},
                          {"true_anomaly_deg", o.true_anomaly_deg}});
    }
    return {
        {"output_dir", config.output_dir},
        {"objective",
         {{"kind", std::string(to_string(e.objective.kind))},
          {"target_sma_km", e.objective.target_sma},
          {"infeasible_penalty", e.objective.infeasible_penalty}}},
        {"sim",
         {{"dv_km_s", e.sim.dv_magnitude},
          {"step_duration_s", e.sim.step_duration},
          {"mu_km3_s2", e.sim.grav.mu},
          {"min_periapsis_km", e.sim.grav.min_periapsis}}},
        {"evolution",
         {{"population_size", e.population_size},
          {"generations", e.generations},
          {"sequence_length", e.sequence_length},
          {"mutation_rate", e.mutation_rate},
          {"island_interbreed_period", e.island_interbreed_period},
          {"stagnation_window", e.stagnation_window},
          {"stagnation_epsilon", e.stagnation_epsilon},
          {"immigrant_p_keep", e.immigrant_p_keep},
          {"elitism_count", e.elitism_count},
          {"rng_seed", e.rng_seed}}},
        {"orbits", orbits},
    };
}

json elements_to_json(const KeplerianElements& k) {
    constexpr double r2d = 180.0 / std::numbers::pi;
    return {
        {"sma_km", k.semi_major_axis},
        {"eccentricity", k.eccentricity},
        {"inclination_rad", k.inclination},
        {"inclination_deg", k.inclination * r2d},
        {"raan_rad", k.raan},
        {"raan_deg", k.raan * r2d},
        {"arg_periapsis_rad", k.arg_periapsis},
        {"arg_periapsis_deg", k.arg_periapsis * r2d},
        {"true_anomaly_rad", k.true_anomaly},
        {"true_anomaly_deg", k.true_anomaly * r2d},
    };
}

std::vector<StateVector> sample_trace(const StateVector& start, const GravModel& g,
                                      std::size_t samples) {
    const double alpha = 2.0 / start.position.norm() - start.velocity.squared_norm() / g.mu;
    const double span = kTwoPi / (std::sqrt(g.mu) * std::pow(std::abs(alpha), 1.5));
    const double dt = span / static_cast<double>(samples);
    std::vector<StateVector> trace;
    trace.reserve(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        trace.push_back(propagate(start, dt * static_cast<double>(i), g));
    }
    return trace;
}

std::string trace_csv(const std::vector<StateVector>& trace) {
    std::string out = "epoch_s,x_km,y_km,z_km\n";
    for (const auto& s : trace) {
        out += fmt::format("{:.6f},{:.6f},{:.6f},{:.6f}\n", s.epoch, s.position.x, s.position.y,
                           s.position.z);
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error(fmt::format("cannot write {}", tmp.string()));
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw std::runtime_error(fmt::format("short write to {}", tmp.string()));
    }
    std::filesystem::rename(tmp, path);
}

PlanOutput run_plan(const ExperimentConfig& config, const std::filesystem::path& output_dir,
                    unsigned threads) {
    validate(config);
    const auto& grav = config.evolution.sim.grav;

    std::vector<StateVector> initial_states;
    for (const auto& o : config.orbits) {
        StateVector s;
        try {
            s = state_from_elements(o.to_elements(), grav);
        } catch (const std::exception& e) {
            throw InfeasibleInitialOrbit(fmt::format("orbit {}: {}", o.name, e.what()));
        }
        if (const auto reason = check_state(s, grav); reason != Infeasibility::None) {
            throw InfeasibleInitialOrbit(
                fmt::format("orbit {} is not flyable ({})", o.name, to_string(reason)));
        }
        initial_states.push_back(s);
    }

    std::filesystem::create_directories(output_dir);

    PlanOutput output;
    json runs = json::array();
    json timings = json::object();
    for (std::size_t i = 0; i < config.orbits.size(); ++i) {
        const auto& orbit = config.orbits[i];
        const auto t0 = std::chrono::steady_clock::now();
        EvolutionResult result = evolve(initial_states[i], config.evolution, threads);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        const SimOutcome best = simulate(initial_states[i], result.best_sequence, config.evolution.sim);

        const std::string genome_file = orbit.name + ".genome.txt";
        const std::string history_file = orbit.name + ".history.csv";
        const std::string initial_file = orbit.name + ".initial.csv";
        const std::string final_file = orbit.name + ".final.csv";
        write_file_atomic(output_dir / genome_file, result.best_sequence.to_string() + "\n");
        write_file_atomic(output_dir / history_file, history_csv(result));
        write_file_atomic(output_dir / initial_file, trace_csv(sample_trace(initial_states[i], grav)));
        write_file_atomic(output_dir / final_file, trace_csv(sample_trace(best.final_state, grav)));

        json events = json::array();
        for (const auto& ev : result.immigrant_events) {
            events.push_back({{"generation", ev.generation}, {"island", ev.island}});
        }
        runs.push_back({
            {"name", orbit.name},
            {"initial_elements", elements_to_json(orbit.to_elements())},
            {"best_genome", result.best_sequence.to_string()},
            {"best_fitness", result.best_fitness},
            {"feasible", best.feasible},
            {"infeasibility_reason", std::string(to_string(best.infeasibility_reason))},
            {"final_elements", elements_to_json(result.final_elements)},
            {"immigrant_events", events},
            {"files",
             {{"genome", genome_file},
              {"history", history_file},
              {"initial_trace", initial_file},
              {"final_trace", final_file}}},
        });
        timings[orbit.name] = seconds;
        output.runs.push_back({orbit.name, std::move(result), seconds});
    }

    const json manifest = {
        {"tool", std::string(kToolName)},
        {"version", std::string(kToolVersion)},
        {"config", to_json(config)},
        {"runs", runs},
    };
    output.manifest_path = output_dir / "manifest.json";
    write_file_atomic(output.manifest_path, manifest.dump(2) + "\n");
    write_file_atomic(output_dir / "timings.json", timings.dump(2) + "\n");
    return output;
}

GenomeEvaluation evaluate_genome(const ManeuverSequence& genome, const InitialOrbit& orbit,
                                 const SimParams& sim, const Objective& objective) {
    const StateVector initial = state_from_elements(orbit.to_elements(), sim.grav);
    GenomeEvaluation out;
    out.outcome = simulate(initial, genome, sim);
    out.fitness = fitness(out.outcome, objective);
    return out;
}

InitialOrbit parse_orbit_spec(std::string_view spec) {
    std::vector<double> values;
    std::string text(spec);
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size() || !std::isfinite(v)) {
            throw ConfigError(fmt::format("orbit spec value '{}' is not a number", item));
        }
        values.push_back(v);
    }
    if (values.size() != 6) {
        throw ConfigError(
            "orbit spec needs 6 values: sma_km,eccentricity,inclination_deg,raan_deg,"
            "arg_periapsis_deg,true_anomaly_deg");
    }
    InitialOrbit o{"orbit", values[0], values[1], values[2], values[3], values[4], values[5]};
    validate_orbit(o, "orbit");
    return o;
}

}  // namespace orbitplan
