#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "orbitplan/experiment.hpp"
#include "orbitplan/plot.hpp"

using namespace orbitplan;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t line_count(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

class ScratchDir : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("orbitplan_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    fs::path dir_;
};

ExperimentConfig tiny_experiment() {
    auto c = default_experiment();
    c.orbits.resize(2);
    c.evolution.population_size = 8;
    c.evolution.generations = 6;
    c.evolution.elitism_count = 2;
    return c;
}

std::string config_error_for(json doc) {
    try {
        parse_config(doc);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Config, DefaultsRoundTripThroughJson) {
    const auto c = default_experiment();
    EXPECT_EQ(parse_config(to_json(c)), c);
    EXPECT_EQ(c.orbits.size(), 4u);
    EXPECT_EQ(c.evolution.population_size, 100u);
    EXPECT_EQ(c.evolution.generations, 200u);
    EXPECT_EQ(c.evolution.sim.dv_magnitude, 0.1);
}

TEST(Config, ShippedConfigsLoad) {
    for (const auto* name : {"polar_circular", "sma_circular", "raan_circular", "wide_plane_change"}) {
        const auto c = load_config(fs::path(ORBITPLAN_SOURCE_DIR) / "configs" / (std::string(name) + ".json"));
        EXPECT_EQ(c.orbits.size(), 4u) << name;
    }
    const auto polar = load_config(fs::path(ORBITPLAN_SOURCE_DIR) / "configs/polar_circular.json");
    EXPECT_EQ(polar.orbits, default_orbits());
    EXPECT_EQ(polar.evolution, default_experiment().evolution);
}

TEST(Config, ErrorsNameTheField) {
    auto doc = to_json(default_experiment());
    doc["evolution"]["population_size"] = 1;
    EXPECT_NE(config_error_for(doc).find("evolution.population_size"), std::string::npos);

    doc = to_json(default_experiment());
    doc["evolution"]["mutation_rate"] = "high";
    EXPECT_NE(config_error_for(doc).find("evolution.mutation_rate"), std::string::npos);

    doc = to_json(default_experiment());
    doc["sim"]["dv_km_s"] = -0.5;
    EXPECT_NE(config_error_for(doc).find("sim.dv_km_s"), std::string::npos);

    doc = to_json(default_experiment());
    doc["evolution"]["populaton_size"] = 50;
    EXPECT_NE(config_error_for(doc).find("populaton_size"), std::string::npos);

    doc = to_json(default_experiment());
    doc["orbits"][1]["eccentricity"] = 1.2;
    EXPECT_NE(config_error_for(doc).find("orbits[1].eccentricity"), std::string::npos);

    doc = to_json(default_experiment());
    doc["orbits"][2]["name"] = doc["orbits"][0]["name"];
    EXPECT_NE(config_error_for(doc).find("orbits[2].name"), std::string::npos);

    doc = to_json(default_experiment());
    doc["objective"]["kind"] = "circular";
    EXPECT_NE(config_error_for(doc).find("objective.kind"), std::string::npos);
}

TEST(Config, MissingFileIsAConfigError) {
    EXPECT_THROW(load_config("/nonexistent/orbitplan.json"), ConfigError);
}

TEST(OrbitSpec, Parses) {
    const auto o = parse_orbit_spec("10500,0.06,76,10,40,0");
    EXPECT_EQ(o.sma_km, 10500.0);
    EXPECT_EQ(o.inclination_deg, 76.0);
    EXPECT_THROW(parse_orbit_spec("1,2,3"), ConfigError);
    EXPECT_THROW(parse_orbit_spec("1,2,3,4,5,x"), ConfigError);
}

TEST(Trace, OnePeriodOfSamples) {
    const auto start = state_from_elements(default_orbits()[0].to_elements(), GravModel{});
    const auto trace = sample_trace(start, GravModel{});
    ASSERT_EQ(trace.size(), kTraceSamplesPerPeriod);
    const double period = orbital_period(default_orbits()[0].sma_km, GravModel{});
    const double step = period / static_cast<double>(kTraceSamplesPerPeriod);
    EXPECT_NEAR(trace.back().epoch - trace.front().epoch, period - step, 1e-9 * period);
    // One more step closes the loop.
    EXPECT_NEAR((propagate(trace.back(), step, GravModel{}).position - start.position).norm(), 0.0, 1e-6);
    const auto csv = trace_csv(trace);
    EXPECT_EQ(csv.rfind("epoch_s,x_km,y_km,z_km\n", 0), 0u);
    EXPECT_EQ(line_count(csv), kTraceSamplesPerPeriod + 1);
}

TEST(EvaluateGenome, MatchesSimulateAndFitness) {
    const auto orbit = default_orbits()[1];
    const auto seq = ManeuverSequence::parse("330000000000000000000000000000");
    const SimParams sim;
    Objective obj;
    const auto r = evaluate_genome(seq, orbit, sim, obj);
    const auto out = simulate(state_from_elements(orbit.to_elements(), sim.grav), seq, sim);
    EXPECT_EQ(r.outcome.final_state, out.final_state);
    EXPECT_EQ(r.fitness, fitness(out, obj));
}

TEST_F(ScratchDir, PlanWritesEveryArtifact) {
    const auto c = tiny_experiment();
    const auto out = run_plan(c, dir_);
    ASSERT_EQ(out.runs.size(), 2u);
    const auto manifest = json::parse(slurp(out.manifest_path));
    EXPECT_EQ(manifest.at("tool"), "orbitplan");
    EXPECT_EQ(parse_config(manifest.at("config")), c);
    ASSERT_EQ(manifest.at("runs").size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
        const auto& run = manifest["runs"][i];
        EXPECT_EQ(run.at("name"), c.orbits[i].name);
        EXPECT_EQ(run.at("best_genome"), out.runs[i].result.best_sequence.to_string());
        EXPECT_EQ(run.at("best_fitness").get<double>(), out.runs[i].result.best_fitness);
        for (const auto* key : {"genome", "history", "initial_trace", "final_trace"}) {
            EXPECT_TRUE(fs::exists(dir_ / run.at("files").at(key).get<std::string>())) << key;
        }
        const auto history = slurp(dir_ / run["files"]["history"].get<std::string>());
        EXPECT_EQ(history.rfind("generation,island0_best,island1_best\n", 0), 0u);
        EXPECT_EQ(line_count(history), c.evolution.generations + 1);
        EXPECT_EQ(line_count(slurp(dir_ / run["files"]["final_trace"].get<std::string>())),
                  kTraceSamplesPerPeriod + 1);
    }
    for (const auto& entry : fs::directory_iterator(dir_)) {
        EXPECT_NE(entry.path().extension(), ".tmp");
    }
}

TEST_F(ScratchDir, PlanIsReproducibleAcrossThreadCounts) {
    const auto c = tiny_experiment();
    run_plan(c, dir_ / "a", 1);
    run_plan(c, dir_ / "b", 3);
    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(dir_ / "a")) {
        if (entry.path().filename() == "timings.json") continue;
        EXPECT_EQ(slurp(entry.path()), slurp(dir_ / "b" / entry.path().filename())) << entry.path();
        ++compared;
    }
    EXPECT_EQ(compared, 1u + 4u * c.orbits.size());
}

TEST_F(ScratchDir, PlanRejectsInfeasibleOrbitsBeforeWriting) {
    auto c = tiny_experiment();
    c.orbits[1].sma_km = 6600.0;
    c.orbits[1].eccentricity = 0.1;
    EXPECT_THROW(run_plan(c, dir_ / "out"), InfeasibleInitialOrbit);
    EXPECT_FALSE(fs::exists(dir_ / "out" / "manifest.json"));
}

TEST_F(ScratchDir, SvgExportIsDeterministic) {
    const auto out = run_plan(tiny_experiment(), dir_);
    export_plot(out.manifest_path, TraceSet::Final, dir_ / "final.svg");
    export_plot(out.manifest_path, TraceSet::Final, dir_ / "final2.svg");
    export_plot(out.manifest_path, TraceSet::Initial, dir_ / "initial.svg");
    const auto svg = slurp(dir_ / "final.svg");
    EXPECT_EQ(svg, slurp(dir_ / "final2.svg"));
    EXPECT_NE(svg, slurp(dir_ / "initial.svg"));
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("sc1"), std::string::npos);
    EXPECT_NE(svg.find("sc2"), std::string::npos);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST_F(ScratchDir, PlotErrors) {
    write_file_atomic(dir_ / "empty.json", R"({"runs": []})");
    EXPECT_THROW(export_plot(dir_ / "empty.json", TraceSet::Final, dir_ / "x.svg"), PlotError);

    const auto out = run_plan(tiny_experiment(), dir_ / "run");
    fs::remove(dir_ / "run" / "sc1.final.csv");
    EXPECT_THROW(export_plot(out.manifest_path, TraceSet::Final, dir_ / "x.svg"), PlotError);
    EXPECT_NO_THROW(export_plot(out.manifest_path, TraceSet::Initial, dir_ / "x.svg"));

    write_file_atomic(dir_ / "run" / "sc2.initial.csv", "a,b\n1,2\n");
    EXPECT_THROW(export_plot(out.manifest_path, TraceSet::Initial, dir_ / "y.svg"), PlotError);
    EXPECT_THROW(parse_trace_set("both"), std::invalid_argument);
}
