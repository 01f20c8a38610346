#pragma once

// Two-island genetic search over maneuver sequences.
//
// Each island is stepped with rank-weighted consensus mating. Every
// `island_interbreed_period` generations fathers are drawn from the other
// island. When both islands stagnate at once, one of them (alternating) is
// mated against an immigrant population seeded from the other island's best.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "orbitplan/genome.hpp"
#include "orbitplan/objective.hpp"
#include "orbitplan/random.hpp"

namespace orbitplan {

class LengthMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class EmptyPopulation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InfeasibleInitialOrbit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EvolutionConfig {
    std::size_t population_size = 100;  // per island
    std::size_t generations = 200;
    std::size_t sequence_length = kDefaultSequenceLength;
    double mutation_rate = 0.02;
    std::size_t island_interbreed_period = 5;
    std::size_t stagnation_window = 10;
    double stagnation_epsilon = 1e-4;
    double immigrant_p_keep = 0.5;
    std::size_t elitism_count = 20;
    std::uint64_t rng_seed = 1;
    SimParams sim;
    Objective objective;

    // Throws std::invalid_argument naming the offending field.
    void validate() const;

    friend bool operator==(const EvolutionConfig&, const EvolutionConfig&) = default;
};

struct Population {
    std::vector<ManeuverSequence> members;
    std::vector<double> fitnesses;
    std::size_t generation = 0;

    std::size_t size() const { return members.size(); }
    // Index of the lowest fitness; ties go to the lowest index.
    std::size_t best_index() const;
    double best_fitness() const { return fitnesses[best_index()]; }
    // Member indices ordered best first, ties by index.
    std::vector<std::size_t> ranking() const;
};

// Scores sequences flown from a fixed initial orbit. Evaluation consumes no
// randomness, so splitting a batch across threads cannot change results.
class Evaluator {
public:
    Evaluator(StateVector initial, SimParams sim, Objective objective, unsigned threads = 1);

    double operator()(const ManeuverSequence& seq) const;
    std::vector<double> evaluate(std::span<const ManeuverSequence> batch) const;
    SimOutcome simulate(const ManeuverSequence& seq) const;

    const StateVector& initial() const { return initial_; }

private:
    StateVector initial_;
    SimParams sim_;
    Objective objective_;
    unsigned threads_;
};

Population make_population(std::vector<ManeuverSequence> members, const Evaluator& eval,
                           std::size_t generation = 0);

// Consensus crossover. Agreeing genes are kept unless mutated (redrawn
// uniformly with probability mutation_rate); disagreeing genes are redrawn.
ManeuverSequence mate(const ManeuverSequence& mother, const ManeuverSequence& father,
                      double mutation_rate, Rng& rng);

// Linear rank weights (best = N, worst = 1, ties share their mean rank).
class RankSampler {
public:
    explicit RankSampler(std::span<const double> fitnesses);

    std::size_t sample(Rng& rng) const;
    // Selection probability of member i.
    double probability(std::size_t i) const;

private:
    std::vector<std::uint64_t> cumulative_;  // doubled weights, prefix sums
};

// `count` (mother, father) index pairs, each slot drawn independently by rank
// weight. With a partner population the father indexes into the partner.
std::vector<std::pair<std::size_t, std::size_t>> select_parents(const Population& pop,
                                                                std::size_t count, Rng& rng,
                                                                const Population* partner = nullptr);

// Elites copied unchanged, the rest filled with children of selected parents.
Population step_generation(const Population& pop, const Population* partner,
                           const EvolutionConfig& config, const Evaluator& eval, Rng& rng);

// True iff history has at least window+1 entries and the best fitness
// improved by less than epsilon over the last `window` generations.
bool detect_stagnation(std::span<const double> history, std::size_t window, double epsilon);

// Replaces the non-elite members by children of (rank-selected member,
// immigrant) pairs, the immigrants being seeded around `seed`.
Population inject_immigrants(const Population& pop, const ManeuverSequence& seed,
                             const EvolutionConfig& config, const Evaluator& eval, Rng& rng);

struct ImmigrantEvent {
    std::size_t generation;
    std::size_t island;

    friend bool operator==(const ImmigrantEvent&, const ImmigrantEvent&) = default;
};

struct EvolutionResult {
    ManeuverSequence best_sequence;
    double best_fitness = 0.0;
    KeplerianElements final_elements;
    // history[island][g] is the island's best fitness after generation g + 1.
    std::array<std::vector<double>, 2> history;
    std::vector<ImmigrantEvent> immigrant_events;
    EvolutionConfig config_echo;
};

// Random-stream purposes. Every (seed, island, generation, purpose) tuple
// gets its own generator.
enum class StreamPurpose : std::uint64_t { Init = 0, Breed = 1, Immigrants = 2 };

Rng evolution_stream(std::uint64_t seed, std::size_t island, std::size_t generation,
                     StreamPurpose purpose);

EvolutionResult evolve(const StateVector& initial_orbit, const EvolutionConfig& config,
                       unsigned threads = 1);

}  // namespace orbitplan
