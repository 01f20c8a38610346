#include "orbitplan/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include <fmt/format.h>

namespace orbitplan {

void EvolutionConfig::validate() const {
    if (population_size < 2) throw std::invalid_argument("evolution.population_size must be at least 2");
    if (generations < 1) throw std::invalid_argument("evolution.generations must be at least 1");
    if (sequence_length < 1) throw std::invalid_argument("evolution.sequence_length must be at least 1");
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
        throw std::invalid_argument("evolution.mutation_rate must lie in [0, 1]");
    }
    if (island_interbreed_period < 1) {
        throw std::invalid_argument("evolution.island_interbreed_period must be at least 1");
    }
    if (stagnation_window < 1) throw std::invalid_argument("evolution.stagnation_window must be at least 1");
    if (!(stagnation_epsilon >= 0.0)) {
        throw std::invalid_argument("evolution.stagnation_epsilon must be non-negative");
    }
    if (!(immigrant_p_keep >= 0.0 && immigrant_p_keep <= 1.0)) {
        throw std::invalid_argument("evolution.immigrant_p_keep must lie in [0, 1]");
    }
    if (elitism_count >= population_size) {
        throw std::invalid_argument("evolution.elitism_count must be smaller than population_size");
    }
    sim.validate();
    objective.validate();
}

std::size_t Population::best_index() const {
    if (fitnesses.empty()) throw EmptyPopulation("population has no members");
    return static_cast<std::size_t>(std::min_element(fitnesses.begin(), fitnesses.end()) -
                                    fitnesses.begin());
}

std::vector<std::size_t> Population::ranking() const {
    std::vector<std::size_t> order(fitnesses.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fitnesses[a] < fitnesses[b]; });
    return order;
}

Evaluator::Evaluator(StateVector initial, SimParams sim, Objective objective, unsigned threads)
    : initial_(initial), sim_(sim), objective_(objective), threads_(std::max(1u, threads)) {}

SimOutcome Evaluator::simulate(const ManeuverSequence& seq) const {
    return orbitplan::simulate(initial_, seq, sim_);
}

double Evaluator::operator()(const ManeuverSequence& seq) const {
    return fitness(simulate(seq), objective_);
}

std::vector<double> Evaluator::evaluate(std::span<const ManeuverSequence> batch) const {
    std::vector<double> out(batch.size());
    const std::size_t workers = std::min<std::size_t>(threads_, batch.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < batch.size(); ++i) out[i] = (*this)(batch[i]);
        return out;
    }
    const std::size_t chunk = (batch.size() + workers - 1) / workers;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(batch.size(), begin + chunk);
            pool.emplace_back([&, begin, end] {
                for (std::size_t i = begin; i < end; ++i) out[i] = (*this)(batch[i]);
            });
        }
    }
    return out;
}

Population make_population(std::vector<ManeuverSequence> members, const Evaluator& eval,
                           std::size_t generation) {
    Population pop;
    pop.fitnesses = eval.evaluate(members);
    pop.members = std::move(members);
    pop.generation = generation;
    return pop;
}

ManeuverSequence mate(const ManeuverSequence& mother, const ManeuverSequence& father,
                      double mutation_rate, Rng& rng) {
    if (mother.size() != father.size()) {
        throw LengthMismatch(
            fmt::format("cannot mate sequences of length {} and {}", mother.size(), father.size()));
    }
    std::vector<Maneuver> genes(mother.size());
    for (std::size_t i = 0; i < genes.size(); ++i) {
        if (mother[i] == father[i]) {
            genes[i] = rng.bernoulli(mutation_rate) ? random_maneuver(rng) : mother[i];
        } else {
            genes[i] = random_maneuver(rng);
        }
    }
    return ManeuverSequence(std::move(genes));
}

RankSampler::RankSampler(std::span<const double> fitnesses) {
    const std::size_t n = fitnesses.size();
    if (n == 0) throw EmptyPopulation("cannot select from an empty population");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fitnesses[a] < fitnesses[b]; });

    // Sorted position s (0 = best) has rank n - s. A tie group over
    // positions [s, e) shares the doubled mean rank 2n - s - e + 1.
    std::vector<std::uint64_t> weight(n);
    for (std::size_t s = 0; s < n;) {
        std::size_t e = s + 1;
        while (e < n && fitnesses[order[e]] == fitnesses[order[s]]) ++e;
        const std::uint64_t w = 2 * n - s - e + 1;
        for (std::size_t j = s; j < e; ++j) weight[order[j]] = w;
        s = e;
    }
    cumulative_.resize(n);
    std::partial_sum(weight.begin(), weight.end(), cumulative_.begin());
}

std::size_t RankSampler::sample(Rng& rng) const {
    const std::uint64_t u = rng.uniform_below(cumulative_.back());
    return static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), u) -
                                    cumulative_.begin());
}

double RankSampler::probability(std::size_t i) const {
    const std::uint64_t w = cumulative_[i] - (i == 0 ? 0 : cumulative_[i - 1]);
    return static_cast<double>(w) / static_cast<double>(cumulative_.back());
}

std::vector<std::pair<std::size_t, std::size_t>> select_parents(const Population& pop,
                                                                std::size_t count, Rng& rng,
                                                                const Population* partner) {
    const RankSampler local(pop.fitnesses);
    const RankSampler remote(partner ? std::span<const double>(partner->fitnesses)
                                     : std::span<const double>(pop.fitnesses));
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t mother = local.sample(rng);
        const std::size_t father = remote.sample(rng);
        pairs.emplace_back(mother, father);
    }
    return pairs;
}

Population step_generation(const Population& pop, const Population* partner,
                           const EvolutionConfig& config, const Evaluator& eval, Rng& rng) {
    const std::size_t n = pop.size();
    const std::size_t elites = std::min(config.elitism_count, n);
    const Population& fathers = partner ? *partner : pop;

    const auto pairs = select_parents(pop, n - elites, rng, partner);
    std::vector<ManeuverSequence> children;
    children.reserve(pairs.size());
    for (const auto& [m, f] : pairs) {
        children.push_back(mate(pop.members[m], fathers.members[f], config.mutation_rate, rng));
    }
    const std::vector<double> scores = eval.evaluate(children);

    Population next;
    next.generation = pop.generation + 1;
    next.members.reserve(n);
    next.fitnesses.reserve(n);
    const auto order = pop.ranking();
    for (std::size_t i = 0; i < elites; ++i) {
        next.members.push_back(pop.members[order[i]]);
        next.fitnesses.push_back(pop.fitnesses[order[i]]);
    }
    for (std::size_t i = 0; i < children.size(); ++i) {
        next.members.push_back(std::move(children[i]));
        next.fitnesses.push_back(scores[i]);
    }
    return next;
}

bool detect_stagnation(std::span<const double> history, std::size_t window, double epsilon) {
    if (window < 1) throw std::invalid_argument("stagnation window must be at least 1");
    if (history.size() < window + 1) return false;
    const double then = history[history.size() - 1 - window];
    const double now = history.back();
    return then - now < epsilon;
}

Population inject_immigrants(const Population& pop, const ManeuverSequence& seed,
                             const EvolutionConfig& config, const Evaluator& eval, Rng& rng) {
    const std::size_t n = pop.size();
    const std::size_t elites = std::min(config.elitism_count, n);

    std::vector<ManeuverSequence> immigrants;
    immigrants.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        immigrants.push_back(seeded_sequence(rng, seed, config.immigrant_p_keep));
    }

    const RankSampler sampler(pop.fitnesses);
    std::vector<ManeuverSequence> children;
    children.reserve(n - elites);
    for (std::size_t j = 0; j < n - elites; ++j) {
        const std::size_t mother = sampler.sample(rng);
        children.push_back(mate(pop.members[mother], immigrants[j], config.mutation_rate, rng));
    }
    const std::vector<double> scores = eval.evaluate(children);

    Population next;
    next.generation = pop.generation;
    const auto order = pop.ranking();
    for (std::size_t i = 0; i < elites; ++i) {
        next.members.push_back(pop.members[order[i]]);
        next.fitnesses.push_back(pop.fitnesses[order[i]]);
    }
    for (std::size_t i = 0; i < children.size(); ++i) {
        next.members.push_back(std::move(children[i]));
        next.fitnesses.push_back(scores[i]);
    }
    return next;
}

Rng evolution_stream(std::uint64_t seed, std::size_t island, std::size_t generation,
                     StreamPurpose purpose) {
    return Rng::for_stream({seed, static_cast<std::uint64_t>(island),
                            static_cast<std::uint64_t>(generation),
                            static_cast<std::uint64_t>(purpose)});
}

EvolutionResult evolve(const StateVector& initial_orbit, const EvolutionConfig& config,
                       unsigned threads) {
    config.validate();
    if (const auto reason = check_state(initial_orbit, config.sim.grav); reason != Infeasibility::None) {
        throw InfeasibleInitialOrbit(
            fmt::format("initial orbit is not flyable ({})", to_string(reason)));
    }

    const Evaluator eval(initial_orbit, config.sim, config.objective, threads);

    std::array<Population, 2> islands;
    for (std::size_t k = 0; k < 2; ++k) {
        Rng rng = evolution_stream(config.rng_seed, k, 0, StreamPurpose::Init);
        std::vector<ManeuverSequence> members;
        members.reserve(config.population_size);
        for (std::size_t i = 0; i < config.population_size; ++i) {
            members.push_back(random_sequence(rng, config.sequence_length));
        }
        islands[k] = make_population(std::move(members), eval);
    }

    EvolutionResult result;
    result.config_echo = config;
    for (auto& h : result.history) h.reserve(config.generations);

    std::array<std::size_t, 2> window_start{0, 0};
    std::size_t next_target = 0;

    for (std::size_t g = 1; g <= config.generations; ++g) {
        const bool interbreed = g % config.island_interbreed_period == 0;
        const std::array<Population, 2> previous = islands;
        for (std::size_t k = 0; k < 2; ++k) {
            Rng rng = evolution_stream(config.rng_seed, k, g, StreamPurpose::Breed);
            islands[k] = step_generation(previous[k], interbreed ? &previous[1 - k] : nullptr,
                                         config, eval, rng);
            result.history[k].push_back(islands[k].best_fitness());
        }

        bool stagnant = true;
        for (std::size_t k = 0; k < 2; ++k) {
            const std::span<const double> since(result.history[k].data() + window_start[k],
                                                result.history[k].size() - window_start[k]);
            stagnant = stagnant && detect_stagnation(since, config.stagnation_window,
                                                     config.stagnation_epsilon);
        }
        // An injection after the last step would not show up in the history.
        if (stagnant && g < config.generations) {
            const std::size_t target = next_target;
            const std::size_t donor = 1 - target;
            const ManeuverSequence seed = islands[donor].members[islands[donor].best_index()];
            Rng rng = evolution_stream(config.rng_seed, target, g, StreamPurpose::Immigrants);
            islands[target] = inject_immigrants(islands[target], seed, config, eval, rng);
            window_start[target] = result.history[target].size() - 1;
            result.immigrant_events.push_back({g, target});
            next_target = donor;
        }
    }

    const std::size_t winner = islands[1].best_fitness() < islands[0].best_fitness() ? 1 : 0;
    result.best_sequence = islands[winner].members[islands[winner].best_index()];
    result.best_fitness = islands[winner].best_fitness();
    result.final_elements = eval.simulate(result.best_sequence).final_elements;
    return result;
}

}  // namespace orbitplan
