#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "latmoo/moea_core.hpp"
#include "latmoo/problems.hpp"
#include "latmoo/sim_clock.hpp"
#include "latmoo/surrogate.hpp"

namespace latmoo::strategies {

struct BudgetTooSmall : std::runtime_error {
    explicit BudgetTooSmall(const std::string& m) : std::runtime_error(m) {}
};
struct NoInformation : std::runtime_error {
    explicit NoInformation(const std::string& m) : std::runtime_error(m) {}
};
struct SurrogateFitFailure : std::runtime_error {
    explicit SurrogateFitFailure(const std::string& m) : std::runtime_error(m) {}
};

enum class StrategyKind {
    Waiting,
    FastFirst,
    RankingInterleave,
    BroodInterleave,
    SpeculativeInterleave,
    SurrogateInterleave,
};

enum class Engine { Generational, SteadyState };
enum class PseudoScheme { FitnessInheritance, PopulationMean };
enum class BatchSelection { RankBased, MostRecent };
enum class SurrogateSampling { UniformVariation, LatinHypercube };

struct StrategyConfig {
    StrategyKind kind = StrategyKind::Waiting;
    std::string name;                   // output label; defaults to the kind string
    int population_size = 0;            // lambda; 0 means "use the batch capacity"
    Engine engine = Engine::Generational;
    std::uint64_t rng_seed = 0;

    // Fast-First: switch step as a fraction of the horizon. Unset reserves
    // exactly two slow-batch rounds at the end.
    std::optional<double> switch_fraction;

    // Ranking interleave
    PseudoScheme pseudo_scheme = PseudoScheme::FitnessInheritance;
    BatchSelection batch_selection = BatchSelection::RankBased;

    // Surrogate interleave
    int samples_per_iteration = 3;      // u
    int transfer_trigger = 5;           // tau; carried for builder hooks
    SurrogateSampling surrogate_sampling = SurrogateSampling::UniformVariation;
    int inner_population = 40;
    int inner_generations = 20;
    int max_training_points = 250;
    double lhs_box_fraction = 0.1;

    moea::VariationConfig variation;
};

std::string to_string(StrategyKind kind);
StrategyKind strategy_kind_from_string(const std::string& s);
nlohmann::ordered_json strategy_config_json(const StrategyConfig& cfg);
StrategyConfig strategy_config_from_json(const nlohmann::json& j);
nlohmann::ordered_json sim_config_json(const sim::SimConfig& cfg);
sim::SimConfig sim_config_from_json(const nlohmann::json& j);

/// Seeded experiment trace: everything needed to rerun, replay and score one
/// strategy execution.
struct RunRecord {
    nlohmann::ordered_json config;              // problem / sim / strategy snapshot
    std::vector<sim::Event> events;
    std::vector<std::vector<double>> front;     // nondominated, all-True, sorted
    std::vector<std::int64_t> fe;               // per-objective evaluations consumed
    nlohmann::ordered_json metrics;             // filled by the experiment layer
    std::uint64_t seed = 0;
};

nlohmann::ordered_json run_record_json(const RunRecord& record);
RunRecord run_record_from_json(const nlohmann::json& j);

struct RunOutput {
    RunRecord record;
    std::vector<moea::Individual> front_individuals;  // with slot states
    std::vector<moea::Individual> individuals;        // everyone ever born (id == index)
    std::vector<sim::BatchJob> completed_jobs;        // delivery order
    std::size_t early_read_attempts = 0;
};

/// Pseudovalue for a newborn's slow objective. FitnessInheritance averages
/// the parents' slow values (pseudo inputs allowed); PopulationMean averages
/// every true slow value known in the population. NoInformation when the
/// scheme has nothing to work with.
double assign_pseudovalue(const std::vector<const moea::Individual*>& parents,
                          const std::vector<const moea::Individual*>& population,
                          PseudoScheme scheme, int slow_objective);

/// True iff the offspring's fast value strictly improves on at least one
/// parent's.
bool candidate_filter(double offspring_fast, const std::vector<double>& parent_fast);

using SurrogateBuilder = std::function<surrogate::RbfModel(
    const std::vector<surrogate::Sample>& samples, int objective, int iteration)>;

// The five strategy families. All run under the same ledger accounting; the
// interleaving variants require a bi-objective problem (one slow, one fast).
RunOutput run_waiting(const problems::ProblemInstance& problem, const sim::SimConfig& sim,
                      const StrategyConfig& config);
RunOutput run_fast_first(const problems::ProblemInstance& problem,
                         const sim::SimConfig& sim, const StrategyConfig& config);
RunOutput run_ranking_interleave(const problems::ProblemInstance& problem,
                                 const sim::SimConfig& sim, const StrategyConfig& config);
RunOutput run_brood_interleave(const problems::ProblemInstance& problem,
                               const sim::SimConfig& sim, const StrategyConfig& config);
RunOutput run_speculative_interleave(const problems::ProblemInstance& problem,
                                     const sim::SimConfig& sim,
                                     const StrategyConfig& config);
/// Requires the PerObjectiveEvaluations stopping mode. Counters accumulate
/// monotonically: initialization consumes lambda slow and lambda*ks fast
/// evaluations, each further iteration adds u slow and up to u*ks fast ones
/// (final batches truncate against the remaining budgets). `builder` replaces
/// the default RBF fit, e.g. to plug in transfer-learned models.
RunOutput run_surrogate_interleave(const problems::ProblemInstance& problem,
                                   const sim::SimConfig& sim, const StrategyConfig& config,
                                   const SurrogateBuilder& builder = {});

RunOutput run_strategy(const problems::ProblemInstance& problem, const sim::SimConfig& sim,
                       const StrategyConfig& config);

}  // namespace latmoo::strategies
