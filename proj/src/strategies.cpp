#include "latmoo/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace latmoo::strategies {

namespace {

using moea::Individual;
using problems::Genome;
using problems::ProblemInstance;
using sim::BatchJob;

// Shared run state: individuals are stored once (id == index), objective
// values travel exclusively through the ledger so nothing can observe them
// before the simulated completion step.
struct RunContext {
    const ProblemInstance& problem;
    sim::BudgetLedger ledger;
    rng::Engine eng;
    const StrategyConfig& cfg;
    int lambda;
    std::vector<Individual> all;
    std::vector<BatchJob> job_history;
    moea::ParetoArchive archive;

    RunContext(const ProblemInstance& p, const sim::SimConfig& sim_cfg,
               const StrategyConfig& c)
        : problem(p), ledger(sim_cfg, p.latencies()), eng(c.rng_seed), cfg(c),
          lambda(c.population_size > 0 ? c.population_size : sim_cfg.batch_capacity) {
        if (lambda < 1 || lambda > sim_cfg.batch_capacity)
            throw std::invalid_argument(
                "population_size must lie in [1, batch_capacity]");
    }

    Individual& at(std::uint64_t id) { return all[static_cast<std::size_t>(id)]; }
    const Individual& at(std::uint64_t id) const {
        return all[static_cast<std::size_t>(id)];
    }

    std::uint64_t birth(Genome genome, std::vector<std::uint64_t> parents) {
        Individual ind;
        ind.id = all.size();
        ind.genome = std::move(genome);
        ind.slots.resize(static_cast<std::size_t>(problem.objective_count()));
        ind.birth_time = ledger.now();
        ind.parent_ids = std::move(parents);
        all.push_back(std::move(ind));
        return all.back().id;
    }

    std::vector<std::uint64_t> birth_random(int count) {
        std::vector<std::uint64_t> ids;
        ids.reserve(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) ids.push_back(birth(problem.random_genome(eng), {}));
        return ids;
    }

    sim::JobId submit(int objective, const std::vector<std::uint64_t>& ids) {
        std::vector<double> values;
        values.reserve(ids.size());
        for (const auto id : ids) values.push_back(problem.evaluate(at(id).genome, objective));
        return ledger.submit_batch(objective, ids, std::move(values));
    }

    std::vector<BatchJob> advance() {
        auto done = ledger.advance_to_next_completion();
        for (const auto& job : done) {
            for (std::size_t i = 0; i < job.solutions.size(); ++i) {
                auto& ind = at(job.solutions[i]);
                ind.slots[static_cast<std::size_t>(job.objective)].set_true(job.values[i]);
                if (ind.fully_evaluated()) archive.insert(ind);
            }
            job_history.push_back(job);
        }
        return done;
    }

    void drain() {
        while (ledger.has_jobs_in_flight()) advance();
    }

    std::vector<std::vector<double>> points_of(const std::vector<std::uint64_t>& ids,
                                               bool allow_pseudo) const {
        std::vector<std::vector<double>> pts;
        pts.reserve(ids.size());
        for (const auto id : ids) pts.push_back(at(id).objective_vector(allow_pseudo));
        return pts;
    }

    double value_of(std::uint64_t id, int objective) const {
        return at(id).slots[static_cast<std::size_t>(objective)].value();
    }

    // Multiobjective offspring via binary tournaments on (rank, crowding).
    std::vector<std::uint64_t> mo_offspring(const std::vector<std::uint64_t>& pool,
                                            int count, bool allow_pseudo) {
        const auto pts = points_of(pool, allow_pseudo);
        const auto ranking = moea::rank_population(pts);
        std::vector<std::uint64_t> out;
        while (static_cast<int>(out.size()) < count) {
            const auto a = pool[moea::binary_tournament(ranking, eng)];
            const auto b = pool[moea::binary_tournament(ranking, eng)];
            append_children(a, b, count, out);
        }
        return out;
    }

    // Single-objective offspring, tournaments on one objective's true value.
    std::vector<std::uint64_t> so_offspring(const std::vector<std::uint64_t>& pool,
                                            int objective, int count) {
        std::vector<std::uint64_t> out;
        while (static_cast<int>(out.size()) < count) {
            const auto a = pool[so_tournament(pool, objective)];
            const auto b = pool[so_tournament(pool, objective)];
            append_children(a, b, count, out);
        }
        return out;
    }

    std::size_t so_tournament(const std::vector<std::uint64_t>& pool, int objective) {
        const std::size_t i = rng::index_below(eng, pool.size());
        const std::size_t j = rng::index_below(eng, pool.size());
        const double vi = value_of(pool[i], objective);
        const double vj = value_of(pool[j], objective);
        if (vi != vj) return vi < vj ? i : j;
        return rng::bernoulli(eng, 0.5) ? i : j;
    }

    // Uniform parent choice, as the brood strategies require.
    std::vector<std::uint64_t> uniform_offspring(const std::vector<std::uint64_t>& pool,
                                                 int count) {
        std::vector<std::uint64_t> out;
        while (static_cast<int>(out.size()) < count) {
            const auto a = pool[rng::index_below(eng, pool.size())];
            const auto b = pool[rng::index_below(eng, pool.size())];
            append_children(a, b, count, out);
        }
        return out;
    }

    void append_children(std::uint64_t a, std::uint64_t b, int count,
                         std::vector<std::uint64_t>& out) {
        const auto children =
            moea::vary({&at(a).genome, &at(b).genome}, cfg.variation, eng);
        for (const auto& child : children) {
            if (static_cast<int>(out.size()) >= count) break;
            out.push_back(birth(child, {a, b}));
        }
    }

    // Survivor selection shared by the fully-evaluated strategies.
    std::vector<std::uint64_t> survivors(const std::vector<std::uint64_t>& parents,
                                         const std::vector<std::uint64_t>& offspring) {
        if (cfg.engine == Engine::Generational) {
            std::vector<std::uint64_t> merged = parents;
            merged.insert(merged.end(), offspring.begin(), offspring.end());
            const auto pts = points_of(merged, false);
            const auto kept =
                moea::environmental_selection(pts, static_cast<std::size_t>(lambda));
            std::vector<std::uint64_t> next;
            next.reserve(kept.size());
            for (const auto i : kept) next.push_back(merged[i]);
            return next;
        }
        // Steady state: offspring enter one at a time, each displacing the
        // worst-ranked member.
        std::vector<std::uint64_t> pop = parents;
        for (const auto child : offspring) {
            pop.push_back(child);
            const auto pts = points_of(pop, false);
            std::vector<std::uint64_t> ids(pop.begin(), pop.end());
            pop.erase(pop.begin() +
                      static_cast<std::ptrdiff_t>(moea::worst_index(pts, ids)));
        }
        return pop;
    }

    RunOutput finish(const sim::SimConfig& sim_cfg) {
        RunOutput out;
        out.record.seed = cfg.rng_seed;
        nlohmann::ordered_json snapshot;
        snapshot["problem"] = problem.descriptor();
        snapshot["sim"] = sim_config_json(sim_cfg);
        snapshot["strategy"] = strategy_config_json(cfg);
        out.record.config = std::move(snapshot);
        out.record.events = ledger.events();
        out.record.fe = ledger.fe_consumed();
        out.record.metrics = nlohmann::ordered_json::object();
        out.front_individuals = archive.members();
        std::sort(out.front_individuals.begin(), out.front_individuals.end(),
                  [](const Individual& a, const Individual& b) {
                      return a.objective_vector(false) < b.objective_vector(false);
                  });
        for (const auto& ind : out.front_individuals)
            out.record.front.push_back(ind.objective_vector(false));
        out.individuals = all;
        out.completed_jobs = job_history;
        out.early_read_attempts = ledger.early_read_attempts();
        return out;
    }
};

void require_time_steps_mode(const sim::SimConfig& cfg, const char* who) {
    if (cfg.stopping_mode != sim::StoppingMode::TimeSteps)
        throw std::invalid_argument(std::string(who) +
                                    " runs under the TimeSteps stopping mode");
}

void require_bi_objective(const ProblemInstance& problem, const char* who) {
    if (problem.objective_count() != 2)
        throw std::invalid_argument(std::string(who) +
                                    " handles bi-objective problems only");
}

std::vector<int> all_objectives(const ProblemInstance& problem) {
    std::vector<int> objectives(static_cast<std::size_t>(problem.objective_count()));
    std::iota(objectives.begin(), objectives.end(), 0);
    return objectives;
}

// Bounds of the decision space as reals (binary genomes embed as 0/1).
void domain_bounds(const ProblemInstance& problem, std::vector<double>& lower,
                   std::vector<double>& upper) {
    lower.assign(static_cast<std::size_t>(problem.dimension()), 0.0);
    upper.assign(static_cast<std::size_t>(problem.dimension()), 1.0);
}

Genome genome_from_reals(const ProblemInstance& problem, const std::vector<double>& reals) {
    if (problem.is_binary()) {
        problems::BinaryGenome g;
        g.bits.resize(reals.size());
        for (std::size_t i = 0; i < reals.size(); ++i) g.bits[i] = reals[i] > 0.5 ? 1 : 0;
        return g;
    }
    problems::ContinuousGenome g;
    g.x = reals;
    for (auto& v : g.x) v = std::clamp(v, 0.0, 1.0);
    domain_bounds(problem, g.lower, g.upper);
    return g;
}

}  // namespace

double assign_pseudovalue(const std::vector<const Individual*>& parents,
                          const std::vector<const Individual*>& population,
                          PseudoScheme scheme, int slow_objective) {
    const auto idx = static_cast<std::size_t>(slow_objective);
    if (scheme == PseudoScheme::FitnessInheritance) {
        if (parents.empty()) throw NoInformation("no parents to inherit from");
        double sum = 0.0;
        for (const auto* p : parents) {
            if (p->slots[idx].pending())
                throw NoInformation("a parent's slow objective is still pending");
            sum += p->slots[idx].value();
        }
        return sum / static_cast<double>(parents.size());
    }
    double sum = 0.0;
    int known = 0;
    for (const auto* member : population) {
        if (!member->slots[idx].is_true()) continue;
        sum += member->slots[idx].value();
        ++known;
    }
    if (known == 0) throw NoInformation("no true slow value known in the population");
    return sum / static_cast<double>(known);
}

bool candidate_filter(double offspring_fast, const std::vector<double>& parent_fast) {
    if (parent_fast.empty())
        throw moea::IncompleteVector("candidate filter needs parent fast values");
    // Strict improvement over at least one parent; a tie with any parent
    // disqualifies, so clones of the better parent do not pass.
    bool beats_one = false;
    for (const double pf : parent_fast) {
        if (offspring_fast == pf) return false;
        if (offspring_fast < pf) beats_one = true;
    }
    return beats_one;
}

// ---------------------------------------------------------------------------
// Waiting: every generation is evaluated on all objectives at once and the
// run proceeds at the slowest objective's rate.

RunOutput run_waiting(const ProblemInstance& problem, const sim::SimConfig& sim_cfg,
                      const StrategyConfig& cfg) {
    if (problem.objective_count() < 2)
        throw std::invalid_argument("waiting needs >= 2 objectives");
    RunContext ctx(problem, sim_cfg, cfg);
    const auto objectives = all_objectives(problem);

    const auto generation_fits = [&] {
        for (const int obj : objectives)
            if (!ctx.ledger.can_submit(obj, ctx.lambda)) return false;
        return true;
    };
    if (!generation_fits())
        throw BudgetTooSmall("not even one full generation fits in the budget");

    auto population = ctx.birth_random(ctx.lambda);
    for (const int obj : objectives) ctx.submit(obj, population);
    ctx.drain();

    while (generation_fits()) {
        const auto offspring = ctx.mo_offspring(population, ctx.lambda, false);
        for (const int obj : objectives) ctx.submit(obj, offspring);
        ctx.drain();
        population = ctx.survivors(population, offspring);
    }
    return ctx.finish(sim_cfg);
}

// ---------------------------------------------------------------------------
// Fast-First: a single-objective EA on the fast objective for most of the
// horizon, then selected solutions are completed on the remaining objectives
// in Waiting mode.

namespace {

std::vector<std::uint64_t> so_survivors(RunContext& ctx,
                                        const std::vector<std::uint64_t>& parents,
                                        const std::vector<std::uint64_t>& offspring,
                                        int objective) {
    const auto better = [&](std::uint64_t a, std::uint64_t b) {
        const double va = ctx.value_of(a, objective);
        const double vb = ctx.value_of(b, objective);
        if (va != vb) return va < vb;
        return a < b;
    };
    if (ctx.cfg.engine == Engine::Generational) {
        std::vector<std::uint64_t> merged = parents;
        merged.insert(merged.end(), offspring.begin(), offspring.end());
        std::sort(merged.begin(), merged.end(), better);
        merged.resize(static_cast<std::size_t>(ctx.lambda));
        return merged;
    }
    std::vector<std::uint64_t> pop = parents;
    for (const auto child : offspring) {
        pop.push_back(child);
        const auto worst = std::max_element(pop.begin(), pop.end(), better);
        pop.erase(worst);
    }
    return pop;
}

}  // namespace

RunOutput run_fast_first(const ProblemInstance& problem, const sim::SimConfig& sim_cfg,
                         const StrategyConfig& cfg) {
    if (problem.objective_count() < 2)
        throw std::invalid_argument("fast-first needs >= 2 objectives");
    require_time_steps_mode(sim_cfg, "fast-first");
    RunContext ctx(problem, sim_cfg, cfg);
    const auto& profile = ctx.ledger.profile();
    const int fast = profile.fast_objective();
    const int k_fast = profile.latency(fast);
    const int k_max = profile.max_latency();
    const sim::TimeStep horizon = sim_cfg.total_time_steps;

    sim::TimeStep t_switch;
    if (cfg.switch_fraction) {
        if (!(*cfg.switch_fraction > 0.0) || *cfg.switch_fraction > 1.0)
            throw std::invalid_argument("switch_fraction must lie in (0, 1]");
        t_switch = static_cast<sim::TimeStep>(
            std::floor(*cfg.switch_fraction * static_cast<double>(horizon)));
    } else {
        t_switch = horizon - 2 * k_max;  // leave two slow-batch rounds
    }
    if (t_switch < k_fast || t_switch + k_max > horizon)
        throw BudgetTooSmall("switch time leaves no room for phase 1 or the slow batch");

    // Phase 1: fast objective only.
    auto population = ctx.birth_random(ctx.lambda);
    ctx.submit(fast, population);
    ctx.drain();
    std::vector<std::uint64_t> history = population;
    while (ctx.ledger.now() + k_fast <= t_switch) {
        const auto offspring = ctx.so_offspring(population, fast, ctx.lambda);
        ctx.submit(fast, offspring);
        ctx.drain();
        population = so_survivors(ctx, population, offspring, fast);
        history.insert(history.end(), offspring.begin(), offspring.end());
    }
    ctx.ledger.idle_until(t_switch);

    // Phase 2: complete the best distinct phase-1 solutions, then keep
    // running full generations while the budget lasts.
    std::sort(history.begin(), history.end(), [&](std::uint64_t a, std::uint64_t b) {
        const double va = ctx.value_of(a, fast);
        const double vb = ctx.value_of(b, fast);
        if (va != vb) return va < vb;
        return a < b;
    });
    std::vector<std::uint64_t> picks;
    for (const auto id : history) {
        if (static_cast<int>(picks.size()) == ctx.lambda) break;
        const bool duplicate = std::any_of(picks.begin(), picks.end(), [&](std::uint64_t p) {
            return problems::same_genome(ctx.at(p).genome, ctx.at(id).genome);
        });
        if (!duplicate) picks.push_back(id);
    }
    for (int obj = 0; obj < problem.objective_count(); ++obj)
        if (obj != fast) ctx.submit(obj, picks);
    ctx.drain();

    population = picks;
    while (ctx.ledger.now() + k_max <= horizon) {
        const auto offspring = ctx.mo_offspring(population, ctx.lambda, false);
        for (int obj = 0; obj < problem.objective_count(); ++obj) ctx.submit(obj, offspring);
        ctx.drain();
        population = ctx.survivors(population, offspring);
    }
    return ctx.finish(sim_cfg);
}

// ---------------------------------------------------------------------------
// Ranking interleave: unbounded population, pseudovalues standing in for the
// slow objective, fast evaluations flowing at full capacity.

RunOutput run_ranking_interleave(const ProblemInstance& problem,
                                 const sim::SimConfig& sim_cfg,
                                 const StrategyConfig& cfg) {
    require_bi_objective(problem, "ranking interleave");
    require_time_steps_mode(sim_cfg, "ranking interleave");
    RunContext ctx(problem, sim_cfg, cfg);
    const auto& profile = ctx.ledger.profile();
    const int slow = profile.slow_objective();
    const int fast = profile.fast_objective();
    const auto slow_idx = static_cast<std::size_t>(slow);

    if (!ctx.ledger.can_submit(slow, ctx.lambda) || !ctx.ledger.can_submit(fast, ctx.lambda))
        throw BudgetTooSmall("the initial population cannot be evaluated in the budget");

    std::vector<std::uint64_t> members;  // fast value known
    std::vector<std::uint64_t> nursery;  // fast evaluation in flight

    const auto try_pseudo = [&](std::uint64_t id) {
        auto& ind = ctx.at(id);
        if (!ind.slots[slow_idx].pending()) return;
        std::vector<const Individual*> parents;
        for (const auto pid : ind.parent_ids) parents.push_back(&ctx.at(pid));
        std::vector<const Individual*> population;
        population.reserve(members.size());
        for (const auto mid : members) population.push_back(&ctx.at(mid));
        try {
            ind.slots[slow_idx].set_pseudo(
                assign_pseudovalue(parents, population, cfg.pseudo_scheme, slow));
        } catch (const NoInformation&) {
            // No usable slow information yet; the member stays pending and is
            // ranked on the fast objective alone until a slow batch lands.
        }
    };

    const auto init = ctx.birth_random(ctx.lambda);
    ctx.submit(fast, init);
    ctx.submit(slow, init);
    nursery = init;

    for (;;) {
        // Offspring flow on the fast objective.
        if (!ctx.ledger.objective_busy(fast) && ctx.ledger.can_submit(fast, ctx.lambda) &&
            !members.empty()) {
            std::vector<std::uint64_t> ranked;
            for (const auto id : members)
                if (!ctx.at(id).slots[slow_idx].pending()) ranked.push_back(id);
            std::vector<std::uint64_t> offspring;
            if (ranked.size() >= 2)
                offspring = ctx.mo_offspring(ranked, ctx.lambda, true);
            else if (members.size() >= 2)
                offspring = ctx.so_offspring(members, fast, ctx.lambda);
            else
                while (static_cast<int>(offspring.size()) < ctx.lambda)
                    ctx.append_children(members[0], members[0], ctx.lambda, offspring);
            for (const auto id : offspring) try_pseudo(id);
            ctx.submit(fast, offspring);
            nursery.insert(nursery.end(), offspring.begin(), offspring.end());
        }

        // Next slow batch, selected by rank or recency among the candidates
        // not yet evaluated on the slow objective.
        if (!ctx.ledger.objective_busy(slow) && ctx.ledger.can_submit(slow, 1)) {
            std::vector<std::uint64_t> eligible;
            for (const auto id : members)
                if (!ctx.at(id).slots[slow_idx].is_true()) eligible.push_back(id);
            for (const auto id : eligible) try_pseudo(id);

            std::vector<std::uint64_t> batch;
            if (cfg.batch_selection == BatchSelection::RankBased) {
                std::vector<std::uint64_t> rankable;
                for (const auto id : members)
                    if (!ctx.at(id).slots[slow_idx].pending()) rankable.push_back(id);
                std::vector<int> rank_of(ctx.all.size(), 0);
                std::vector<double> crowd_of(ctx.all.size(), 0.0);
                if (rankable.size() >= 2) {
                    const auto ranking =
                        moea::rank_population(ctx.points_of(rankable, true));
                    for (std::size_t i = 0; i < rankable.size(); ++i) {
                        rank_of[static_cast<std::size_t>(rankable[i])] = ranking.rank[i];
                        crowd_of[static_cast<std::size_t>(rankable[i])] =
                            ranking.crowding[i];
                    }
                }
                std::vector<std::uint64_t> sorted;
                for (const auto id : eligible)
                    if (!ctx.at(id).slots[slow_idx].pending()) sorted.push_back(id);
                std::stable_sort(sorted.begin(), sorted.end(),
                                 [&](std::uint64_t a, std::uint64_t b) {
                                     const auto ia = static_cast<std::size_t>(a);
                                     const auto ib = static_cast<std::size_t>(b);
                                     if (rank_of[ia] != rank_of[ib])
                                         return rank_of[ia] < rank_of[ib];
                                     if (crowd_of[ia] != crowd_of[ib])
                                         return crowd_of[ia] > crowd_of[ib];
                                     return a < b;
                                 });
                batch = std::move(sorted);
            } else {
                batch = eligible;
                std::sort(batch.begin(), batch.end(), std::greater<>());  // newest first
            }
            if (static_cast<int>(batch.size()) > ctx.lambda)
                batch.resize(static_cast<std::size_t>(ctx.lambda));
            if (static_cast<int>(batch.size()) < ctx.lambda) {
                // Top up with the freshest solutions still awaiting their fast
                // value; their slow evaluation simply runs in parallel.
                std::vector<std::uint64_t> fresh = nursery;
                std::sort(fresh.begin(), fresh.end(), std::greater<>());
                for (const auto id : fresh) {
                    if (static_cast<int>(batch.size()) == ctx.lambda) break;
                    if (!ctx.at(id).slots[slow_idx].is_true()) batch.push_back(id);
                }
            }
            if (!batch.empty() &&
                ctx.ledger.can_submit(slow, static_cast<int>(batch.size()))) {
                ctx.submit(slow, batch);
            }
        }

        if (!ctx.ledger.has_jobs_in_flight()) break;
        const auto done = ctx.advance();
        for (const auto& job : done) {
            if (job.objective != fast) continue;
            for (const auto sid : job.solutions) {
                members.push_back(sid);
                std::erase(nursery, sid);
            }
        }
    }
    return ctx.finish(sim_cfg);
}

// ---------------------------------------------------------------------------
// Brood and speculative interleave share one cycle skeleton: the population
// sits in a slow batch while the fast objective's idle capacity scores new
// candidates, capped at lambda * (ks - 1) evaluations per cycle.

namespace {

struct CycleOffspring {
    std::uint64_t id;
    std::vector<double> parent_fast;
};

struct InterleaveHooks {
    // Called once the population's fast values are known; gives the inner EA
    // a place to seed itself.
    std::function<void(const std::vector<std::uint64_t>&)> on_cycle_ready;
    // Produces the next fast-only batch of the cycle.
    std::function<std::vector<std::uint64_t>()> next_batch;
    // Observes a completed fast batch (inner EA survivor selection).
    std::function<void(const std::vector<std::uint64_t>&)> on_batch_done;
    // Candidate pool for the next slow batch, most preferred first.
    std::function<std::vector<std::uint64_t>()> candidates;
};

RunOutput run_interleave_cycles(const ProblemInstance& problem,
                                const sim::SimConfig& sim_cfg, RunContext& ctx,
                                const std::function<InterleaveHooks(RunContext&)>& make_hooks,
                                const char* who) {
    require_bi_objective(problem, who);
    require_time_steps_mode(sim_cfg, who);
    const auto& profile = ctx.ledger.profile();
    const int slow = profile.slow_objective();
    const int fast = profile.fast_objective();
    const int k_slow = profile.latency(slow);
    const int k_fast = profile.latency(fast);
    const auto fast_idx = static_cast<std::size_t>(fast);

    if (!ctx.ledger.can_submit(slow, ctx.lambda))
        throw BudgetTooSmall("no slow batch fits in the budget");

    auto hooks = make_hooks(ctx);
    auto population = ctx.birth_random(ctx.lambda);
    std::map<std::uint64_t, std::vector<double>> cycle_parent_fast;

    while (ctx.ledger.can_submit(slow, static_cast<int>(population.size()))) {
        const sim::TimeStep t0 = ctx.ledger.now();
        const sim::TimeStep cycle_end = t0 + k_slow;
        ctx.submit(slow, population);

        std::vector<std::uint64_t> pending_fast;
        for (const auto id : population)
            if (ctx.at(id).slots[fast_idx].pending()) pending_fast.push_back(id);
        bool population_ready = pending_fast.empty();
        if (!population_ready) ctx.submit(fast, pending_fast);

        int batches_left = k_slow / k_fast - 1;
        std::vector<CycleOffspring> cycle_offspring;
        cycle_parent_fast.clear();

        const auto submit_next_batch = [&] {
            if (batches_left <= 0 || !population_ready) return;
            if (ctx.ledger.objective_busy(fast)) return;
            if (ctx.ledger.now() + k_fast > cycle_end) return;
            if (!ctx.ledger.can_submit(fast, ctx.lambda)) return;
            const auto batch = hooks.next_batch();
            if (batch.empty()) return;
            for (const auto id : batch) {
                std::vector<double> parent_fast;
                for (const auto pid : ctx.at(id).parent_ids)
                    parent_fast.push_back(ctx.value_of(pid, fast));
                cycle_parent_fast[id] = std::move(parent_fast);
            }
            ctx.submit(fast, batch);
            --batches_left;
        };

        if (population_ready) {
            hooks.on_cycle_ready(population);
            submit_next_batch();
        }
        while (ctx.ledger.objective_busy(slow)) {
            const auto done = ctx.advance();
            for (const auto& job : done) {
                if (job.objective != fast) continue;
                if (!population_ready) {
                    population_ready = true;
                    hooks.on_cycle_ready(population);
                } else {
                    std::vector<std::uint64_t> batch_ids = job.solutions;
                    for (const auto id : batch_ids)
                        cycle_offspring.push_back(
                            CycleOffspring{id, cycle_parent_fast.at(id)});
                    hooks.on_batch_done(batch_ids);
                }
            }
            submit_next_batch();
        }

        // Assemble the next slow batch: filter passers first, then the best
        // remaining fast values, then fresh uniform-variation offspring.
        std::vector<std::uint64_t> passers, others;
        std::vector<std::uint64_t> preferred = hooks.candidates();
        std::vector<char> seen(ctx.all.size(), 0);
        const auto classify = [&](std::uint64_t id, const std::vector<double>& parent_fast) {
            if (seen[static_cast<std::size_t>(id)]) return;
            seen[static_cast<std::size_t>(id)] = 1;
            if (candidate_filter(ctx.value_of(id, fast), parent_fast))
                passers.push_back(id);
            else
                others.push_back(id);
        };
        for (const auto id : preferred) classify(id, cycle_parent_fast.at(id));
        for (const auto& off : cycle_offspring) classify(off.id, off.parent_fast);
        const auto by_fast = [&](std::uint64_t a, std::uint64_t b) {
            const double va = ctx.value_of(a, fast);
            const double vb = ctx.value_of(b, fast);
            if (va != vb) return va < vb;
            return a < b;
        };
        std::sort(passers.begin(), passers.end(), by_fast);
        std::sort(others.begin(), others.end(), by_fast);

        std::vector<std::uint64_t> next;
        for (const auto id : passers) {
            if (static_cast<int>(next.size()) == ctx.lambda) break;
            next.push_back(id);
        }
        for (const auto id : others) {
            if (static_cast<int>(next.size()) == ctx.lambda) break;
            next.push_back(id);
        }
        while (static_cast<int>(next.size()) < ctx.lambda) {
            const auto fresh = ctx.uniform_offspring(
                population, ctx.lambda - static_cast<int>(next.size()));
            next.insert(next.end(), fresh.begin(), fresh.end());
        }
        population = std::move(next);
    }
    ctx.drain();
    return ctx.finish(sim_cfg);
}

}  // namespace

RunOutput run_brood_interleave(const ProblemInstance& problem, const sim::SimConfig& sim_cfg,
                               const StrategyConfig& cfg) {
    RunContext ctx(problem, sim_cfg, cfg);
    const auto make_hooks = [&](RunContext& c) {
        auto population = std::make_shared<std::vector<std::uint64_t>>();
        InterleaveHooks hooks;
        hooks.on_cycle_ready = [population](const std::vector<std::uint64_t>& pop) {
            *population = pop;
        };
        hooks.next_batch = [&c, population] {
            return c.uniform_offspring(*population, c.lambda);
        };
        hooks.on_batch_done = [](const std::vector<std::uint64_t>&) {};
        hooks.candidates = [] { return std::vector<std::uint64_t>{}; };
        return hooks;
    };
    return run_interleave_cycles(problem, sim_cfg, ctx, make_hooks, "brood interleave");
}

RunOutput run_speculative_interleave(const ProblemInstance& problem,
                                     const sim::SimConfig& sim_cfg,
                                     const StrategyConfig& cfg) {
    RunContext ctx(problem, sim_cfg, cfg);
    const int fast = ctx.ledger.profile().fast_objective();
    const auto make_hooks = [&, fast](RunContext& c) {
        auto inner_pop = std::make_shared<std::vector<std::uint64_t>>();
        InterleaveHooks hooks;
        hooks.on_cycle_ready = [inner_pop](const std::vector<std::uint64_t>& pop) {
            *inner_pop = pop;
        };
        hooks.next_batch = [&c, inner_pop, fast] {
            return c.so_offspring(*inner_pop, fast, c.lambda);
        };
        hooks.on_batch_done = [&c, inner_pop, fast](const std::vector<std::uint64_t>& batch) {
            // (mu + lambda) elitism on the fast objective.
            auto merged = *inner_pop;
            merged.insert(merged.end(), batch.begin(), batch.end());
            std::sort(merged.begin(), merged.end(), [&](std::uint64_t a, std::uint64_t b) {
                const double va = c.value_of(a, fast);
                const double vb = c.value_of(b, fast);
                if (va != vb) return va < vb;
                return a < b;
            });
            merged.resize(static_cast<std::size_t>(c.lambda));
            *inner_pop = std::move(merged);
        };
        hooks.candidates = [&c, inner_pop] {
            // The inner EA's final population, minus anything already
            // evaluated on the slow objective.
            std::vector<std::uint64_t> out;
            const auto slow_idx =
                static_cast<std::size_t>(c.ledger.profile().slow_objective());
            for (const auto id : *inner_pop)
                if (c.at(id).slots[slow_idx].pending() && !c.at(id).parent_ids.empty())
                    out.push_back(id);
            return out;
        };
        return hooks;
    };
    return run_interleave_cycles(problem, sim_cfg, ctx, make_hooks,
                                 "speculative interleave");
}

// ---------------------------------------------------------------------------
// Surrogate interleave: per-objective models trained on the evaluation
// archives propose each slow batch; the idle fast capacity scores auxiliary
// samples around it.

RunOutput run_surrogate_interleave(const ProblemInstance& problem,
                                   const sim::SimConfig& sim_cfg,
                                   const StrategyConfig& cfg,
                                   const SurrogateBuilder& builder) {
    require_bi_objective(problem, "surrogate interleave");
    if (sim_cfg.stopping_mode != sim::StoppingMode::PerObjectiveEvaluations)
        throw std::invalid_argument(
            "surrogate interleave runs under the PerObjectiveEvaluations mode");
    RunContext ctx(problem, sim_cfg, cfg);
    const auto& profile = ctx.ledger.profile();
    const int slow = profile.slow_objective();
    const int fast = profile.fast_objective();
    const int k_slow = profile.latency(slow);
    const int k_fast = profile.latency(fast);
    const int u = cfg.samples_per_iteration;
    if (u < 1 || u > ctx.lambda)
        throw std::invalid_argument("samples_per_iteration must lie in [1, lambda]");

    const SurrogateBuilder fit_model =
        builder ? builder
                : SurrogateBuilder([](const std::vector<surrogate::Sample>& samples, int,
                                      int) { return surrogate::RbfModel::fit(samples); });

    if (!ctx.ledger.can_submit(slow, ctx.lambda) || !ctx.ledger.can_submit(fast, ctx.lambda))
        throw BudgetTooSmall("the initial population exceeds an evaluation budget");

    std::vector<surrogate::Sample> slow_samples, fast_samples;
    const auto record_samples = [&](const BatchJob& job) {
        auto& store = job.objective == slow ? slow_samples : fast_samples;
        for (std::size_t i = 0; i < job.solutions.size(); ++i)
            store.emplace_back(problems::genome_as_reals(ctx.at(job.solutions[i]).genome),
                               job.values[i]);
    };
    const auto capped = [&](const std::vector<surrogate::Sample>& samples) {
        const auto cap = static_cast<std::size_t>(cfg.max_training_points);
        if (samples.size() <= cap) return samples;
        return std::vector<surrogate::Sample>(samples.end() - static_cast<std::ptrdiff_t>(cap),
                                              samples.end());
    };

    std::vector<double> lower, upper;
    domain_bounds(problem, lower, upper);

    // One slow cycle: evaluate `batch` on both objectives while `aux_source`
    // feeds the idle fast capacity, one batch per fast window.
    const auto run_cycle = [&](const std::vector<std::uint64_t>& batch,
                               const std::function<std::vector<std::uint64_t>()>& aux_source) {
        const sim::TimeStep t0 = ctx.ledger.now();
        const sim::TimeStep cycle_end = t0 + k_slow;
        ctx.submit(slow, batch);
        bool fast_ready = false;
        std::vector<std::uint64_t> fast_part = batch;
        while (!fast_part.empty() &&
               !ctx.ledger.can_submit(fast, static_cast<int>(fast_part.size())))
            fast_part.pop_back();  // fast budget may be tighter than the batch
        if (!fast_part.empty())
            ctx.submit(fast, fast_part);
        else
            fast_ready = true;  // nothing to wait for, go straight to aux
        int batches_left = k_slow / k_fast - 1;

        const auto submit_aux = [&] {
            if (batches_left <= 0 || !fast_ready) return;
            if (ctx.ledger.objective_busy(fast)) return;
            if (ctx.ledger.now() + k_fast > cycle_end) return;
            auto aux = aux_source();
            while (!aux.empty() &&
                   !ctx.ledger.can_submit(fast, static_cast<int>(aux.size())))
                aux.pop_back();
            if (aux.empty()) return;
            ctx.submit(fast, aux);
            --batches_left;
        };
        submit_aux();
        while (ctx.ledger.objective_busy(slow)) {
            const auto done = ctx.advance();
            for (const auto& job : done) {
                record_samples(job);
                if (job.objective == fast) fast_ready = true;
            }
            submit_aux();
        }
    };

    // Initialization: full-size population on both objectives, with a
    // single-objective EA over the fast objective filling the first cycle.
    auto population = ctx.birth_random(ctx.lambda);
    {
        const auto fast_idx = static_cast<std::size_t>(fast);
        auto inner_pop = population;
        std::vector<std::uint64_t> last_batch;
        const auto merge_elitist = [&] {
            // A batch may have been truncated against the fast budget; merge
            // only the offspring whose values actually arrived.
            std::erase_if(last_batch, [&](std::uint64_t id) {
                return !ctx.at(id).slots[fast_idx].is_true();
            });
            if (last_batch.empty()) return;
            auto merged = inner_pop;
            merged.insert(merged.end(), last_batch.begin(), last_batch.end());
            std::sort(merged.begin(), merged.end(), [&](std::uint64_t a, std::uint64_t b) {
                const double va = ctx.value_of(a, fast);
                const double vb = ctx.value_of(b, fast);
                if (va != vb) return va < vb;
                return a < b;
            });
            merged.resize(static_cast<std::size_t>(ctx.lambda));
            inner_pop = std::move(merged);
            last_batch.clear();
        };
        run_cycle(population, [&]() -> std::vector<std::uint64_t> {
            merge_elitist();
            last_batch = ctx.so_offspring(inner_pop, fast, ctx.lambda);
            return last_batch;
        });
    }

    int iteration = 1;
    while (!ctx.ledger.is_exhausted()) {
        const auto slow_left = sim_cfg.max_fe_per_objective[static_cast<std::size_t>(slow)] -
                               ctx.ledger.fe_consumed()[static_cast<std::size_t>(slow)];
        const int u_eff = static_cast<int>(std::min<std::int64_t>(u, slow_left));
        if (u_eff < 1) break;

        std::vector<surrogate::RbfModel> models;
        try {
            for (int obj = 0; obj < 2; ++obj)
                models.push_back(fit_model(
                    capped(obj == slow ? slow_samples : fast_samples), obj, iteration));
        } catch (const surrogate::DegenerateSet& e) {
            throw SurrogateFitFailure(e.what());
        }

        // Inner multiobjective EA over the predicted means (model evaluations
        // are free); its final population forms the acquisition pool.
        std::vector<Genome> pool(static_cast<std::size_t>(cfg.inner_population));
        for (auto& g : pool) g = problem.random_genome(ctx.eng);
        std::vector<std::vector<double>> pool_pts;
        const auto predict_means = [&](const Genome& g) {
            const auto reals = problems::genome_as_reals(g);
            std::vector<double> means;
            means.reserve(models.size());
            for (const auto& model : models) means.push_back(model.predict(reals).mean);
            return means;
        };
        for (const auto& g : pool) pool_pts.push_back(predict_means(g));
        for (int gen = 0; gen < cfg.inner_generations; ++gen) {
            const auto ranking = moea::rank_population(pool_pts);
            std::vector<Genome> offspring;
            while (offspring.size() < pool.size()) {
                const auto& a = pool[moea::binary_tournament(ranking, ctx.eng)];
                const auto& b = pool[moea::binary_tournament(ranking, ctx.eng)];
                for (auto& child : moea::vary({&a, &b}, cfg.variation, ctx.eng)) {
                    if (offspring.size() >= pool.size()) break;
                    offspring.push_back(std::move(child));
                }
            }
            auto merged = pool;
            merged.insert(merged.end(), offspring.begin(), offspring.end());
            auto merged_pts = pool_pts;
            for (std::size_t i = pool.size(); i < merged.size(); ++i)
                merged_pts.push_back(predict_means(merged[i]));
            const auto kept = moea::environmental_selection(merged_pts, pool.size());
            std::vector<Genome> next;
            std::vector<std::vector<double>> next_pts;
            for (const auto i : kept) {
                next.push_back(merged[i]);
                next_pts.push_back(merged_pts[i]);
            }
            pool = std::move(next);
            pool_pts = std::move(next_pts);
        }

        // Drop genomes already evaluated on the slow objective; refill with
        // random ones if the pool collapses.
        std::vector<Genome> candidates;
        for (auto& g : pool) {
            const bool known = std::any_of(
                slow_samples.begin(), slow_samples.end(),
                [&](const surrogate::Sample& s) { return s.first == problems::genome_as_reals(g); });
            if (!known) candidates.push_back(std::move(g));
        }
        while (candidates.size() < static_cast<std::size_t>(u_eff))
            candidates.push_back(problem.random_genome(ctx.eng));
        std::vector<std::vector<double>> candidate_reals;
        candidate_reals.reserve(candidates.size());
        for (const auto& g : candidates)
            candidate_reals.push_back(problems::genome_as_reals(g));
        const auto picked = surrogate::acquire(models, candidate_reals,
                                               static_cast<std::size_t>(u_eff), ctx.eng);

        std::vector<std::uint64_t> batch;
        batch.reserve(picked.size());
        for (const auto i : picked) batch.push_back(ctx.birth(candidates[i], {}));

        if (cfg.surrogate_sampling == SurrogateSampling::UniformVariation) {
            run_cycle(batch, [&] { return ctx.uniform_offspring(batch, u_eff); });
        } else {
            // Latin hypercube designs around the new samples, one point per
            // center per auxiliary batch.
            const int designs = std::max(k_slow / k_fast - 1, 1);
            std::vector<std::vector<double>> centers;
            for (const auto id : batch)
                centers.push_back(problems::genome_as_reals(ctx.at(id).genome));
            const auto samples = surrogate::lhs_sample(centers, designs,
                                                       cfg.lhs_box_fraction, lower, upper,
                                                       ctx.eng);
            int next_design = 0;
            run_cycle(batch, [&]() -> std::vector<std::uint64_t> {
                if (next_design >= designs) return {};
                std::vector<std::uint64_t> aux;
                for (std::size_t c = 0; c < centers.size(); ++c)
                    aux.push_back(ctx.birth(
                        genome_from_reals(problem,
                                          samples[c * static_cast<std::size_t>(designs) +
                                                  static_cast<std::size_t>(next_design)]),
                        {batch[c]}));
                ++next_design;
                return aux;
            });
        }
        ++iteration;
    }
    ctx.drain();
    return ctx.finish(sim_cfg);
}

RunOutput run_strategy(const ProblemInstance& problem, const sim::SimConfig& sim_cfg,
                       const StrategyConfig& cfg) {
    switch (cfg.kind) {
        case StrategyKind::Waiting: return run_waiting(problem, sim_cfg, cfg);
        case StrategyKind::FastFirst: return run_fast_first(problem, sim_cfg, cfg);
        case StrategyKind::RankingInterleave:
            return run_ranking_interleave(problem, sim_cfg, cfg);
        case StrategyKind::BroodInterleave:
            return run_brood_interleave(problem, sim_cfg, cfg);
        case StrategyKind::SpeculativeInterleave:
            return run_speculative_interleave(problem, sim_cfg, cfg);
        case StrategyKind::SurrogateInterleave:
            return run_surrogate_interleave(problem, sim_cfg, cfg);
    }
    throw std::invalid_argument("unknown strategy kind");
}

// ---------------------------------------------------------------------------
// Serialization

std::string to_string(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::Waiting: return "waiting";
        case StrategyKind::FastFirst: return "fast_first";
        case StrategyKind::RankingInterleave: return "ranking_interleave";
        case StrategyKind::BroodInterleave: return "brood_interleave";
        case StrategyKind::SpeculativeInterleave: return "speculative_interleave";
        case StrategyKind::SurrogateInterleave: return "surrogate_interleave";
    }
    return "unknown";
}

StrategyKind strategy_kind_from_string(const std::string& s) {
    if (s == "waiting") return StrategyKind::Waiting;
    if (s == "fast_first") return StrategyKind::FastFirst;
    if (s == "ranking_interleave") return StrategyKind::RankingInterleave;
    if (s == "brood_interleave") return StrategyKind::BroodInterleave;
    if (s == "speculative_interleave") return StrategyKind::SpeculativeInterleave;
    if (s == "surrogate_interleave") return StrategyKind::SurrogateInterleave;
    throw std::invalid_argument("unknown strategy kind: " + s);
}

nlohmann::ordered_json strategy_config_json(const StrategyConfig& cfg) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(cfg.kind);
    j["name"] = cfg.name.empty() ? to_string(cfg.kind) : cfg.name;
    j["population_size"] = cfg.population_size;
    j["engine"] = cfg.engine == Engine::Generational ? "generational" : "steady_state";
    j["rng_seed"] = cfg.rng_seed;
    if (cfg.switch_fraction) j["switch_fraction"] = *cfg.switch_fraction;
    j["pseudo_scheme"] = cfg.pseudo_scheme == PseudoScheme::FitnessInheritance
                             ? "fitness_inheritance"
                             : "population_mean";
    j["batch_selection"] =
        cfg.batch_selection == BatchSelection::RankBased ? "rank_based" : "most_recent";
    j["samples_per_iteration"] = cfg.samples_per_iteration;
    j["transfer_trigger"] = cfg.transfer_trigger;
    j["surrogate_sampling"] = cfg.surrogate_sampling == SurrogateSampling::UniformVariation
                                  ? "uniform_variation"
                                  : "latin_hypercube";
    j["inner_population"] = cfg.inner_population;
    j["inner_generations"] = cfg.inner_generations;
    j["max_training_points"] = cfg.max_training_points;
    j["lhs_box_fraction"] = cfg.lhs_box_fraction;
    j["crossover_prob"] = cfg.variation.crossover_prob;
    j["eta_c"] = cfg.variation.eta_c;
    j["eta_m"] = cfg.variation.eta_m;
    if (cfg.variation.mutation_rate) j["mutation_rate"] = *cfg.variation.mutation_rate;
    return j;
}

StrategyConfig strategy_config_from_json(const nlohmann::json& j) {
    StrategyConfig cfg;
    cfg.kind = strategy_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("name")) cfg.name = j.at("name").get<std::string>();
    if (j.contains("population_size")) cfg.population_size = j.at("population_size").get<int>();
    if (j.contains("engine")) {
        const auto s = j.at("engine").get<std::string>();
        if (s == "generational")
            cfg.engine = Engine::Generational;
        else if (s == "steady_state")
            cfg.engine = Engine::SteadyState;
        else
            throw std::invalid_argument("unknown engine: " + s);
    }
    if (j.contains("rng_seed")) cfg.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    if (j.contains("switch_fraction"))
        cfg.switch_fraction = j.at("switch_fraction").get<double>();
    if (j.contains("pseudo_scheme")) {
        const auto s = j.at("pseudo_scheme").get<std::string>();
        if (s == "fitness_inheritance")
            cfg.pseudo_scheme = PseudoScheme::FitnessInheritance;
        else if (s == "population_mean")
            cfg.pseudo_scheme = PseudoScheme::PopulationMean;
        else
            throw std::invalid_argument("unknown pseudo scheme: " + s);
    }
    if (j.contains("batch_selection")) {
        const auto s = j.at("batch_selection").get<std::string>();
        if (s == "rank_based")
            cfg.batch_selection = BatchSelection::RankBased;
        else if (s == "most_recent")
            cfg.batch_selection = BatchSelection::MostRecent;
        else
            throw std::invalid_argument("unknown batch selection: " + s);
    }
    if (j.contains("samples_per_iteration"))
        cfg.samples_per_iteration = j.at("samples_per_iteration").get<int>();
    if (j.contains("transfer_trigger"))
        cfg.transfer_trigger = j.at("transfer_trigger").get<int>();
    if (j.contains("surrogate_sampling")) {
        const auto s = j.at("surrogate_sampling").get<std::string>();
        if (s == "uniform_variation")
            cfg.surrogate_sampling = SurrogateSampling::UniformVariation;
        else if (s == "latin_hypercube")
            cfg.surrogate_sampling = SurrogateSampling::LatinHypercube;
        else
            throw std::invalid_argument("unknown surrogate sampling: " + s);
    }
    if (j.contains("inner_population"))
        cfg.inner_population = j.at("inner_population").get<int>();
    if (j.contains("inner_generations"))
        cfg.inner_generations = j.at("inner_generations").get<int>();
    if (j.contains("max_training_points"))
        cfg.max_training_points = j.at("max_training_points").get<int>();
    if (j.contains("lhs_box_fraction"))
        cfg.lhs_box_fraction = j.at("lhs_box_fraction").get<double>();
    if (j.contains("crossover_prob"))
        cfg.variation.crossover_prob = j.at("crossover_prob").get<double>();
    if (j.contains("eta_c")) cfg.variation.eta_c = j.at("eta_c").get<double>();
    if (j.contains("eta_m")) cfg.variation.eta_m = j.at("eta_m").get<double>();
    if (j.contains("mutation_rate"))
        cfg.variation.mutation_rate = j.at("mutation_rate").get<double>();
    return cfg;
}

nlohmann::ordered_json sim_config_json(const sim::SimConfig& cfg) {
    nlohmann::ordered_json j;
    j["total_time_steps"] = cfg.total_time_steps;
    j["batch_capacity"] = cfg.batch_capacity;
    j["stopping_mode"] = cfg.stopping_mode == sim::StoppingMode::TimeSteps
                             ? "time_steps"
                             : "per_objective_evaluations";
    if (!cfg.max_fe_per_objective.empty())
        j["max_fe_per_objective"] = cfg.max_fe_per_objective;
    return j;
}

sim::SimConfig sim_config_from_json(const nlohmann::json& j) {
    sim::SimConfig cfg;
    if (j.contains("total_time_steps"))
        cfg.total_time_steps = j.at("total_time_steps").get<sim::TimeStep>();
    cfg.batch_capacity = j.at("batch_capacity").get<int>();
    const auto mode = j.at("stopping_mode").get<std::string>();
    if (mode == "time_steps")
        cfg.stopping_mode = sim::StoppingMode::TimeSteps;
    else if (mode == "per_objective_evaluations")
        cfg.stopping_mode = sim::StoppingMode::PerObjectiveEvaluations;
    else
        throw std::invalid_argument("unknown stopping_mode: " + mode);
    if (j.contains("max_fe_per_objective"))
        cfg.max_fe_per_objective =
            j.at("max_fe_per_objective").get<std::vector<std::int64_t>>();
    return cfg;
}

nlohmann::ordered_json run_record_json(const RunRecord& record) {
    // The summary deliberately carries these five keys only; the event log is
    // serialized separately in the JSON-lines format.
    nlohmann::ordered_json j;
    j["config"] = record.config;
    j["fe"] = record.fe;
    j["front"] = record.front;
    j["metrics"] = record.metrics;
    j["seed"] = record.seed;
    return j;
}

RunRecord run_record_from_json(const nlohmann::json& j) {
    RunRecord record;
    record.config = j.at("config");
    record.fe = j.at("fe").get<std::vector<std::int64_t>>();
    record.front = j.at("front").get<std::vector<std::vector<double>>>();
    record.metrics = j.at("metrics");
    record.seed = j.at("seed").get<std::uint64_t>();
    return record;
}

}  // namespace latmoo::strategies
