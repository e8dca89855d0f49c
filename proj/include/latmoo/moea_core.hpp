#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "latmoo/problems.hpp"
#include "latmoo/rng.hpp"

namespace latmoo::moea {

struct LengthMismatch : std::runtime_error {
    explicit LengthMismatch(const std::string& m) : std::runtime_error(m) {}
};
struct IncompleteVector : std::runtime_error {
    explicit IncompleteVector(const std::string& m) : std::runtime_error(m) {}
};
struct EmptyParentSet : std::runtime_error {
    explicit EmptyParentSet(const std::string& m) : std::runtime_error(m) {}
};
struct SlotTransition : std::logic_error {
    explicit SlotTransition(const std::string& m) : std::logic_error(m) {}
};

enum class SlotState { Pending, Pseudo, True };

/// Per-objective value slot with a one-way lifecycle:
/// Pending -> Pseudo -> True or Pending -> True. Backward moves throw.
class ValueSlot {
  public:
    SlotState state() const { return state_; }
    bool pending() const { return state_ == SlotState::Pending; }
    bool is_true() const { return state_ == SlotState::True; }
    bool was_pseudo() const { return was_pseudo_; }

    double value() const {
        if (state_ == SlotState::Pending) throw IncompleteVector("slot value still pending");
        return value_;
    }

    void set_pseudo(double v) {
        if (state_ != SlotState::Pending)
            throw SlotTransition("pseudovalue may only replace a pending slot");
        state_ = SlotState::Pseudo;
        was_pseudo_ = true;
        value_ = v;
    }

    void set_true(double v) {
        if (state_ == SlotState::True)
            throw SlotTransition("slot already holds a true value");
        state_ = SlotState::True;
        value_ = v;
    }

  private:
    SlotState state_ = SlotState::Pending;
    bool was_pseudo_ = false;
    double value_ = 0.0;
};

struct Individual {
    std::uint64_t id = 0;
    problems::Genome genome;
    std::vector<ValueSlot> slots;
    std::int64_t birth_time = 0;
    std::vector<std::uint64_t> parent_ids;

    bool fully_evaluated() const {
        for (const auto& s : slots)
            if (!s.is_true()) return false;
        return !slots.empty();
    }
    bool comparable(bool allow_pseudo) const {
        for (const auto& s : slots) {
            if (s.pending()) return false;
            if (!allow_pseudo && !s.is_true()) return false;
        }
        return !slots.empty();
    }
    /// Current objective vector; throws IncompleteVector on a Pending slot or,
    /// with allow_pseudo = false, on a Pseudo one.
    std::vector<double> objective_vector(bool allow_pseudo = true) const;
};

/// Strict Pareto dominance, minimization: a <= b componentwise and a < b
/// somewhere.
bool dominates(std::span<const double> a, std::span<const double> b);

/// Fronts of mutually nondominated points; front r is nondominated once
/// fronts < r are removed. Bi-objective inputs take an O(n log n) sweep, the
/// general case runs the usual O(n^2 m) algorithm.
std::vector<std::vector<std::size_t>> nondominated_sort(
    const std::vector<std::vector<double>>& points);

/// NSGA-II crowding distances for the members of one front (indices into
/// `points`); boundary members get +infinity.
std::vector<double> crowding_distances(const std::vector<std::vector<double>>& points,
                                       const std::vector<std::size_t>& front);

struct Ranking {
    std::vector<int> rank;
    std::vector<double> crowding;
};

Ranking rank_population(const std::vector<std::vector<double>>& points);

/// Binary tournament on (rank, crowding); remaining ties resolved by a coin
/// from the caller's stream.
std::size_t binary_tournament(const Ranking& ranking, rng::Engine& eng);

/// NSGA-II style truncation: whole fronts while they fit, the overflow front
/// by descending crowding. Returns the kept indices.
std::vector<std::size_t> environmental_selection(
    const std::vector<std::vector<double>>& points, std::size_t mu);

/// Index of the individual a steady-state step should discard: worst rank,
/// then smallest crowding, then youngest id.
std::size_t worst_index(const std::vector<std::vector<double>>& points,
                        const std::vector<std::uint64_t>& ids);

struct VariationConfig {
    double crossover_prob = 0.9;
    double eta_c = 15.0;  // SBX distribution index
    double eta_m = 20.0;  // polynomial mutation index
    std::optional<double> mutation_rate;  // default 1/dimension
};

/// Continuous parents: SBX plus bounded polynomial mutation. Binary parents:
/// uniform crossover plus per-bit flips. Two offspring from the first two
/// parents; a single parent yields one mutated clone.
std::vector<problems::Genome> vary(const std::vector<const problems::Genome*>& parents,
                                   const VariationConfig& config, rng::Engine& eng);

/// Archive of fully evaluated, mutually nondominated individuals. Optionally
/// capacity-bounded; overflow evicts the most crowded-in member (smallest
/// crowding distance). Duplicated objective vectors are rejected so
/// re-inserting a member is a no-op.
class ParetoArchive {
  public:
    ParetoArchive() = default;
    explicit ParetoArchive(std::size_t capacity) : capacity_(capacity) {}

    /// True iff the candidate was added.
    bool insert(const Individual& candidate);
    const std::vector<Individual>& members() const { return members_; }
    std::size_t size() const { return members_.size(); }

  private:
    std::optional<std::size_t> capacity_;
    std::vector<Individual> members_;
};

}  // namespace latmoo::moea
