#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "latmoo/rng.hpp"
#include "latmoo/sim_clock.hpp"

namespace latmoo::problems {

struct DomainMismatch : std::runtime_error {
    explicit DomainMismatch(const std::string& m) : std::runtime_error(m) {}
};
struct InvalidEpistasis : std::runtime_error {
    explicit InvalidEpistasis(const std::string& m) : std::runtime_error(m) {}
};

struct BinaryGenome {
    std::vector<std::uint8_t> bits;
    bool operator==(const BinaryGenome&) const = default;
};

struct ContinuousGenome {
    std::vector<double> x;
    std::vector<double> lower;
    std::vector<double> upper;
    bool operator==(const ContinuousGenome&) const = default;
};

using Genome = std::variant<BinaryGenome, ContinuousGenome>;

bool same_genome(const Genome& a, const Genome& b);
std::size_t genome_dimension(const Genome& g);
/// Binary genomes embed as 0/1 reals; continuous ones pass through.
std::vector<double> genome_as_reals(const Genome& g);

namespace detail {

// NK contribution tables are defined implicitly: entry (objective, locus,
// pattern) is the unit double produced by a stateless hash of the instance
// seed. This keeps any (N, K) combination O(1) in memory and bit-reproducible.
struct MnkModel {
    int objectives = 0;
    int bits = 0;
    int epistasis = 0;
    std::uint64_t seed = 0;
    // table_owner[obj][locus]: objective whose table/neighborhood is used
    // (differs from obj only in the shared-table correlated variant).
    std::vector<std::vector<int>> table_owner;
    std::vector<std::vector<std::vector<int>>> neighborhoods;  // [obj][locus] -> loci

    double contribution(int objective, int locus, std::uint32_t pattern) const;
    std::uint32_t pattern_at(const BinaryGenome& g, int objective, int locus) const;
    double evaluate(const BinaryGenome& g, int objective) const;
};

struct CorrToyModel {
    int dims = 0;
    double rho = 0.0;
    std::vector<double> anchor_a;
    std::vector<double> anchor_b;

    double evaluate(const ContinuousGenome& g, int objective) const;
};

}  // namespace detail

/// An evaluatable multiobjective benchmark instance. Evaluators are pure and
/// deterministic; the latency profile is carried alongside but never affects
/// objective values. `descriptor()` plus the stored seed reproduce the
/// instance exactly.
class ProblemInstance {
  public:
    int objective_count() const;
    double evaluate(const Genome& genome, int objective) const;

    const sim::LatencyProfile& latencies() const { return latencies_; }
    void set_latencies(sim::LatencyProfile profile);

    bool is_binary() const { return std::holds_alternative<detail::MnkModel>(model_); }
    int dimension() const;
    Genome random_genome(rng::Engine& eng) const;

    nlohmann::ordered_json descriptor() const;
    static ProblemInstance from_descriptor(const nlohmann::json& j);

    // Introspection hooks for NK instances (used by table-trace oracles).
    double mnk_contribution(int objective, int locus, std::uint32_t pattern) const;
    std::span<const int> mnk_neighborhood(int objective, int locus) const;
    int mnk_epistasis() const;

    friend ProblemInstance make_mnk(int objectives, int bits, int epistasis,
                                    std::uint64_t seed, std::vector<int> latencies);
    friend ProblemInstance make_correlated_pair(double rho, int dims, std::uint64_t seed,
                                                std::vector<int> latencies);
    friend ProblemInstance make_correlated_mnk(double rho, int bits, int epistasis,
                                               std::uint64_t seed, std::vector<int> latencies);

  private:
    std::variant<detail::MnkModel, detail::CorrToyModel> model_;
    sim::LatencyProfile latencies_;
    std::string kind_;
    nlohmann::ordered_json params_;
    std::uint64_t seed_ = 0;
};

/// M independent NK landscapes over N bits with epistasis K (values averaged
/// into [0, 1], minimization orientation is applied by the caller's metrics).
ProblemInstance make_mnk(int objectives, int bits, int epistasis, std::uint64_t seed,
                         std::vector<int> latencies = {});

/// Continuous bi-objective toy on [0,1]^n with a correlation knob rho in
/// [-1, 1]: f1 is a quadratic bowl at anchor a, f2 = rho*f1 + (1-|rho|) *
/// (bowl at anchor b).
ProblemInstance make_correlated_pair(double rho, int dims, std::uint64_t seed,
                                     std::vector<int> latencies = {});

/// Binary analogue: two NK landscapes sharing each per-locus contribution
/// table independently with probability (1+rho)/2.
ProblemInstance make_correlated_mnk(double rho, int bits, int epistasis, std::uint64_t seed,
                                    std::vector<int> latencies = {});

}  // namespace latmoo::problems
