#include "latmoo/problems.hpp"

#include <algorithm>
#include <cmath>

namespace latmoo::problems {

bool same_genome(const Genome& a, const Genome& b) { return a == b; }

std::size_t genome_dimension(const Genome& g) {
    return std::visit(
        [](const auto& v) {
            if constexpr (std::is_same_v<std::decay_t<decltype(v)>, BinaryGenome>)
                return v.bits.size();
            else
                return v.x.size();
        },
        g);
}

std::vector<double> genome_as_reals(const Genome& g) {
    if (const auto* b = std::get_if<BinaryGenome>(&g)) {
        std::vector<double> out(b->bits.size());
        for (std::size_t i = 0; i < b->bits.size(); ++i) out[i] = b->bits[i] ? 1.0 : 0.0;
        return out;
    }
    return std::get<ContinuousGenome>(g).x;
}

namespace detail {

double MnkModel::contribution(int objective, int locus, std::uint32_t pattern) const {
    const int owner = table_owner[static_cast<std::size_t>(objective)]
                                 [static_cast<std::size_t>(locus)];
    return rng::unit_from_bits(rng::hash_mix(seed, static_cast<std::uint64_t>(owner),
                                             static_cast<std::uint64_t>(locus), pattern));
}

std::uint32_t MnkModel::pattern_at(const BinaryGenome& g, int objective, int locus) const {
    const int owner = table_owner[static_cast<std::size_t>(objective)]
                                 [static_cast<std::size_t>(locus)];
    const auto& nbrs = neighborhoods[static_cast<std::size_t>(owner)]
                                    [static_cast<std::size_t>(locus)];
    std::uint32_t pattern = g.bits[static_cast<std::size_t>(locus)] ? 1u : 0u;
    for (std::size_t i = 0; i < nbrs.size(); ++i)
        if (g.bits[static_cast<std::size_t>(nbrs[i])]) pattern |= 1u << (i + 1);
    return pattern;
}

double MnkModel::evaluate(const BinaryGenome& g, int objective) const {
    double sum = 0.0;
    for (int locus = 0; locus < bits; ++locus)
        sum += contribution(objective, locus, pattern_at(g, objective, locus));
    return sum / static_cast<double>(bits);
}

double CorrToyModel::evaluate(const ContinuousGenome& g, int objective) const {
    const auto bowl = [this, &g](const std::vector<double>& anchor) {
        double sum = 0.0;
        for (int i = 0; i < dims; ++i) {
            const double d = g.x[static_cast<std::size_t>(i)] -
                             anchor[static_cast<std::size_t>(i)];
            sum += d * d;
        }
        return sum / static_cast<double>(dims);
    };
    if (objective == 0) return bowl(anchor_a);
    return rho * bowl(anchor_a) + (1.0 - std::abs(rho)) * bowl(anchor_b);
}

// Distinct random neighbors for one locus, drawn without replacement.
static std::vector<int> draw_neighborhood(rng::Engine& eng, int bits, int locus, int k) {
    std::vector<int> pool;
    pool.reserve(static_cast<std::size_t>(bits) - 1);
    for (int i = 0; i < bits; ++i)
        if (i != locus) pool.push_back(i);
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        const std::size_t j = rng::index_below(eng, pool.size());
        out.push_back(pool[j]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
    }
    return out;
}

}  // namespace detail

int ProblemInstance::objective_count() const {
    if (const auto* mnk = std::get_if<detail::MnkModel>(&model_)) return mnk->objectives;
    return 2;
}

int ProblemInstance::dimension() const {
    if (const auto* mnk = std::get_if<detail::MnkModel>(&model_)) return mnk->bits;
    return std::get<detail::CorrToyModel>(model_).dims;
}

double ProblemInstance::evaluate(const Genome& genome, int objective) const {
    if (objective < 0 || objective >= objective_count())
        throw DomainMismatch("objective index out of range");
    if (const auto* mnk = std::get_if<detail::MnkModel>(&model_)) {
        const auto* g = std::get_if<BinaryGenome>(&genome);
        if (!g || static_cast<int>(g->bits.size()) != mnk->bits)
            throw DomainMismatch("expected a binary genome of length " +
                                 std::to_string(mnk->bits));
        return mnk->evaluate(*g, objective);
    }
    const auto& toy = std::get<detail::CorrToyModel>(model_);
    const auto* g = std::get_if<ContinuousGenome>(&genome);
    if (!g || static_cast<int>(g->x.size()) != toy.dims)
        throw DomainMismatch("expected a continuous genome of dimension " +
                             std::to_string(toy.dims));
    return toy.evaluate(*g, objective);
}

void ProblemInstance::set_latencies(sim::LatencyProfile profile) {
    profile.validate();
    if (profile.objective_count() != objective_count())
        throw std::invalid_argument("latency profile must match objective count");
    latencies_ = std::move(profile);
}

Genome ProblemInstance::random_genome(rng::Engine& eng) const {
    if (const auto* mnk = std::get_if<detail::MnkModel>(&model_)) {
        BinaryGenome g;
        g.bits.resize(static_cast<std::size_t>(mnk->bits));
        for (auto& b : g.bits) b = rng::bernoulli(eng, 0.5) ? 1 : 0;
        return g;
    }
    const auto& toy = std::get<detail::CorrToyModel>(model_);
    ContinuousGenome g;
    g.lower.assign(static_cast<std::size_t>(toy.dims), 0.0);
    g.upper.assign(static_cast<std::size_t>(toy.dims), 1.0);
    g.x.resize(static_cast<std::size_t>(toy.dims));
    for (auto& v : g.x) v = rng::uniform01(eng);
    return g;
}

nlohmann::ordered_json ProblemInstance::descriptor() const {
    nlohmann::ordered_json j;
    j["kind"] = kind_;
    j["params"] = params_;
    j["seed"] = seed_;
    j["latencies"] = latencies_.latencies;
    return j;
}

ProblemInstance ProblemInstance::from_descriptor(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    const auto seed = j.at("seed").get<std::uint64_t>();
    std::vector<int> latencies;
    if (j.contains("latencies")) latencies = j.at("latencies").get<std::vector<int>>();
    const auto& p = j.at("params");
    if (kind == "mnk")
        return make_mnk(p.at("m").get<int>(), p.at("n").get<int>(), p.at("k").get<int>(),
                        seed, latencies);
    if (kind == "corr_toy")
        return make_correlated_pair(p.at("rho").get<double>(), p.at("n").get<int>(), seed,
                                    latencies);
    if (kind == "corr_mnk")
        return make_correlated_mnk(p.at("rho").get<double>(), p.at("n").get<int>(),
                                   p.at("k").get<int>(), seed, latencies);
    throw std::invalid_argument("unknown problem kind: " + kind);
}

double ProblemInstance::mnk_contribution(int objective, int locus,
                                         std::uint32_t pattern) const {
    const auto* mnk = std::get_if<detail::MnkModel>(&model_);
    if (!mnk) throw DomainMismatch("not an NK instance");
    return mnk->contribution(objective, locus, pattern);
}

std::span<const int> ProblemInstance::mnk_neighborhood(int objective, int locus) const {
    const auto* mnk = std::get_if<detail::MnkModel>(&model_);
    if (!mnk) throw DomainMismatch("not an NK instance");
    const int owner = mnk->table_owner[static_cast<std::size_t>(objective)]
                                      [static_cast<std::size_t>(locus)];
    return mnk->neighborhoods[static_cast<std::size_t>(owner)][static_cast<std::size_t>(locus)];
}

int ProblemInstance::mnk_epistasis() const {
    const auto* mnk = std::get_if<detail::MnkModel>(&model_);
    if (!mnk) throw DomainMismatch("not an NK instance");
    return mnk->epistasis;
}

static sim::LatencyProfile default_profile(int objectives, std::vector<int> latencies) {
    if (latencies.empty()) latencies.assign(static_cast<std::size_t>(objectives), 1);
    sim::LatencyProfile profile{std::move(latencies)};
    profile.validate();
    if (profile.objective_count() != objectives)
        throw std::invalid_argument("latency profile must match objective count");
    return profile;
}

ProblemInstance make_mnk(int objectives, int bits, int epistasis, std::uint64_t seed,
                         std::vector<int> latencies) {
    if (objectives < 1) throw std::invalid_argument("objectives must be >= 1");
    if (bits < 1) throw std::invalid_argument("bits must be >= 1");
    if (epistasis < 0 || epistasis >= bits)
        throw InvalidEpistasis("epistasis must lie in [0, bits-1]");

    detail::MnkModel model;
    model.objectives = objectives;
    model.bits = bits;
    model.epistasis = epistasis;
    model.seed = seed;
    rng::Engine eng(seed);
    model.table_owner.resize(static_cast<std::size_t>(objectives));
    model.neighborhoods.resize(static_cast<std::size_t>(objectives));
    for (int obj = 0; obj < objectives; ++obj) {
        auto& owners = model.table_owner[static_cast<std::size_t>(obj)];
        auto& nbrs = model.neighborhoods[static_cast<std::size_t>(obj)];
        owners.assign(static_cast<std::size_t>(bits), obj);
        nbrs.resize(static_cast<std::size_t>(bits));
        for (int locus = 0; locus < bits; ++locus)
            nbrs[static_cast<std::size_t>(locus)] =
                detail::draw_neighborhood(eng, bits, locus, epistasis);
    }

    ProblemInstance inst;
    inst.model_ = std::move(model);
    inst.kind_ = "mnk";
    inst.params_ = {{"m", objectives}, {"n", bits}, {"k", epistasis}};
    inst.seed_ = seed;
    inst.latencies_ = default_profile(objectives, std::move(latencies));
    return inst;
}

ProblemInstance make_correlated_pair(double rho, int dims, std::uint64_t seed,
                                     std::vector<int> latencies) {
    if (dims < 1) throw std::invalid_argument("dims must be >= 1");
    if (rho < -1.0 || rho > 1.0) throw std::invalid_argument("rho must lie in [-1, 1]");

    detail::CorrToyModel model;
    model.dims = dims;
    model.rho = rho;
    rng::Engine eng(seed);
    model.anchor_a.resize(static_cast<std::size_t>(dims));
    model.anchor_b.resize(static_cast<std::size_t>(dims));
    for (auto& v : model.anchor_a) v = rng::uniform01(eng);
    for (auto& v : model.anchor_b) v = rng::uniform01(eng);

    ProblemInstance inst;
    inst.model_ = std::move(model);
    inst.kind_ = "corr_toy";
    inst.params_ = {{"rho", rho}, {"n", dims}};
    inst.seed_ = seed;
    inst.latencies_ = default_profile(2, std::move(latencies));
    return inst;
}

ProblemInstance make_correlated_mnk(double rho, int bits, int epistasis, std::uint64_t seed,
                                    std::vector<int> latencies) {
    if (rho < -1.0 || rho > 1.0) throw std::invalid_argument("rho must lie in [-1, 1]");
    ProblemInstance inst = make_mnk(2, bits, epistasis, seed, std::move(latencies));
    auto& model = std::get<detail::MnkModel>(inst.model_);
    // Re-seed the sharing decisions from a dedicated stream so they do not
    // disturb the neighborhood draws above.
    rng::Engine eng(rng::hash_mix(seed, 0x5ca1ab1e));
    const double share_prob = (1.0 + rho) / 2.0;
    for (int locus = 0; locus < bits; ++locus)
        if (rng::bernoulli(eng, share_prob))
            model.table_owner[1][static_cast<std::size_t>(locus)] = 0;
    inst.kind_ = "corr_mnk";
    inst.params_ = {{"rho", rho}, {"n", bits}, {"k", epistasis}};
    return inst;
}

}  // namespace latmoo::problems
