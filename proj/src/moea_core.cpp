#include "latmoo/moea_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace latmoo::moea {

std::vector<double> Individual::objective_vector(bool allow_pseudo) const {
    std::vector<double> out;
    out.reserve(slots.size());
    for (const auto& s : slots) {
        if (s.pending())
            throw IncompleteVector("individual " + std::to_string(id) +
                                   " has a pending objective slot");
        if (!allow_pseudo && !s.is_true())
            throw IncompleteVector("individual " + std::to_string(id) +
                                   " still carries a pseudovalue");
        out.push_back(s.value());
    }
    return out;
}

bool dominates(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw LengthMismatch("objective vectors differ in length");
    if (a.empty()) throw LengthMismatch("objective vectors are empty");
    bool strict = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) return false;
        if (a[i] < b[i]) strict = true;
    }
    return strict;
}

namespace {

// Bi-objective fronts in O(n log n): after a lexicographic sort, a point is
// dominated by a front iff it is dominated by the front's most recently added
// member, so the target front can be found by binary search.
std::vector<std::vector<std::size_t>> sort_2d(const std::vector<std::vector<double>>& pts) {
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (pts[a][0] != pts[b][0]) return pts[a][0] < pts[b][0];
        return pts[a][1] < pts[b][1];
    });

    std::vector<std::vector<std::size_t>> fronts;
    std::vector<std::array<double, 2>> tails;  // last inserted point per front
    for (const std::size_t idx : order) {
        const double x = pts[idx][0];
        const double y = pts[idx][1];
        const auto dominated_by = [&](const std::array<double, 2>& tail) {
            return tail[1] < y || (tail[1] == y && tail[0] < x);
        };
        const auto it = std::partition_point(
            tails.begin(), tails.end(),
            [&](const std::array<double, 2>& tail) { return dominated_by(tail); });
        const auto front = static_cast<std::size_t>(std::distance(tails.begin(), it));
        if (front == fronts.size()) {
            fronts.emplace_back();
            tails.push_back({x, y});
        } else {
            tails[front] = {x, y};
        }
        fronts[front].push_back(idx);
    }
    return fronts;
}

std::vector<std::vector<std::size_t>> sort_general(
    const std::vector<std::vector<double>>& pts) {
    const std::size_t n = pts.size();
    std::vector<int> domination_count(n, 0);
    std::vector<std::vector<std::size_t>> dominated_by_me(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (dominates(pts[i], pts[j])) {
                dominated_by_me[i].push_back(j);
                ++domination_count[j];
            } else if (dominates(pts[j], pts[i])) {
                dominated_by_me[j].push_back(i);
                ++domination_count[i];
            }
        }
    }
    std::vector<std::vector<std::size_t>> fronts;
    std::vector<std::size_t> current;
    for (std::size_t i = 0; i < n; ++i)
        if (domination_count[i] == 0) current.push_back(i);
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (const std::size_t i : current)
            for (const std::size_t j : dominated_by_me[i])
                if (--domination_count[j] == 0) next.push_back(j);
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(current));
        current = std::move(next);
    }
    return fronts;
}

}  // namespace

std::vector<std::vector<std::size_t>> nondominated_sort(
    const std::vector<std::vector<double>>& points) {
    if (points.empty()) return {};
    const std::size_t m = points.front().size();
    if (m == 0) throw LengthMismatch("objective vectors are empty");
    for (const auto& p : points)
        if (p.size() != m) throw LengthMismatch("objective vectors differ in length");
    return m == 2 ? sort_2d(points) : sort_general(points);
}

std::vector<double> crowding_distances(const std::vector<std::vector<double>>& points,
                                       const std::vector<std::size_t>& front) {
    const std::size_t n = front.size();
    std::vector<double> dist(n, 0.0);
    if (n == 0) return dist;
    if (n <= 2) {
        std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
        return dist;
    }
    const std::size_t m = points[front[0]].size();
    std::vector<std::size_t> order(n);
    for (std::size_t obj = 0; obj < m; ++obj) {
        std::iota(order.begin(), order.end(), 0u);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return points[front[a]][obj] < points[front[b]][obj];
        });
        const double lo = points[front[order.front()]][obj];
        const double hi = points[front[order.back()]][obj];
        dist[order.front()] = std::numeric_limits<double>::infinity();
        dist[order.back()] = std::numeric_limits<double>::infinity();
        if (hi <= lo) continue;
        for (std::size_t i = 1; i + 1 < n; ++i)
            dist[order[i]] += (points[front[order[i + 1]]][obj] -
                               points[front[order[i - 1]]][obj]) /
                              (hi - lo);
    }
    return dist;
}

Ranking rank_population(const std::vector<std::vector<double>>& points) {
    Ranking out;
    out.rank.assign(points.size(), 0);
    out.crowding.assign(points.size(), 0.0);
    const auto fronts = nondominated_sort(points);
    for (std::size_t r = 0; r < fronts.size(); ++r) {
        const auto dist = crowding_distances(points, fronts[r]);
        for (std::size_t i = 0; i < fronts[r].size(); ++i) {
            out.rank[fronts[r][i]] = static_cast<int>(r);
            out.crowding[fronts[r][i]] = dist[i];
        }
    }
    return out;
}

std::size_t binary_tournament(const Ranking& ranking, rng::Engine& eng) {
    const std::size_t n = ranking.rank.size();
    if (n == 0) throw EmptyParentSet("tournament over an empty population");
    const std::size_t a = rng::index_below(eng, n);
    const std::size_t b = rng::index_below(eng, n);
    if (ranking.rank[a] != ranking.rank[b])
        return ranking.rank[a] < ranking.rank[b] ? a : b;
    if (ranking.crowding[a] != ranking.crowding[b])
        return ranking.crowding[a] > ranking.crowding[b] ? a : b;
    return rng::bernoulli(eng, 0.5) ? a : b;
}

std::vector<std::size_t> environmental_selection(
    const std::vector<std::vector<double>>& points, std::size_t mu) {
    std::vector<std::size_t> kept;
    if (mu == 0) return kept;
    const auto fronts = nondominated_sort(points);
    for (const auto& front : fronts) {
        if (kept.size() + front.size() <= mu) {
            kept.insert(kept.end(), front.begin(), front.end());
            if (kept.size() == mu) break;
            continue;
        }
        const auto dist = crowding_distances(points, front);
        std::vector<std::size_t> order(front.size());
        std::iota(order.begin(), order.end(), 0u);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (dist[a] != dist[b]) return dist[a] > dist[b];
            return front[a] < front[b];
        });
        for (std::size_t i = 0; kept.size() < mu; ++i) kept.push_back(front[order[i]]);
        break;
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

std::size_t worst_index(const std::vector<std::vector<double>>& points,
                        const std::vector<std::uint64_t>& ids) {
    if (points.empty()) throw EmptyParentSet("worst_index over an empty population");
    const auto ranking = rank_population(points);
    std::size_t worst = 0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (ranking.rank[i] != ranking.rank[worst]) {
            if (ranking.rank[i] > ranking.rank[worst]) worst = i;
        } else if (ranking.crowding[i] != ranking.crowding[worst]) {
            if (ranking.crowding[i] < ranking.crowding[worst]) worst = i;
        } else if (ids[i] > ids[worst]) {
            worst = i;
        }
    }
    return worst;
}

namespace {

void sbx_pair(double x1, double x2, double lo, double hi, double eta, rng::Engine& eng,
              double& c1, double& c2) {
    const double u = rng::uniform01(eng);
    double beta;
    if (u <= 0.5)
        beta = std::pow(2.0 * u, 1.0 / (eta + 1.0));
    else
        beta = std::pow(1.0 / (2.0 * (1.0 - u)), 1.0 / (eta + 1.0));
    c1 = 0.5 * ((1.0 + beta) * x1 + (1.0 - beta) * x2);
    c2 = 0.5 * ((1.0 - beta) * x1 + (1.0 + beta) * x2);
    c1 = std::clamp(c1, lo, hi);
    c2 = std::clamp(c2, lo, hi);
}

void polynomial_mutation(problems::ContinuousGenome& g, double rate, double eta,
                         rng::Engine& eng) {
    for (std::size_t i = 0; i < g.x.size(); ++i) {
        if (!rng::bernoulli(eng, rate)) continue;
        const double lo = g.lower[i];
        const double hi = g.upper[i];
        if (hi <= lo) continue;
        const double x = g.x[i];
        const double d1 = (x - lo) / (hi - lo);
        const double d2 = (hi - x) / (hi - lo);
        const double u = rng::uniform01(eng);
        double dq;
        if (u < 0.5) {
            const double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, eta + 1.0);
            dq = std::pow(val, 1.0 / (eta + 1.0)) - 1.0;
        } else {
            const double val =
                2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, eta + 1.0);
            dq = 1.0 - std::pow(val, 1.0 / (eta + 1.0));
        }
        g.x[i] = std::clamp(x + dq * (hi - lo), lo, hi);
    }
}

void bitflip_mutation(problems::BinaryGenome& g, double rate, rng::Engine& eng) {
    for (auto& bit : g.bits)
        if (rng::bernoulli(eng, rate)) bit ^= 1u;
}

}  // namespace

std::vector<problems::Genome> vary(const std::vector<const problems::Genome*>& parents,
                                   const VariationConfig& config, rng::Engine& eng) {
    if (parents.empty()) throw EmptyParentSet("variation needs at least one parent");
    std::vector<problems::Genome> offspring;
    if (parents.size() == 1) {
        offspring.push_back(*parents[0]);
    } else {
        offspring.push_back(*parents[0]);
        offspring.push_back(*parents[1]);
        if (const auto* c0 = std::get_if<problems::ContinuousGenome>(parents[0])) {
            auto& g1 = std::get<problems::ContinuousGenome>(offspring[0]);
            auto& g2 = std::get<problems::ContinuousGenome>(offspring[1]);
            if (std::get_if<problems::ContinuousGenome>(parents[1]) == nullptr ||
                std::get<problems::ContinuousGenome>(*parents[1]).x.size() != c0->x.size())
                throw std::invalid_argument("parents come from different domains");
            if (rng::bernoulli(eng, config.crossover_prob)) {
                for (std::size_t i = 0; i < g1.x.size(); ++i) {
                    if (!rng::bernoulli(eng, 0.5)) continue;
                    sbx_pair(g1.x[i], g2.x[i], g1.lower[i], g1.upper[i], config.eta_c, eng,
                             g1.x[i], g2.x[i]);
                }
            }
        } else {
            auto& g1 = std::get<problems::BinaryGenome>(offspring[0]);
            auto& g2 = std::get<problems::BinaryGenome>(offspring[1]);
            if (std::get_if<problems::BinaryGenome>(parents[1]) == nullptr ||
                std::get<problems::BinaryGenome>(*parents[1]).bits.size() != g1.bits.size())
                throw std::invalid_argument("parents come from different domains");
            if (rng::bernoulli(eng, config.crossover_prob)) {
                for (std::size_t i = 0; i < g1.bits.size(); ++i)
                    if (rng::bernoulli(eng, 0.5)) std::swap(g1.bits[i], g2.bits[i]);
            }
        }
    }
    for (auto& child : offspring) {
        const double rate =
            config.mutation_rate.value_or(1.0 / static_cast<double>(genome_dimension(child)));
        if (auto* c = std::get_if<problems::ContinuousGenome>(&child))
            polynomial_mutation(*c, rate, config.eta_m, eng);
        else
            bitflip_mutation(std::get<problems::BinaryGenome>(child), rate, eng);
    }
    return offspring;
}

bool ParetoArchive::insert(const Individual& candidate) {
    if (!candidate.fully_evaluated())
        throw IncompleteVector("archive accepts fully evaluated individuals only");
    const auto values = candidate.objective_vector(false);
    for (const auto& member : members_) {
        const auto mv = member.objective_vector(false);
        if (mv == values || dominates(mv, values)) return false;
    }
    std::erase_if(members_, [&](const Individual& member) {
        return dominates(values, member.objective_vector(false));
    });
    members_.push_back(candidate);
    if (capacity_ && members_.size() > *capacity_) {
        std::vector<std::vector<double>> pts;
        pts.reserve(members_.size());
        for (const auto& member : members_) pts.push_back(member.objective_vector(false));
        std::vector<std::size_t> front(members_.size());
        std::iota(front.begin(), front.end(), 0u);
        const auto dist = crowding_distances(pts, front);
        std::size_t evict = 0;
        for (std::size_t i = 1; i < members_.size(); ++i) {
            if (dist[i] != dist[evict]) {
                if (dist[i] < dist[evict]) evict = i;
            } else if (members_[i].id > members_[evict].id) {
                evict = i;
            }
        }
        const bool evicted_candidate = members_[evict].id == candidate.id;
        members_.erase(members_.begin() + static_cast<std::ptrdiff_t>(evict));
        return !evicted_candidate;
    }
    return true;
}

}  // namespace latmoo::moea
