#pragma once

// Event-log replay: rebuilds every batch from the submit/complete pairs and
// re-checks the evaluation model without touching the ledger internals.

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "latmoo/sim_clock.hpp"

namespace replay {

struct ReplayedJob {
    latmoo::sim::TimeStep start = 0;
    latmoo::sim::TimeStep end = 0;
    int objective = 0;
    int count = 0;
};

struct ReplayReport {
    std::vector<std::int64_t> fe;  // per-objective completed evaluations
    std::vector<ReplayedJob> jobs;
};

inline ReplayReport validate_events(const std::vector<latmoo::sim::Event>& events,
                                    const latmoo::sim::SimConfig& config,
                                    const latmoo::sim::LatencyProfile& profile) {
    using latmoo::sim::EventKind;
    ReplayReport report;
    report.fe.assign(static_cast<std::size_t>(profile.objective_count()), 0);

    std::map<latmoo::sim::JobId, ReplayedJob> open;
    latmoo::sim::TimeStep prev_t = 0;
    bool first = true;
    for (const auto& e : events) {
        if (!first && e.t < prev_t) throw std::runtime_error("event time went backwards");
        first = false;
        prev_t = e.t;
        if (e.count < 1 || e.count > config.batch_capacity)
            throw std::runtime_error("batch size outside [1, capacity]");
        if (e.kind == EventKind::Submit) {
            if (open.count(e.job)) throw std::runtime_error("job submitted twice");
            open[e.job] = ReplayedJob{e.t, 0, e.objective, e.count};
        } else {
            const auto it = open.find(e.job);
            if (it == open.end()) throw std::runtime_error("completion without submission");
            if (it->second.objective != e.objective || it->second.count != e.count)
                throw std::runtime_error("completion does not match its submission");
            it->second.end = e.t;
            if (it->second.end - it->second.start != profile.latency(e.objective))
                throw std::runtime_error("job duration differs from the objective latency");
            report.fe[static_cast<std::size_t>(e.objective)] += e.count;
            report.jobs.push_back(it->second);
            open.erase(it);
        }
    }
    if (!open.empty()) throw std::runtime_error("a job never completed");

    // Per objective: windows must not overlap unless they share both
    // endpoints, and co-scheduled batches must respect the capacity jointly.
    for (int obj = 0; obj < profile.objective_count(); ++obj) {
        std::vector<ReplayedJob> jobs;
        for (const auto& j : report.jobs)
            if (j.objective == obj) jobs.push_back(j);
        std::sort(jobs.begin(), jobs.end(), [](const ReplayedJob& a, const ReplayedJob& b) {
            return a.start < b.start;
        });
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            int concurrent = jobs[i].count;
            for (std::size_t k = i + 1; k < jobs.size(); ++k) {
                if (jobs[k].start >= jobs[i].end) break;
                if (jobs[k].start != jobs[i].start)
                    throw std::runtime_error("overlapping batch windows on one objective");
                concurrent += jobs[k].count;
            }
            if (concurrent > config.batch_capacity)
                throw std::runtime_error("co-scheduled batches exceed the capacity");
        }
        const auto budget =
            config.stopping_mode == latmoo::sim::StoppingMode::TimeSteps
                ? latmoo::sim::per_objective_budget(config.total_time_steps,
                                                    config.batch_capacity,
                                                    profile.latency(obj))
                : config.max_fe_per_objective[static_cast<std::size_t>(obj)];
        if (report.fe[static_cast<std::size_t>(obj)] > budget)
            throw std::runtime_error("objective " + std::to_string(obj) +
                                     " exceeded its evaluation budget");
        if (config.stopping_mode == latmoo::sim::StoppingMode::TimeSteps)
            for (const auto& j : jobs)
                if (j.end > config.total_time_steps)
                    throw std::runtime_error("a batch completed beyond the horizon");
    }
    return report;
}

}  // namespace replay
