#include "latmoo/sim_clock.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <limits>

namespace latmoo::sim {

void SimConfig::validate(int objective_count) const {
    if (batch_capacity < 1) throw std::invalid_argument("batch_capacity must be >= 1");
    if (stopping_mode == StoppingMode::TimeSteps) {
        if (total_time_steps < 1) throw std::invalid_argument("total_time_steps must be >= 1");
    } else {
        if (static_cast<int>(max_fe_per_objective.size()) != objective_count)
            throw std::invalid_argument(
                "max_fe_per_objective must list one budget per objective");
        for (const auto fe : max_fe_per_objective)
            if (fe < 1) throw std::invalid_argument("per-objective budgets must be >= 1");
    }
}

int LatencyProfile::max_latency() const {
    validate();
    return *std::max_element(latencies.begin(), latencies.end());
}

int LatencyProfile::min_latency() const {
    validate();
    return *std::min_element(latencies.begin(), latencies.end());
}

double LatencyProfile::heterogeneity_ratio() const {
    return static_cast<double>(max_latency()) / static_cast<double>(min_latency());
}

int LatencyProfile::slow_objective() const {
    validate();
    return static_cast<int>(std::distance(
        latencies.begin(), std::max_element(latencies.begin(), latencies.end())));
}

int LatencyProfile::fast_objective() const {
    const int slow = slow_objective();
    int best = -1;
    for (int i = 0; i < objective_count(); ++i) {
        if (i == slow) continue;
        if (best < 0 || latencies[static_cast<std::size_t>(i)] <
                            latencies[static_cast<std::size_t>(best)])
            best = i;
    }
    return best < 0 ? slow : best;
}

void LatencyProfile::validate() const {
    if (latencies.empty()) throw std::invalid_argument("latency profile needs >= 1 objective");
    for (const int k : latencies)
        if (k < 1) throw std::invalid_argument("latencies must be positive integers");
}

std::int64_t per_objective_budget(TimeStep total_steps, int lambda, int k) {
    if (total_steps < 0) throw std::invalid_argument("total_steps must be >= 0");
    if (lambda < 1) throw std::invalid_argument("lambda must be >= 1");
    if (k < 1) throw std::invalid_argument("latency must be >= 1");
    return static_cast<std::int64_t>(lambda) * (total_steps / k);
}

BudgetLedger::BudgetLedger(SimConfig config, LatencyProfile profile)
    : config_(std::move(config)), profile_(std::move(profile)) {
    profile_.validate();
    config_.validate(profile_.objective_count());
    fe_consumed_.assign(static_cast<std::size_t>(profile_.objective_count()), 0);
    fe_pending_.assign(static_cast<std::size_t>(profile_.objective_count()), 0);
}

bool BudgetLedger::objective_busy(int objective) const {
    for (const auto& [id, job] : in_flight_)
        if (job.objective == objective) return true;
    return false;
}

bool BudgetLedger::can_submit(int objective, int count) const {
    if (objective < 0 || objective >= profile_.objective_count()) return false;
    if (count < 1 || count > config_.batch_capacity) return false;
    std::int64_t open = 0;
    for (const auto& [id, job] : in_flight_) {
        if (job.objective != objective) continue;
        if (job.start_time != now_) return false;  // window already closed
        open += static_cast<std::int64_t>(job.solutions.size());
    }
    if (open + count > config_.batch_capacity) return false;
    if (config_.stopping_mode == StoppingMode::TimeSteps) {
        if (now_ + profile_.latency(objective) > config_.total_time_steps) return false;
    } else {
        const auto idx = static_cast<std::size_t>(objective);
        if (fe_consumed_[idx] + fe_pending_[idx] + count > config_.max_fe_per_objective[idx])
            return false;
    }
    return true;
}

JobId BudgetLedger::submit_batch(int objective, std::vector<SolutionId> solutions,
                                 std::vector<double> values) {
    if (objective < 0 || objective >= profile_.objective_count())
        throw std::invalid_argument("objective index out of range");
    if (solutions.empty()) throw std::invalid_argument("cannot submit an empty batch");
    if (solutions.size() != values.size())
        throw std::invalid_argument("one value per submitted solution required");

    const int count = static_cast<int>(solutions.size());
    if (count > config_.batch_capacity)
        throw CapacityExceeded("batch of " + std::to_string(count) +
                               " exceeds capacity " + std::to_string(config_.batch_capacity));

    // At most one open window per objective: concurrent batches must share the
    // current start step and jointly respect the capacity.
    std::int64_t open = 0;
    for (const auto& [id, job] : in_flight_) {
        if (job.objective != objective) continue;
        if (job.start_time != now_)
            throw CapacityExceeded("objective " + std::to_string(objective) +
                                   " already has a batch in flight started earlier");
        open += static_cast<std::int64_t>(job.solutions.size());
        for (const SolutionId sid : solutions)
            if (std::find(job.solutions.begin(), job.solutions.end(), sid) !=
                job.solutions.end())
                throw DuplicateInFlight("solution " + std::to_string(sid) +
                                        " already in flight on objective " +
                                        std::to_string(objective));
    }
    if (open + count > config_.batch_capacity)
        throw CapacityExceeded("combined in-flight batch size would exceed capacity");
    for (std::size_t i = 0; i < solutions.size(); ++i)
        for (std::size_t j = i + 1; j < solutions.size(); ++j)
            if (solutions[i] == solutions[j])
                throw DuplicateInFlight("solution " + std::to_string(solutions[i]) +
                                        " listed twice in one batch");

    const int k = profile_.latency(objective);
    if (config_.stopping_mode == StoppingMode::TimeSteps) {
        if (now_ + k > config_.total_time_steps)
            throw BudgetExhausted("batch on objective " + std::to_string(objective) +
                                  " cannot complete by step " +
                                  std::to_string(config_.total_time_steps));
    } else {
        const auto idx = static_cast<std::size_t>(objective);
        if (fe_consumed_[idx] + fe_pending_[idx] + count > config_.max_fe_per_objective[idx])
            throw BudgetExhausted("objective " + std::to_string(objective) +
                                  " evaluation budget exhausted");
    }

    BatchJob job;
    job.id = next_job_id_++;
    job.objective = objective;
    job.solutions = std::move(solutions);
    job.start_time = now_;
    job.completion_time = now_ + k;
    job.values = std::move(values);
    fe_pending_[static_cast<std::size_t>(objective)] += count;
    events_.push_back(Event{now_, EventKind::Submit, job.id, objective, count});
    const JobId id = job.id;
    in_flight_.emplace(id, std::move(job));
    return id;
}

std::vector<BatchJob> BudgetLedger::advance_to_next_completion() {
    if (in_flight_.empty()) throw NothingInFlight("no batch in flight");
    TimeStep next = std::numeric_limits<TimeStep>::max();
    for (const auto& [id, job] : in_flight_) next = std::min(next, job.completion_time);
    now_ = next;

    std::vector<BatchJob> done;
    for (auto it = in_flight_.begin(); it != in_flight_.end();) {
        if (it->second.completion_time == next) {
            BatchJob job = std::move(it->second);
            const auto idx = static_cast<std::size_t>(job.objective);
            const auto n = static_cast<std::int64_t>(job.solutions.size());
            fe_consumed_[idx] += n;
            fe_pending_[idx] -= n;
            events_.push_back(Event{now_, EventKind::Complete, job.id, job.objective,
                                    static_cast<int>(n)});
            done.push_back(std::move(job));
            it = in_flight_.erase(it);
        } else {
            ++it;
        }
    }
    return done;
}

void BudgetLedger::idle_until(TimeStep t) {
    if (t < now_) throw std::invalid_argument("idle_until cannot move the clock backwards");
    for (const auto& [id, job] : in_flight_)
        if (job.completion_time < t)
            throw std::invalid_argument("idle_until would skip an in-flight completion");
    if (config_.stopping_mode == StoppingMode::TimeSteps && t > config_.total_time_steps)
        throw std::invalid_argument("idle_until beyond the total budget");
    now_ = t;
}

bool BudgetLedger::is_exhausted() const {
    if (config_.stopping_mode == StoppingMode::TimeSteps) {
        for (int i = 0; i < profile_.objective_count(); ++i)
            if (now_ + profile_.latency(i) <= config_.total_time_steps) return false;
        return true;
    }
    for (std::size_t i = 0; i < fe_consumed_.size(); ++i)
        if (fe_consumed_[i] >= config_.max_fe_per_objective[i]) return true;
    return false;
}

const std::vector<double>& BudgetLedger::peek_values(JobId id) const {
    const auto it = in_flight_.find(id);
    if (it != in_flight_.end()) {
        ++early_read_attempts_;
        throw EarlyRead("values of job " + std::to_string(id) +
                        " are sealed until step " +
                        std::to_string(it->second.completion_time));
    }
    throw std::invalid_argument("unknown or already delivered job id");
}

void write_event_log(std::ostream& out, const std::vector<Event>& events) {
    std::vector<Event> sorted = events;
    std::stable_sort(sorted.begin(), sorted.end(), [](const Event& a, const Event& b) {
        if (a.t != b.t) return a.t < b.t;
        if (a.kind != b.kind) return a.kind == EventKind::Submit;
        return a.job < b.job;
    });
    char line[160];
    for (const Event& e : sorted) {
        std::snprintf(line, sizeof(line),
                      "{\"t\": %lld, \"event\": \"%s\", \"job\": %llu, \"obj\": %d, \"n\": %d}\n",
                      static_cast<long long>(e.t),
                      e.kind == EventKind::Submit ? "submit" : "complete",
                      static_cast<unsigned long long>(e.job), e.objective, e.count);
        out << line;
    }
}

std::vector<Event> read_event_log(std::istream& in) {
    std::vector<Event> events;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Event e;
        char kind[16] = {0};
        long long t = 0;
        unsigned long long job = 0;
        if (std::sscanf(line.c_str(),
                        "{\"t\": %lld, \"event\": \"%15[a-z]\", \"job\": %llu, \"obj\": %d, \"n\": %d}",
                        &t, kind, &job, &e.objective, &e.count) != 5)
            throw std::runtime_error("malformed event log line: " + line);
        e.t = t;
        e.job = job;
        e.kind = std::string(kind) == "submit" ? EventKind::Submit : EventKind::Complete;
        events.push_back(e);
    }
    return events;
}

}  // namespace latmoo::sim
