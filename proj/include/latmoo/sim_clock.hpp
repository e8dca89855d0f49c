#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace latmoo::sim {

using TimeStep = std::int64_t;
using JobId = std::uint64_t;
using SolutionId = std::uint64_t;

enum class StoppingMode { TimeSteps, PerObjectiveEvaluations };

/// Fixed-budget evaluation model: a run owns `total_time_steps` logical steps
/// and may evaluate at most `batch_capacity` solutions simultaneously per
/// objective. In PerObjectiveEvaluations mode the time horizon is ignored and
/// the run stops on per-objective evaluation counts instead.
struct SimConfig {
    TimeStep total_time_steps = 0;
    int batch_capacity = 1;
    StoppingMode stopping_mode = StoppingMode::TimeSteps;
    std::vector<std::int64_t> max_fe_per_objective;  // PerObjectiveEvaluations only

    void validate(int objective_count) const;
};

/// Per-objective batch evaluation latencies, in whole time steps.
struct LatencyProfile {
    std::vector<int> latencies;

    int objective_count() const { return static_cast<int>(latencies.size()); }
    int latency(int objective) const { return latencies.at(static_cast<std::size_t>(objective)); }
    int max_latency() const;
    int min_latency() const;
    /// max(k) / min(k), >= 1.
    double heterogeneity_ratio() const;
    /// Index of the slowest objective (lowest index on ties).
    int slow_objective() const;
    /// Index of the fastest objective; on a homogeneous profile this is the
    /// lowest index that is not the slow one.
    int fast_objective() const;
    void validate() const;
};

struct CapacityExceeded : std::runtime_error {
    explicit CapacityExceeded(const std::string& m) : std::runtime_error(m) {}
};
struct BudgetExhausted : std::runtime_error {
    explicit BudgetExhausted(const std::string& m) : std::runtime_error(m) {}
};
struct DuplicateInFlight : std::runtime_error {
    explicit DuplicateInFlight(const std::string& m) : std::runtime_error(m) {}
};
struct NothingInFlight : std::runtime_error {
    explicit NothingInFlight(const std::string& m) : std::runtime_error(m) {}
};
struct EarlyRead : std::runtime_error {
    explicit EarlyRead(const std::string& m) : std::runtime_error(m) {}
};

/// One uninterruptible batch evaluation of up to `batch_capacity` solutions on
/// a single objective. `values` are sealed inside the ledger until the
/// completion step has been reached.
struct BatchJob {
    JobId id = 0;
    int objective = 0;
    std::vector<SolutionId> solutions;
    TimeStep start_time = 0;
    TimeStep completion_time = 0;
    std::vector<double> values;
};

enum class EventKind { Submit, Complete };

struct Event {
    TimeStep t = 0;
    EventKind kind = EventKind::Submit;
    JobId job = 0;
    int objective = 0;
    int count = 0;
};

/// Maximum number of evaluations one objective can receive under a total
/// budget of `total_steps`, batch capacity `lambda` and latency `k`:
/// lambda * floor(total_steps / k).
std::int64_t per_objective_budget(TimeStep total_steps, int lambda, int k);

/// Discrete-time ledger for the limited-capacity parallel evaluation model.
///
/// Time advances only by jumping to batch completions (plus explicit idling).
/// Per objective, at most one batch window is open at a time: all in-flight
/// solutions of an objective share the same start and completion step, and
/// their combined count never exceeds the batch capacity. Objective values
/// attached at submission stay unreadable until the batch completes.
class BudgetLedger {
  public:
    BudgetLedger(SimConfig config, LatencyProfile profile);

    /// Books a batch on `objective`. `values.size()` must equal
    /// `solutions.size()`. Throws CapacityExceeded, DuplicateInFlight or
    /// BudgetExhausted when the model would be violated.
    JobId submit_batch(int objective, std::vector<SolutionId> solutions,
                       std::vector<double> values);

    /// Non-throwing predicate mirroring submit_batch's budget checks for a
    /// hypothetical batch of `count` solutions.
    bool can_submit(int objective, int count) const;

    /// Jumps the clock to the earliest in-flight completion and returns every
    /// job finishing at that step (values now readable).
    std::vector<BatchJob> advance_to_next_completion();

    /// Advances the clock without evaluating. `t` must not lie beyond the
    /// next in-flight completion or (in TimeSteps mode) the total budget.
    void idle_until(TimeStep t);

    /// TimeSteps mode: no batch on any objective could still complete by the
    /// horizon. PerObjectiveEvaluations mode: some objective has consumed its
    /// whole evaluation budget.
    bool is_exhausted() const;

    TimeStep now() const { return now_; }
    const std::vector<std::int64_t>& fe_consumed() const { return fe_consumed_; }
    std::size_t jobs_in_flight() const { return in_flight_.size(); }
    bool has_jobs_in_flight() const { return !in_flight_.empty(); }
    bool objective_busy(int objective) const;
    const std::vector<Event>& events() const { return events_; }
    const SimConfig& config() const { return config_; }
    const LatencyProfile& profile() const { return profile_; }

    /// Test hook: reading values of a job that has not completed is a
    /// contract violation (throws EarlyRead and bumps the attempt counter).
    const std::vector<double>& peek_values(JobId id) const;
    std::size_t early_read_attempts() const { return early_read_attempts_; }

  private:
    SimConfig config_;
    LatencyProfile profile_;
    TimeStep now_ = 0;
    JobId next_job_id_ = 0;
    std::vector<std::int64_t> fe_consumed_;
    std::vector<std::int64_t> fe_pending_;  // reserved by in-flight batches
    std::map<JobId, BatchJob> in_flight_;
    std::vector<Event> events_;
    mutable std::size_t early_read_attempts_ = 0;
};

/// Canonical JSON-lines rendering of an event log: one object per line,
/// sorted by t, then submits before completes, then job id.
void write_event_log(std::ostream& out, const std::vector<Event>& events);
std::vector<Event> read_event_log(std::istream& in);

}  // namespace latmoo::sim
