#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "latmoo/sim_clock.hpp"
#include "replay.hpp"

using namespace latmoo;
using sim::BudgetLedger;
using sim::LatencyProfile;
using sim::SimConfig;
using sim::StoppingMode;

namespace {

SimConfig time_budget(sim::TimeStep b, int lambda) {
    SimConfig cfg;
    cfg.total_time_steps = b;
    cfg.batch_capacity = lambda;
    cfg.stopping_mode = StoppingMode::TimeSteps;
    return cfg;
}

SimConfig fe_budget(int lambda, std::vector<std::int64_t> max_fe) {
    SimConfig cfg;
    cfg.batch_capacity = lambda;
    cfg.stopping_mode = StoppingMode::PerObjectiveEvaluations;
    cfg.max_fe_per_objective = std::move(max_fe);
    return cfg;
}

std::vector<sim::SolutionId> ids(sim::SolutionId from, int count) {
    std::vector<sim::SolutionId> out;
    for (int i = 0; i < count; ++i) out.push_back(from + static_cast<sim::SolutionId>(i));
    return out;
}

std::vector<double> zeros(int count) { return std::vector<double>(count, 0.0); }

}  // namespace

TEST_CASE("per-objective budget follows lambda * floor(B/k)") {
    CHECK(sim::per_objective_budget(100, 10, 1) == 1000);
    CHECK(sim::per_objective_budget(100, 10, 7) == 140);
    CHECK(sim::per_objective_budget(5, 1, 10) == 0);
    CHECK(sim::per_objective_budget(0, 3, 2) == 0);
}

TEST_CASE("submit books a job completing after exactly the latency") {
    BudgetLedger ledger(time_budget(100, 10), LatencyProfile{{1, 10}});
    const auto job = ledger.submit_batch(0, ids(0, 10), zeros(10));
    CHECK(ledger.jobs_in_flight() == 1);
    const auto done = ledger.advance_to_next_completion();
    REQUIRE(done.size() == 1);
    CHECK(done[0].id == job);
    CHECK(done[0].completion_time == 1);
    CHECK(ledger.now() == 1);
    CHECK(ledger.fe_consumed()[0] == 10);
}

TEST_CASE("oversized batches are rejected") {
    BudgetLedger ledger(time_budget(100, 10), LatencyProfile{{1, 10}});
    CHECK_THROWS_AS(ledger.submit_batch(0, ids(0, 11), zeros(11)), sim::CapacityExceeded);
}

TEST_CASE("a batch that cannot complete by the horizon is rejected") {
    // Reference trace: eight one-step generations push the clock to t = 8,
    // where a k = 5 batch would finish at 13 > 10.
    BudgetLedger ledger(time_budget(10, 4), LatencyProfile{{1, 5}});
    for (int step = 0; step < 8; ++step) {
        ledger.submit_batch(0, ids(static_cast<sim::SolutionId>(step * 4), 4), zeros(4));
        ledger.advance_to_next_completion();
    }
    CHECK(ledger.now() == 8);
    CHECK_THROWS_AS(ledger.submit_batch(1, ids(100, 4), zeros(4)), sim::BudgetExhausted);
    CHECK(ledger.can_submit(1, 4) == false);
    CHECK(ledger.can_submit(0, 4) == true);
}

TEST_CASE("duplicate solutions in flight on one objective are rejected") {
    BudgetLedger ledger(time_budget(100, 10), LatencyProfile{{2, 2}});
    ledger.submit_batch(0, ids(0, 3), zeros(3));
    CHECK_THROWS_AS(ledger.submit_batch(0, {2, 7}, zeros(2)), sim::DuplicateInFlight);
    CHECK_THROWS_AS(ledger.submit_batch(1, {5, 5}, zeros(2)), sim::DuplicateInFlight);
    // The same solution on another objective is fine.
    CHECK_NOTHROW(ledger.submit_batch(1, {2}, zeros(1)));
}

TEST_CASE("one batch window at a time per objective") {
    BudgetLedger ledger(time_budget(100, 10), LatencyProfile{{5, 1}});
    ledger.submit_batch(0, ids(0, 4), zeros(4));
    // Same start step: allowed while the combined size fits the capacity.
    CHECK_NOTHROW(ledger.submit_batch(0, ids(10, 6), zeros(6)));
    CHECK_THROWS_AS(ledger.submit_batch(0, ids(20, 1), zeros(1)), sim::CapacityExceeded);
    // A later start inside the open window is not.
    ledger.submit_batch(1, ids(30, 1), zeros(1));
    ledger.advance_to_next_completion();  // t = 1, slow batch still open
    CHECK(ledger.now() == 1);
    CHECK_THROWS_AS(ledger.submit_batch(0, ids(40, 1), zeros(1)), sim::CapacityExceeded);
}

TEST_CASE("advance jumps to the earliest completion and returns all of it") {
    BudgetLedger ledger(time_budget(100, 10), LatencyProfile{{2, 2, 6}});
    ledger.submit_batch(0, ids(0, 2), zeros(2));
    ledger.submit_batch(1, ids(10, 2), zeros(2));
    ledger.submit_batch(2, ids(20, 2), zeros(2));
    ledger.idle_until(1);
    const auto done = ledger.advance_to_next_completion();
    CHECK(ledger.now() == 2);
    CHECK(done.size() == 2);
    const auto rest = ledger.advance_to_next_completion();
    CHECK(ledger.now() == 6);
    CHECK(rest.size() == 1);
    CHECK_THROWS_AS(ledger.advance_to_next_completion(), sim::NothingInFlight);
}

TEST_CASE("fast results are revealed each step while a slow batch is pending") {
    BudgetLedger ledger(time_budget(20, 4), LatencyProfile{{10, 1}});
    const auto slow_job = ledger.submit_batch(0, ids(0, 4), {1, 2, 3, 4});
    sim::SolutionId next = 100;
    for (int t = 0; t < 10; ++t) {
        ledger.submit_batch(1, ids(next, 4), zeros(4));
        next += 4;
        const auto done = ledger.advance_to_next_completion();
        CHECK(ledger.now() == t + 1);
        if (t < 9) {
            REQUIRE(done.size() == 1);
            CHECK(done[0].objective == 1);
            CHECK_THROWS_AS(ledger.peek_values(slow_job), sim::EarlyRead);
        } else {
            // Slow batch lands together with the final fast one.
            CHECK(done.size() == 2);
            bool saw_slow = false;
            for (const auto& job : done)
                if (job.id == slow_job) {
                    saw_slow = true;
                    CHECK(job.values == std::vector<double>{1, 2, 3, 4});
                }
            CHECK(saw_slow);
        }
    }
    CHECK(ledger.early_read_attempts() == 9);
    CHECK(ledger.fe_consumed()[0] == 4);
    CHECK(ledger.fe_consumed()[1] == 40);
}

TEST_CASE("exhaustion in time-step mode tracks the smallest latency") {
    BudgetLedger ledger(time_budget(50, 4), LatencyProfile{{1, 10}});
    CHECK_FALSE(ledger.is_exhausted());
    ledger.idle_until(49);
    CHECK_FALSE(ledger.is_exhausted());  // a k = 1 batch still fits
    ledger.idle_until(50);
    CHECK(ledger.is_exhausted());
}

TEST_CASE("exhaustion in evaluation mode trips on any objective at its cap") {
    BudgetLedger ledger(fe_budget(4, {8, 100}), LatencyProfile{{5, 1}});
    CHECK_FALSE(ledger.is_exhausted());
    ledger.submit_batch(0, ids(0, 4), zeros(4));
    ledger.advance_to_next_completion();
    CHECK_FALSE(ledger.is_exhausted());
    ledger.submit_batch(0, ids(10, 4), zeros(4));
    ledger.advance_to_next_completion();
    CHECK(ledger.fe_consumed()[0] == 8);
    CHECK(ledger.is_exhausted());
    CHECK_THROWS_AS(ledger.submit_batch(0, ids(20, 1), zeros(1)), sim::BudgetExhausted);
}

TEST_CASE("evaluation-mode budgets account for batches still in flight") {
    BudgetLedger ledger(fe_budget(4, {6, 100}), LatencyProfile{{5, 1}});
    ledger.submit_batch(0, ids(0, 4), zeros(4));
    // 4 already reserved, so another 4 would overshoot the cap of 6.
    CHECK_FALSE(ledger.can_submit(0, 4));
    ledger.advance_to_next_completion();
    CHECK(ledger.can_submit(0, 2));
    CHECK_FALSE(ledger.can_submit(0, 3));
}

TEST_CASE("identical operation sequences produce identical ledgers") {
    const auto run = [] {
        BudgetLedger ledger(time_budget(30, 3), LatencyProfile{{1, 4}});
        for (int g = 0; g < 5; ++g) {
            ledger.submit_batch(0, ids(static_cast<sim::SolutionId>(10 * g), 3), zeros(3));
            if (g % 2 == 0)
                ledger.submit_batch(1, ids(static_cast<sim::SolutionId>(100 + 10 * g), 2),
                                    zeros(2));
            while (ledger.has_jobs_in_flight()) ledger.advance_to_next_completion();
        }
        std::ostringstream log;
        sim::write_event_log(log, ledger.events());
        return log.str();
    };
    CHECK(run() == run());
}

TEST_CASE("clock never decreases and replay validates a random-ish schedule") {
    const SimConfig cfg = time_budget(60, 5);
    const LatencyProfile profile{{3, 1}};
    BudgetLedger ledger(cfg, profile);
    sim::TimeStep prev = ledger.now();
    sim::SolutionId next = 0;
    for (int round = 0; round < 40; ++round) {
        const int obj = round % 3 == 0 ? 0 : 1;
        const int n = 1 + round % 5;
        if (ledger.can_submit(obj, n) && !ledger.objective_busy(obj)) {
            ledger.submit_batch(obj, ids(next, n), zeros(n));
            next += static_cast<sim::SolutionId>(n);
        }
        if (ledger.has_jobs_in_flight()) ledger.advance_to_next_completion();
        CHECK(ledger.now() >= prev);
        prev = ledger.now();
    }
    while (ledger.has_jobs_in_flight()) ledger.advance_to_next_completion();
    const auto report = replay::validate_events(ledger.events(), cfg, profile);
    CHECK(report.fe == ledger.fe_consumed());
    CHECK(ledger.fe_consumed()[0] <= sim::per_objective_budget(60, 5, 3));
    CHECK(ledger.fe_consumed()[1] <= sim::per_objective_budget(60, 5, 1));
}

TEST_CASE("event log renders in canonical order and round-trips") {
    BudgetLedger ledger(time_budget(10, 2), LatencyProfile{{2, 2}});
    ledger.submit_batch(0, ids(0, 2), zeros(2));
    ledger.advance_to_next_completion();
    // Submitted at the same step the first batch completed: the canonical
    // order still lists the submit first.
    ledger.submit_batch(0, ids(10, 2), zeros(2));
    ledger.advance_to_next_completion();
    std::ostringstream out;
    sim::write_event_log(out, ledger.events());
    const std::string text = out.str();
    CHECK(text ==
          "{\"t\": 0, \"event\": \"submit\", \"job\": 0, \"obj\": 0, \"n\": 2}\n"
          "{\"t\": 2, \"event\": \"submit\", \"job\": 1, \"obj\": 0, \"n\": 2}\n"
          "{\"t\": 2, \"event\": \"complete\", \"job\": 0, \"obj\": 0, \"n\": 2}\n"
          "{\"t\": 4, \"event\": \"complete\", \"job\": 1, \"obj\": 0, \"n\": 2}\n");
    std::istringstream in(text);
    const auto parsed = sim::read_event_log(in);
    REQUIRE(parsed.size() == 4);
    CHECK(parsed[1].kind == sim::EventKind::Submit);
    CHECK(parsed[2].kind == sim::EventKind::Complete);
    CHECK(parsed[3].t == 4);
}

TEST_CASE("idle_until cannot skip completions or run backwards") {
    BudgetLedger ledger(time_budget(10, 2), LatencyProfile{{3}});
    ledger.submit_batch(0, ids(0, 2), zeros(2));
    CHECK_THROWS_AS(ledger.idle_until(5), std::invalid_argument);
    ledger.advance_to_next_completion();
    CHECK_THROWS_AS(ledger.idle_until(2), std::invalid_argument);
    CHECK_THROWS_AS(ledger.idle_until(11), std::invalid_argument);
    CHECK_NOTHROW(ledger.idle_until(7));
    CHECK(ledger.now() == 7);
}
