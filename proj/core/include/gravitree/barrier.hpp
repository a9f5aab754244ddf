#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <string>

#include "gravitree/errors.hpp"

namespace gravitree {

// Lock-free sense-reversing barrier: workers spin on a shared sense flag
// that the last arriver flips, so the barrier is reusable across phases
// without locks. Workers register once up front; registering more workers
// than the barrier was built for fails instead of deadlocking later.
class SpinBarrier {
public:
    explicit SpinBarrier(std::size_t parties);

    struct Handle {
        bool sense = false;
    };

    Handle register_worker();

    // Blocks until all parties arrive. Throws resource_error if abort_all()
    // was called while spinning.
    void wait(Handle& handle);

    std::size_t parties() const { return parties_; }
    std::uint64_t phases() const { return phases_.load(std::memory_order_acquire); }

    // Unsticks spinning waiters (watchdog escape hatch); they throw.
    void abort_all() { aborted_.store(true, std::memory_order_release); }

private:
    std::size_t parties_;
    std::atomic<std::size_t> registered_{0};
    std::atomic<std::size_t> count_;
    std::atomic<bool> sense_{false};
    std::atomic<bool> aborted_{false};
    std::atomic<std::uint64_t> phases_{0};
};

// Strict phase-slot linearizability harness: every worker bumps its slot,
// all meet at the barrier, every worker checks every slot equals the phase
// number, and a second barrier separates the check from the next phase.
// Randomized per-worker delays shake out missed-synchronization bugs. A
// watchdog aborts the run (and fails it) after timeout_seconds.
struct BarrierHarnessResult {
    bool ok = false;
    std::uint64_t violations = 0;
    std::uint64_t phases_completed = 0;
    bool timed_out = false;
    std::string message;
};

BarrierHarnessResult barrier_phase_harness(std::size_t workers, std::uint64_t phases,
                                           std::uint64_t delay_seed = 1, double timeout_seconds = 60.0);

// Times the lock-free barrier against std::barrier over `phases` rounds,
// with the phase-slot check running concurrently during the measurement.
struct BarrierBenchResult {
    std::size_t workers = 0;
    std::uint64_t phases = 0;
    double lockfree_ns_per_sync = 0.0;
    double native_ns_per_sync = 0.0;
    double ratio = 0.0;  // lockfree / native
    std::uint64_t violations = 0;
};

BarrierBenchResult bench_barrier(std::size_t workers, std::uint64_t phases);

}  // namespace gravitree
