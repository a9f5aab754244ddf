#include "gravitree/barrier.hpp"

#include <barrier>
#include <chrono>
#include <thread>
#include <vector>

#include "gravitree/rng.hpp"

namespace gravitree {

SpinBarrier::SpinBarrier(std::size_t parties) : parties_(parties), count_(parties) {
    if (parties_ < 1) throw data_error("SpinBarrier: need at least one party");
}

SpinBarrier::Handle SpinBarrier::register_worker() {
    if (registered_.fetch_add(1, std::memory_order_acq_rel) >= parties_)
        throw resource_error("SpinBarrier: more workers than registered parties");
    return Handle{};
}

void SpinBarrier::wait(Handle& handle) {
    handle.sense = !handle.sense;
    if (count_.fetch_sub(1, std::memory_order_acq_rel) == 1) {
        count_.store(parties_, std::memory_order_relaxed);
        phases_.fetch_add(1, std::memory_order_relaxed);
        sense_.store(handle.sense, std::memory_order_release);
        return;
    }
    // Spin briefly, then yield; sleep once heavily oversubscribed.
    std::size_t spins = 0;
    while (sense_.load(std::memory_order_acquire) != handle.sense) {
        ++spins;
        if (spins < 128) continue;
        if ((spins & 1023) == 0 && aborted_.load(std::memory_order_acquire))
            throw resource_error("SpinBarrier: aborted");
        if (spins < 4096)
            std::this_thread::yield();
        else
            std::this_thread::sleep_for(std::chrono::microseconds(50));
    }
}

namespace {

struct alignas(64) PhaseSlot {
    std::atomic<std::uint64_t> value{0};
};

}  // namespace

BarrierHarnessResult barrier_phase_harness(std::size_t workers, std::uint64_t phases,
                                           std::uint64_t delay_seed, double timeout_seconds) {
    BarrierHarnessResult result;
    if (workers < 1) {
        result.message = "no workers";
        return result;
    }

    SpinBarrier barrier(workers);
    std::vector<PhaseSlot> slots(workers);
    std::atomic<std::uint64_t> violations{0};
    std::atomic<std::size_t> finished{0};

    auto body = [&](std::size_t w) {
        SpinBarrier::Handle handle = barrier.register_worker();
        RandomStream delays(delay_seed, w);
        for (std::uint64_t k = 1; k <= phases; ++k) {
            if ((delays.next() & 7) == 0) {
                // short randomized stall before arriving
                const auto until = std::chrono::steady_clock::now() +
                                   std::chrono::nanoseconds(delays.next() % 2000);
                while (std::chrono::steady_clock::now() < until) {
                }
            }
            slots[w].value.store(k, std::memory_order_relaxed);
            barrier.wait(handle);
            for (std::size_t s = 0; s < workers; ++s)
                if (slots[s].value.load(std::memory_order_relaxed) != k)
                    violations.fetch_add(1, std::memory_order_relaxed);
            barrier.wait(handle);  // keeps checks clear of next-phase stores
        }
        finished.fetch_add(1, std::memory_order_acq_rel);
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::atomic<bool> threw{false};
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                body(w);
            } catch (const resource_error&) {
                threw.store(true, std::memory_order_release);
            }
        });

    const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_seconds);
    while (finished.load(std::memory_order_acquire) < workers) {
        if (std::chrono::steady_clock::now() > deadline) {
            result.timed_out = true;
            barrier.abort_all();
            break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
    for (auto& t : pool) t.join();

    result.violations = violations.load();
    result.phases_completed = barrier.phases() / 2;
    result.ok = !result.timed_out && !threw.load() && result.violations == 0 && result.phases_completed == phases;
    if (result.timed_out)
        result.message = "watchdog timeout";
    else if (result.violations > 0)
        result.message = "phase-slot violations";
    return result;
}

namespace {

// Shared timing loop: per round every worker bumps its slot and crosses the
// barrier; one rotating checker validates no slot fell behind.
template <typename WaitFn>
double timed_rounds(std::size_t workers, std::uint64_t phases, std::vector<PhaseSlot>& slots,
                    std::atomic<std::uint64_t>& violations, WaitFn&& make_waiter) {
    for (auto& s : slots) s.value.store(0, std::memory_order_relaxed);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::atomic<double> elapsed{0.0};

    auto body = [&](std::size_t w) {
        auto wait = make_waiter(w);
        const auto start = std::chrono::steady_clock::now();
        for (std::uint64_t k = 1; k <= phases; ++k) {
            slots[w].value.store(k, std::memory_order_relaxed);
            wait();
            if (w == k % workers) {
                for (std::size_t s = 0; s < workers; ++s) {
                    const std::uint64_t v = slots[s].value.load(std::memory_order_relaxed);
                    if (v < k || v > k + 1) violations.fetch_add(1, std::memory_order_relaxed);
                }
            }
        }
        if (w == 0) elapsed.store(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    };
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body, w);
    for (auto& t : pool) t.join();
    return elapsed.load();
}

}  // namespace

BarrierBenchResult bench_barrier(std::size_t workers, std::uint64_t phases) {
    if (workers < 2) throw data_error("bench_barrier: need at least two workers");
    if (phases < 1) throw data_error("bench_barrier: need at least one phase");

    BarrierBenchResult result;
    result.workers = workers;
    result.phases = phases;
    std::vector<PhaseSlot> slots(workers);
    std::atomic<std::uint64_t> violations{0};

    {
        SpinBarrier barrier(workers);
        const double sec = timed_rounds(workers, phases, slots, violations, [&](std::size_t) {
            return [&barrier, handle = barrier.register_worker()]() mutable { barrier.wait(handle); };
        });
        result.lockfree_ns_per_sync = sec / static_cast<double>(phases) * 1e9;
    }
    {
        std::barrier<> barrier(static_cast<std::ptrdiff_t>(workers));
        const double sec = timed_rounds(workers, phases, slots, violations,
                                        [&](std::size_t) { return [&barrier] { barrier.arrive_and_wait(); }; });
        result.native_ns_per_sync = sec / static_cast<double>(phases) * 1e9;
    }
    result.violations = violations.load();
    result.ratio = result.native_ns_per_sync > 0.0 ? result.lockfree_ns_per_sync / result.native_ns_per_sync : 0.0;
    return result;
}

}  // namespace gravitree
