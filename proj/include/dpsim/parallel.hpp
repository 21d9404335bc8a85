#pragma once

namespace dpsim {

/// Number of OpenMP workers used by the parallel kernels (1 without OpenMP).
int worker_count();

/// Sets the worker count for subsequent parallel regions. Values < 1 are rejected.
void set_worker_count(int workers);

/// Reads DPSIM_WORKERS from the environment; returns 0 when unset or malformed.
int worker_count_from_env();

/// Restores the previous worker count on destruction.
class ScopedWorkers {
public:
    explicit ScopedWorkers(int workers) : previous_(worker_count()) { set_worker_count(workers); }
    ~ScopedWorkers() { set_worker_count(previous_); }
    ScopedWorkers(const ScopedWorkers&) = delete;
    ScopedWorkers& operator=(const ScopedWorkers&) = delete;

private:
    int previous_;
};

}  // namespace dpsim
