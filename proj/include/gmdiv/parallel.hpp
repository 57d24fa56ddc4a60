#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace gmdiv {

/// Worker count used by parallel_for; 0 means hardware concurrency.
void set_thread_count(std::size_t n);
std::size_t thread_count();

/// Runs body(i) for i in [0, n) on the worker pool. Callers write results
/// into slot i, so output does not depend on scheduling. The first exception
/// thrown by any body is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Independent per-index stream seed (splitmix64 of seed and index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace gmdiv
