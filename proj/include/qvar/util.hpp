#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace qvar {

/// Formats a double with 17 significant digits so that values survive a
/// text round trip bit-exactly.
std::string format_double(double x);

/// Inverse of the standard normal CDF (Acklam's rational approximation,
/// relative error below 1.2e-9 which is ample for confidence limits).
double normal_quantile(double p);

/// SplitMix64 step; used to derive independent per-replicate seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed for replicate `index` of a run keyed by `seed`. Pure function of
/// (seed, index), so any subset of replicates can be regenerated alone.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Thread budget: min(QVAR_THREADS if set, hardware concurrency), at least 1.
int thread_budget();

/// Runs body(i) for i in [0, count) over at most `threads` threads.
/// Each index is processed exactly once; the caller is responsible for
/// making iterations independent (e.g. writing to distinct slots).
void parallel_for(int count, int threads, const std::function<void(int)>& body);

}  // namespace qvar
