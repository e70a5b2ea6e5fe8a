#pragma once

#include <cstddef>
#include <functional>

namespace lrphase {

/// Serial paths are the reference implementation; parallel paths must match
/// them bit for bit.
enum class Execution { Serial, Parallel };

/// Environment variable capping the OpenMP worker count.
inline constexpr const char* kMaxWorkersEnv = "LRPHASE_MAX_WORKERS";

/// omp_get_max_threads(), capped by LRPHASE_MAX_WORKERS when set to a positive integer.
int worker_count();

/// Calls body(i) for i in [0, n). Each index must write only to its own slot.
/// An exception thrown by any body is rethrown after the loop (lowest index wins).
void for_each_index(std::size_t n, Execution exec, const std::function<void(std::size_t)>& body);

}  // namespace lrphase
