#ifndef STOKESNC_EXEC_HPP
#define STOKESNC_EXEC_HPP

#include <cstddef>
#include <functional>

namespace stokesnc {

/// Execution policy for the per-mode sweeps. Serial is the reference
/// implementation; OpenMP runs the same per-index kernel in parallel.
/// Every kernel writes only its own output slot, so the two policies
/// produce bit-identical results.
enum class ExecPolicy { Serial, OpenMP };

/// Worker cap from the STOKES_NC_THREADS environment variable
/// (0 means "no cap").
int thread_cap();

/// Apply fn(i) for i in [0, n) under the given policy.
void for_each_index(std::size_t n, ExecPolicy policy,
                    const std::function<void(std::size_t)>& fn);

}  // namespace stokesnc

#endif
