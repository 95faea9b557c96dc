#pragma once

#include <optional>

namespace trilinear {

/// Kernels come in two flavours: a plain serial loop kept as the reference
/// and an OpenMP version. Both produce bit-identical results because every
/// reduction runs in a fixed order inside a single iteration.
enum class Execution { serial, parallel };

/// Parses TRILINEAR_THREADS. Returns nullopt when unset; throws DomainError
/// when set to anything but a positive integer.
std::optional<int> thread_cap_from_env();

/// Applies TRILINEAR_THREADS, if set, as the OpenMP thread count.
void configure_threads_from_env();

int max_threads();

}  // namespace trilinear
