#include "trilinear/parallel.hpp"

#include <omp.h>

#include <charconv>
#include <cstdlib>
#include <cstring>

#include "trilinear/errors.hpp"

namespace trilinear {

std::optional<int> thread_cap_from_env() {
  const char* raw = std::getenv("TRILINEAR_THREADS");
  if (raw == nullptr) return std::nullopt;
  int value = 0;
  const char* end = raw + std::strlen(raw);
  const auto [ptr, ec] = std::from_chars(raw, end, value);
  if (ec != std::errc{} || ptr != end || value < 1) {
    throw DomainError("cli", "TRILINEAR_THREADS must be a positive integer");
  }
  return value;
}

void configure_threads_from_env() {
  if (const auto cap = thread_cap_from_env()) {
    omp_set_num_threads(*cap);
  }
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace trilinear
