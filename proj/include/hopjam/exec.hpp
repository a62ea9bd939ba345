#pragma once

#include <cstddef>

namespace hopjam {

/// Selects between the serial reference kernel and the OpenMP kernel.
/// Both produce bit-identical results: every output cell is computed by the
/// same sequence of floating-point operations, only the distribution of
/// cells over threads differs.
enum class Exec { serial, parallel };

/// Number of OpenMP worker threads currently configured.
int thread_count();

/// Sets the OpenMP thread count; values < 1 are ignored.
void set_thread_count(int n);

/// Calls body(i) for i in [0, n).  Iterations must write disjoint outputs.
template <class Body>
void for_each_index(Exec exec, std::size_t n, Body&& body) {
  const auto count = static_cast<std::ptrdiff_t>(n);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
  }
}

}  // namespace hopjam
