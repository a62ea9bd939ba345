#include "hopjam/exec.hpp"

#include <omp.h>

namespace hopjam {

int thread_count() { return omp_get_max_threads(); }

void set_thread_count(int n) {
  if (n >= 1) omp_set_num_threads(n);
}

}  // namespace hopjam
