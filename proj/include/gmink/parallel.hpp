#pragma once

#include <cstddef>

namespace gmink {

// Upper bound on worker threads; initialised from GMINK_THREADS when set,
// otherwise std::thread::hardware_concurrency().
std::size_t max_threads();
void set_max_threads(std::size_t n);

}  // namespace gmink
