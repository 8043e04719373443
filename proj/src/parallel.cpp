#include "abelconv/parallel.hpp"

#include <cstdlib>
#include <string>

namespace abelconv {

std::size_t worker_count() {
  if (const char* env = std::getenv("ABELCONV_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

}  // namespace abelconv
