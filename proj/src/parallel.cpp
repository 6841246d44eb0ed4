#include "rieszcap/parallel.hpp"

namespace rieszcap {

namespace {
std::atomic<unsigned> g_limit{0};
}

void set_thread_limit(unsigned limit) { g_limit.store(limit); }

unsigned thread_limit() {
  const unsigned limit = g_limit.load();
  if (limit != 0) return limit;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace rieszcap
