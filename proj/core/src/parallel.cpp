#include "ghostlab/parallel.hpp"

namespace ghostlab {
namespace {
std::atomic<unsigned> g_thread_count{0};
}

void set_thread_count(unsigned count) { g_thread_count.store(count); }

unsigned thread_count() {
  const unsigned n = g_thread_count.load();
  if (n != 0) return n;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace ghostlab
