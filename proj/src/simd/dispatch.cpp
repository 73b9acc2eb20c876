#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "dynslam/simd/kernels.hpp"

namespace dynslam::simd {

namespace {

const Kernels* select_default() {
  const char* env = std::getenv("DYNSLAM_SIMD");
  if (env != nullptr && std::string(env) == "scalar") {
    return &scalar_kernels();
  }
  if (cpu_supports(Isa::Avx2)) {
    return avx2_kernels();
  }
  return &scalar_kernels();
}

std::atomic<const Kernels*>& active() {
  static std::atomic<const Kernels*> table{select_default()};
  return table;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(__i386__)
      return avx2_kernels() != nullptr && __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const Kernels& kernels() { return *active().load(std::memory_order_acquire); }

void set_active_isa(Isa isa) {
  if (!cpu_supports(isa)) {
    throw std::invalid_argument("SIMD target not supported on this CPU: " +
                                std::string(to_string(isa)));
  }
  active().store(isa == Isa::Avx2 ? avx2_kernels() : &scalar_kernels(),
                 std::memory_order_release);
}

}  // namespace dynslam::simd
