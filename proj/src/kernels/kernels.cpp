#include "airfer/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace airfer::kern {

#if defined(__x86_64__) || defined(_M_X64)
const Ops& avx2_ops();  // defined in kernels_avx2.cpp
#endif
#if defined(__aarch64__)
const Ops& neon_ops();  // defined in kernels_neon.cpp
#endif

namespace {

struct Selection {
  const Ops* table;
  const char* name;
};

Selection select() {
  const char* forced = std::getenv("AIRFER_KERNEL");
  if (forced != nullptr && std::strcmp(forced, "scalar") == 0) {
    return {&scalar_ops(), "scalar"};
  }
#if defined(__x86_64__) || defined(_M_X64)
  const bool have_avx2 = __builtin_cpu_supports("avx2") &&
                         __builtin_cpu_supports("fma");
  if (have_avx2 &&
      (forced == nullptr || std::strcmp(forced, "avx2") == 0)) {
    return {&avx2_ops(), "avx2"};
  }
#elif defined(__aarch64__)
  if (forced == nullptr || std::strcmp(forced, "neon") == 0) {
    return {&neon_ops(), "neon"};
  }
#endif
  return {&scalar_ops(), "scalar"};
}

const Selection& selection() {
  static const Selection s = select();
  return s;
}

}  // namespace

const Ops& ops() { return *selection().table; }

const char* active_kernel_name() { return selection().name; }

}  // namespace airfer::kern
