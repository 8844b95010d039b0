#include <atomic>
#include <cstdlib>
#include <string_view>

#include "lipfree/kernels.hpp"

namespace lipfree::kernels {

#if defined(LIPFREE_HAVE_AVX2)
namespace avx2 {
const KernelTable& table();
}
#endif
#if defined(LIPFREE_HAVE_NEON)
namespace neon {
const KernelTable& table();
}
#endif

const KernelTable* avx2_table() {
#if defined(LIPFREE_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2::table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_table() {
#if defined(LIPFREE_HAVE_NEON)
  return &neon::table();
#else
  return nullptr;
#endif
}

std::vector<const KernelTable*> available_tables() {
  std::vector<const KernelTable*> out{&scalar_table()};
  if (auto* t = avx2_table()) out.push_back(t);
  if (auto* t = neon_table()) out.push_back(t);
  return out;
}

namespace {

const KernelTable* lookup(Backend backend) {
  switch (backend) {
    case Backend::scalar:
      return &scalar_table();
    case Backend::avx2:
      return avx2_table();
    case Backend::neon:
      return neon_table();
    case Backend::automatic:
      break;
  }
  if (auto* t = avx2_table()) return t;
  if (auto* t = neon_table()) return t;
  return &scalar_table();
}

const KernelTable* initial_selection() {
  if (const char* env = std::getenv("LIPFREE_SIMD")) {
    std::string_view v{env};
    const KernelTable* t = nullptr;
    if (v == "scalar") t = lookup(Backend::scalar);
    if (v == "avx2") t = lookup(Backend::avx2);
    if (v == "neon") t = lookup(Backend::neon);
    if (t) return t;
  }
  return lookup(Backend::automatic);
}

std::atomic<const KernelTable*>& selection() {
  static std::atomic<const KernelTable*> current{initial_selection()};
  return current;
}

}  // namespace

const KernelTable& active() { return *selection().load(std::memory_order_relaxed); }

bool set_backend(Backend backend) {
  const KernelTable* t = lookup(backend);
  if (!t) return false;
  selection().store(t, std::memory_order_relaxed);
  return true;
}

}  // namespace lipfree::kernels
