#include <cstdlib>
#include <string_view>

#include "ltmopt/kernels.hpp"

namespace ltmopt::kernels {

std::vector<const KernelTable*> available_tables() {
  std::vector<const KernelTable*> out{&scalar_table()};
  if (const auto* t = avx2_table()) out.push_back(t);
  if (const auto* t = neon_table()) out.push_back(t);
  return out;
}

namespace {

const KernelTable& select() {
  if (const char* env = std::getenv("LTMOPT_KERNELS")) {
    const std::string_view want(env);
    for (const auto* t : available_tables()) {
      if (t->name == want) return *t;
    }
  }
  if (const auto* t = avx2_table()) return *t;
  if (const auto* t = neon_table()) return *t;
  return scalar_table();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& chosen = select();
  return chosen;
}

}  // namespace ltmopt::kernels
