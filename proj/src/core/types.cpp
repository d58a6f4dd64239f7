#include "core/types.hpp"

#include <atomic>
#include <cstdlib>
#include <limits>

namespace hamlet {

namespace {

std::uint64_t initial_cap() {
  if (const char* env = std::getenv("HAMLET_MAX_DIM")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && v > 1) return static_cast<std::uint64_t>(v);
  }
  return std::uint64_t{1} << 22;
}

std::atomic<std::uint64_t> g_max_dim{initial_cap()};

}  // namespace

std::uint64_t max_total_dim() { return g_max_dim.load(); }

void set_max_total_dim(std::uint64_t cap) { g_max_dim.store(cap < 2 ? 2 : cap); }

std::uint64_t pow_u64(std::uint64_t base, unsigned exp) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < exp; ++i) {
    if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base)
      return std::numeric_limits<std::uint64_t>::max();
    r *= base;
  }
  return r;
}

Eigen::Index checked_dim(int d, int n_sites, const char* where) {
  if (d < 2) throw std::invalid_argument(std::string(where) + ": local dimension must be >= 2");
  if (n_sites < 0) throw std::invalid_argument(std::string(where) + ": negative site count");
  std::uint64_t dim = pow_u64(static_cast<std::uint64_t>(d), static_cast<unsigned>(n_sites));
  if (dim > max_total_dim())
    throw CapacityError(std::string(where) + ": dimension " + std::to_string(d) + "^" +
                        std::to_string(n_sites) + " exceeds cap " + std::to_string(max_total_dim()));
  return static_cast<Eigen::Index>(dim);
}

}  // namespace hamlet
