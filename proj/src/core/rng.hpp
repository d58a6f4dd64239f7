#ifndef HAMLET_RNG_HPP
#define HAMLET_RNG_HPP

#include <random>

#include "core/types.hpp"

namespace hamlet {

/// Seeded random source with platform-independent output streams.
/// std::mt19937_64 has a standardized sequence; the distributions below are
/// hand-rolled because the standard library ones are not reproducible across
/// implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform in {0, ..., n-1}. Modulo bias is negligible for n << 2^64.
  std::uint64_t uniform_index(std::uint64_t n) { return gen_() % n; }

  double gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  Complex complex_gaussian() {
    double re = gaussian();
    double im = gaussian();
    return Complex(re, im);
  }

  // Haar-distributed unitary via QR of a Ginibre matrix with the standard
  // phase fix R_ii/|R_ii|.
  Mat haar_unitary(int dim);

  // Uniform pure state of the given dimension.
  Vec random_state(Eigen::Index dim);

  // Random density matrix: G G^dag / Tr(G G^dag) for Ginibre G.
  Mat random_density(int dim);

 private:
  std::mt19937_64 gen_;
};

}  // namespace hamlet

#endif
