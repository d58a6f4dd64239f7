#ifndef HAMLET_PRODUCT_STATE_HPP
#define HAMLET_PRODUCT_STATE_HPP

#include "core/instance.hpp"
#include "core/operator_core.hpp"

namespace hamlet {

/// Output of the recursive Schmidt decomposition: an ensemble of orthonormal
/// product vectors with probabilities, reproducing the source state as
/// sum_i sqrt(p_i) (x)_s branch[i][s].
struct RsdEnsemble {
  std::vector<double> probabilities;
  std::vector<std::vector<Vec>> branches;  // branch -> per-site local unit vectors

  int branch_count() const { return static_cast<int>(probabilities.size()); }
  /// Re-sums the ensemble into a full-space vector.
  Vec reconstruct(const std::vector<int>& dims) const;
};

/// Schmidt-cuts sites 1..n-1 in order; branches with probability below 1e-12
/// are pruned.
RsdEnsemble recursive_schmidt(const PureState& psi);

/// Tr(P rho) for the classical mixture rho of the ensemble's product
/// branches, with P acting on `support`.
double mixture_expectation(const RsdEnsemble& ensemble, const Mat& projector,
                           const std::vector<int>& support, int d);

/// The branch (as a pure product assignment) maximizing / minimizing the
/// instance energy, together with its value.
struct BranchResult {
  ProductAssignment assignment;
  double value = 0.0;
  int branch_index = -1;
};
BranchResult best_rsd_branch(const LocalHamiltonianInstance& inst, const PureState& psi,
                             bool maximize = true);

enum class Direction { maximize, minimize };

/// Site-by-site replaces each block with its best eigenvector given the
/// already-fixed sites; the value never degrades (convexity).
ProductAssignment round_conditional_expectations(const LocalHamiltonianInstance& inst,
                                                 const ProductAssignment& assign,
                                                 Direction direction = Direction::maximize);

}  // namespace hamlet

#endif
