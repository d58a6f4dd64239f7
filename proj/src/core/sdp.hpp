#ifndef HAMLET_SDP_HPP
#define HAMLET_SDP_HPP

#include <limits>

#include "core/degree_tensor.hpp"
#include "core/instance.hpp"

namespace hamlet {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// offset + sum_{i,j} coeff(i,j) Tr(sigma_j rho_i) over the instance basis.
struct LinearFunctional {
  RMat coeff;  // n x d^2
  double offset = 0.0;

  double value(const RMat& site_expectations) const {
    return offset + coeff.cwiseProduct(site_expectations).sum();
  }
};

struct LinearizedConstraint {
  LinearFunctional functional;
  double lower = -kInf;
  double upper = kInf;
};

/// The linearized program P2: n PSD trace-1 blocks, a linear objective, and
/// two-sided linear estimate-consistency constraints.
struct SdpModel {
  int n = 0;
  int d = 2;
  bool maximize = true;
  LinearFunctional objective;
  std::vector<LinearizedConstraint> constraints;
};

enum class SdpStatus { optimal, infeasible, max_iter };

struct SdpSolution {
  ProductAssignment assignment;
  double objective_value = 0.0;
  SdpStatus status = SdpStatus::max_iter;
  double duality_gap = kInf;
  double max_violation = 0.0;     // worst constraint residual of the returned point
  double projection_shift = 0.0;  // post-solve PSD clip + renormalization size
};

/// Equality constraints are modelled as paired inequalities with this slack;
/// the solver collapses any constraint at most twice this wide back into an
/// exact equality.
constexpr double kEqualitySlack = 1e-9;

/// Appends lower <= functional <= upper, using the paired-slack encoding when
/// lower == upper.
void add_constraint(SdpModel& model, LinearFunctional f, double lower, double upper);

/// Builds P2 from the coordinate tensor: runs the estimate recursion over the
/// sample, emits the widened bound constraints level by level, and installs
/// the top-level linear objective. `eps_top` is the error parameter handed to
/// the outermost recursion level; lower levels receive the ladder value
/// rescaled by eps_top / eps_k.
SdpModel linearize(const CoordinateTensor& tensor, const SampleSet& sample,
                   const SamplerParams& params, double eps_top, bool maximize = true);

/// Deduplicates constraints with identical functionals, keeping the tightest
/// interval. Returns the number removed.
int dedup_constraints(SdpModel& model);

/// Interior-point solve: log-det barriers on the blocks, log barriers on the
/// inequality sides, equalities eliminated exactly; single-block equalities
/// pinned at an extreme eigenvalue trigger a facial reduction of that block.
SdpSolution solve_sdp(const SdpModel& model, double eps_sdp);

/// Exact degree-k objective value of a solution's assignment.
double evaluate_on_p1(const CoordinateTensor& tensor, const SdpSolution& solution);

/// Plain-text standard-form listing for cross-checking with other solvers.
std::string dump_model(const SdpModel& model);

}  // namespace hamlet

#endif
