#ifndef HAMLET_DEGREE_TENSOR_HPP
#define HAMLET_DEGREE_TENSOR_HPP

#include <cstdint>
#include <map>
#include <optional>

#include "core/instance.hpp"

namespace hamlet {

/// Per-term coefficients of the instance in the orthogonal Hermitian basis.
/// Terms of arity below k are padded to exactly k sites by tensoring with the
/// identity on the smallest free site indices; padded supports that collide
/// have their coefficient arrays summed. Within a term the coefficient array
/// is flattened with position 1 (the smallest site) as the least significant
/// base-d^2 digit.
class CoordinateTensor {
 public:
  struct Term {
    std::vector<int> support;    // length k, ascending
    std::vector<double> coeffs;  // length (d^2)^k
  };

  static CoordinateTensor decompose(const LocalHamiltonianInstance& inst);

  int n() const { return n_; }
  int d() const { return d_; }
  int k() const { return k_; }
  int basis_size() const { return d_ * d_; }
  const HermBasis& basis() const { return basis_; }
  const std::vector<Term>& terms() const { return terms_; }

  /// Index of the term with exactly this padded support, or -1.
  int term_index(const std::vector<int>& support) const;

  /// Distinct sites that can occupy position `pos` (1-based) when positions
  /// pos+1..k are pinned to `suffix_sites` (ascending). Empty when nothing
  /// matches.
  const std::vector<int>& sites_at_position(const std::vector<int>& suffix_sites) const;

  /// Term indices whose supports end with `suffix_sites` (positions
  /// k-|suffix|+1..k).
  const std::vector<int>& terms_with_suffix(const std::vector<int>& suffix_sites) const;

  /// Rebuilds the padded term operator from its coefficients.
  Mat reconstruct_term(int term_idx) const;

 private:
  int n_ = 0, d_ = 0, k_ = 0;
  HermBasis basis_;
  std::vector<Term> terms_;
  std::map<std::vector<int>, int> by_support_;
  // suffix (any length 0..k-1) -> term indices / predecessor sites
  std::map<std::vector<int>, std::vector<int>> suffix_terms_;
  std::map<std::vector<int>, std::vector<int>> suffix_sites_;
};

/// Single-site expectations Tr(sigma_j rho_i) for every site, the contraction
/// currency of the degree forms.
RMat site_basis_expectations(const CoordinateTensor& tensor, const ProductAssignment& assign);

/// A degree-b inner product with fixed outer sites and basis labels
/// (positions b+1..k). The values are functions of a product assignment.
struct DegreeForm {
  const CoordinateTensor* tensor = nullptr;
  int level = 0;                  // b
  std::vector<int> outer_sites;   // positions b+1..k, ascending
  std::vector<int> outer_labels;  // aligned with outer_sites

  static DegreeForm top(const CoordinateTensor& tensor);
  DegreeForm descend(int site, int label) const;
};

/// Exact nested-sum value t_{a,b}: positions 1..a are summed over all site
/// tuples, positions a+1..b have their sites pinned (outer_sites' first b-a
/// entries... see below) and their blocks contracted, positions b+1..k carry
/// fixed basis labels. `outer_sites` has length k-a, `outer_labels` length
/// k-b; the two lists share their trailing k-b positions.
double eval_general(const CoordinateTensor& tensor, const ProductAssignment& assign, int a, int b,
                    const std::vector<int>& outer_sites, const std::vector<int>& outer_labels);

/// t_{b,b} of the form, i.e. all positions up to the form's level summed.
double eval_exact(const DegreeForm& form, const ProductAssignment& assign);

/// Finite grid over single-qudit Hermitian operators with entries bounded by
/// 1: an evenly spaced grid on [-1,1] per diagonal entry and a square lattice
/// over the unit disk per upper off-diagonal entry.
struct DeltaNet {
  int d = 0;
  double delta = 0.0;
  std::vector<double> diag_grid;
  std::vector<Complex> offdiag_grid;

  std::uint64_t size() const;  // diag^d * offdiag^(d(d-1)/2), saturating
  Mat element(std::uint64_t index) const;
  std::uint64_t nearest_index(const Mat& rho) const;
  Mat nearest(const Mat& rho) const { return element(nearest_index(rho)); }
};

DeltaNet build_delta_net(int d, double delta);

/// Sampling-lemma parameters and the derived error ladder
/// eps_b = d^{k/2} (sqrt(f/g) + delta) (Delta^b - 1)/(Delta - 1),
/// Delta = sqrt(2) d (1 + delta).
struct SamplerParams {
  int n = 0, d = 2, k = 1;
  double f = 0.0, g = 0.0, delta = 0.0;
  double cutoff_fraction = 0.0;  // inner sums over fewer than this fraction of
                                 // sites are estimated as 0

  double big_delta() const { return std::sqrt(2.0) * d * (1.0 + delta); }
  double ladder_unit() const {
    return std::pow(static_cast<double>(d), 0.5 * k) * (std::sqrt(f / g) + delta);
  }
  double eps_ladder(int b) const;  // eps_b above
};

/// A multiset of sampled sites with the net element assigned to each distinct
/// site.
struct SampleSet {
  std::vector<int> sites;         // with replacement
  std::map<int, Mat> net_blocks;  // distinct site -> net element

  std::vector<int> distinct_sites() const;
};

SampleSet draw_sample(int n, int count, std::uint64_t seed);

/// Recursive sampling estimator of the form's value. With S covering every
/// site exactly once and net blocks equal to the true blocks, the estimate is
/// exact at every level.
double eval_estimate(const DegreeForm& form, const SampleSet& sample, const SamplerParams& params);

/// Theory-mode parameter derivation for a target additive error scale.
struct ParamPlan {
  double eps = 0.0;
  double eps_sdp = 0.0;
  double eps_prime = 0.0;
  double f = 0.0, g = 0.0, delta = 0.0;
  int sample_size = 0;           // ceil(g log2 n)
  std::uint64_t net_points = 0;  // |G|
  double iteration_log10 = 0.0;  // log10 |G|^{|S| distinct-site bound}
  SamplerParams sampler;
  std::vector<double> ladder;    // eps_1 .. eps_k
};

ParamPlan compute_params(double eps, int n, int d, int k);

}  // namespace hamlet

#endif
