#include "core/product_state.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>

namespace hamlet {

namespace {

void rsd_recurse(const PureState& psi, double prob_prefix, std::vector<Vec>& vector_prefix,
                 RsdEnsemble& out) {
  if (psi.sites() == 1) {
    out.probabilities.push_back(prob_prefix);
    std::vector<Vec> branch = vector_prefix;
    branch.push_back(psi.amps);
    out.branches.push_back(std::move(branch));
    return;
  }
  SchmidtDecomposition sd = schmidt_decompose(psi, 1);
  std::vector<int> rest_dims(psi.dims.begin() + 1, psi.dims.end());
  for (Eigen::Index i = 0; i < sd.coefficients.size(); ++i) {
    double p = sd.coefficients(i) * sd.coefficients(i);
    if (prob_prefix * p < kBranchPruneTol) continue;
    vector_prefix.push_back(sd.left[i]);
    PureState rest = PureState::make(rest_dims, sd.right[i]);
    rsd_recurse(rest, prob_prefix * p, vector_prefix, out);
    vector_prefix.pop_back();
  }
}

}  // namespace

Vec RsdEnsemble::reconstruct(const std::vector<int>& dims) const {
  Eigen::Index dim = 1;
  for (int d : dims) dim *= d;
  Vec out = Vec::Zero(dim);
  for (int b = 0; b < branch_count(); ++b) {
    Vec prod = branches[b][0];
    for (size_t s = 1; s < branches[b].size(); ++s) {
      Vec next(prod.size() * branches[b][s].size());
      for (Eigen::Index i = 0; i < prod.size(); ++i)
        next.segment(i * branches[b][s].size(), branches[b][s].size()) = prod(i) * branches[b][s];
      prod = std::move(next);
    }
    out += std::sqrt(probabilities[b]) * prod;
  }
  return out;
}

RsdEnsemble recursive_schmidt(const PureState& psi) {
  for (size_t i = 1; i < psi.dims.size(); ++i)
    if (psi.dims[i] != psi.dims[0])
      throw std::invalid_argument("recursive_schmidt: all local dimensions must be equal");
  RsdEnsemble out;
  std::vector<Vec> prefix;
  rsd_recurse(psi, 1.0, prefix, out);
  return out;
}

double mixture_expectation(const RsdEnsemble& ensemble, const Mat& projector,
                           const std::vector<int>& support, int d) {
  double total = 0.0;
  for (int b = 0; b < ensemble.branch_count(); ++b) {
    // <branch| P_support |branch> factorizes over the branch's product form.
    Eigen::Index dim = projector.rows();
    Vec local(dim);
    // Build the local product vector on the support sites.
    Vec prod = ensemble.branches[b][support[0]];
    for (size_t s = 1; s < support.size(); ++s) {
      const Vec& next_site = ensemble.branches[b][support[s]];
      Vec next(prod.size() * next_site.size());
      for (Eigen::Index i = 0; i < prod.size(); ++i)
        next.segment(i * next_site.size(), next_site.size()) = prod(i) * next_site;
      prod = std::move(next);
    }
    if (prod.size() != dim)
      throw std::invalid_argument("mixture_expectation: projector dimension mismatch");
    local = prod;
    total += ensemble.probabilities[b] * local.dot(projector * local).real();
  }
  (void)d;
  return total;
}

BranchResult best_rsd_branch(const LocalHamiltonianInstance& inst, const PureState& psi,
                             bool maximize) {
  RsdEnsemble ens = recursive_schmidt(psi);
  BranchResult best;
  for (int b = 0; b < ens.branch_count(); ++b) {
    ProductAssignment cand = ProductAssignment::from_pure(ens.branches[b]);
    double v = product_energy(inst, cand);
    bool better = best.branch_index < 0 || (maximize ? v > best.value : v < best.value);
    if (better) {
      best.assignment = std::move(cand);
      best.value = v;
      best.branch_index = b;
    }
  }
  if (best.branch_index < 0) throw std::runtime_error("best_rsd_branch: empty ensemble");
  return best;
}

ProductAssignment round_conditional_expectations(const LocalHamiltonianInstance& inst,
                                                 const ProductAssignment& assign,
                                                 Direction direction) {
  ProductAssignment current = assign;
  const bool maximize = direction == Direction::maximize;
  for (int site = 0; site < inst.n; ++site) {
    Eigen::SelfAdjointEigenSolver<Mat> block_es(current.blocks[site].op.m);
    Mat env = site_environment(inst, current, site);
    int best = -1;
    double best_score = 0.0;
    for (int j = 0; j < inst.d; ++j) {
      Vec v = block_es.eigenvectors().col(j);
      double score = v.dot(env * v).real();
      if (best < 0 || (maximize ? score > best_score : score < best_score)) {
        best = j;
        best_score = score;
      }
    }
    Vec v = block_es.eigenvectors().col(best);
    current.blocks[site] = DensityOp::pure(v);
  }
  return current;
}

}  // namespace hamlet
