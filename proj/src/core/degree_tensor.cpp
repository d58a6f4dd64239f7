#include "core/degree_tensor.hpp"

#include <algorithm>
#include <cmath>

#include "core/rng.hpp"

namespace hamlet {

namespace {

const std::vector<int> kEmpty;

std::vector<double> basis_expect(const HermBasis& basis, const Mat& rho) {
  std::vector<double> w(basis.elements.size());
  for (size_t j = 0; j < basis.elements.size(); ++j)
    w[j] = (basis.elements[j] * rho).trace().real();
  return w;
}

}  // namespace

CoordinateTensor CoordinateTensor::decompose(const LocalHamiltonianInstance& inst) {
  if (inst.k > inst.n)
    throw std::invalid_argument("decompose: locality exceeds site count, cannot pad terms");
  CoordinateTensor ct;
  ct.n_ = inst.n;
  ct.d_ = inst.d;
  ct.k_ = inst.k;
  ct.basis_ = build_herm_basis(inst.d);
  const int d = inst.d;
  const int k = inst.k;
  const int bsize = d * d;

  std::uint64_t coeff_count = pow_u64(static_cast<std::uint64_t>(bsize), static_cast<unsigned>(k));
  Eigen::Index full_dim = 1;
  for (int i = 0; i < k; ++i) full_dim *= d;

  std::map<std::vector<int>, std::vector<double>> merged;
  for (const LocalTerm& term : inst.terms) {
    // Pad to arity k on the smallest free sites.
    std::vector<int> support = term.support;
    Mat matrix;
    if (static_cast<int>(support.size()) < k) {
      for (int s = 0; s < inst.n && static_cast<int>(support.size()) < k; ++s)
        if (!std::binary_search(term.support.begin(), term.support.end(), s)) support.push_back(s);
      std::sort(support.begin(), support.end());
      std::vector<int> positions;
      for (int s : term.support)
        positions.push_back(static_cast<int>(
            std::lower_bound(support.begin(), support.end(), s) - support.begin()));
      matrix = embed_term(term.matrix, positions, k, d);
    } else {
      matrix = term.matrix;
    }

    // r_J = Tr(M sigma_J) / 2^k, position 1 = least significant digit = first
    // tensor factor = smallest site.
    std::vector<double>& coeffs =
        merged.try_emplace(support, std::vector<double>(coeff_count, 0.0)).first->second;
    std::vector<int> labels(k);
    const double norm = std::pow(2.0, -k);
    for (std::uint64_t jidx = 0; jidx < coeff_count; ++jidx) {
      std::uint64_t rem = jidx;
      for (int l = 0; l < k; ++l) {
        labels[l] = static_cast<int>(rem % bsize);
        rem /= bsize;
      }
      Mat sigma = ct.basis_.elements[labels[0]];
      for (int l = 1; l < k; ++l) sigma = tensor(sigma, ct.basis_.elements[labels[l]]);
      Complex tr = (matrix * sigma).trace();
      coeffs[jidx] += tr.real() * norm;
    }
  }

  for (auto& [support, coeffs] : merged) {
    ct.by_support_[support] = static_cast<int>(ct.terms_.size());
    ct.terms_.push_back({support, std::move(coeffs)});
  }

  // Suffix lookup tables for every suffix length 0..k-1.
  for (int t = 0; t < static_cast<int>(ct.terms_.size()); ++t) {
    const std::vector<int>& s = ct.terms_[t].support;
    for (int len = 0; len < k; ++len) {
      std::vector<int> suffix(s.end() - len, s.end());
      ct.suffix_terms_[suffix].push_back(t);
      std::vector<int>& preds = ct.suffix_sites_[suffix];
      int pred = s[k - 1 - len];
      if (std::find(preds.begin(), preds.end(), pred) == preds.end()) preds.push_back(pred);
    }
  }
  for (auto& [suffix, preds] : ct.suffix_sites_) std::sort(preds.begin(), preds.end());
  return ct;
}

int CoordinateTensor::term_index(const std::vector<int>& support) const {
  auto it = by_support_.find(support);
  return it == by_support_.end() ? -1 : it->second;
}

const std::vector<int>& CoordinateTensor::sites_at_position(
    const std::vector<int>& suffix_sites) const {
  auto it = suffix_sites_.find(suffix_sites);
  return it == suffix_sites_.end() ? kEmpty : it->second;
}

const std::vector<int>& CoordinateTensor::terms_with_suffix(
    const std::vector<int>& suffix_sites) const {
  auto it = suffix_terms_.find(suffix_sites);
  return it == suffix_terms_.end() ? kEmpty : it->second;
}

Mat CoordinateTensor::reconstruct_term(int term_idx) const {
  const Term& term = terms_.at(term_idx);
  Eigen::Index dim = 1;
  for (int i = 0; i < k_; ++i) dim *= d_;
  Mat out = Mat::Zero(dim, dim);
  const int bsize = basis_size();
  std::vector<int> labels(k_);
  for (size_t jidx = 0; jidx < term.coeffs.size(); ++jidx) {
    if (term.coeffs[jidx] == 0.0) continue;
    std::uint64_t rem = jidx;
    for (int l = 0; l < k_; ++l) {
      labels[l] = static_cast<int>(rem % bsize);
      rem /= bsize;
    }
    Mat sigma = basis_.elements[labels[0]];
    for (int l = 1; l < k_; ++l) sigma = tensor(sigma, basis_.elements[labels[l]]);
    out += term.coeffs[jidx] * sigma;
  }
  return out;
}

RMat site_basis_expectations(const CoordinateTensor& tensor, const ProductAssignment& assign) {
  const int bsize = tensor.basis_size();
  RMat w(assign.sites(), bsize);
  for (int i = 0; i < assign.sites(); ++i) {
    std::vector<double> row = basis_expect(tensor.basis(), assign.blocks[i].op.m);
    for (int j = 0; j < bsize; ++j) w(i, j) = row[j];
  }
  return w;
}

DegreeForm DegreeForm::top(const CoordinateTensor& tensor) {
  DegreeForm f;
  f.tensor = &tensor;
  f.level = tensor.k();
  return f;
}

DegreeForm DegreeForm::descend(int site, int label) const {
  if (level <= 1) throw std::logic_error("DegreeForm::descend: already at the base level");
  DegreeForm f;
  f.tensor = tensor;
  f.level = level - 1;
  f.outer_sites.reserve(outer_sites.size() + 1);
  f.outer_sites.push_back(site);
  f.outer_sites.insert(f.outer_sites.end(), outer_sites.begin(), outer_sites.end());
  f.outer_labels.reserve(outer_labels.size() + 1);
  f.outer_labels.push_back(label);
  f.outer_labels.insert(f.outer_labels.end(), outer_labels.begin(), outer_labels.end());
  return f;
}

double eval_general(const CoordinateTensor& tensor, const ProductAssignment& assign, int a, int b,
                    const std::vector<int>& outer_sites, const std::vector<int>& outer_labels) {
  const int k = tensor.k();
  const int bsize = tensor.basis_size();
  if (a < 0 || a > b || b < 1 || b > k) throw std::invalid_argument("eval_general: bad levels");
  if (static_cast<int>(outer_sites.size()) != k - a ||
      static_cast<int>(outer_labels.size()) != k - b)
    throw std::invalid_argument("eval_general: outer index count mismatch");

  RMat w = site_basis_expectations(tensor, assign);

  std::uint64_t label_base = 0;
  std::uint64_t stride = 1;
  for (int l = 0; l < b; ++l) stride *= bsize;
  std::uint64_t s = stride;
  for (int l = b; l < k; ++l) {
    label_base += static_cast<std::uint64_t>(outer_labels[l - b]) * s;
    s *= bsize;
  }
  std::uint64_t inner_count = stride;

  double total = 0.0;
  for (int t : tensor.terms_with_suffix(outer_sites)) {
    const CoordinateTensor::Term& term = tensor.terms()[t];
    double acc = 0.0;
    for (std::uint64_t inner = 0; inner < inner_count; ++inner) {
      double c = term.coeffs[label_base + inner];
      if (c == 0.0) continue;
      std::uint64_t rem = inner;
      double prod = c;
      for (int l = 0; l < b; ++l) {
        prod *= w(term.support[l], static_cast<int>(rem % bsize));
        rem /= bsize;
      }
      acc += prod;
    }
    total += acc;
  }
  return total;
}

double eval_exact(const DegreeForm& form, const ProductAssignment& assign) {
  return eval_general(*form.tensor, assign, form.level, form.level, form.outer_sites,
                      form.outer_labels);
}

std::uint64_t DeltaNet::size() const {
  std::uint64_t total = 1;
  auto mul = [&](std::uint64_t m) {
    if (m != 0 && total > UINT64_MAX / m)
      total = UINT64_MAX;
    else
      total *= m;
  };
  for (int i = 0; i < d; ++i) mul(diag_grid.size());
  for (int i = 0; i < d * (d - 1) / 2; ++i) mul(offdiag_grid.size());
  return total;
}

Mat DeltaNet::element(std::uint64_t index) const {
  Mat m = Mat::Zero(d, d);
  // Mixed radix, diagonal entries first (row order), then upper triangle
  // row-major; the first digit is least significant.
  for (int i = 0; i < d; ++i) {
    m(i, i) = diag_grid[index % diag_grid.size()];
    index /= diag_grid.size();
  }
  for (int r = 0; r < d; ++r)
    for (int c = r + 1; c < d; ++c) {
      Complex z = offdiag_grid[index % offdiag_grid.size()];
      index /= offdiag_grid.size();
      m(r, c) = z;
      m(c, r) = std::conj(z);
    }
  return m;
}

std::uint64_t DeltaNet::nearest_index(const Mat& rho) const {
  if (rho.rows() != d || rho.cols() != d)
    throw std::invalid_argument("DeltaNet::nearest_index: dimension mismatch");
  std::uint64_t index = 0;
  std::uint64_t radix = 1;
  for (int i = 0; i < d; ++i) {
    double x = rho(i, i).real();
    size_t best = 0;
    double bestd = std::abs(diag_grid[0] - x);
    for (size_t p = 1; p < diag_grid.size(); ++p) {
      double dd = std::abs(diag_grid[p] - x);
      if (dd < bestd) {
        bestd = dd;
        best = p;
      }
    }
    index += radix * best;
    radix *= diag_grid.size();
  }
  for (int r = 0; r < d; ++r)
    for (int c = r + 1; c < d; ++c) {
      Complex z = rho(r, c);
      size_t best = 0;
      double bestd = std::abs(offdiag_grid[0] - z);
      for (size_t p = 1; p < offdiag_grid.size(); ++p) {
        double dd = std::abs(offdiag_grid[p] - z);
        if (dd < bestd) {
          bestd = dd;
          best = p;
        }
      }
      index += radix * best;
      radix *= offdiag_grid.size();
    }
  return index;
}

DeltaNet build_delta_net(int d, double delta) {
  if (d < 2) throw std::invalid_argument("build_delta_net: local dimension must be >= 2");
  if (!(delta > 0.0) || delta > 2.0)
    throw std::invalid_argument("build_delta_net: net radius must be in (0, 2]");
  DeltaNet net;
  net.d = d;
  net.delta = delta;

  int n_diag = static_cast<int>(std::ceil(2.0 * d / delta)) + 1;
  net.diag_grid.resize(n_diag);
  for (int i = 0; i < n_diag; ++i)
    net.diag_grid[i] = -1.0 + 2.0 * static_cast<double>(i) / (n_diag - 1);

  double spacing_target = delta / (d * std::sqrt(2.0));
  int per_axis = static_cast<int>(std::ceil(2.0 / spacing_target)) + 1;
  double spacing = 2.0 / (per_axis - 1);
  double margin = spacing / std::sqrt(2.0);
  for (int xi = 0; xi < per_axis; ++xi)
    for (int yi = 0; yi < per_axis; ++yi) {
      Complex z(-1.0 + spacing * xi, -1.0 + spacing * yi);
      if (std::abs(z) <= 1.0 + margin) net.offdiag_grid.push_back(z);
    }
  return net;
}

double SamplerParams::eps_ladder(int b) const {
  double big = big_delta();
  double factor = 0.0;
  double p = 1.0;
  for (int m = 0; m < b; ++m) {
    factor += p;
    p *= big;
  }
  return ladder_unit() * factor;
}

std::vector<int> SampleSet::distinct_sites() const {
  std::vector<int> out = sites;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

SampleSet draw_sample(int n, int count, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("draw_sample: no sites");
  if (count < 1) throw std::invalid_argument("draw_sample: sample size must be positive");
  Rng rng(seed);
  SampleSet s;
  s.sites.reserve(count);
  for (int i = 0; i < count; ++i)
    s.sites.push_back(static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n))));
  return s;
}

namespace {

double eval_estimate_impl(const DegreeForm& form, const SampleSet& sample,
                          const SamplerParams& params,
                          const std::map<int, std::vector<double>>& wtilde) {
  const CoordinateTensor& tensor = *form.tensor;
  const int bsize = tensor.basis_size();
  const int k = tensor.k();
  const int b = form.level;

  // Cutoff rule: a sum whose index ranges over too few sites is estimated 0.
  size_t reachable = tensor.sites_at_position(form.outer_sites).size();
  if (static_cast<double>(reachable) <= params.cutoff_fraction * tensor.n()) return 0.0;

  const double scale = static_cast<double>(tensor.n()) / static_cast<double>(sample.sites.size());

  if (b == 1) {
    // sum over sampled sites of Tr((sum_j r_j sigma_j) rho~_i)
    std::uint64_t label_base = 0;
    std::uint64_t s = static_cast<std::uint64_t>(bsize);
    for (int l = 1; l < k; ++l) {
      label_base += static_cast<std::uint64_t>(form.outer_labels[l - 1]) * s;
      s *= bsize;
    }
    double acc = 0.0;
    for (int i : sample.sites) {
      std::vector<int> support;
      support.reserve(k);
      support.push_back(i);
      support.insert(support.end(), form.outer_sites.begin(), form.outer_sites.end());
      if (k > 1 && !form.outer_sites.empty() && i >= form.outer_sites.front()) continue;
      int t = tensor.term_index(support);
      if (t < 0) continue;
      const auto& coeffs = tensor.terms()[t].coeffs;
      const std::vector<double>& w = wtilde.at(i);
      for (int j = 0; j < bsize; ++j) acc += coeffs[label_base + j] * w[j];
    }
    return scale * acc;
  }

  std::map<int, int> multiplicity;
  for (int i : sample.sites) ++multiplicity[i];
  double acc = 0.0;
  for (const auto& [i, mult] : multiplicity) {
    const std::vector<double>& w = wtilde.at(i);
    for (int j = 0; j < bsize; ++j) {
      double e_ij = eval_estimate_impl(form.descend(i, j), sample, params, wtilde);
      acc += static_cast<double>(mult) * w[j] * e_ij;
    }
  }
  return scale * acc;
}

}  // namespace

double eval_estimate(const DegreeForm& form, const SampleSet& sample,
                     const SamplerParams& params) {
  const CoordinateTensor& tensor = *form.tensor;
  std::map<int, std::vector<double>> wtilde;
  for (int i : sample.distinct_sites()) {
    auto it = sample.net_blocks.find(i);
    if (it == sample.net_blocks.end())
      throw std::invalid_argument("eval_estimate: sampled site has no net element");
    wtilde[i] = basis_expect(tensor.basis(), it->second);
  }
  return eval_estimate_impl(form, sample, params, wtilde);
}

namespace {

double ladder_factor(double big_delta, int k) {
  double factor = 0.0, p = 1.0;
  for (int m = 0; m < k; ++m) {
    factor += p;
    p *= big_delta;
  }
  return factor;
}

// Solves d^{k/2} * delta * (Delta^k-1)/(Delta-1) = eps_prime / 2 for delta.
std::optional<double> solve_delta(double eps_prime, int d, int k) {
  double dk2 = std::pow(static_cast<double>(d), 0.5 * k);
  double target = eps_prime / (2.0 * dk2);
  auto lhs = [&](double delta) {
    return delta * ladder_factor(std::sqrt(2.0) * d * (1.0 + delta), k);
  };
  if (lhs(1.0) < target) return std::nullopt;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (lhs(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ParamPlan compute_params(double eps, int n, int d, int k) {
  if (!(eps > 0.0)) throw std::invalid_argument("compute_params: error scale must be positive");
  if (n < 2) throw std::invalid_argument("compute_params: need at least two sites");
  if (d < 2 || k < 1) throw std::invalid_argument("compute_params: bad d or k");

  ParamPlan plan;
  plan.eps = eps;
  plan.eps_sdp = eps / 10.0;
  // Smallest f with 1 - d^{2k} n^{k-f} > 1/2.
  plan.f = k + std::log(2.0 * std::pow(static_cast<double>(d), 2.0 * k)) /
                   std::log(static_cast<double>(n)) +
           1e-9;

  auto finish = [&](double eps_prime) {
    auto delta = solve_delta(eps_prime, d, k);
    if (!delta)
      throw std::invalid_argument(
          "compute_params: no net radius delta <= 1 satisfies the error-split identity; "
          "use practical mode with explicit (sample size, delta, eps') instead");
    plan.eps_prime = eps_prime;
    plan.delta = *delta;
    plan.g = plan.f / (plan.delta * plan.delta);
    plan.sampler = SamplerParams{n, d, k, plan.f, plan.g, plan.delta, eps_prime / 10.0};
    plan.ladder.clear();
    for (int b = 1; b <= k; ++b) plan.ladder.push_back(plan.sampler.eps_ladder(b));
  };

  if (k == 1) {
    // The Lemma-2.7 coefficient is an empty sum at locality 1; sampling incurs
    // no linearization error and eps' absorbs everything but the SDP share.
    finish(eps - plan.eps_sdp);
  } else {
    auto h_of = [&](double eps_prime) {
      finish(eps_prime);
      double coeff = 0.0;
      double pw = 1.0;  // (sqrt(2) d)^{k-1-m}, building from m = k-1 down
      for (int m = k - 1; m >= 1; --m) {
        coeff += pw * plan.ladder[m - 1];
        pw *= std::sqrt(2.0) * d;
      }
      return d * (d + std::sqrt(2.0)) * coeff;
    };
    double target = eps - plan.eps_sdp;
    // h is increasing in eps'; the largest representable eps' is capped by the
    // delta <= 1 constraint.
    double dk2 = std::pow(static_cast<double>(d), 0.5 * k);
    double eps_prime_max = 2.0 * dk2 * ladder_factor(std::sqrt(2.0) * d * 2.0, k);
    if (h_of(eps_prime_max) < target)
      throw std::invalid_argument(
          "compute_params: target error is too large for the theory-mode identities; "
          "use practical mode with explicit (sample size, delta, eps') instead");
    double lo = 0.0, hi = eps_prime_max;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      (h_of(mid) < target ? lo : hi) = mid;
    }
    h_of(0.5 * (lo + hi));
  }

  double log2n = std::log2(static_cast<double>(n));
  plan.sample_size = std::max(1, static_cast<int>(std::ceil(plan.g * log2n)));
  DeltaNet net = build_delta_net(d, plan.delta);
  plan.net_points = net.size();
  double log10g = std::log10(static_cast<double>(net.diag_grid.size())) * d +
                  std::log10(static_cast<double>(net.offdiag_grid.size())) * (d * (d - 1) / 2);
  plan.iteration_log10 = log10g * std::min(plan.sample_size, n);
  return plan;
}

}  // namespace hamlet
