#include "core/operator_core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cstdio>
#include <numeric>

namespace hamlet {

namespace {

void check_support(const std::vector<int>& support, int n, const char* where) {
  if (support.empty()) throw std::invalid_argument(std::string(where) + ": empty support");
  for (size_t i = 0; i < support.size(); ++i) {
    if (support[i] < 0 || support[i] >= n)
      throw std::invalid_argument(std::string(where) + ": site index out of range");
    if (i > 0 && support[i] <= support[i - 1])
      throw std::invalid_argument(std::string(where) + ": support must be strictly increasing");
  }
}

// Offsets of all local configurations of `support` inside the flattened
// full-space index (site 0 most significant).
std::vector<Eigen::Index> support_offsets(const std::vector<int>& support, int n, int d) {
  const int k = static_cast<int>(support.size());
  std::vector<Eigen::Index> stride(n);
  Eigen::Index s = 1;
  for (int i = n - 1; i >= 0; --i) {
    stride[i] = s;
    s *= d;
  }
  Eigen::Index count = 1;
  for (int i = 0; i < k; ++i) count *= d;
  std::vector<Eigen::Index> off(count, 0);
  for (Eigen::Index a = 0; a < count; ++a) {
    Eigen::Index rem = a;
    for (int l = k - 1; l >= 0; --l) {
      off[a] += (rem % d) * stride[support[l]];
      rem /= d;
    }
  }
  return off;
}

// Offsets of all configurations of the complement of `support`.
std::vector<Eigen::Index> rest_offsets(const std::vector<int>& support, int n, int d) {
  std::vector<int> rest;
  for (int i = 0; i < n; ++i)
    if (!std::binary_search(support.begin(), support.end(), i)) rest.push_back(i);
  if (rest.empty()) return {0};
  return support_offsets(rest, n, d);
}

}  // namespace

HermitianOp HermitianOp::make(Mat a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("HermitianOp: matrix not square");
  double defect = (a - a.adjoint().eval()).cwiseAbs().maxCoeff();
  if (defect > kHermWarnTol)
    std::fprintf(stderr, "hamlet: warning: symmetrizing operator with asymmetry %.3e\n", defect);
  HermitianOp h;
  h.m = 0.5 * (a + a.adjoint().eval());
  return h;
}

double HermitianOp::hermiticity_defect() const {
  return (m - m.adjoint().eval()).cwiseAbs().maxCoeff();
}

DensityOp DensityOp::make(Mat a) {
  HermitianOp h = HermitianOp::make(std::move(a));
  Eigen::SelfAdjointEigenSolver<Mat> es(h.m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPsdTol)
    throw std::invalid_argument("DensityOp: operator is not positive semidefinite");
  if (std::abs(h.m.trace().real() - 1.0) > kTraceTol || std::abs(h.m.trace().imag()) > kTraceTol)
    throw std::invalid_argument("DensityOp: trace is not 1");
  DensityOp rho;
  rho.op = std::move(h);
  return rho;
}

DensityOp DensityOp::maximally_mixed(int d) {
  return DensityOp::make(Mat::Identity(d, d) / static_cast<double>(d));
}

DensityOp DensityOp::pure(const Vec& v) {
  Vec u = v.normalized();
  return DensityOp::make(u * u.adjoint());
}

PureState PureState::make(std::vector<int> dims, Vec amps) {
  Eigen::Index expect = 1;
  for (int d : dims) {
    if (d < 2) throw std::invalid_argument("PureState: local dimension must be >= 2");
    expect *= d;
  }
  if (amps.size() != expect) throw std::invalid_argument("PureState: amplitude length mismatch");
  double nrm = amps.norm();
  if (std::abs(nrm - 1.0) > 1e-8)
    throw std::invalid_argument("PureState: amplitudes are not normalized");
  PureState p;
  p.dims = std::move(dims);
  p.amps = amps / nrm;
  return p;
}

PureState PureState::basis_state(std::vector<int> dims, const std::vector<int>& digits) {
  if (digits.size() != dims.size())
    throw std::invalid_argument("PureState: digit count mismatch");
  Eigen::Index dim = 1, idx = 0;
  for (size_t i = 0; i < dims.size(); ++i) {
    if (digits[i] < 0 || digits[i] >= dims[i])
      throw std::invalid_argument("PureState: digit out of range");
    idx = idx * dims[i] + digits[i];
    dim *= dims[i];
  }
  Vec v = Vec::Zero(dim);
  v(idx) = 1.0;
  return PureState::make(std::move(dims), std::move(v));
}

HermBasis build_herm_basis(int d) {
  if (d < 2) throw std::invalid_argument("build_herm_basis: local dimension must be >= 2");
  HermBasis basis;
  basis.d = d;
  basis.elements.reserve(static_cast<size_t>(d) * d);
  for (int p = 0; p < d; ++p)
    for (int q = p + 1; q < d; ++q) {
      Mat u = Mat::Zero(d, d);
      u(p, q) = 1.0;
      u(q, p) = 1.0;
      basis.elements.push_back(std::move(u));
    }
  for (int p = 0; p < d; ++p)
    for (int q = p + 1; q < d; ++q) {
      Mat v = Mat::Zero(d, d);
      v(p, q) = Complex(0.0, -1.0);
      v(q, p) = Complex(0.0, 1.0);
      basis.elements.push_back(std::move(v));
    }
  for (int r = 1; r < d; ++r) {
    Mat w = Mat::Zero(d, d);
    for (int k = 0; k < r; ++k) w(k, k) = 1.0;
    w(r, r) = -static_cast<double>(r);
    w *= std::sqrt(2.0 / (static_cast<double>(r) * (r + 1)));
    basis.elements.push_back(std::move(w));
  }
  basis.elements.push_back(std::sqrt(2.0 / d) * Mat::Identity(d, d));
  return basis;
}

Mat tensor(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

HermitianOp tensor(const HermitianOp& a, const HermitianOp& b) {
  return HermitianOp::make(tensor(a.m, b.m));
}

Mat embed_term(const Mat& term, const std::vector<int>& support, int n, int d) {
  check_support(support, n, "embed_term");
  const int k = static_cast<int>(support.size());
  Eigen::Index local = 1;
  for (int i = 0; i < k; ++i) local *= d;
  if (term.rows() != local || term.cols() != local)
    throw std::invalid_argument("embed_term: term dimension does not match support size");
  Eigen::Index full = checked_dim(d, n, "embed_term");

  std::vector<Eigen::Index> off = support_offsets(support, n, d);
  std::vector<Eigen::Index> rest = rest_offsets(support, n, d);
  Mat out = Mat::Zero(full, full);
  for (Eigen::Index base : rest)
    for (Eigen::Index a = 0; a < local; ++a)
      for (Eigen::Index b = 0; b < local; ++b) out(base + off[a], base + off[b]) += term(a, b);
  return out;
}

Mat partial_trace(const Mat& state, const std::vector<int>& dims, const std::vector<int>& keep) {
  const int n = static_cast<int>(dims.size());
  Eigen::Index full = 1;
  for (int d : dims) full *= d;
  if (state.rows() != full || state.cols() != full)
    throw std::invalid_argument("partial_trace: dims inconsistent with operator dimension");
  for (size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] < 0 || keep[i] >= n)
      throw std::invalid_argument("partial_trace: keep index out of range");
    if (i > 0 && keep[i] <= keep[i - 1])
      throw std::invalid_argument("partial_trace: keep must be strictly increasing");
  }

  std::vector<Eigen::Index> stride(n);
  Eigen::Index s = 1;
  for (int i = n - 1; i >= 0; --i) {
    stride[i] = s;
    s *= dims[i];
  }

  std::vector<int> traced;
  for (int i = 0; i < n; ++i)
    if (!std::binary_search(keep.begin(), keep.end(), i)) traced.push_back(i);

  Eigen::Index keep_dim = 1;
  for (int i : keep) keep_dim *= dims[i];
  Eigen::Index traced_dim = 1;
  for (int i : traced) traced_dim *= dims[i];

  auto offsets = [&](const std::vector<int>& sites) {
    Eigen::Index count = 1;
    for (int i : sites) count *= dims[i];
    std::vector<Eigen::Index> off(count, 0);
    for (Eigen::Index a = 0; a < count; ++a) {
      Eigen::Index rem = a;
      for (int l = static_cast<int>(sites.size()) - 1; l >= 0; --l) {
        off[a] += (rem % dims[sites[l]]) * stride[sites[l]];
        rem /= dims[sites[l]];
      }
    }
    return off;
  };
  std::vector<Eigen::Index> koff = offsets(keep);
  std::vector<Eigen::Index> toff = offsets(traced);

  Mat out = Mat::Zero(keep_dim, keep_dim);
  for (Eigen::Index a = 0; a < keep_dim; ++a)
    for (Eigen::Index b = 0; b < keep_dim; ++b) {
      Complex acc = 0.0;
      for (Eigen::Index t = 0; t < traced_dim; ++t) acc += state(koff[a] + toff[t], koff[b] + toff[t]);
      out(a, b) = acc;
    }
  return out;
}

std::pair<RVec, Mat> eig_herm(const Mat& op) {
  if (op.rows() != op.cols()) throw std::invalid_argument("eig_herm: matrix not square");
  double defect = (op - op.adjoint().eval()).cwiseAbs().maxCoeff();
  if (defect > kHermWarnTol)
    throw std::invalid_argument("eig_herm: operator is not Hermitian (defect " +
                                std::to_string(defect) + ")");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (op + op.adjoint().eval()));
  if (es.info() != Eigen::Success) throw std::runtime_error("eig_herm: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

SchmidtDecomposition schmidt_decompose(const PureState& psi, int cut) {
  const int n = psi.sites();
  if (cut <= 0 || cut >= n)
    throw std::invalid_argument("schmidt_decompose: cut must split the sites into two blocks");
  Eigen::Index dl = 1, dr = 1;
  for (int i = 0; i < cut; ++i) dl *= psi.dims[i];
  for (int i = cut; i < n; ++i) dr *= psi.dims[i];

  Mat a(dl, dr);
  for (Eigen::Index l = 0; l < dl; ++l)
    for (Eigen::Index r = 0; r < dr; ++r) a(l, r) = psi.amps(l * dr + r);

  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SchmidtDecomposition out;
  out.coefficients = svd.singularValues();
  const Eigen::Index rank = out.coefficients.size();
  out.left.reserve(rank);
  out.right.reserve(rank);
  for (Eigen::Index i = 0; i < rank; ++i) {
    out.left.push_back(svd.matrixU().col(i));
    out.right.push_back(svd.matrixV().col(i).conjugate());
  }
  return out;
}

Vec apply_local(const Mat& op, const std::vector<int>& support, const std::vector<int>& dims,
                const Vec& state) {
  const int n = static_cast<int>(dims.size());
  for (size_t i = 1; i < dims.size(); ++i)
    if (dims[i] != dims[0]) throw std::invalid_argument("apply_local: mixed local dimensions");
  const int d = dims.empty() ? 2 : dims[0];
  check_support(support, n, "apply_local");
  Eigen::Index local = 1;
  for (size_t i = 0; i < support.size(); ++i) local *= d;
  if (op.rows() != local || op.cols() != local)
    throw std::invalid_argument("apply_local: operator dimension mismatch");
  Eigen::Index full = 1;
  for (int dd : dims) full *= dd;
  if (state.size() != full) throw std::invalid_argument("apply_local: state dimension mismatch");

  std::vector<Eigen::Index> off = support_offsets(support, n, d);
  std::vector<Eigen::Index> rest = rest_offsets(support, n, d);
  Vec out = Vec::Zero(full);
  for (Eigen::Index base : rest)
    for (Eigen::Index a = 0; a < local; ++a) {
      Complex acc = 0.0;
      for (Eigen::Index b = 0; b < local; ++b) acc += op(a, b) * state(base + off[b]);
      out(base + off[a]) = acc;
    }
  return out;
}

double local_expectation(const Mat& op, const std::vector<int>& support,
                         const std::vector<int>& dims, const Vec& state) {
  Vec applied = apply_local(op, support, dims, state);
  return state.dot(applied).real();
}

}  // namespace hamlet
