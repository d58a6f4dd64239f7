#ifndef HAMLET_OPERATOR_CORE_HPP
#define HAMLET_OPERATOR_CORE_HPP

#include <utility>
#include <vector>

#include "core/types.hpp"

namespace hamlet {

/// Dense complex Hermitian operator. Construction symmetrizes (A + A^dag)/2
/// and warns (via stderr) when the input asymmetry exceeds 1e-8.
struct HermitianOp {
  Mat m;

  HermitianOp() = default;
  static HermitianOp make(Mat a);
  int dim() const { return static_cast<int>(m.rows()); }
  double hermiticity_defect() const;
};

/// Single-system density operator: PSD within 1e-9, unit trace within 1e-9.
struct DensityOp {
  HermitianOp op;

  static DensityOp make(Mat a);
  static DensityOp maximally_mixed(int d);
  static DensityOp pure(const Vec& v);
  int dim() const { return op.dim(); }
};

/// Normalized pure state on a list of local dimensions.
struct PureState {
  std::vector<int> dims;
  Vec amps;

  static PureState make(std::vector<int> dims, Vec amps);
  static PureState basis_state(std::vector<int> dims, const std::vector<int>& digits);
  int sites() const { return static_cast<int>(dims.size()); }
  Eigen::Index dim() const { return amps.size(); }
};

/// Orthogonal Hermitian basis for d x d operators with Tr(s_i s_j) = 2 delta_ij.
/// Order: symmetric pair generators, antisymmetric pair generators, diagonal
/// generators, then sqrt(2/d) * I as the final element.
struct HermBasis {
  int d = 0;
  std::vector<Mat> elements;

  int size() const { return static_cast<int>(elements.size()); }
};

HermBasis build_herm_basis(int d);

/// Kronecker product, first factor most significant:
/// (a (x) b)((i1,j1),(i2,j2)) = a(i1,i2) b(j1,j2).
Mat tensor(const Mat& a, const Mat& b);
HermitianOp tensor(const HermitianOp& a, const HermitianOp& b);

/// Embeds an operator acting on `support` (strictly increasing site indices)
/// into the full n-site space, identity elsewhere. Site 0 is the most
/// significant tensor factor.
Mat embed_term(const Mat& term, const std::vector<int>& support, int n, int d);

/// Partial trace keeping the sites listed in `keep` (ascending).
Mat partial_trace(const Mat& state, const std::vector<int>& dims, const std::vector<int>& keep);

/// Eigendecomposition of a Hermitian operator, eigenvalues ascending.
/// Throws std::invalid_argument when the input is not Hermitian within 1e-8.
std::pair<RVec, Mat> eig_herm(const Mat& op);

struct SchmidtDecomposition {
  RVec coefficients;          // descending, nonnegative
  std::vector<Vec> left;      // orthonormal, dim = prod(dims[0..cut))
  std::vector<Vec> right;     // orthonormal, dim = prod(dims[cut..))
};

/// Schmidt decomposition across the bipartition after the first `cut` sites.
SchmidtDecomposition schmidt_decompose(const PureState& psi, int cut);

/// Applies an operator on `support` to a full-space vector without
/// materializing the embedded matrix. Site 0 is most significant.
Vec apply_local(const Mat& op, const std::vector<int>& support, const std::vector<int>& dims,
                const Vec& state);

/// <psi| O_support |psi> for a local operator, via apply_local.
double local_expectation(const Mat& op, const std::vector<int>& support,
                         const std::vector<int>& dims, const Vec& state);

}  // namespace hamlet

#endif
