#include <doctest.h>

#include <Eigen/SVD>

#include "core/operator_core.hpp"
#include "core/rng.hpp"

using namespace hamlet;

namespace {

Mat pauli_x() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Mat pauli_z() {
  Mat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Vec epr_pair() {
  Vec v = Vec::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return v;
}

}  // namespace

TEST_CASE("hermitian basis: d=2 is the Pauli set with unscaled identity") {
  HermBasis basis = build_herm_basis(2);
  REQUIRE(basis.size() == 4);
  CHECK((basis.elements[0] - pauli_x()).norm() == doctest::Approx(0.0).epsilon(1e-12));
  Mat y(2, 2);
  y << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  CHECK((basis.elements[1] - y).norm() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((basis.elements[2] - pauli_z()).norm() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((basis.elements[3] - Mat::Identity(2, 2)).norm() == doctest::Approx(0.0).epsilon(1e-12));

  CHECK(std::abs((pauli_x() * basis.elements[1]).trace()) < 1e-12);  // Tr(XY) = 0
  CHECK((pauli_x() * pauli_x()).trace().real() == doctest::Approx(2.0));
}

TEST_CASE("hermitian basis: gram matrix is 2I for d=2..4") {
  for (int d : {2, 3, 4}) {
    HermBasis basis = build_herm_basis(d);
    REQUIRE(basis.size() == d * d);
    for (int i = 0; i < basis.size(); ++i) {
      for (int j = 0; j < basis.size(); ++j) {
        double expect = i == j ? 2.0 : 0.0;
        CHECK(std::abs((basis.elements[i] * basis.elements[j]).trace().real() - expect) < 1e-10);
        CHECK(std::abs((basis.elements[i] * basis.elements[j]).trace().imag()) < 1e-10);
      }
      if (i < basis.size() - 1)
        CHECK(std::abs(basis.elements[i].trace()) < 1e-10);  // traceless generators
    }
    // The appended element is sqrt(2/d) I.
    CHECK((basis.elements[d * d - 1] - std::sqrt(2.0 / d) * Mat::Identity(d, d)).norm() < 1e-12);
  }
}

TEST_CASE("hermitian basis: rejects d < 2") {
  CHECK_THROWS_AS(build_herm_basis(1), std::invalid_argument);
}

TEST_CASE("tensor products") {
  Mat i2 = Mat::Identity(2, 2);
  CHECK((tensor(i2, i2) - Mat::Identity(4, 4)).norm() < 1e-15);

  Mat zz = tensor(pauli_z(), pauli_z());
  Vec expect(4);
  expect << 1, -1, -1, 1;
  CHECK((zz - Mat(expect.asDiagonal())).norm() < 1e-15);

  Rng rng(11);
  for (int rep = 0; rep < 5; ++rep) {
    Mat a = rng.random_density(2) * rng.uniform();
    Mat b = rng.random_density(2) * rng.uniform();
    Complex lhs = tensor(a, b).trace();
    Complex rhs = a.trace() * b.trace();
    CHECK(std::abs(lhs - rhs) < 1e-10);
  }
}

TEST_CASE("embed_term: trivial and permuted supports") {
  Mat p00 = Mat::Zero(4, 4);
  p00(0, 0) = 1.0;
  CHECK((embed_term(p00, {0, 1}, 2, 2) - p00).norm() < 1e-15);

  Mat iz = tensor(Mat::Identity(2, 2), pauli_z());
  CHECK((embed_term(pauli_z(), {1}, 2, 2) - iz).norm() < 1e-15);
}

TEST_CASE("embed_term: non-contiguous support matches the index-level oracle") {
  Vec phi = epr_pair();
  Mat proj = phi * phi.adjoint();
  Mat m = embed_term(proj, {0, 2}, 3, 2);
  // <x0 x1 x2| M |y0 y1 y2> = <x0 x2|P|y0 y2> delta_{x1 y1}
  for (int x = 0; x < 8; ++x)
    for (int y = 0; y < 8; ++y) {
      int x0 = (x >> 2) & 1, x1 = (x >> 1) & 1, x2 = x & 1;
      int y0 = (y >> 2) & 1, y1 = (y >> 1) & 1, y2 = y & 1;
      Complex expect = x1 == y1 ? proj(x0 * 2 + x2, y0 * 2 + y2) : Complex(0, 0);
      CHECK(std::abs(m(x, y) - expect) < 1e-12);
    }
}

TEST_CASE("embed_term: capacity cap raises an explicit error") {
  std::uint64_t saved = max_total_dim();
  set_max_total_dim(1 << 10);
  CHECK_THROWS_AS(embed_term(pauli_z(), {0}, 20, 2), CapacityError);
  set_max_total_dim(saved);
}

TEST_CASE("partial trace") {
  Rng rng(3);
  Mat ra = rng.random_density(2);
  Mat rb = rng.random_density(2);
  CHECK((partial_trace(tensor(ra, rb), {2, 2}, {0}) - ra).norm() < 1e-12);

  Vec phi = epr_pair();
  Mat proj = phi * phi.adjoint();
  CHECK((partial_trace(proj, {2, 2}, {0}) - 0.5 * Mat::Identity(2, 2)).norm() < 1e-12);

  Mat full = rng.random_density(4);
  Mat reduced = partial_trace(full, {2, 2}, {1});
  CHECK(std::abs(reduced.trace().real() - 1.0) < 1e-10);
}

TEST_CASE("eig_herm") {
  auto [zvals, zvecs] = eig_herm(pauli_z());
  CHECK(zvals(0) == doctest::Approx(-1.0));
  CHECK(zvals(1) == doctest::Approx(1.0));

  Vec phi = epr_pair();
  auto [pvals, pvecs] = eig_herm(Mat(phi * phi.adjoint()));
  for (int i = 0; i < 3; ++i) CHECK(std::abs(pvals(i)) < 1e-12);
  CHECK(pvals(3) == doctest::Approx(1.0));

  Rng rng(7);
  Mat h = rng.random_density(8);
  auto [vals, vecs] = eig_herm(h);
  CHECK(std::abs(vals.sum() - h.trace().real()) < 1e-8);
  Mat rebuilt = vecs * vals.asDiagonal() * vecs.adjoint();
  CHECK((rebuilt - h).norm() < 1e-8 * 8);

  // Eigenvalues are invariant under unitary conjugation.
  Mat u = rng.haar_unitary(8);
  auto [vals2, vecs2] = eig_herm(Mat(u * h * u.adjoint()));
  CHECK((vals - vals2).cwiseAbs().maxCoeff() < 1e-8);

  Mat bad(2, 2);
  bad << 1, 2, 3, 4;
  CHECK_THROWS_AS(eig_herm(bad), std::invalid_argument);
}

TEST_CASE("schmidt decomposition") {
  PureState zz = PureState::basis_state({2, 2}, {0, 0});
  SchmidtDecomposition sd = schmidt_decompose(zz, 1);
  CHECK(sd.coefficients(0) == doctest::Approx(1.0));
  CHECK(std::abs(std::abs(sd.left[0](0)) - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(sd.right[0](0)) - 1.0) < 1e-12);

  PureState epr = PureState::make({2, 2}, epr_pair());
  SchmidtDecomposition se = schmidt_decompose(epr, 1);
  CHECK(se.coefficients(0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(se.coefficients(1) == doctest::Approx(1.0 / std::sqrt(2.0)));

  // Random bipartite state: coefficients match the singular values of the
  // amplitude reshape, and the decomposition reconstructs the state.
  Rng rng(19);
  Vec amps = rng.random_state(8);
  PureState psi = PureState::make({2, 2, 2}, amps);
  SchmidtDecomposition sr = schmidt_decompose(psi, 1);
  Mat reshaped(2, 4);
  for (int l = 0; l < 2; ++l)
    for (int r = 0; r < 4; ++r) reshaped(l, r) = amps(l * 4 + r);
  Eigen::JacobiSVD<Mat> svd(reshaped);
  for (Eigen::Index i = 0; i < sr.coefficients.size(); ++i)
    CHECK(sr.coefficients(i) == doctest::Approx(svd.singularValues()(i)).epsilon(1e-10));

  Vec rebuilt = Vec::Zero(8);
  for (size_t i = 0; i < sr.left.size(); ++i) {
    for (int l = 0; l < 2; ++l)
      for (int r = 0; r < 4; ++r)
        rebuilt(l * 4 + r) += sr.coefficients(i) * sr.left[i](l) * sr.right[i](r);
  }
  CHECK((rebuilt - amps).norm() < 1e-8);

  // Orthonormality of both factor families.
  for (size_t i = 0; i < sr.left.size(); ++i)
    for (size_t j = 0; j < sr.left.size(); ++j) {
      Complex lij = sr.left[i].dot(sr.left[j]);
      Complex rij = sr.right[i].dot(sr.right[j]);
      double expect = i == j ? 1.0 : 0.0;
      CHECK(std::abs(lij - expect) < 1e-10);
      CHECK(std::abs(rij - expect) < 1e-10);
    }
}

TEST_CASE("embedded energy equals reduced-state contraction for random states") {
  Rng rng(23);
  for (int rep = 0; rep < 10; ++rep) {
    int n = 3 + static_cast<int>(rng.uniform_index(2));  // 3 or 4 sites
    std::vector<int> dims(n, 2);
    Vec psi = rng.random_state(1 << n);
    std::vector<int> support = rep % 2 == 0 ? std::vector<int>{0, n - 1} : std::vector<int>{1, 2};
    Mat term = rng.random_density(4);

    Mat full = embed_term(term, support, n, 2);
    double via_embed = (psi.adjoint() * full * psi)(0, 0).real();

    Mat rho = psi * psi.adjoint();
    Mat reduced = partial_trace(rho, dims, support);
    double via_reduced = (term * reduced).trace().real();
    CHECK(via_embed == doctest::Approx(via_reduced).epsilon(1e-8));

    CHECK(local_expectation(term, support, dims, psi) ==
          doctest::Approx(via_embed).epsilon(1e-8));
  }
}

TEST_CASE("density operator construction validates PSD and trace") {
  CHECK_THROWS_AS(DensityOp::make(pauli_z()), std::invalid_argument);
  Mat not_normalized = 2.0 * Mat::Identity(2, 2);
  CHECK_THROWS_AS(DensityOp::make(not_normalized), std::invalid_argument);
  DensityOp ok = DensityOp::maximally_mixed(3);
  CHECK(ok.dim() == 3);
}
