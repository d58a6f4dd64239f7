#include "core/rng.hpp"

namespace hamlet {

Mat Rng::haar_unitary(int dim) {
  Mat g(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) g(r, c) = complex_gaussian();
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < dim; ++c) {
    Complex rc = r(c, c);
    double a = std::abs(rc);
    q.col(c) *= (a > 0) ? rc / a : Complex(1.0, 0.0);
  }
  return q;
}

Vec Rng::random_state(Eigen::Index dim) {
  Vec v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = complex_gaussian();
  v.normalize();
  return v;
}

Mat Rng::random_density(int dim) {
  Mat g(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) g(r, c) = complex_gaussian();
  Mat rho = g * g.adjoint();
  rho /= rho.trace();
  return 0.5 * (rho + rho.adjoint().eval());
}

}  // namespace hamlet
