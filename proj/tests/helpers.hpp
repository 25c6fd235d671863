#pragma once

#include "dqc/core.hpp"

#include <random>

namespace testutil {

inline dqc::Vec random_ket(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  dqc::Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = {n(rng), n(rng)};
  return v / v.norm();
}

inline dqc::Mat random_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  dqc::Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = {n(rng), n(rng)};
  return m;
}

inline dqc::Mat random_hermitian(int dim, std::mt19937_64& rng) {
  dqc::Mat a = random_matrix(dim, dim, rng);
  return 0.5 * (a + a.adjoint());
}

inline dqc::Mat random_density(int dim, std::mt19937_64& rng) {
  dqc::Mat a = random_matrix(dim, dim, rng);
  dqc::Mat r = a * a.adjoint();
  return r / r.trace().real();
}

inline double max_abs(const dqc::Mat& m) { return m.cwiseAbs().maxCoeff(); }

// exp(-i h t) from an eigendecomposition.
inline dqc::Mat unitary_from_hermitian(const dqc::Mat& h, double t) {
  Eigen::SelfAdjointEigenSolver<dqc::Mat> es(h);
  dqc::Vec ph(h.rows());
  for (Eigen::Index i = 0; i < h.rows(); ++i) ph(i) = std::exp(dqc::cplx(0.0, -es.eigenvalues()(i) * t));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace testutil
