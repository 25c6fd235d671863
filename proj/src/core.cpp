#include "dqc/core.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dqc {

namespace {

constexpr double kStateTol = 1e-9;

Mat hermitize(const Mat& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

QuantumState QuantumState::ket(Vec v, std::vector<int> dims) {
  if (total_dim(dims) != v.size()) throw Error("ket size does not match dims");
  double n = v.norm();
  if (std::abs(n - 1.0) > kStateTol) throw Error("ket is not normalised");
  v /= n;
  return QuantumState(StateKind::ket, Mat(v), std::move(dims));
}

QuantumState QuantumState::density(Mat rho, std::vector<int> dims) {
  if (rho.rows() != rho.cols()) throw Error("density matrix must be square");
  if (total_dim(dims) != rho.rows()) throw Error("density size does not match dims");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kStateTol) throw Error("density matrix is not Hermitian");
  rho = hermitize(rho);
  double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > kStateTol) throw Error("density matrix trace is not 1");
  Eigen::SelfAdjointEigenSolver<Mat> es(rho);
  const auto& ev = es.eigenvalues();
  if (ev.minCoeff() < -kStateTol) throw Error("density matrix is not positive");
  if (ev.minCoeff() < 0.0) {
    Eigen::VectorXd clamped = ev.cwiseMax(0.0);
    rho = es.eigenvectors() * clamped.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    rho /= rho.trace().real();
  }
  return QuantumState(StateKind::density, std::move(rho), std::move(dims));
}

QuantumState QuantumState::basis(std::vector<int> dims, const std::vector<int>& levels) {
  if (levels.size() != dims.size()) throw Error("basis label length mismatch");
  int idx = 0;
  for (size_t k = 0; k < dims.size(); ++k) {
    if (levels[k] < 0 || levels[k] >= dims[k]) throw Error("basis level out of range");
    idx = idx * dims[k] + levels[k];
  }
  Vec v = Vec::Zero(total_dim(dims));
  v(idx) = 1.0;
  return ket(std::move(v), std::move(dims));
}

Vec QuantumState::ket_vector() const {
  if (kind_ != StateKind::ket) throw Error("state is not a ket");
  return data_.col(0);
}

Mat QuantumState::density_matrix() const {
  if (kind_ == StateKind::density) return data_;
  return data_ * data_.adjoint();
}

QuantumState QuantumState::to_density() const {
  return QuantumState(StateKind::density, density_matrix(), dims_);
}

int total_dim(const std::vector<int>& dims) {
  return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<int>());
}

Mat tensor_product(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat tensor_product(const std::vector<Mat>& factors) {
  if (factors.empty()) return Mat::Identity(1, 1);
  Mat out = factors.front();
  for (size_t k = 1; k < factors.size(); ++k) out = tensor_product(out, factors[k]);
  return out;
}

Vec tensor_product(const Vec& a, const Vec& b) {
  Mat m = tensor_product(Mat(a), Mat(b));
  return m.col(0);
}

SiteSplit::SiteSplit(const std::vector<int>& dims, const std::vector<int>& sites) {
  const int n = static_cast<int>(dims.size());
  std::vector<int> stride(n, 1);
  for (int k = n - 2; k >= 0; --k) stride[k] = stride[k + 1] * dims[k + 1];
  std::vector<bool> used(n, false);
  for (int s : sites) {
    if (s < 0 || s >= n || used[s]) throw Error("invalid site list");
    used[s] = true;
  }
  local_offset = {0};
  for (int s : sites) {
    std::vector<int> next;
    next.reserve(local_offset.size() * dims[s]);
    for (int off : local_offset)
      for (int v = 0; v < dims[s]; ++v) next.push_back(off + v * stride[s]);
    local_offset = std::move(next);
  }
  rest_offset = {0};
  for (int k = 0; k < n; ++k) {
    if (used[k]) continue;
    std::vector<int> next;
    next.reserve(rest_offset.size() * dims[k]);
    for (int off : rest_offset)
      for (int v = 0; v < dims[k]; ++v) next.push_back(off + v * stride[k]);
    rest_offset = std::move(next);
  }
}

Mat partial_trace(const Mat& rho, const std::vector<int>& dims, std::vector<int> keep) {
  if (rho.rows() != rho.cols() || rho.rows() != total_dim(dims)) throw Error("partial_trace: dimension mismatch");
  std::sort(keep.begin(), keep.end());
  if (std::adjacent_find(keep.begin(), keep.end()) != keep.end()) throw Error("partial_trace: repeated index");
  for (int k : keep)
    if (k < 0 || k >= static_cast<int>(dims.size())) throw Error("partial_trace: index out of range");
  SiteSplit split(dims, keep);
  const int dk = static_cast<int>(split.local_offset.size());
  Mat out = Mat::Zero(dk, dk);
  for (int a = 0; a < dk; ++a)
    for (int b = 0; b < dk; ++b) {
      cplx acc = 0.0;
      for (int r : split.rest_offset) acc += rho(split.local_offset[a] + r, split.local_offset[b] + r);
      out(a, b) = acc;
    }
  return out;
}

QuantumState partial_trace(const QuantumState& rho, const std::vector<int>& keep) {
  std::vector<int> k = keep;
  std::sort(k.begin(), k.end());
  std::vector<int> dims;
  for (int i : k) {
    if (i < 0 || i >= static_cast<int>(rho.dims().size())) throw Error("partial_trace: index out of range");
    dims.push_back(rho.dims()[i]);
  }
  Mat red = partial_trace(rho.density_matrix(), rho.dims(), k);
  return QuantumState::density(hermitize(red), dims);
}

Mat matrix_exponential(const Mat& m) {
  if (m.rows() != m.cols()) throw Error("matrix_exponential: non-square input");
  return m.exp();
}

double state_fidelity(const QuantumState& a, const QuantumState& b) {
  if (a.dim() != b.dim()) throw Error("state_fidelity: dimension mismatch");
  double f;
  if (a.is_ket() && b.is_ket()) {
    f = std::abs(a.ket_vector().dot(b.ket_vector()));
  } else if (a.is_ket() || b.is_ket()) {
    const QuantumState& pure = a.is_ket() ? a : b;
    const QuantumState& mixed = a.is_ket() ? b : a;
    Vec psi = pure.ket_vector();
    double ov = psi.dot(mixed.data() * psi).real();
    f = std::sqrt(std::max(0.0, ov));
  } else {
    Eigen::SelfAdjointEigenSolver<Mat> es(a.data());
    Eigen::VectorXd s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Mat sq = es.eigenvectors() * s.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    Mat inner = hermitize(sq * b.data() * sq);
    Eigen::SelfAdjointEigenSolver<Mat> es2(inner, Eigen::EigenvaluesOnly);
    f = es2.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  }
  return std::clamp(f, 0.0, 1.0);
}

double trace_distance(const Mat& a, const Mat& b) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(a - b), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

bool is_hermitian(const Mat& m, double tol) {
  return m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double unitarity_defect(const Mat& u) {
  return (u.adjoint() * u - Mat::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
}

Mat embed(const Mat& op, const std::vector<int>& dims, const std::vector<int>& sites) {
  SiteSplit split(dims, sites);
  const int dl = static_cast<int>(split.local_offset.size());
  if (op.rows() != dl || op.cols() != dl) throw Error("embed: operator size does not match sites");
  const int d = total_dim(dims);
  Mat out = Mat::Zero(d, d);
  for (int r : split.rest_offset)
    for (int a = 0; a < dl; ++a)
      for (int b = 0; b < dl; ++b) out(split.local_offset[a] + r, split.local_offset[b] + r) = op(a, b);
  return out;
}

void apply_local_ket(Vec& psi, const Mat& u, const std::vector<int>& dims, const std::vector<int>& sites) {
  SiteSplit split(dims, sites);
  const int dl = static_cast<int>(split.local_offset.size());
  if (u.rows() != dl || u.cols() != dl) throw Error("apply_local_ket: operator size mismatch");
  Vec buf(dl);
  for (int r : split.rest_offset) {
    for (int a = 0; a < dl; ++a) buf(a) = psi(split.local_offset[a] + r);
    Vec out = u * buf;
    for (int a = 0; a < dl; ++a) psi(split.local_offset[a] + r) = out(a);
  }
}

void apply_local_operator(Mat& rho, const Mat& a, const std::vector<int>& dims, const std::vector<int>& sites) {
  SiteSplit split(dims, sites);
  const int dl = static_cast<int>(split.local_offset.size());
  if (a.rows() != dl || a.cols() != dl) throw Error("apply_local_operator: operator size mismatch");
  const Eigen::Index d = rho.rows();
  Vec buf(dl);
  for (Eigen::Index c = 0; c < d; ++c)
    for (int r : split.rest_offset) {
      for (int i = 0; i < dl; ++i) buf(i) = rho(split.local_offset[i] + r, c);
      Vec out = a * buf;
      for (int i = 0; i < dl; ++i) rho(split.local_offset[i] + r, c) = out(i);
    }
  Mat ac = a.conjugate();
  for (Eigen::Index row = 0; row < d; ++row)
    for (int r : split.rest_offset) {
      for (int i = 0; i < dl; ++i) buf(i) = rho(row, split.local_offset[i] + r);
      Vec out = ac * buf;
      for (int i = 0; i < dl; ++i) rho(row, split.local_offset[i] + r) = out(i);
    }
}

void apply_local_superop(Mat& rho, const Mat& s, const std::vector<int>& dims, const std::vector<int>& sites) {
  SiteSplit split(dims, sites);
  const int dl = static_cast<int>(split.local_offset.size());
  if (s.rows() != dl * dl || s.cols() != dl * dl) throw Error("apply_local_superop: superoperator size mismatch");
  Vec buf(dl * dl);
  for (int r : split.rest_offset)
    for (int q : split.rest_offset) {
      for (int b = 0; b < dl; ++b)
        for (int a = 0; a < dl; ++a) buf(a + dl * b) = rho(split.local_offset[a] + r, split.local_offset[b] + q);
      Vec out = s * buf;
      for (int b = 0; b < dl; ++b)
        for (int a = 0; a < dl; ++a) rho(split.local_offset[a] + r, split.local_offset[b] + q) = out(a + dl * b);
    }
}

void reset_sites(Mat& rho, const std::vector<int>& dims, const std::vector<int>& sites) {
  SiteSplit split(dims, sites);
  const int dl = static_cast<int>(split.local_offset.size());
  const int nr = static_cast<int>(split.rest_offset.size());
  Mat reduced = Mat::Zero(nr, nr);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nr; ++j) {
      cplx acc = 0.0;
      for (int a = 0; a < dl; ++a) acc += rho(split.local_offset[a] + split.rest_offset[i], split.local_offset[a] + split.rest_offset[j]);
      reduced(i, j) = acc;
    }
  rho.setZero();
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nr; ++j) rho(split.rest_offset[i], split.rest_offset[j]) = reduced(i, j);
}

Vec vec(const Mat& m) {
  return Eigen::Map<const Vec>(m.data(), m.size());
}

Mat unvec(const Vec& v, int rows) {
  return Eigen::Map<const Mat>(v.data(), rows, v.size() / rows);
}

Mat unitary_superop(const Mat& u) { return tensor_product(Mat(u.conjugate()), u); }

namespace ops {

Mat identity(int d) { return Mat::Identity(d, d); }

Mat sigma_x() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Mat sigma_y() {
  Mat m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}

Mat sigma_z() {
  Mat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Mat destroy(int d) {
  Mat m = Mat::Zero(d, d);
  for (int n = 1; n < d; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
  return m;
}

Mat create(int d) { return destroy(d).adjoint(); }

Mat projector(int d, int i, int j) {
  Mat m = Mat::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

Vec basis(int d, int i) {
  Vec v = Vec::Zero(d);
  v(i) = 1.0;
  return v;
}

}  // namespace ops

}  // namespace dqc
