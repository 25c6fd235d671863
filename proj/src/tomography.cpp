#include "dqc/tomography.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace dqc {

OperatorBasis OperatorBasis::pauli(int n_qubits) {
  if (n_qubits < 1 || n_qubits > 3) throw Error("Pauli basis supports 1 to 3 qubits");
  const Mat single[4] = {ops::identity(2), ops::sigma_x(), ops::sigma_y(), ops::sigma_z()};
  const char names[4] = {'i', 'x', 'y', 'z'};
  OperatorBasis b;
  b.n_qubits = n_qubits;
  const int count = 1 << (2 * n_qubits);
  for (int idx = 0; idx < count; ++idx) {
    std::vector<Mat> factors;
    std::string label;
    for (int q = n_qubits - 1; q >= 0; --q) {
      int digit = (idx >> (2 * q)) & 3;
      factors.push_back(single[digit]);
      label += names[digit];
    }
    b.elements.push_back(tensor_product(factors));
    b.labels.push_back(label);
  }
  return b;
}

ChiMatrix chi_from_map(const Mat& superop, const OperatorBasis& basis) {
  const int d = basis.dim();
  const int k = static_cast<int>(basis.elements.size());
  if (superop.rows() != d * d || superop.cols() != d * d) throw Error("chi_from_map: map dimension does not match basis");
  Mat m(d * d * d * d, k * k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) m.col(a * k + b) = vec(tensor_product(Mat(basis.elements[b].conjugate()), basis.elements[a]));
  Eigen::FullPivLU<Mat> lu(m);
  if (!lu.isInvertible()) throw Error("chi_from_map: basis matrix is singular");
  Vec x = lu.solve(vec(superop));
  ChiMatrix chi{Mat(k, k), basis};
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) chi.entries(a, b) = x(a * k + b);
  return chi;
}

ChiMatrix chi_from_unitary(const Mat& u) {
  int n = 0;
  while ((1 << n) < u.rows()) ++n;
  if ((1 << n) != u.rows()) throw Error("chi_from_unitary: dimension is not a power of two");
  return chi_from_map(unitary_superop(u), OperatorBasis::pauli(n));
}

Mat map_from_chi(const ChiMatrix& chi) {
  const int d = chi.basis.dim();
  const int k = static_cast<int>(chi.basis.elements.size());
  Mat s = Mat::Zero(d * d, d * d);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      if (chi.entries(a, b) != cplx(0.0))
        s += chi.entries(a, b) * tensor_product(Mat(chi.basis.elements[b].conjugate()), chi.basis.elements[a]);
  return s;
}

double completeness_defect(const ChiMatrix& chi) {
  const int d = chi.basis.dim();
  const int k = static_cast<int>(chi.basis.elements.size());
  Mat acc = Mat::Zero(d, d);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) acc += chi.entries(a, b) * chi.basis.elements[b].adjoint() * chi.basis.elements[a];
  return (acc - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
}

double process_fidelity(const ChiMatrix& theory, const ChiMatrix& realised) {
  if (theory.entries.rows() != realised.entries.rows()) throw Error("process_fidelity: basis mismatch");
  const double nt = theory.entries.norm(), nr = realised.entries.norm();
  if (nt == 0.0 || nr == 0.0) throw Error("process_fidelity: zero-norm chi matrix");
  cplx overlap = (realised.entries * theory.entries.adjoint()).trace();
  const double f = overlap.real() / (nt * nr);
  if (std::abs(overlap.imag()) / (nt * nr) > 1e-9) throw Error("process_fidelity: overlap has an imaginary residue");
  return f;
}

void write_chi_report(std::ostream& os, const ChiMatrix& chi) {
  os << "row_label,col_label,abs,phase\n";
  char buf[96];
  const int k = static_cast<int>(chi.basis.labels.size());
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      cplx v = chi.entries(a, b);
      double mag = std::abs(v);
      double ph = mag > 1e-12 ? std::arg(v) : 0.0;
      std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", mag, ph);
      os << chi.basis.labels[a] << ',' << chi.basis.labels[b] << ',' << buf;
    }
}

}  // namespace dqc
