#pragma once

#include "dqc/core.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace dqc {

// Pauli strings ordered I, X, Y, Z per qubit, qubit 0 most significant.
struct OperatorBasis {
  int n_qubits = 1;
  std::vector<Mat> elements;
  std::vector<std::string> labels;  // "i", "x", ... e.g. "zx"

  static OperatorBasis pauli(int n_qubits);
  int dim() const { return 1 << n_qubits; }
};

struct ChiMatrix {
  Mat entries;
  OperatorBasis basis;
};

// Solves S = sum_mn chi_mn conj(E_n) x E_m for chi, S column-stacked.
ChiMatrix chi_from_map(const Mat& superop, const OperatorBasis& basis);
ChiMatrix chi_from_unitary(const Mat& u);
Mat map_from_chi(const ChiMatrix& chi);

// || sum_mn chi_mn E_n^dagger E_m - I ||_max
double completeness_defect(const ChiMatrix& chi);

double process_fidelity(const ChiMatrix& theory, const ChiMatrix& realised);

// CSV rows row_label,col_label,abs,phase
void write_chi_report(std::ostream& os, const ChiMatrix& chi);

}  // namespace dqc
