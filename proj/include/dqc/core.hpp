#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace dqc {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class StateKind { ket, density };

// Ket or density matrix over a tensor-product register. Subsystem 0 is the
// leftmost factor and the most significant digit of basis labels.
class QuantumState {
 public:
  static QuantumState ket(Vec v, std::vector<int> dims);
  static QuantumState density(Mat rho, std::vector<int> dims);
  static QuantumState basis(std::vector<int> dims, const std::vector<int>& levels);

  StateKind kind() const { return kind_; }
  bool is_ket() const { return kind_ == StateKind::ket; }
  const std::vector<int>& dims() const { return dims_; }
  const Mat& data() const { return data_; }
  int dim() const { return static_cast<int>(data_.rows()); }

  Vec ket_vector() const;
  Mat density_matrix() const;
  QuantumState to_density() const;

 private:
  QuantumState(StateKind k, Mat d, std::vector<int> dims)
      : kind_(k), data_(std::move(d)), dims_(std::move(dims)) {}
  StateKind kind_;
  Mat data_;
  std::vector<int> dims_;
};

struct LindbladTerm {
  Mat op;
  double rate = 0.0;
  std::string label;
};

struct LindbladSet {
  std::vector<LindbladTerm> terms;
  bool empty() const { return terms.empty(); }
  void add(Mat op, double rate, std::string label) {
    terms.push_back({std::move(op), rate, std::move(label)});
  }
  void append(const LindbladSet& other) {
    terms.insert(terms.end(), other.terms.begin(), other.terms.end());
  }
};

Mat tensor_product(const Mat& a, const Mat& b);
Mat tensor_product(const std::vector<Mat>& factors);
Vec tensor_product(const Vec& a, const Vec& b);

int total_dim(const std::vector<int>& dims);

Mat partial_trace(const Mat& rho, const std::vector<int>& dims, std::vector<int> keep);
QuantumState partial_trace(const QuantumState& rho, const std::vector<int>& keep);

Mat matrix_exponential(const Mat& m);

double state_fidelity(const QuantumState& a, const QuantumState& b);
double trace_distance(const Mat& a, const Mat& b);

bool is_hermitian(const Mat& m, double tol = 1e-10);
double unitarity_defect(const Mat& u);

// Operator acting on `sites` (in the given order) of a register with `dims`,
// identity elsewhere.
Mat embed(const Mat& op, const std::vector<int>& dims, const std::vector<int>& sites);

// Split full-register indices into local (sites) and rest parts so that
// full = local_offset[l] + rest_offset[r].
struct SiteSplit {
  std::vector<int> local_offset;
  std::vector<int> rest_offset;
  SiteSplit(const std::vector<int>& dims, const std::vector<int>& sites);
};

void apply_local_ket(Vec& psi, const Mat& u, const std::vector<int>& dims,
                     const std::vector<int>& sites);
// rho -> A rho A^dagger with A acting on sites.
void apply_local_operator(Mat& rho, const Mat& a, const std::vector<int>& dims,
                          const std::vector<int>& sites);
// rho -> S(rho) with S a column-stacked superoperator on sites.
void apply_local_superop(Mat& rho, const Mat& s, const std::vector<int>& dims,
                         const std::vector<int>& sites);
// Replace the listed sites by |0><0| after tracing them out.
void reset_sites(Mat& rho, const std::vector<int>& dims, const std::vector<int>& sites);

// Column-stacking vectorisation.
Vec vec(const Mat& m);
Mat unvec(const Vec& v, int rows);
// Superoperator of rho -> U rho U^dagger.
Mat unitary_superop(const Mat& u);

namespace ops {
Mat identity(int d);
Mat sigma_x();
Mat sigma_y();
Mat sigma_z();
Mat destroy(int d);
Mat create(int d);
Mat projector(int d, int i, int j);
Vec basis(int d, int i);
}  // namespace ops

// Seedable 64-bit generator shared by every stochastic entry point.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::uint64_t next() { return eng_(); }
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace dqc
