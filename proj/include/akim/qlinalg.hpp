#pragma once

// Dense complex linear algebra shared by every module.
//
// Qubit ordering convention (used everywhere in the library): qubit 0 is the
// leftmost tensor factor and the most significant bit of a basis index, so
// |q0 q1 ... q_{n-1}> has index sum_k q_k 2^{n-1-k}.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace akim {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Matrix2 = Eigen::Matrix2cd;
using Matrix4 = Eigen::Matrix4cd;
using Vector2 = Eigen::Vector2cd;

inline constexpr double kPi = 3.14159265358979323846;

struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct CapacityError : std::length_error {
    using std::length_error::length_error;
};
struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

// Row-major dense tensor: the last leg varies fastest.
class ComplexTensor {
public:
    ComplexTensor() = default;
    explicit ComplexTensor(std::vector<std::size_t> shape);
    ComplexTensor(std::vector<std::size_t> shape, std::vector<cplx> data);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    const std::vector<cplx>& data() const { return data_; }
    std::vector<cplx>& data() { return data_; }

    cplx& at(const std::vector<std::size_t>& idx);
    const cplx& at(const std::vector<std::size_t>& idx) const;

    ComplexTensor reshape(std::vector<std::size_t> shape) const;
    // Leg k of the result is leg perm[k] of *this.
    ComplexTensor permute(const std::vector<std::size_t>& perm) const;
    // First n_row_legs legs become the row index.
    Matrix as_matrix(std::size_t n_row_legs) const;
    static ComplexTensor from_matrix(const Matrix& m, std::vector<std::size_t> shape);

private:
    std::size_t offset(const std::vector<std::size_t>& idx) const;
    std::vector<std::size_t> shape_;
    std::vector<cplx> data_;
};

// tensordot: contracts legs_a of a with legs_b of b; result legs are the free
// legs of a followed by the free legs of b, each in original order.
ComplexTensor contract(const ComplexTensor& a, const std::vector<std::size_t>& legs_a,
                       const ComplexTensor& b, const std::vector<std::size_t>& legs_b);

struct PureState {
    int n_qubits = 0;
    Vector amplitudes;

    PureState() = default;
    PureState(int n, Vector amp, double tol = 1e-12);
    static PureState product(const std::vector<Vector2>& sites);
    static PureState basis(int n, std::size_t index);
};

struct DensityMatrix {
    int n_qubits = 0;
    Matrix matrix;

    DensityMatrix() = default;
    DensityMatrix(int n, Matrix m, double tol = 1e-10);
    static DensityMatrix pure(const PureState& psi);
    static DensityMatrix maximally_mixed(int n);
};

struct EntanglementSpectrum {
    std::vector<double> eigenvalues;  // descending
    bool flat = false;
    double tolerance = 0.0;
};

Vector2 normalized(const Vector2& v);
Vector2 bloch_state(double theta, double phi);  // cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>

Matrix kron(const Matrix& a, const Matrix& b);
Matrix pauli(char p);                         // one of I X Y Z
Matrix pauli_string(const std::string& ops);  // e.g. "XIZ", qubit 0 first
// Pauli strings indexed by base-4 digits (I=0, X=1, Y=2, Z=3), qubit 0 most significant.
std::string pauli_label(std::size_t index, int n);
Matrix pauli_matrix(std::size_t index, int n);
cplx pauli_trace(std::size_t index, int n, const Matrix& x);  // tr(P x), O(2^n)

DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<int> keep);
// order >= 1; order == infinity gives the min-entropy. Base-2.
double entropy(const DensityMatrix& rho, double order = 1.0);
double entropy_of_spectrum(const std::vector<double>& p, double order = 1.0);
EntanglementSpectrum entanglement_spectrum(const DensityMatrix& rho, double tol = 1e-10);
double operator_entanglement(const Matrix& op, int n, int cut);

// In-place kernels on state vectors (length 2^n).
void apply_1q(Vector& psi, int n, int q, const Matrix2& u);
void apply_2q(Vector& psi, int n, int q0, int q1, const Matrix4& u);
// Column-wise action on an operator: every column of m is treated as a state.
void apply_1q_left(Matrix& m, int n, int q, const Matrix2& u);
void apply_2q_left(Matrix& m, int n, int q0, int q1, const Matrix4& u);
// rho -> u rho u^dagger on the given qubits.
void conjugate_1q(Matrix& rho, int n, int q, const Matrix2& u);
void conjugate_2q(Matrix& rho, int n, int q0, int q1, const Matrix4& u);

double max_abs(const Matrix& m);
double max_abs_diff(const Matrix& a, const Matrix& b);
// Multiplies b by the phase that aligns its largest-magnitude entry with a's.
Matrix align_global_phase(const Matrix& a, const Matrix& b);
bool is_unitary(const Matrix& u, double tol);

}  // namespace akim
