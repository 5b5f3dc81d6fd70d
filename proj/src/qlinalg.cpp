#include "akim/qlinalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace akim {

namespace {

std::size_t product(const std::vector<std::size_t>& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
}

std::vector<std::size_t> strides_of(const std::vector<std::size_t>& shape) {
    std::vector<std::size_t> st(shape.size(), 1);
    for (std::size_t k = shape.size(); k-- > 1;) st[k - 1] = st[k] * shape[k];
    return st;
}

inline std::size_t qmask(int n, int q) { return std::size_t{1} << (n - 1 - q); }

void check_qubit(int n, int q) {
    if (q < 0 || q >= n) throw ArgumentError("qubit index " + std::to_string(q) + " out of range");
}

// Applies u to the (strided) vector at p of logical length 2^n.
void kernel_1q(cplx* p, std::ptrdiff_t stride, int n, int q, const Matrix2& u) {
    const std::size_t m = qmask(n, q), dim = std::size_t{1} << n;
    for (std::size_t i = 0; i < dim; ++i) {
        if (i & m) continue;
        cplx& a = p[i * stride];
        cplx& b = p[(i | m) * stride];
        const cplx x = a, y = b;
        a = u(0, 0) * x + u(0, 1) * y;
        b = u(1, 0) * x + u(1, 1) * y;
    }
}

void kernel_2q(cplx* p, std::ptrdiff_t stride, int n, int q0, int q1, const Matrix4& u) {
    const std::size_t m0 = qmask(n, q0), m1 = qmask(n, q1), dim = std::size_t{1} << n;
    for (std::size_t i = 0; i < dim; ++i) {
        if (i & (m0 | m1)) continue;
        const std::size_t idx[4] = {i, i | m1, i | m0, i | m0 | m1};
        cplx v[4];
        for (int k = 0; k < 4; ++k) v[k] = p[idx[k] * stride];
        for (int r = 0; r < 4; ++r)
            p[idx[r] * stride] = u(r, 0) * v[0] + u(r, 1) * v[1] + u(r, 2) * v[2] + u(r, 3) * v[3];
    }
}

}  // namespace

// ---------------------------------------------------------------- tensors

ComplexTensor::ComplexTensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(product(shape_), cplx{0.0, 0.0}) {}

ComplexTensor::ComplexTensor(std::vector<std::size_t> shape, std::vector<cplx> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (product(shape_) != data_.size()) throw ArgumentError("tensor shape does not match data length");
}

std::size_t ComplexTensor::offset(const std::vector<std::size_t>& idx) const {
    if (idx.size() != shape_.size()) throw ArgumentError("tensor index has wrong rank");
    std::size_t off = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] >= shape_[k]) throw ArgumentError("tensor index out of range");
        off = off * shape_[k] + idx[k];
    }
    return off;
}

cplx& ComplexTensor::at(const std::vector<std::size_t>& idx) { return data_[offset(idx)]; }
const cplx& ComplexTensor::at(const std::vector<std::size_t>& idx) const { return data_[offset(idx)]; }

ComplexTensor ComplexTensor::reshape(std::vector<std::size_t> shape) const {
    if (product(shape) != data_.size()) throw ArgumentError("reshape changes the number of entries");
    return ComplexTensor(std::move(shape), data_);
}

ComplexTensor ComplexTensor::permute(const std::vector<std::size_t>& perm) const {
    const std::size_t r = rank();
    if (perm.size() != r) throw ArgumentError("permutation has wrong length");
    std::vector<bool> seen(r, false);
    for (auto p : perm) {
        if (p >= r || seen[p]) throw ArgumentError("invalid permutation");
        seen[p] = true;
    }
    std::vector<std::size_t> new_shape(r);
    for (std::size_t k = 0; k < r; ++k) new_shape[k] = shape_[perm[k]];
    const auto old_st = strides_of(shape_);
    std::vector<std::size_t> src_st(r);
    for (std::size_t k = 0; k < r; ++k) src_st[k] = old_st[perm[k]];

    ComplexTensor out(new_shape);
    std::vector<std::size_t> idx(r, 0);
    std::size_t src = 0;
    for (std::size_t lin = 0; lin < data_.size(); ++lin) {
        out.data_[lin] = data_[src];
        for (std::size_t k = r; k-- > 0;) {
            if (++idx[k] < new_shape[k]) {
                src += src_st[k];
                break;
            }
            src -= src_st[k] * (new_shape[k] - 1);
            idx[k] = 0;
        }
    }
    return out;
}

Matrix ComplexTensor::as_matrix(std::size_t n_row_legs) const {
    if (n_row_legs > rank()) throw ArgumentError("too many row legs");
    std::size_t rows = 1;
    for (std::size_t k = 0; k < n_row_legs; ++k) rows *= shape_[k];
    const std::size_t cols = rows == 0 ? 0 : data_.size() / rows;
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = data_[i * cols + j];
    return m;
}

ComplexTensor ComplexTensor::from_matrix(const Matrix& m, std::vector<std::size_t> shape) {
    if (product(shape) != static_cast<std::size_t>(m.size())) throw ArgumentError("matrix size does not match shape");
    std::vector<cplx> d(m.size());
    const std::size_t cols = m.cols();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) d[i * cols + j] = m(i, j);
    return ComplexTensor(std::move(shape), std::move(d));
}

ComplexTensor contract(const ComplexTensor& a, const std::vector<std::size_t>& legs_a,
                       const ComplexTensor& b, const std::vector<std::size_t>& legs_b) {
    if (legs_a.size() != legs_b.size()) throw InternalError("contraction leg lists differ in length");
    for (std::size_t k = 0; k < legs_a.size(); ++k) {
        if (legs_a[k] >= a.rank() || legs_b[k] >= b.rank())
            throw InternalError("contraction leg out of range");
        if (a.shape()[legs_a[k]] != b.shape()[legs_b[k]]) throw InternalError("contraction shape mismatch");
    }
    auto free_legs = [](std::size_t r, const std::vector<std::size_t>& used) {
        std::vector<std::size_t> f;
        for (std::size_t k = 0; k < r; ++k)
            if (std::find(used.begin(), used.end(), k) == used.end()) f.push_back(k);
        return f;
    };
    const auto fa = free_legs(a.rank(), legs_a), fb = free_legs(b.rank(), legs_b);

    std::vector<std::size_t> pa = fa, pb = legs_b;
    pa.insert(pa.end(), legs_a.begin(), legs_a.end());
    pb.insert(pb.end(), fb.begin(), fb.end());
    const Matrix ma = a.permute(pa).as_matrix(fa.size());
    const Matrix mb = b.permute(pb).as_matrix(legs_b.size());
    const Matrix mc = ma * mb;

    std::vector<std::size_t> shape;
    for (auto k : fa) shape.push_back(a.shape()[k]);
    for (auto k : fb) shape.push_back(b.shape()[k]);
    return ComplexTensor::from_matrix(mc, shape);
}

// ----------------------------------------------------------------- states

PureState::PureState(int n, Vector amp, double tol) : n_qubits(n), amplitudes(std::move(amp)) {
    if (n < 0 || amplitudes.size() != (Eigen::Index{1} << n))
        throw ArgumentError("state length is not 2^n_qubits");
    if (std::abs(amplitudes.norm() - 1.0) > tol) throw ArgumentError("state is not normalized");
}

PureState PureState::product(const std::vector<Vector2>& sites) {
    Vector v = Vector::Ones(1);
    for (const auto& s : sites) {
        Vector next(v.size() * 2);
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            next(2 * i) = v(i) * s(0);
            next(2 * i + 1) = v(i) * s(1);
        }
        v = std::move(next);
    }
    return PureState(static_cast<int>(sites.size()), v, 1e-10);
}

PureState PureState::basis(int n, std::size_t index) {
    Vector v = Vector::Zero(Eigen::Index{1} << n);
    if (index >= static_cast<std::size_t>(v.size())) throw ArgumentError("basis index out of range");
    v(index) = 1.0;
    return PureState(n, v);
}

DensityMatrix::DensityMatrix(int n, Matrix m, double tol) : n_qubits(n), matrix(std::move(m)) {
    const Eigen::Index d = Eigen::Index{1} << n;
    if (matrix.rows() != d || matrix.cols() != d) throw ArgumentError("density matrix is not 2^n x 2^n");
    if (max_abs_diff(matrix, matrix.adjoint()) > tol) throw ArgumentError("density matrix is not Hermitian");
    if (std::abs(matrix.trace() - cplx{1.0, 0.0}) > tol) throw ArgumentError("density matrix trace is not 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(matrix, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol) throw ArgumentError("density matrix is not positive");
}

DensityMatrix DensityMatrix::pure(const PureState& psi) {
    return DensityMatrix(psi.n_qubits, psi.amplitudes * psi.amplitudes.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int n) {
    const Eigen::Index d = Eigen::Index{1} << n;
    return DensityMatrix(n, Matrix::Identity(d, d) / static_cast<double>(d));
}

Vector2 normalized(const Vector2& v) {
    const double nrm = v.norm();
    if (nrm == 0.0) throw ArgumentError("zero single-qubit vector");
    return v / nrm;
}

Vector2 bloch_state(double theta, double phi) {
    return Vector2(std::cos(theta / 2), std::polar(std::sin(theta / 2), phi));
}

// -------------------------------------------------------------- operators

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Matrix pauli(char p) {
    Matrix m = Matrix::Zero(2, 2);
    switch (p) {
        case 'I': m(0, 0) = m(1, 1) = 1.0; break;
        case 'X': m(0, 1) = m(1, 0) = 1.0; break;
        case 'Y': m(0, 1) = cplx(0, -1); m(1, 0) = cplx(0, 1); break;
        case 'Z': m(0, 0) = 1.0; m(1, 1) = -1.0; break;
        default: throw ArgumentError(std::string("unknown Pauli label '") + p + "'");
    }
    return m;
}

Matrix pauli_string(const std::string& ops) {
    Matrix m = Matrix::Ones(1, 1);
    for (char c : ops) m = kron(m, pauli(c));
    return m;
}

std::string pauli_label(std::size_t index, int n) {
    std::string s(n, 'I');
    for (int q = n - 1; q >= 0; --q, index /= 4) s[q] = "IXYZ"[index % 4];
    return s;
}

Matrix pauli_matrix(std::size_t index, int n) { return pauli_string(pauli_label(index, n)); }

cplx pauli_trace(std::size_t index, int n, const Matrix& x) {
    // P|k> = phase(k) |k ^ flip>, so tr(P x) = sum_k phase(k) x(k, k ^ flip).
    std::size_t flip = 0, zmask = 0, ycount = 0;
    for (int q = n - 1; q >= 0; --q, index /= 4) {
        const std::size_t m = qmask(n, q);
        switch (index % 4) {
            case 1: flip |= m; break;
            case 2: flip |= m; zmask |= m; ++ycount; break;
            case 3: zmask |= m; break;
            default: break;
        }
    }
    // Y = i X Z: <j|Y|k> = i (-1)^{k}, accumulated per qubit as i^{#Y} (-1)^{|k & zmask|}.
    static const cplx ipow[4] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
    const cplx pre = ipow[ycount % 4];
    cplx s = 0;
    const std::size_t d = std::size_t{1} << n;
    for (std::size_t k = 0; k < d; ++k) {
        const double sign = (__builtin_popcountll(k & zmask) % 2) ? -1.0 : 1.0;
        s += sign * x(k, k ^ flip);
    }
    return pre * s;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<int> keep) {
    const int n = rho.n_qubits;
    if (keep.empty()) throw ArgumentError("partial_trace: keep-set is empty");
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    for (int q : keep) check_qubit(n, q);
    std::vector<int> traced;
    for (int q = 0; q < n; ++q)
        if (!std::binary_search(keep.begin(), keep.end(), q)) traced.push_back(q);

    auto spread = [n](const std::vector<int>& qs) {
        const std::size_t k = qs.size();
        std::vector<std::size_t> out(std::size_t{1} << k, 0);
        for (std::size_t c = 0; c < out.size(); ++c)
            for (std::size_t j = 0; j < k; ++j)
                if (c & (std::size_t{1} << (k - 1 - j))) out[c] |= qmask(n, qs[j]);
        return out;
    };
    const auto ka = spread(keep), tb = spread(traced);
    const Eigen::Index dk = static_cast<Eigen::Index>(ka.size());
    Matrix out = Matrix::Zero(dk, dk);
    for (Eigen::Index a = 0; a < dk; ++a)
        for (Eigen::Index b = 0; b < dk; ++b) {
            cplx s = 0;
            for (std::size_t t : tb) s += rho.matrix(ka[a] | t, ka[b] | t);
            out(a, b) = s;
        }
    return DensityMatrix(static_cast<int>(keep.size()), std::move(out), 1e-9);
}

double entropy_of_spectrum(const std::vector<double>& p, double order) {
    if (!(order >= 1.0)) throw ArgumentError("Renyi order must be >= 1");
    std::vector<double> q;
    for (double x : p)
        if (x > 1e-12) q.push_back(x);
    if (std::isinf(order)) return q.empty() ? 0.0 : -std::log2(*std::max_element(q.begin(), q.end()));
    if (order == 1.0) {
        double s = 0;
        for (double x : q) s -= x * std::log2(x);
        return std::max(s, 0.0);
    }
    double s = 0;
    for (double x : q) s += std::pow(x, order);
    return std::max(std::log2(s) / (1.0 - order), 0.0);
}

double entropy(const DensityMatrix& rho, double order) {
    if (!(order >= 1.0)) throw ArgumentError("Renyi order must be >= 1");
    const Matrix h = 0.5 * (rho.matrix + rho.matrix.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    std::vector<double> p(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    for (double& x : p) x = std::max(x, -1e-12);
    return entropy_of_spectrum(p, order);
}

EntanglementSpectrum entanglement_spectrum(const DensityMatrix& rho, double tol) {
    if (!(tol > 0)) throw ArgumentError("tolerance must be positive");
    const Matrix h = 0.5 * (rho.matrix + rho.matrix.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    EntanglementSpectrum out;
    out.tolerance = tol;
    out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), std::greater<>());
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double x : out.eigenvalues)
        if (x > tol) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    out.flat = hi >= lo && hi - lo <= tol;
    return out;
}

double operator_entanglement(const Matrix& op, int n, int cut) {
    const Eigen::Index d = Eigen::Index{1} << n;
    if (op.rows() != d || op.cols() != d) throw ArgumentError("operator is not 2^n x 2^n");
    if (cut < 1 || cut > n - 1) throw ArgumentError("cut must lie in 1..n-1");
    const double nrm = op.norm();
    if (nrm == 0.0) throw ArgumentError("operator_entanglement: zero operator");
    const Eigen::Index da = Eigen::Index{1} << cut, db = Eigen::Index{1} << (n - cut);
    // op[(oA oB),(iA iB)] -> M[(oA iA),(oB iB)]
    Matrix m(da * da, db * db);
    for (Eigen::Index oa = 0; oa < da; ++oa)
        for (Eigen::Index ob = 0; ob < db; ++ob)
            for (Eigen::Index ia = 0; ia < da; ++ia)
                for (Eigen::Index ib = 0; ib < db; ++ib)
                    m(oa * da + ia, ob * db + ib) = op(oa * db + ob, ia * db + ib) / nrm;
    Eigen::BDCSVD<Matrix> svd(m);
    std::vector<double> p;
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
        const double s = svd.singularValues()(k);
        p.push_back(s * s);
    }
    double s = 0;
    for (double x : p)
        if (x > 1e-14) s -= x * std::log2(x);
    return std::max(s, 0.0);
}

// ---------------------------------------------------------------- kernels

void apply_1q(Vector& psi, int n, int q, const Matrix2& u) {
    check_qubit(n, q);
    if (psi.size() != (Eigen::Index{1} << n)) throw ArgumentError("state length mismatch");
    kernel_1q(psi.data(), 1, n, q, u);
}

void apply_2q(Vector& psi, int n, int q0, int q1, const Matrix4& u) {
    check_qubit(n, q0);
    check_qubit(n, q1);
    if (q0 == q1) throw ArgumentError("two-qubit gate on a single qubit");
    if (psi.size() != (Eigen::Index{1} << n)) throw ArgumentError("state length mismatch");
    kernel_2q(psi.data(), 1, n, q0, q1, u);
}

void apply_1q_left(Matrix& m, int n, int q, const Matrix2& u) {
    check_qubit(n, q);
    for (Eigen::Index c = 0; c < m.cols(); ++c) kernel_1q(m.col(c).data(), 1, n, q, u);
}

void apply_2q_left(Matrix& m, int n, int q0, int q1, const Matrix4& u) {
    check_qubit(n, q0);
    check_qubit(n, q1);
    for (Eigen::Index c = 0; c < m.cols(); ++c) kernel_2q(m.col(c).data(), 1, n, q0, q1, u);
}

void conjugate_1q(Matrix& rho, int n, int q, const Matrix2& u) {
    apply_1q_left(rho, n, q, u);
    const Matrix2 uc = u.conjugate();
    for (Eigen::Index r = 0; r < rho.rows(); ++r) kernel_1q(rho.data() + r, rho.rows(), n, q, uc);
}

void conjugate_2q(Matrix& rho, int n, int q0, int q1, const Matrix4& u) {
    apply_2q_left(rho, n, q0, q1, u);
    const Matrix4 uc = u.conjugate();
    for (Eigen::Index r = 0; r < rho.rows(); ++r) kernel_2q(rho.data() + r, rho.rows(), n, q0, q1, uc);
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw ArgumentError("shape mismatch in comparison");
    return max_abs(a - b);
}

Matrix align_global_phase(const Matrix& a, const Matrix& b) {
    Eigen::Index r = 0, c = 0;
    a.cwiseAbs().maxCoeff(&r, &c);
    if (std::abs(b(r, c)) == 0.0) return b;
    const cplx ph = (a(r, c) / std::abs(a(r, c))) / (b(r, c) / std::abs(b(r, c)));
    return b * ph;
}

bool is_unitary(const Matrix& u, double tol) {
    if (u.rows() != u.cols()) return false;
    return max_abs_diff(u.adjoint() * u, Matrix::Identity(u.rows(), u.cols())) <= tol;
}

}  // namespace akim
