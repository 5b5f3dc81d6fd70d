#include "akim/reduced_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <bit>
#include <cstdint>
#include <functional>
#include <span>

#include "akim/duality.hpp"

namespace akim {

namespace {

std::size_t pow4(int k) { return std::size_t{1} << (2 * k); }

Matrix2 projector(int z) {
    Matrix2 p = Matrix2::Zero();
    p(z, z) = 1.0;
    return p;
}

Matrix2 z_power(int a) { return a ? Matrix2(pauli('Z')) : Matrix2(Matrix2::Identity()); }

// Boundary vertex of the site right of a cut: sign (-1)^{a z} from the bond tile.
Matrix2 receive_op(int a, double g) { return phase_gate(g) * z_power(a) * hadamard(); }
// Boundary vertex of the site left of a cut: its Z value is exported on the leg.
Matrix2 export_op(int z, double g) { return phase_gate(g) * projector(z) * hadamard(); }

void check_steps(int t, int cap, const char* what) {
    if (t < 1) throw ArgumentError(std::string(what) + ": t must be >= 1");
    if (t > cap)
        throw CapacityError(std::string(what) + ": t=" + std::to_string(t) + " exceeds capacity " +
                            std::to_string(cap));
}

// Applies m to qubit q of every column (left action) of a dense operator.
Matrix on_site(const Matrix& x, int n, int q, const Matrix2& m) {
    Matrix y = x;
    apply_1q_left(y, n, q, m);
    return y;
}

}  // namespace

// ------------------------------------------------------- transfer matrices

TransferMatrix build_transfer_matrix(int t, GatePhases phases, const Vector2& phi0, const Vector2& phi1) {
    check_steps(t, kMaxTransferSteps, "build_transfer_matrix");
    const Vector2 a0 = normalized(phi0), a1 = normalized(phi1);
    const Matrix4 u = build_gate(phases);
    Matrix4 kf[2][2];  // [a][z]: receive a on site 2k, export z from site 2k+1
    for (int a = 0; a < 2; ++a)
        for (int z = 0; z < 2; ++z) kf[a][z] = kron(receive_op(a, phases.g1), export_op(z, phases.g0));

    // items indexed by (alpha prefix) * 4^tau + (beta prefix)
    std::vector<Matrix4> items{kron(a0 * a0.adjoint(), a1 * a1.adjoint())};
    for (int tau = 0; tau < t; ++tau) {
        const std::size_t w = pow4(tau);
        std::vector<Matrix4> next(items.size() * 16);
        for (std::size_t al = 0; al < w; ++al)
            for (std::size_t be = 0; be < w; ++be) {
                const Matrix4 r = u * items[al * w + be] * u.adjoint();
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; b < 4; ++b) {
                        const Matrix4& f = kf[a >> 1][b >> 1];
                        const Matrix4& g = kf[a & 1][b & 1];
                        next[(al * 4 + a) * (w * 4) + (be * 4 + b)] = f * r * g.adjoint();
                    }
            }
        items = std::move(next);
    }
    const Eigen::Index d = static_cast<Eigen::Index>(pow4(t));
    TransferMatrix T{t, phases, a0, a1, Matrix(d, d)};
    for (Eigen::Index al = 0; al < d; ++al)
        for (Eigen::Index be = 0; be < d; ++be) T.matrix(al, be) = items[al * d + be].trace();
    return T;
}

InfluenceMatrix bell_product_im(int t) {
    if (t < 0) throw ArgumentError("bell_product_im: t must be >= 0");
    Vector leg = Vector::Zero(4);
    leg(0) = leg(3) = 1.0 / std::sqrt(2.0);
    Vector v = Vector::Ones(1);
    for (int k = 0; k < t; ++k) v = kron(v, leg);
    return {t, v};
}

InfluenceMatrix left_edge_im(int t) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(pow4(t)));
    v(0) = 1.0;
    return {t, v};
}

InfluenceMatrix right_edge_im(int t) {
    Vector v = Vector::Ones(1);
    for (int k = 0; k < t; ++k) v = kron(v, folded_trace());
    return {t, v};
}

int temporal_schmidt_rank(const InfluenceMatrix& im, int k, double tol) {
    if (k < 0 || k > im.t) throw ArgumentError("temporal cut out of range");
    const Eigen::Index rows = static_cast<Eigen::Index>(pow4(k)), cols = im.v.size() / rows;
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = im.v(i * cols + j);
    Eigen::BDCSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > tol * std::max(1.0, s(0))) ++r;
    return r;
}

TransferReport transfer_checks(const TransferMatrix& T) {
    const Matrix& t = T.matrix;
    const Vector b = bell_product_im(T.t).v;
    const Matrix p = b * b.transpose();  // |R><L| with <L|R> = 1
    TransferReport r;
    r.left_fixed_residual = max_abs(b.transpose() * t - b.transpose());
    r.right_fixed_residual = max_abs(t * b - b);

    Matrix tp = Matrix::Identity(t.rows(), t.cols());
    Matrix np = tp;
    const Matrix n = t - p;
    for (int k = 0; k < 2 * T.t; ++k) {
        tp = tp * t;
        np = np * n;
    }
    Eigen::BDCSVD<Matrix> svd(tp);
    const auto& s = svd.singularValues();
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > 1e-8) ++r.power_rank;
    r.power_residual = max_abs(tp - p);
    r.spectrum_residual = std::max({max_abs(t * p - p), max_abs(p * t - p), max_abs(np)});

    Eigen::ComplexEigenSolver<Matrix> es(t, false);
    r.raw_eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(r.raw_eigenvalues.begin(), r.raw_eigenvalues.end(),
              [](cplx x, cplx y) { return std::abs(x) != std::abs(y) ? std::abs(x) > std::abs(y) : std::arg(x) < std::arg(y); });
    if (r.spectrum_residual <= 1e-8) {
        r.eigenvalues.assign(t.rows(), cplx{0.0, 0.0});
        r.eigenvalues[0] = 1.0;
    } else {
        r.eigenvalues = r.raw_eigenvalues;
    }
    return r;
}

// ----------------------------------------------------------- IM contraction

DensityMatrix rdm_via_im(const PureState& psi_a, int t, GatePhases phases) {
    return rdm_via_im(psi_a, t, phases, bell_product_im(t), bell_product_im(t));
}

DensityMatrix rdm_via_im(const PureState& psi_a, int t, GatePhases phases, const InfluenceMatrix& left,
                         const InfluenceMatrix& right) {
    const int n = psi_a.n_qubits;
    if (n < 2 || n % 2 != 0) throw ArgumentError("rdm_via_im: N_A must be even and >= 2");
    if (n > kMaxDenseChannelQubits) throw CapacityError("rdm_via_im: N_A exceeds " + std::to_string(kMaxDenseChannelQubits));
    if (t < 0) throw ArgumentError("rdm_via_im: t must be >= 0");
    if (t > 3 && n > 4) throw CapacityError("rdm_via_im: t > 3 requires N_A <= 4");
    if (t > kMaxTransferSteps) throw CapacityError("rdm_via_im: t exceeds " + std::to_string(kMaxTransferSteps));
    if (left.t != t || right.t != t) throw ArgumentError("rdm_via_im: IM depth differs from t");
    Matrix rho0 = psi_a.amplitudes * psi_a.amplitudes.adjoint();
    if (t == 0) return DensityMatrix(n, rho0);

    // W for one step: A's gates, then the boundary vertices attached to the legs.
    const Eigen::Index d = Eigen::Index{1} << n;
    Matrix v = Matrix::Identity(d, d);
    const Matrix4 u = build_gate(phases);
    for (int i = 0; i + 1 < n; i += 2) apply_2q_left(v, n, i, i + 1, u);
    for (int i = 1; i + 1 < n - 1; i += 2) apply_2q_left(v, n, i, i + 1, u);
    Matrix mf[2][2];  // [a received on site 0][z exported from site n-1]
    for (int a = 0; a < 2; ++a)
        for (int z = 0; z < 2; ++z)
            mf[a][z] = on_site(on_site(v, n, 0, receive_op(a, phases.g1)), n, n - 1, export_op(z, phases.g0));

    auto step = [&](const Matrix& x, int a, int b) -> Matrix {
        return mf[a >> 1][b >> 1] * x * mf[a & 1][b & 1].adjoint();
    };

    // y[(alpha rest) * W + (beta rest)] after contracting the earliest legs.
    std::vector<Matrix> y;
    {
        const std::size_t w = pow4(t - 1);
        Matrix k[4][4];
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) k[a][b] = step(rho0, a, b);
        y.assign(w * w, Matrix::Zero(d, d));
        for (std::size_t al = 0; al < w; ++al)
            for (std::size_t be = 0; be < w; ++be) {
                Matrix& acc = y[al * w + be];
                for (int a = 0; a < 4; ++a) {
                    const cplx la = left.v(a * w + al);
                    if (la == 0.0) continue;
                    for (int b = 0; b < 4; ++b) {
                        const cplx rb = right.v(b * w + be);
                        if (rb != 0.0) acc += (la * rb) * k[a][b];
                    }
                }
            }
    }
    for (int tau = 1; tau < t; ++tau) {
        const std::size_t w = pow4(t - tau), wn = w / 4;
        std::vector<Matrix> next(wn * wn, Matrix::Zero(d, d));
        for (std::size_t al = 0; al < wn; ++al)
            for (std::size_t be = 0; be < wn; ++be)
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; b < 4; ++b) next[al * wn + be] += step(y[(a * wn + al) * w + (b * wn + be)], a, b);
        y = std::move(next);
    }
    const Matrix rho = 0.5 * (y[0] + y[0].adjoint());
    return DensityMatrix(n, rho, 1e-8);
}

std::pair<InfluenceMatrix, InfluenceMatrix> bath_ims(int t, GatePhases phases, const Vector2& phi0,
                                                     const Vector2& phi1) {
    const TransferMatrix T = build_transfer_matrix(t, phases, phi0, phi1);
    Vector l = left_edge_im(t).v, r = right_edge_im(t).v;
    // Influence travels at most one column per step; 2t + 1 columns put the
    // open edges outside the light cone of A.
    for (int k = 0; k < 2 * t + 1; ++k) {
        l = (l.transpose() * T.matrix).transpose();
        r = T.matrix * r;
    }
    return {{t, l}, {t, r}};
}

// ------------------------------------------------------------------ channel

namespace {

// Entry factor of the boundary dephasing and phases: zero where bit 0 or bit
// n-1 of row and column differ, otherwise phase(i) conj(phase(j)).
Matrix boundary_factor(const Channel& c) {
    const Eigen::Index d = c.bulk.rows();
    const Eigen::Index m = (Eigen::Index{1} << (c.n - 1)) | 1;
    Matrix f(d, d);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i)
            f(i, j) = ((i ^ j) & m) ? cplx{0.0, 0.0} : c.boundary_phase(i) * std::conj(c.boundary_phase(j));
    return f;
}

// Column-stacking unit indices u = i + d j of the matrix units E_ij.
std::vector<Eigen::Index> all_units(int n) {
    const Eigen::Index d = Eigen::Index{1} << n;
    std::vector<Eigen::Index> u(static_cast<std::size_t>(d * d));
    for (Eigen::Index k = 0; k < d * d; ++k) u[static_cast<std::size_t>(k)] = k;
    return u;
}

// Units surviving the boundary dephasing; they span the range of the channel.
std::vector<Eigen::Index> image_units(int n) {
    const Eigen::Index d = Eigen::Index{1} << n, m = (Eigen::Index{1} << (n - 1)) | 1;
    std::vector<Eigen::Index> u;
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i)
            if (((i ^ j) & m) == 0) u.push_back(i + d * j);
    return u;
}

// Calls f(chunk, stack) for consecutive chunks of the given units, stacked horizontally.
void for_each_unit_chunk(int n, const std::vector<Eigen::Index>& units,
                         const std::function<void(std::span<const Eigen::Index>, const Matrix&)>& f) {
    const Eigen::Index d = Eigen::Index{1} << n;
    const std::size_t chunk = 256;
    for (std::size_t first = 0; first < units.size(); first += chunk) {
        const std::span<const Eigen::Index> part(units.data() + first, std::min(chunk, units.size() - first));
        Matrix stack = Matrix::Zero(d, d * static_cast<Eigen::Index>(part.size()));
        for (std::size_t k = 0; k < part.size(); ++k)
            stack(part[k] % d, static_cast<Eigen::Index>(k) * d + part[k] / d) = 1.0;
        f(part, stack);
    }
}

// sum_k X_k(i_k, j_k): the chunk's contribution to the superoperator trace.
cplx unit_trace(const Matrix& stack, std::span<const Eigen::Index> units) {
    const Eigen::Index d = stack.rows();
    cplx s = 0.0;
    for (std::size_t k = 0; k < units.size(); ++k)
        s += stack(units[k] % d, static_cast<Eigen::Index>(k) * d + units[k] / d);
    return s;
}

// P X P^dag for a Pauli string, blockwise on a stack. With P|j> ~ (-1)^{|j & z|} |j ^ f>
// the i^{#Y} prefactor cancels between P and P^dag.
struct PauliMask {
    Eigen::Index flip = 0, zmask = 0;
    explicit PauliMask(const std::string& ops) {
        const int n = static_cast<int>(ops.size());
        for (int q = 0; q < n; ++q) {
            const Eigen::Index bit = Eigen::Index{1} << (n - 1 - q);
            if (ops[q] == 'X' || ops[q] == 'Y') flip |= bit;
            if (ops[q] == 'Z' || ops[q] == 'Y') zmask |= bit;
        }
    }
    double sign(Eigen::Index j) const { return std::popcount(static_cast<std::uint64_t>(j & zmask)) % 2 ? -1.0 : 1.0; }
};

Matrix conjugate_stacked(const PauliMask& p, const Matrix& stack) {
    const Eigen::Index d = stack.rows(), m = stack.cols() / d;
    Matrix out(d, stack.cols());
    for (Eigen::Index k = 0; k < m; ++k)
        for (Eigen::Index b = 0; b < d; ++b) {
            const Eigen::Index bf = b ^ p.flip;
            const double sb = p.sign(bf);
            for (Eigen::Index a = 0; a < d; ++a) {
                const Eigen::Index af = a ^ p.flip;
                out(a, k * d + b) = (p.sign(af) * sb) * stack(af, k * d + bf);
            }
        }
    return out;
}

}  // namespace

Matrix Channel::apply(const Matrix& rho) const {
    return (bulk * rho * bulk.adjoint()).cwiseProduct(boundary_factor(*this));
}

Matrix Channel::apply_stacked(const Matrix& stack) const {
    const Eigen::Index d = bulk.rows(), m = stack.cols() / d;
    if (stack.rows() != d || stack.cols() != d * m) throw ArgumentError("apply_stacked: shape mismatch");
    const Matrix left = bulk * stack;
    Matrix tall(d * m, d);
    for (Eigen::Index k = 0; k < m; ++k) tall.middleRows(k * d, d) = left.middleCols(k * d, d);
    const Matrix right = tall * bulk.adjoint();
    const Matrix f = boundary_factor(*this);
    Matrix out(d, d * m);
    for (Eigen::Index k = 0; k < m; ++k) out.middleCols(k * d, d) = right.middleRows(k * d, d).cwiseProduct(f);
    return out;
}

Matrix Channel::apply_power(const Matrix& rho, int k) const {
    Matrix x = rho;
    for (int i = 0; i < k; ++i) x = apply(x);
    return x;
}

Channel build_channel(int n_a, GatePhases phases, bool dense) {
    if (n_a < 2 || n_a % 2 != 0) throw ArgumentError("build_channel: N_A must be even and >= 2");
    if (n_a > kMaxChannelQubits)
        throw CapacityError("build_channel: N_A exceeds " + std::to_string(kMaxChannelQubits));
    if (dense && n_a > kMaxDenseChannelQubits)
        throw CapacityError("build_channel: dense superoperator limited to N_A <= " +
                            std::to_string(kMaxDenseChannelQubits));
    Channel c;
    c.n = n_a;
    c.phases = phases;
    const Eigen::Index d = Eigen::Index{1} << n_a;
    Matrix v = Matrix::Identity(d, d);
    const Matrix4 u = build_gate(phases);
    for (int i = 0; i + 1 < n_a; i += 2) apply_2q_left(v, n_a, i, i + 1, u);
    for (int i = 1; i + 1 < n_a - 1; i += 2) apply_2q_left(v, n_a, i, i + 1, u);
    apply_1q_left(v, n_a, 0, hadamard());
    apply_1q_left(v, n_a, n_a - 1, hadamard());
    c.bulk = v;

    c.boundary_phase = Vector::Ones(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        if (i & (Eigen::Index{1} << (n_a - 1))) c.boundary_phase(i) *= std::polar(1.0, phases.g1);
        if (i & 1) c.boundary_phase(i) *= std::polar(1.0, phases.g0);
    }
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            Matrix k = c.bulk;
            if (a) apply_1q_left(k, n_a, 0, pauli('Z'));
            if (b) apply_1q_left(k, n_a, n_a - 1, pauli('Z'));
            c.kraus.push_back(0.5 * (c.boundary_phase.asDiagonal() * k));
        }
    if (dense) c.superop = dense_superoperator(c);
    return c;
}

Matrix dense_superoperator(const Channel& c) {
    if (c.n > kMaxDenseChannelQubits) throw CapacityError("dense superoperator limited to N_A <= 6");
    const Eigen::Index d = Eigen::Index{1} << c.n;
    Matrix s(d * d, d * d);
    for_each_unit_chunk(c.n, all_units(c.n), [&](std::span<const Eigen::Index> units, const Matrix& e) {
        const Matrix out = c.apply_stacked(e);
        const Eigen::Index m = static_cast<Eigen::Index>(units.size());
        // column-stacking: block k is already vec(C(E_u)) in memory order
        s.middleCols(units[0], m) = Eigen::Map<const Matrix>(out.data(), d * d, m);
    });
    return s;
}

Matrix choi_matrix(const Channel& c) {
    if (c.n > 4) throw CapacityError("choi_matrix limited to N_A <= 4");
    const Eigen::Index d = Eigen::Index{1} << c.n;
    Matrix j = Matrix::Zero(d * d, d * d);
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) {
            Matrix e = Matrix::Zero(d, d);
            e(a, b) = 1.0;
            j.block(a * d, b * d, d, d) = c.apply(e);
        }
    return j;
}

std::vector<double> pauli_coefficients(const Matrix& x, int n) {
    std::vector<double> out(pow4(n));
    const double scale = std::ldexp(1.0, -n);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = (pauli_trace(k, n, x) * scale).real();
    return out;
}

ChannelSpectrum channel_spectrum(const Channel& c, double tol) {
    if (c.n > kMaxDenseChannelQubits) throw CapacityError("channel_spectrum limited to N_A <= 6");
    const Matrix s = c.superop ? *c.superop : dense_superoperator(c);
    const Eigen::Index d = Eigen::Index{1} << c.n;
    ChannelSpectrum out;
    Eigen::ComplexEigenSolver<Matrix> es(s, false);
    out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    for (auto& l : out.eigenvalues) {  // suppress signed zeros so the ordering is reproducible
        if (std::abs(l.real()) < 1e-14) l.real(0.0);
        if (std::abs(l.imag()) < 1e-14) l.imag(0.0);
    }
    if (c.n <= 4) {
        Matrix pk = s;
        for (int k = 1; k <= 2 * c.n + 2; ++k) {
            const Matrix next = s * pk;
            if (max_abs_diff(next, pk) <= 1e-10) {
                out.stabilization_index = k;
                break;
            }
            pk = next;
        }
    }
    if (out.stabilization_index)
        for (auto& l : out.eigenvalues) l = std::abs(l - 1.0) < 0.5 ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), [](cplx x, cplx y) {
        const double ax = std::abs(x), ay = std::abs(y);
        if (std::abs(ax - ay) > 1e-12) return ax > ay;
        return std::arg(x) < std::arg(y);
    });
    double sub = 0.0;
    for (auto l : out.eigenvalues)
        if (std::abs(l) < 1.0 - tol) sub = std::max(sub, std::abs(l));
    out.gap = 1.0 - sub;

    // fixed space: kernel of S - I, made Hermitian and HS-orthonormal
    const Matrix m = s - Matrix::Identity(s.rows(), s.cols());
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    std::vector<Matrix> candidates;
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
        if (sv(k) > tol) continue;
        const Vector col = svd.matrixV().col(k);
        const Matrix x = Eigen::Map<const Matrix>(col.data(), d, d);
        candidates.push_back(0.5 * (x + x.adjoint()));
        candidates.push_back(cplx(0, -0.5) * (x - x.adjoint()));
    }
    for (auto x : candidates) {
        for (const auto& b : out.fixed_basis) x -= (b.adjoint() * x).trace() * b;
        const double nrm = x.norm();
        if (nrm < 1e-6) continue;
        x /= nrm;
        // fix the sign by the largest Pauli coefficient for reproducible output
        const auto pc = pauli_coefficients(x, c.n);
        const auto it = std::max_element(pc.begin(), pc.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
        if (*it < 0) x = -x;
        out.fixed_basis.push_back(x);
    }
    out.fixed_dimension = static_cast<int>(out.fixed_basis.size());
    return out;
}

// --------------------------------------------------- late-time structure

namespace {

Matrix dephase(const PauliMask& p, const Matrix& stack) { return 0.5 * (stack + conjugate_stacked(p, stack)); }

std::string site_string(int n, std::initializer_list<std::pair<int, char>> ops) {
    std::string s(n, 'I');
    for (auto [q, c] : ops) s[q] = c;
    return s;
}

}  // namespace

FiniteTimeReport finite_time_identity(char solvable_case, int n_a, GatePhases phases) {
    if (solvable_case != 'a' && solvable_case != 'b') throw ArgumentError("finite_time_identity: case must be a or b");
    if (n_a > kMaxDenseChannelQubits) throw CapacityError("finite_time_identity limited to N_A <= 6");
    const Channel c = build_channel(n_a, phases);
    FiniteTimeReport r;
    r.k = solvable_case == 'a' ? n_a : n_a / 2 + 1;
    cplx trace = 0.0;
    // range(C) is exactly the span of the image units (C = dephasing after a
    // unitary), so C^{k+1} = C^k iff C^k = C^{k-1} there, and C^k = C^{k-1}
    // iff C^{k-1} = C^{k-2} there. tr C^k only receives image contributions.
    for_each_unit_chunk(n_a, image_units(n_a), [&](std::span<const Eigen::Index> units, const Matrix& e) {
        Matrix prev2 = e;
        for (int s = 0; s < r.k - 2; ++s) prev2 = c.apply_stacked(prev2);
        const Matrix prev = c.apply_stacked(prev2);
        const Matrix at = c.apply_stacked(prev);
        r.residual = std::max(r.residual, max_abs_diff(at, prev));
        r.residual_before = std::max(r.residual_before, max_abs_diff(prev, prev2));
        trace += unit_trace(at, units);
    });
    r.fixed_dimension = static_cast<int>(std::lround(trace.real()));
    return r;
}

CaseBReport case_b_structure(int n_a) {
    if (n_a < 2 || n_a % 2 != 0) throw ArgumentError("case_b_structure: N_A must be even");
    if (n_a > kMaxDenseChannelQubits) throw CapacityError("case_b_structure limited to N_A <= 6");
    const GatePhases ph(kPi / 2, kPi / 2);
    const Channel c = build_channel(n_a, ph);
    const int k = n_a / 2 + 1;

    // bonds (i, i+1) with i even are the odd bonds (1,2),(3,4),... of 1-based numbering
    auto composed = [&](bool zz_on_even_bonds) {
        std::vector<PauliMask> b{PauliMask(site_string(n_a, {{0, 'Z'}})),
                                 PauliMask(site_string(n_a, {{n_a - 1, 'Z'}}))};
        std::vector<PauliMask> zz, xx;
        for (int i = 0; i + 1 < n_a; ++i) {
            const bool odd_bond = (i % 2 == 0);
            const bool zz_here = zz_on_even_bonds ? !odd_bond : odd_bond;
            if (zz_here) zz.push_back(PauliMask(site_string(n_a, {{i, 'Z'}, {i + 1, 'Z'}})));
            else xx.push_back(PauliMask(site_string(n_a, {{i, 'X'}, {i + 1, 'X'}})));
        }
        return [b, zz, xx](const Matrix& x) {
            Matrix y = x;
            for (const auto& p : xx) y = dephase(p, y);
            for (const auto& p : zz) y = dephase(p, y);
            for (const auto& p : b) y = dephase(p, y);
            return y;
        };
    };
    const auto even = composed(true), odd = composed(false);
    double r_even = 0, r_odd = 0;
    for_each_unit_chunk(n_a, all_units(n_a), [&](std::span<const Eigen::Index>, const Matrix& e) {
        Matrix ck = e;
        for (int s = 0; s < k; ++s) ck = c.apply_stacked(ck);
        r_even = std::max(r_even, max_abs_diff(ck, even(e)));
        r_odd = std::max(r_odd, max_abs_diff(ck, odd(e)));
    });
    CaseBReport r;
    r.n_a = n_a;
    r.assignment = r_even <= r_odd ? "ZZ dissipators on even bonds (2,3),(4,5),...; XX on odd bonds"
                                   : "ZZ dissipators on odd bonds (1,2),(3,4),...; XX on even bonds";
    r.composed_residual = std::min(r_even, r_odd);
    r.other_assignment_residual = std::max(r_even, r_odd);

    std::vector<Matrix> gens;
    for (int i = 0; i + 1 < n_a; i += 2) r.generators.push_back(site_string(n_a, {{i, 'Z'}, {i + 1, 'Z'}}));
    for (int i = 1; i + 1 < n_a; i += 2) r.generators.push_back(site_string(n_a, {{i, 'X'}, {i + 1, 'X'}}));
    for (const auto& g : r.generators) gens.push_back(pauli_string(g));
    r.abelian = true;
    for (std::size_t a = 0; a < gens.size(); ++a)
        for (std::size_t b = a + 1; b < gens.size(); ++b)
            if (max_abs(gens[a] * gens[b] - gens[b] * gens[a]) > 1e-12) r.abelian = false;
    const Eigen::Index d = Eigen::Index{1} << n_a;
    const std::size_t count = std::size_t{1} << gens.size();
    r.group_size = static_cast<int>(count);
    for (std::size_t mask = 0; mask < count; ++mask) {
        Matrix o = Matrix::Identity(d, d);
        for (std::size_t g = 0; g < gens.size(); ++g)
            if (mask & (std::size_t{1} << g)) o = o * gens[g];
        r.invariance_residual = std::max(r.invariance_residual, max_abs_diff(c.apply(o), o));
    }
    return r;
}

CaseCReport case_c_cycle(int n_a) {
    if (n_a < 2 || n_a % 2 != 0) throw ArgumentError("case_c_cycle: N_A must be even");
    if (n_a > kMaxDenseChannelQubits) throw CapacityError("case_c_cycle limited to N_A <= 6");
    const Channel cb = build_channel(n_a, GatePhases(kPi / 2, kPi / 2));
    const Channel cc = build_channel(n_a, GatePhases(kPi / 2, 3 * kPi / 2));
    CaseCReport r;
    r.n_a = n_a;
    const int k = n_a / 2 + 1;
    r.even_t = k % 2 == 0 ? k : k + 1;
    r.odd_t = k % 2 == 1 ? k : k + 1;
    const int tmax = std::max(r.even_t, r.odd_t);
    std::string iy(n_a, 'I');
    for (int q = 1; q < n_a; q += 2) iy[q] = 'Y';
    const PauliMask p_iy(iy);

    cplx tr_even = 0, tr_odd = 0;
    for_each_unit_chunk(n_a, all_units(n_a), [&](std::span<const Eigen::Index> units, const Matrix& e) {
        Matrix x = e, y = e;
        for (int s = 1; s <= tmax; ++s) {
            x = cc.apply_stacked(x);
            y = cb.apply_stacked(y);
            if (s == r.even_t) {
                r.even_residual = std::max(r.even_residual, max_abs_diff(x, y));
                tr_even += unit_trace(x, units);
            }
            if (s == r.odd_t) {
                r.odd_residual = std::max(r.odd_residual, max_abs_diff(x, conjugate_stacked(p_iy, y)));
                tr_odd += unit_trace(x, units);
            }
        }
    });
    // On the surviving subspace C acts as an involution: tr C^even = n+ + n-, tr C^odd = n+ - n-.
    r.plus_one = static_cast<int>(std::lround(0.5 * (tr_even.real() + tr_odd.real())));
    r.minus_one = static_cast<int>(std::lround(0.5 * (tr_even.real() - tr_odd.real())));
    if (n_a <= 4) {
        const auto spec = channel_spectrum(cc);
        r.eigenvalues = spec.eigenvalues;
        r.min_real_eigenvalue = 1.0;
        for (auto l : spec.eigenvalues) r.min_real_eigenvalue = std::min(r.min_real_eigenvalue, l.real());
    } else {
        r.min_real_eigenvalue = r.minus_one > 0 ? -1.0 : 0.0;
    }
    return r;
}

}  // namespace akim
