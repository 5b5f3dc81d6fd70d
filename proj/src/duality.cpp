#include "akim/duality.hpp"

#include <algorithm>
#include <array>
#include <thread>
#include <tuple>
#include <cmath>

namespace akim {

namespace {

// Interleaves forward/backward bit strings into per-site folded legs.
std::size_t interleave(std::size_t z, std::size_t zp, int n) {
    std::size_t out = 0;
    for (int k = 0; k < n; ++k) {
        const std::size_t b = (z >> (n - 1 - k)) & 1, bp = (zp >> (n - 1 - k)) & 1;
        out = out * 4 + 2 * b + bp;
    }
    return out;
}

int qubits_of(Eigen::Index d) {
    int n = 0;
    while ((Eigen::Index{1} << n) < d) ++n;
    if ((Eigen::Index{1} << n) != d) throw ArgumentError("dimension is not a power of two");
    return n;
}

Vector2 x_rotation(double theta, const Vector2& v) {  // e^{i theta X} v
    const double c = std::cos(theta), s = std::sin(theta);
    return Vector2(c * v(0) + cplx(0, s) * v(1), cplx(0, s) * v(0) + c * v(1));
}

Vector2 z_rotation(double theta, const Vector2& v) {  // e^{i theta Z} v
    return Vector2(std::polar(1.0, theta) * v(0), std::polar(1.0, -theta) * v(1));
}

// Dephase-after-Hadamard on one folded leg.
Matrix4 leg_readout() { return cross_projector() * fold_operator(hadamard()); }

struct GatedDimer {
    Vector w;  // 16
};

GatedDimer gated_dimer(const Matrix& w, const Vector2& phi0, const Vector2& phi1) {
    const Vector v = kron(fold_state(normalized(phi0)), fold_state(normalized(phi1)));
    return {w * v};
}

// Residuals come as complex deviation vectors; the checks report their max-abs.
Vector sic_deviation_left(const Vector& w, const Matrix4& readout) {
    const Vector o = folded_trace();
    Vector x = Vector::Zero(4);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) x(a) += w(4 * a + b) * o(b);
    return readout * x - o / ModelConstants::q;
}

Vector sic_deviation_right(const Vector& w, const Matrix4& readout) {
    const Vector o = folded_trace();
    Vector x = Vector::Zero(4);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) x(b) += o(a) * w(4 * a + b);
    return readout * x - o / ModelConstants::q;
}

double sic_residual_left(const Vector& w, const Matrix4& readout) { return max_abs(sic_deviation_left(w, readout)); }
double sic_residual_right(const Vector& w, const Matrix4& readout) {
    return max_abs(sic_deviation_right(w, readout));
}

// Same gate: both output legs read out give independent uniform values.
Vector sec_deviation_joint(const Vector& w, const Matrix& readout2) {
    const Vector o = folded_trace();
    const double q2 = ModelConstants::q * ModelConstants::q;
    return readout2 * w - kron(o, o) / q2;
}
double sec_residual_joint(const Vector& w, const Matrix4& readout) {
    return max_abs(sec_deviation_joint(w, kron(readout, readout)));
}

// Next layer: the right leg of one gated dimer and the left leg of its
// neighbour (partners traced) pass the second-layer gate; both read out give
// independent uniform values.
Vector sec_deviation_next(const Vector& w, const Matrix& folded_gate, const Matrix& readout2) {
    const Vector o = folded_trace();
    Vector left = Vector::Zero(4), right = Vector::Zero(4);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            right(b) += o(a) * w(4 * a + b);
            left(a) += w(4 * a + b) * o(b);
        }
    const double q2 = ModelConstants::q * ModelConstants::q;
    return readout2 * (folded_gate * kron(right, left)) - kron(o, o) / q2;
}
double sec_residual_next(const Vector& w, const Matrix& folded_gate, const Matrix4& readout) {
    return max_abs(sec_deviation_next(w, folded_gate, kron(readout, readout)));
}

// Two dimers, two steps: the shallow network with both boundary legs closed
// by the Bell-pair influence matrix must return the maximally mixed state.
// One step on the four sites: the gates on (0,1), (2,3), then (1,2), the
// boundary Hadamards, Z-dephasing on sites 0 and 3, and the vertex phases.
struct TwoStep {
    using M16 = Eigen::Matrix<cplx, 16, 16>;
    M16 u;
    Eigen::Matrix<cplx, 16, 1> phase;

    explicit TwoStep(GatePhases phases) {
        Matrix m = Matrix::Identity(16, 16);
        const Matrix4 g = build_gate(phases);
        apply_2q_left(m, 4, 0, 1, g);
        apply_2q_left(m, 4, 2, 3, g);
        apply_2q_left(m, 4, 1, 2, g);
        apply_1q_left(m, 4, 0, hadamard());
        apply_1q_left(m, 4, 3, hadamard());
        u = m;
        Matrix d = Matrix::Identity(16, 16);
        apply_1q_left(d, 4, 0, phase_gate(phases.g1));
        apply_1q_left(d, 4, 3, phase_gate(phases.g0));
        phase = d.diagonal();
    }

    Matrix deviation(const Vector2& phi0, const Vector2& phi1) const {
        const Vector2 a = normalized(phi0), b = normalized(phi1);
        const Vector psi = kron(kron(Matrix(a), Matrix(b)), kron(Matrix(a), Matrix(b)));
        M16 rho = psi * psi.adjoint();
        for (int step = 0; step < 2; ++step) {
            rho = (u * rho * u.adjoint()).eval();
            for (int j = 0; j < 16; ++j)
                for (int i = 0; i < 16; ++i)
                    rho(i, j) = (i ^ j) & 0b1001 ? cplx(0.0) : rho(i, j) * phase(i) * std::conj(phase(j));
        }
        return Matrix(rho) - Matrix::Identity(16, 16) / 16.0;
    }
};

double sec_residual_two_step(const Vector2& phi0, const Vector2& phi1, GatePhases phases) {
    return max_abs(TwoStep(phases).deviation(phi0, phi1));
}


}  // namespace

ComplexTensor FoldedGate::tensor() const { return ComplexTensor::from_matrix(w, {4, 4, 4, 4}); }

Matrix fold_operator(const Matrix& op) {
    const int n = qubits_of(op.rows());
    if (op.rows() != op.cols()) throw ArgumentError("fold_operator: operator is not square");
    const Eigen::Index d = op.rows(), dd = d * d;
    Matrix w(dd, dd);
    for (Eigen::Index o = 0; o < d; ++o)
        for (Eigen::Index op_ = 0; op_ < d; ++op_) {
            const std::size_t r = interleave(o, op_, n);
            for (Eigen::Index i = 0; i < d; ++i)
                for (Eigen::Index ip = 0; ip < d; ++ip)
                    w(r, interleave(i, ip, n)) = op(o, i) * std::conj(op(op_, ip));
        }
    return w;
}

FoldedGate fold(const Matrix4& u, double tol) {
    if (!is_unitary(u, tol)) throw ArgumentError("fold: gate is not unitary");
    return {fold_operator(u)};
}

Matrix4 unfold(const FoldedGate& g) {
    // g.w[(o o'),(i i')] = u[o,i] conj(u[o',i']): pick the strongest (o',i') slice.
    Matrix4 u;
    double best = -1;
    int bo = 0, bi = 0;
    for (int o = 0; o < 4; ++o)
        for (int i = 0; i < 4; ++i) {
            const double v = std::abs(g.w(interleave(o, o, 2), interleave(i, i, 2)));
            if (v > best) best = v, bo = o, bi = i;
        }
    const double scale = std::sqrt(best);
    for (int o = 0; o < 4; ++o)
        for (int i = 0; i < 4; ++i) u(o, i) = g.w(interleave(o, bo, 2), interleave(i, bi, 2)) / scale;
    return u;
}

FoldedVector fold_density(const Matrix& rho) {
    const int n = qubits_of(rho.rows());
    Vector v(rho.size());
    for (Eigen::Index a = 0; a < rho.rows(); ++a)
        for (Eigen::Index b = 0; b < rho.cols(); ++b) v(interleave(a, b, n)) = rho(a, b);
    return v;
}

Matrix unfold_density(const FoldedVector& v, int n) {
    const Eigen::Index d = Eigen::Index{1} << n;
    if (v.size() != d * d) throw ArgumentError("folded vector has wrong length");
    Matrix rho(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) rho(a, b) = v(interleave(a, b, n));
    return rho;
}

FoldedVector fold_state(const Vector& psi) { return fold_density(psi * psi.adjoint()); }

FoldedVector folded_trace() {
    Vector o = Vector::Zero(4);
    o(0) = o(3) = 1.0;
    return o;
}

Matrix4 cross_projector() {
    Matrix4 p = Matrix4::Zero();
    p(0, 0) = p(3, 3) = 1.0;
    return p;
}

Matrix fold_compose(const Matrix& a, const Matrix& b) { return a * b; }

CheckResult check_2du_gate(const Matrix4& u, double tol) {
    const Matrix w = fold(u, 1e-10).w;
    const Matrix i4 = Matrix::Identity(4, 4);
    const Matrix on01 = kron(w, i4), on12 = kron(i4, w);
    const Vector o = folded_trace();
    const Matrix target = ModelConstants::q * (o * o.transpose());

    auto cap = [&](const Matrix& s) {
        Matrix m = Matrix::Zero(4, 4);
        for (int a = 0; a < 4; ++a)
            for (int c = 0; c < 4; ++c) {
                if (o(a) == 0.0 || o(c) == 0.0) continue;
                for (int ap = 0; ap < 4; ++ap)
                    for (int cp = 0; cp < 4; ++cp) {
                        if (o(ap) == 0.0 || o(cp) == 0.0) continue;
                        for (int x = 0; x < 4; ++x)
                            for (int y = 0; y < 4; ++y) m(x, y) += s(16 * a + 4 * x + c, 16 * ap + 4 * y + cp);
                    }
            }
        return m;
    };
    CheckResult r;
    r.parts = {max_abs_diff(cap(on12 * on01), target), max_abs_diff(cap(on01 * on12), target)};
    r.residual = *std::max_element(r.parts.begin(), r.parts.end());
    r.pass = r.residual <= tol;
    return r;
}

CheckResult check_2du(GatePhases phases, double tol) { return check_2du_gate(build_gate(phases), tol); }

CheckResult check_sic(const Vector2& phi0, const Vector2& phi1, GatePhases phases, double tol) {
    const Matrix w = fold(build_gate(phases)).w;
    const Matrix4 ro = leg_readout();
    const auto g = gated_dimer(w, phi0, phi1);
    CheckResult r;
    r.parts = {sic_residual_left(g.w, ro), sic_residual_right(g.w, ro)};
    r.residual = std::max(r.parts[0], r.parts[1]);
    r.pass = r.residual <= tol;
    return r;
}

CheckResult check_sec(const Vector2& phi0, const Vector2& phi1, GatePhases phases, double tol) {
    const Matrix w = fold(build_gate(phases)).w;
    const auto g = gated_dimer(w, phi0, phi1);
    const Matrix4 ro = leg_readout();
    CheckResult r;
    r.parts = {sec_residual_joint(g.w, ro), sec_residual_next(g.w, w, ro), sec_residual_two_step(phi0, phi1, phases)};
    r.residual = *std::max_element(r.parts.begin(), r.parts.end());
    r.pass = r.residual <= tol;
    return r;
}

std::pair<Vector2, Vector2> StateFamily::generate(double theta) const {
    const Vector2 zero(1, 0), one(0, 1);
    const double s = 1.0 / std::sqrt(2.0);
    const Vector2 plus(s, s), minus(s, -s);
    const Vector2 yp(s, cplx(0, s)), ym(s, cplx(0, -s));
    std::pair<Vector2, Vector2> p;
    if (solvable_case == 'a') {
        if (branch == 1)
            p = {variant ? one : zero, x_rotation(theta, zero)};
        else
            p = {z_rotation(theta, plus), variant ? minus : plus};
    } else {
        if (branch == 1)
            p = {variant ? one : zero, z_rotation(theta, plus)};
        else
            p = {variant ? ym : yp, x_rotation(theta, zero)};
    }
    if (swapped) std::swap(p.first, p.second);
    return p;
}

std::vector<StateFamily> solvable_families(char c) {
    std::vector<StateFamily> out;
    if (c == 'a') {
        out.push_back({'a', 1, 0, false, "|0> x e^{i theta X}|0>"});
        out.push_back({'a', 1, 1, false, "|1> x e^{i theta X}|0>"});
        out.push_back({'a', 2, 0, false, "e^{i theta Z}|+> x |+>"});
        out.push_back({'a', 2, 1, false, "e^{i theta Z}|+> x |->"});
    } else if (c == 'b') {
        for (bool sw : {false, true}) {
            const std::string tag = sw ? " (swapped)" : "";
            out.push_back({'b', 1, 0, sw, "|0> x e^{i theta Z}|+>" + tag});
            out.push_back({'b', 1, 1, sw, "|1> x e^{i theta Z}|+>" + tag});
            out.push_back({'b', 2, 0, sw, "|y+> x e^{i theta X}|0>" + tag});
            out.push_back({'b', 2, 1, sw, "|y-> x e^{i theta X}|0>" + tag});
        }
    } else {
        throw ArgumentError(std::string("unknown solvable case '") + c + "'");
    }
    return out;
}

double family_distance(const Vector2& phi0, const Vector2& phi1, const std::vector<StateFamily>& families) {
    const Vector2 a = normalized(phi0), b = normalized(phi1);
    auto dist = [&](const StateFamily& f, double th) {
        const auto p = f.generate(th);
        return (1.0 - std::norm(p.first.dot(a))) + (1.0 - std::norm(p.second.dot(b)));
    };
    double best = 1e9;
    for (const auto& f : families) {
        const int n = 720;
        int kb = 0;
        double db = 1e9;
        for (int k = 0; k < n; ++k) {
            const double d = dist(f, 2 * kPi * k / n);
            if (d < db) db = d, kb = k;
        }
        double lo = 2 * kPi * (kb - 1) / n, hi = 2 * kPi * (kb + 1) / n;
        for (int it = 0; it < 100; ++it) {
            const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
            if (dist(f, m1) < dist(f, m2)) hi = m2;
            else lo = m1;
        }
        best = std::min({best, db, dist(f, 0.5 * (lo + hi))});
    }
    return std::max(best, 0.0);
}

namespace {

struct Scanner {
    GatePhases phases;
    Matrix w;
    Matrix4 ro;
    ScanTarget which;
    Matrix ro2;
    TwoStep two;

    Scanner(GatePhases p, ScanTarget t)
        : phases(p), w(fold(build_gate(p)).w), ro(leg_readout()), which(t), ro2(kron(ro, ro)), two(p) {}

    double sic(const Vector& gw) const {
        return std::max(sic_residual_left(gw, ro), sic_residual_right(gw, ro));
    }
    double sec(const Vector& gw, const double* x) const {
        return std::max({max_abs(sec_deviation_joint(gw, ro2)), max_abs(sec_deviation_next(gw, w, ro2)),
                         max_abs(two.deviation(bloch_state(x[0], x[1]), bloch_state(x[2], x[3])))});
    }
    std::pair<double, double> residuals(const double* x) const {
        const auto g = gated_dimer(w, bloch_state(x[0], x[1]), bloch_state(x[2], x[3]));
        return {sic(g.w), sec(g.w, x)};
    }
    double objective(const double* x) const {
        const auto g = gated_dimer(w, bloch_state(x[0], x[1]), bloch_state(x[2], x[3]));
        const double s = sic(g.w);
        if (which == ScanTarget::sic) return s;
        return std::max(s, sec(g.w, x));
    }
    // Real and imaginary parts of every deviation entry of the target conditions.
    Eigen::VectorXd deviation(const double* x) const {
        const Vector2 p0 = bloch_state(x[0], x[1]), p1 = bloch_state(x[2], x[3]);
        const auto g = gated_dimer(w, p0, p1);
        std::vector<Vector> parts{sic_deviation_left(g.w, ro), sic_deviation_right(g.w, ro)};
        if (which == ScanTarget::sic_and_sec) {
            parts.push_back(sec_deviation_joint(g.w, ro2));
            parts.push_back(sec_deviation_next(g.w, w, ro2));
            const Matrix m = two.deviation(p0, p1);
            parts.push_back(Eigen::Map<const Vector>(m.data(), m.size()));
        }
        Eigen::Index n = 0;
        for (const auto& v : parts) n += v.size();
        Eigen::VectorXd r(2 * n);
        Eigen::Index k = 0;
        for (const auto& v : parts)
            for (Eigen::Index i = 0; i < v.size(); ++i) {
                r(k++) = v(i).real();
                r(k++) = v(i).imag();
            }
        return r;
    }
    // Levenberg-Marquardt on the deviation vector with a central-difference
    // Jacobian. The solution sets are manifolds, so the damped step converges
    // to a nearby point without needing a unique minimum.
    double refine(double* x) const {
        Eigen::Map<Eigen::Vector4d> xv(x);
        Eigen::VectorXd r = deviation(x);
        double cost = r.squaredNorm(), lambda = 1e-3;
        int slow = 0;
        for (int it = 0; it < 100 && r.lpNorm<Eigen::Infinity>() > 1e-14; ++it) {
            const double before = cost;
            Eigen::MatrixXd jac(r.size(), 4);
            for (int k = 0; k < 4; ++k) {
                const double h = 1e-7, keep = x[k];
                x[k] = keep + h;
                const Eigen::VectorXd rp = deviation(x);
                x[k] = keep - h;
                jac.col(k) = (rp - deviation(x)) / (2 * h);
                x[k] = keep;
            }
            const Eigen::Matrix4d jtj = jac.transpose() * jac;
            const Eigen::Vector4d grad = jac.transpose() * r;
            bool accepted = false;
            while (lambda < 1e12) {
                const Eigen::Matrix4d a = jtj + lambda * Eigen::Matrix4d(jtj.diagonal().asDiagonal()) +
                                          1e-12 * Eigen::Matrix4d::Identity();
                const Eigen::Vector4d step = a.ldlt().solve(-grad);
                const Eigen::Vector4d keep = xv;
                xv += step;
                const Eigen::VectorXd rn = deviation(x);
                if (rn.squaredNorm() < cost) {
                    r = rn;
                    cost = r.squaredNorm();
                    lambda = std::max(lambda * 0.1, 1e-12);
                    accepted = true;
                    break;
                }
                xv = keep;
                lambda *= 10;
            }
            if (!accepted) break;
            // a nonzero local minimum: linear convergence with no end in sight
            slow = cost > 0.5 * before && cost > 1e-20 ? slow + 1 : 0;
            if (slow >= 8) break;
        }
        return objective(x);
    }
};

}  // namespace

std::vector<ScanHit> scan_bloch_grid(GatePhases phases, int resolution, ScanTarget which) {
    if (resolution < 8) throw ArgumentError("scan resolution must be >= 8");
    const Scanner sc(phases, which);
    const double dth = kPi / resolution, dph = 2 * kPi / resolution;
    const double threshold = dth;

    std::vector<std::array<double, 4>> grid;
    for (int a = 0; a <= resolution; ++a)
        for (int b = 0; b < resolution; ++b) {
            if ((a == 0 || a == resolution) && b > 0) continue;  // poles
            for (int c = 0; c <= resolution; ++c)
                for (int d = 0; d < resolution; ++d) {
                    if ((c == 0 || c == resolution) && d > 0) continue;
                    grid.push_back({a * dth, b * dph, c * dth, d * dph});
                }
        }

    // Refinement is independent per grid point; results are merged in grid order.
    std::vector<char> ok(grid.size(), 0);
    const unsigned workers = std::max(1u, std::min(std::thread::hardware_concurrency(), 16u));
    auto work = [&](std::size_t w) {
        for (std::size_t i = w; i < grid.size(); i += workers) {
            double* x = grid[i].data();
            if (sc.objective(x) > threshold) continue;
            ok[i] = sc.refine(x) <= 1e-8;
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }

    std::vector<ScanHit> hits;
    std::vector<std::pair<Vector2, Vector2>> states;
    auto angles = [](const Vector2& v, double& th, double& ph) {
        th = 2 * std::atan2(std::abs(v(1)), std::abs(v(0)));
        ph = std::abs(v(1)) < 1e-12 || std::abs(v(0)) < 1e-12 ? 0.0 : wrap_angle(std::arg(v(1) / v(0)));
    };
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!ok[i]) continue;
        const double* x = grid[i].data();
        const Vector2 s0 = bloch_state(x[0], x[1]), s1 = bloch_state(x[2], x[3]);
        const bool dup = std::any_of(states.begin(), states.end(), [&](const auto& st) {
            return (1.0 - std::norm(st.first.dot(s0))) + (1.0 - std::norm(st.second.dot(s1))) < 1e-8;
        });
        if (dup) continue;
        ScanHit h{};
        angles(s0, h.theta0, h.phi0);
        angles(s1, h.theta1, h.phi1);
        const double y[4] = {h.theta0, h.phi0, h.theta1, h.phi1};
        std::tie(h.residual_sic, h.residual_sec) = sc.residuals(y);
        hits.push_back(h);
        states.emplace_back(s0, s1);
    }
    return hits;
}

bool check_clifford(const Matrix4& u, double tol) {
    if (!is_unitary(u, 1e-10)) throw ArgumentError("check_clifford: gate is not unitary");
    static const char* labels = "IXYZ";
    std::vector<Matrix> basis;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) basis.push_back(kron(pauli(labels[a]), pauli(labels[b])));
    const Matrix gens[4] = {pauli_string("XI"), pauli_string("ZI"), pauli_string("IX"), pauli_string("IZ")};
    for (const auto& g : gens) {
        const Matrix c = u * g * u.adjoint();
        int unit = 0;
        for (const auto& p : basis) {
            const double m = std::abs((p.adjoint() * c).trace() / 4.0);
            if (std::abs(m - 1.0) <= tol) ++unit;
            else if (m > tol) return false;
        }
        if (unit != 1) return false;
    }
    return true;
}

}  // namespace akim
