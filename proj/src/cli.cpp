#include "akim/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "akim/circuit.hpp"
#include "akim/diagnostics.hpp"
#include "akim/duality.hpp"
#include "akim/reduced_dynamics.hpp"

namespace akim::cli {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

double parse_real(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    double x = 0.0;
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (t.empty() || ec != std::errc() || end != t.data() + t.size() || !std::isfinite(x))
        throw ArgumentError(what + ": '" + s + "' is not a finite number");
    return x;
}

long long parse_integer(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    long long x = 0;
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (t.empty() || ec != std::errc() || end != t.data() + t.size())
        throw ArgumentError(what + ": '" + s + "' is not an integer");
    return x;
}

bool parse_bool(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw ArgumentError(what + ": '" + s + "' is not a boolean");
}

Vector2 parse_token(const std::string& t) {
    const double s = 1.0 / std::sqrt(2.0);
    if (t == "0") return {1, 0};
    if (t == "1") return {0, 1};
    if (t == "+") return {s, s};
    if (t == "-") return {s, -s};
    if (t == "y+") return {s, cplx(0, s)};
    if (t == "y-") return {s, cplx(0, -s)};
    throw ArgumentError("unknown single-qubit token '" + t + "' (0 1 + - y+ y-)");
}

std::pair<std::string, std::string> split_descriptor(const std::string& d) {
    const auto c = d.find(':');
    if (c == std::string::npos) return {trim(d), ""};
    return {trim(d.substr(0, c)), d.substr(c + 1)};
}

bool z_basis_descriptor(const std::string& d) {
    const auto [kind, body] = split_descriptor(d);
    if (kind == "zero") return true;
    if (kind != "product") return false;
    for (const auto& t : split(body, ','))
        if (t != "0" && t != "1") return false;
    return true;
}

// ------------------------------------------------------------ formatting

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(cplx_json(m(i, j)));
        rows.push_back(r);
    }
    return rows;
}

json complex_list_json(const std::vector<cplx>& v) {
    json out = json::array();
    for (const auto& z : v) out.push_back(cplx_json(z));
    return out;
}

json state_json(const Vector2& v) { return json::array({cplx_json(v(0)), cplx_json(v(1))}); }

json check_json(const CheckResult& c) { return {{"pass", c.pass}, {"residual", c.residual}, {"parts", c.parts}}; }

std::string num(double x) { return format_number(x); }
std::string boolean(bool b) { return b ? "true" : "false"; }

class Csv {
public:
    explicit Csv(std::vector<std::string> header) : width_(header.size()) { line(header); }
    void row(const std::vector<std::string>& cells) {
        if (cells.size() != width_) throw InternalError("csv row width differs from header");
        line(cells);
    }
    const std::string& text() const { return text_; }

private:
    void line(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) text_ += ',';
            text_ += csv_field(cells[i]);
        }
        text_ += "\r\n";
    }
    std::size_t width_;
    std::string text_;
};

// ------------------------------------------------------------ runs

class Values {
public:
    explicit Values(const std::map<std::string, std::string>& m) : m_(m) {}
    const std::string& str(const std::string& k) const {
        const auto it = m_.find(k);
        if (it == m_.end()) throw InternalError("option '" + k + "' is not registered");
        return it->second;
    }
    int integer(const std::string& k) const {
        const long long x = parse_integer(str(k), "--" + k);
        if (x < -1000000000LL || x > 1000000000LL) throw ArgumentError("--" + k + ": out of range");
        return static_cast<int>(x);
    }
    std::uint64_t u64(const std::string& k) const {
        const std::string t = trim(str(k));
        std::uint64_t x = 0;
        const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
        if (t.empty() || ec != std::errc() || end != t.data() + t.size())
            throw ArgumentError("--" + k + ": '" + t + "' is not a non-negative integer");
        return x;
    }
    double real(const std::string& k) const { return parse_real(str(k), "--" + k); }
    double angle(const std::string& k) const {
        try {
            return parse_angle(str(k));
        } catch (const ArgumentError& e) {
            throw ArgumentError("--" + k + ": " + e.what());
        }
    }
    bool flag(const std::string& k) const { return parse_bool(str(k), "--" + k); }
    GatePhases phases() const { return {angle("g0"), angle("g1")}; }

private:
    const std::map<std::string, std::string>& m_;
};

struct Run {
    std::vector<std::pair<std::string, double>> tolerances;
    std::vector<Check> checks;
    std::vector<std::pair<std::string, std::string>> files;

    void tolerance(const std::string& name, double v) { tolerances.emplace_back(name, v); }
    void check(const std::string& name, bool pass, double residual, double tol) {
        checks.push_back({name, pass, residual, tol});
    }
    void check_le(const std::string& name, double residual, double tol) { check(name, residual <= tol, residual, tol); }
    void file(const std::string& name, std::string content) { files.emplace_back(name, std::move(content)); }
    void json_file(const std::string& name, const json& j) { file(name, j.dump(2) + "\n"); }
};

struct Command {
    std::string name, help;
    std::vector<std::array<std::string, 3>> options;  // name, default, help
    std::vector<std::array<std::string, 3>> flags;    // name, default, help
    std::function<void(const Values&, Run&)> body;
};

bool near_angle(double a, double b) {
    const double d = std::remainder(a - b, 2 * kPi);
    return std::abs(d) <= 1e-12;
}

// Solvable case of a phase pair: 'a' (g0 in {0, pi}), 'b' (pi/2, pi/2), 'c' (pi/2, 3pi/2), else 0.
char detect_case(GatePhases p) {
    if (near_angle(p.g0, 0.0) || near_angle(p.g0, kPi)) return 'a';
    if (near_angle(p.g0, kPi / 2) && near_angle(p.g1, kPi / 2)) return 'b';
    if (near_angle(p.g0, kPi / 2) && near_angle(p.g1, 3 * kPi / 2)) return 'c';
    return 0;
}

char resolve_case(const std::string& opt, GatePhases p) {
    const char detected = detect_case(p);
    if (opt == "auto") return detected;
    if (opt == "none") return 0;
    if (opt.size() == 1 && (opt[0] == 'a' || opt[0] == 'b' || opt[0] == 'c')) {
        if (opt[0] != detected)
            throw ArgumentError(std::string("--case ") + opt + " does not match the phases (g0=" + num(p.g0) +
                                ", g1=" + num(p.g1) + ")");
        return detected;
    }
    throw ArgumentError("--case: expected auto, none, a, b or c");
}

std::string case_label(char c) { return c ? std::string(1, c) : std::string("none"); }

DensityMatrix pure_density(const PureState& psi) { return DensityMatrix::pure(psi); }

// ------------------------------------------------------------ subcommands

void run_gate(const Values& v, Run& run) {
    const GatePhases ph = v.phases();
    const double tol = v.real("tol");
    run.tolerance("tol", tol);
    run.tolerance("tiles", 1e-12);
    const Matrix4 u = build_gate(ph);
    const double tiles = max_abs(u - build_gate_from_tiles(ph));
    const double unit = max_abs(u * u.adjoint() - Matrix4::Identity());
    const CheckResult d = check_2du(ph, tol);
    const bool clifford = check_clifford(u);
    json out{{"g0", ph.g0}, {"g1", ph.g1}, {"gate", matrix_json(u)}, {"tiles_residual", tiles},
             {"unitarity_residual", unit}, {"second_level_dual_unitary", check_json(d)}, {"clifford", clifford}};
    if (clifford) {
        const LocalEquivalence eq = find_local_equivalence(u, cnot());
        out["cnot_equivalence"] = {{"found", eq.found}, {"clifford_indices", eq.index}, {"residual", eq.residual}};
    }
    run.check_le("tiles", tiles, 1e-12);
    run.check_le("unitary", unit, 1e-12);
    run.check("2du", d.pass, d.residual, tol);
    run.json_file("gate.json", out);
}

void run_check_duality(const Values& v, Run& run) {
    const GatePhases ph = v.phases();
    const double tol = v.real("tol");
    const std::string require = v.str("require");
    if (require != "none" && require != "sic" && require != "sec")
        throw ArgumentError("--require: expected none, sic or sec");
    const int grid = v.integer("grid");
    if (grid < 0 || grid > 256) throw ArgumentError("--grid: expected 0..256");
    run.tolerance("tol", tol);
    const auto [phi0, phi1] = parse_dimer(v.str("bath"));
    const CheckResult d = check_2du(ph, tol), sic = check_sic(phi0, phi1, ph, tol), sec = check_sec(phi0, phi1, ph, tol);
    json out{{"g0", ph.g0}, {"g1", ph.g1}, {"phi0", state_json(phi0)}, {"phi1", state_json(phi1)},
             {"second_level_dual_unitary", check_json(d)}, {"sic", check_json(sic)}, {"sec", check_json(sec)},
             {"clifford", check_clifford(build_gate(ph))}, {"solvable_case", case_label(detect_case(ph))}};
    run.check("2du", d.pass, d.residual, tol);
    if (require != "none") run.check("sic", sic.pass, sic.residual, tol);
    if (require == "sec") run.check("sec", sec.pass, sec.residual, tol);

    if (grid > 0) {
        Csv csv({"g0", "g1", "residual_2du", "clifford", "expected_clifford"});
        double worst = 0.0;
        int mismatches = 0;
        for (int i = 0; i < grid; ++i)
            for (int j = 0; j < grid; ++j) {
                const GatePhases g(2 * kPi * i / grid, 2 * kPi * j / grid);
                const double r = check_2du(g, tol).residual;
                const bool c = check_clifford(build_gate(g));
                auto quarter = [](double x) { return std::abs(std::remainder(x, kPi / 2)) <= 1e-9; };
                const bool expected = quarter(g.g0) && quarter(g.g1);
                worst = std::max(worst, r);
                mismatches += c != expected;
                csv.row({num(g.g0), num(g.g1), num(r), boolean(c), boolean(expected)});
            }
        out["grid"] = {{"size", grid}, {"max_residual_2du", worst}, {"clifford_mismatches", mismatches}};
        run.check_le("2du-grid", worst, tol);
        run.check("clifford-grid", mismatches == 0, mismatches, 0);
        run.file("check-duality-grid.csv", csv.text());
    }
    run.json_file("check-duality.json", out);
}

void run_scan(const Values& v, Run& run) {
    const GatePhases ph = v.phases();
    const int res = v.integer("resolution");
    const std::string target = v.str("target");
    if (target != "sic" && target != "sec") throw ArgumentError("--target: expected sic or sec");
    const std::string fam_opt = v.str("families");
    char fam = 0;
    if (fam_opt == "auto") {
        fam = detect_case(ph);
        if (fam == 'c') fam = 0;
    } else if (fam_opt == "a" || fam_opt == "b") {
        fam = fam_opt[0];
    } else if (fam_opt != "none") {
        throw ArgumentError("--families: expected auto, a, b or none");
    }
    const double fam_tol = v.real("family-tol");
    run.tolerance("refine", 1e-8);
    run.tolerance("family", fam_tol);

    const auto hits = scan_bloch_grid(ph, res, target == "sic" ? ScanTarget::sic : ScanTarget::sic_and_sec);
    const auto families = fam ? solvable_families(fam) : std::vector<StateFamily>{};
    Csv csv({"theta0", "phi0", "theta1", "phi1", "residual_sic", "residual_sec", "family_distance"});
    double worst_res = 0.0, worst_dist = 0.0;
    int off = 0;
    for (const auto& h : hits) {
        const double r = target == "sic" ? h.residual_sic : std::max(h.residual_sic, h.residual_sec);
        worst_res = std::max(worst_res, r);
        std::string dist;
        if (fam) {
            const double d = family_distance(bloch_state(h.theta0, h.phi0), bloch_state(h.theta1, h.phi1), families);
            worst_dist = std::max(worst_dist, d);
            off += d > fam_tol;
            dist = num(d);
        }
        csv.row({num(h.theta0), num(h.phi0), num(h.theta1), num(h.phi1), num(h.residual_sic), num(h.residual_sec),
                 dist});
    }
    json out{{"g0", ph.g0}, {"g1", ph.g1}, {"resolution", res}, {"target", target == "sic" ? "sic" : "sic_and_sec"},
             {"hits", hits.size()}, {"max_residual", worst_res}, {"families", case_label(fam)}};
    if (fam) {
        out["max_family_distance"] = worst_dist;
        out["off_family"] = off;
    }
    run.check_le("refined-residual", worst_res, 1e-8);
    if (fam && target == "sec") run.check("exhausted-by-families", off == 0, worst_dist, fam_tol);
    run.file("scan-solvable.csv", csv.text());
    run.json_file("scan-solvable.json", out);
}

void run_quench(const Values& v, Run& run) {
    const GatePhases ph = v.phases();
    const int na = v.integer("na"), tmax = v.integer("tmax"), margin = v.integer("margin");
    const double tol = v.real("tol");
    if (tmax < 0) throw ArgumentError("--tmax must be >= 0");
    run.tolerance("tol", tol);
    const std::string state = v.str("state");
    std::string bath = v.str("bath");
    if (bath.empty()) bath = is_dimer_descriptor(state) ? state : "zero";
    const PureState psi = parse_state(state, na);
    const auto [phi0, phi1] = parse_dimer(bath);
    const CheckResult sic = check_sic(phi0, phi1, ph, 1e-10);
    const Channel ch = build_channel(na, ph);

    Csv csv({"t", "S_oracle", "S_im", "S_channel", "diff_im_oracle", "diff_channel_oracle", "diff_channel_im"});
    Matrix rho_ch = psi.amplitudes * psi.amplitudes.adjoint();
    double w_im = 0.0, w_ch = 0.0, w_chim = 0.0;
    for (int t = 0; t <= tmax; ++t) {
        const DensityMatrix oracle = quench_oracle(na, psi, phi0, phi1, ph, t, {margin});
        DensityMatrix im = pure_density(psi);
        if (t > 0) {
            const auto [left, right] = bath_ims(t, ph, phi0, phi1);
            im = rdm_via_im(psi, t, ph, left, right);
        }
        const DensityMatrix chd(na, rho_ch, 1e-8);
        const double a = max_abs(im.matrix - oracle.matrix), b = max_abs(rho_ch - oracle.matrix),
                     c = max_abs(rho_ch - im.matrix);
        w_im = std::max(w_im, a);
        w_ch = std::max(w_ch, b);
        w_chim = std::max(w_chim, c);
        csv.row({std::to_string(t), num(entropy(oracle)), num(entropy(im)), num(entropy(chd)), num(a), num(b),
                 num(c)});
        rho_ch = ch.apply(rho_ch);
    }
    json out{{"na", na},
             {"g0", ph.g0},
             {"g1", ph.g1},
             {"tmax", tmax},
             {"phi0", state_json(phi0)},
             {"phi1", state_json(phi1)},
             {"bath_sic", check_json(sic)},
             {"max_diff_im_oracle", w_im},
             {"max_diff_channel_oracle", w_ch},
             {"max_diff_channel_im", w_chim},
             {"channel_compared", sic.pass}};
    run.check_le("im-vs-oracle", w_im, tol);
    if (sic.pass) {
        run.check_le("channel-vs-oracle", w_ch, tol);
        run.check_le("channel-vs-im", w_chim, tol);
    }
    run.file("quench.csv", csv.text());
    run.json_file("quench.json", out);
}

Reference auto_reference(const std::string& state, GatePhases ph) {
    const char c = detect_case(ph);
    if (c == 'b' && z_basis_descriptor(state)) return Reference::saturate_half;
    if (!is_dimer_descriptor(state)) return Reference::none;
    const auto [p0, p1] = parse_dimer(state);
    const bool sic = check_sic(p0, p1, ph, 1e-10).pass;
    if ((c == 'a' || c == 'b') && sic && check_sec(p0, p1, ph, 1e-10).pass) return Reference::saturate_full;
    return sic ? Reference::early_ramp : Reference::none;
}

void run_trajectory(const Values& v, Run& run) {
    const GatePhases ph = v.phases();
    const int na = v.integer("na");
    const int tmax = v.str("tmax").empty() ? na + 2 : v.integer("tmax");
    const double tol = v.real("tol"), flat_tol = v.real("flat-tol");
    run.tolerance("tol", tol);
    run.tolerance("flat", flat_tol);
    run.tolerance("renyi", 1e-8);
    const std::string state = v.str("state");
    const PureState psi = parse_state(state, na);
    const Reference ref = v.str("reference") == "auto" ? auto_reference(state, ph) : parse_reference(v.str("reference"));
    const TrajectoryReport r = entanglement_trajectory(na, ph, psi, tmax, ref, state, flat_tol);

    Csv csv({"t", "S", "expected", "deviation", "flat", "renyi_spread"});
    int not_flat = 0;
    double spread = 0.0;
    for (std::size_t t = 0; t < r.entropy.size(); ++t) {
        const auto& e = r.expected[t];
        if (e) {
            not_flat += !r.flat[t];
            spread = std::max(spread, r.renyi_spread[t]);
        }
        csv.row({std::to_string(t), num(r.entropy[t]), e ? num(*e) : "", e ? num(std::abs(r.entropy[t] - *e)) : "",
                 boolean(r.flat[t]), num(r.renyi_spread[t])});
    }
    json out{{"na", na},         {"g0", ph.g0},          {"g1", ph.g1},
             {"state", state},   {"tmax", tmax},         {"reference", to_string(ref)},
             {"entropy", r.entropy}, {"max_deviation", r.max_deviation}};
    if (ref != Reference::none) {
        run.check_le("law", r.max_deviation, tol);
        run.check("flat", not_flat == 0, not_flat, 0);
        run.check_le("renyi", spread, 1e-8);
    }
    run.file("trajectory.csv", csv.text());
    run.json_file("trajectory.json", out);
}

json pauli_json(const Matrix& x, int n) {
    const auto c = pauli_coefficients(x, n);
    json out = json::object();
    for (std::size_t i = 0; i < c.size(); ++i)
        if (std::abs(c[i]) > 1e-12) out[pauli_label(i, n)] = c[i];
    return out;
}

void run_channel_spectrum(const Values& v, Run& run) {
    const GatePhases ph = v.phases();
    const int na = v.integer("na");
    const double tol = v.real("tol");
    run.tolerance("tol", tol);
    run.tolerance("strict", 1e-6);
    const char c = resolve_case(v.str("case"), ph);
    const Channel ch = build_channel(na, ph, na <= kMaxDenseChannelQubits);
    const Eigen::Index d = Eigen::Index{1} << na;
    Matrix completeness = Matrix::Zero(d, d);
    for (const auto& k : ch.kraus) completeness += k.adjoint() * k;
    const double tp = max_abs(completeness - Matrix::Identity(d, d));
    const double unital = max_abs(ch.apply(Matrix::Identity(d, d)) - Matrix::Identity(d, d));
    const ChannelSpectrum sp = channel_spectrum(ch);
    json basis = json::array();
    for (const auto& b : sp.fixed_basis) basis.push_back(pauli_json(b, na));
    json out{{"na", na},
             {"g0", ph.g0},
             {"g1", ph.g1},
             {"solvable_case", case_label(c)},
             {"trace_preservation_residual", tp},
             {"unitality_residual", unital},
             {"gap", sp.gap},
             {"stabilization_index", sp.stabilization_index},
             {"fixed_dimension", sp.fixed_dimension},
             {"fixed_basis_pauli", basis},
             {"eigenvalues", complex_list_json(sp.eigenvalues)}};
    run.check_le("trace-preserving", tp, tol);
    run.check_le("unital", unital, tol);

    if (c == 'a' || c == 'b') {
        const FiniteTimeReport f = finite_time_identity(c, na, ph);
        const int expected = c == 'a' ? 1 : 1 << (na - 1);
        out["finite_time"] = {{"k", f.k},
                              {"residual", f.residual},
                              {"residual_before", f.residual_before},
                              {"fixed_dimension", f.fixed_dimension},
                              {"expected_fixed_dimension", expected}};
        run.check_le("finite-time", f.residual, tol);
        run.check("finite-time-minimal", f.residual_before > 1e-6, f.residual_before, 1e-6);
        run.check("fixed-dimension", f.fixed_dimension == expected, std::abs(f.fixed_dimension - expected), 0);
    }
    if (c == 'b') {
        const CaseBReport b = case_b_structure(na);
        out["case_b"] = {{"assignment", b.assignment},
                         {"composed_residual", b.composed_residual},
                         {"other_assignment_residual", b.other_assignment_residual},
                         {"generators", b.generators},
                         {"group_size", b.group_size},
                         {"invariance_residual", b.invariance_residual},
                         {"abelian", b.abelian}};
        run.check_le("composed-channel", b.composed_residual, 1e-9);
        run.check_le("invariants", b.invariance_residual, tol);
    }
    if (c == 'c') {
        const CaseCReport r = case_c_cycle(na);
        out["case_c"] = {{"plus_one", r.plus_one},         {"minus_one", r.minus_one},
                         {"min_real_eigenvalue", r.min_real_eigenvalue},
                         {"even_t", r.even_t},             {"odd_t", r.odd_t},
                         {"even_residual", r.even_residual}, {"odd_residual", r.odd_residual}};
        run.check("minus-one", r.minus_one > 0, std::abs(r.min_real_eigenvalue + 1.0), 1e-8);
        run.check_le("even-cycle", r.even_residual, 1e-9);
        run.check_le("odd-cycle", r.odd_residual, 1e-9);
    }
    run.json_file("channel-spectrum.json", out);
}

void run_transfer(const Values& v, Run& run) {
    const GatePhases ph = v.phases();
    const int t = v.integer("t");
    const double tol = v.real("tol");
    run.tolerance("tol", tol);
    run.tolerance("spectrum", 1e-8);
    const auto [phi0, phi1] = parse_dimer(v.str("bath"));
    const CheckResult sic = check_sic(phi0, phi1, ph, 1e-10);
    const TransferMatrix tm = build_transfer_matrix(t, ph, phi0, phi1);
    const TransferReport r = transfer_checks(tm);
    json out{{"t", t},
             {"g0", ph.g0},
             {"g1", ph.g1},
             {"dimension", tm.matrix.rows()},
             {"bath_sic", check_json(sic)},
             {"left_fixed_residual", r.left_fixed_residual},
             {"right_fixed_residual", r.right_fixed_residual},
             {"power_rank", r.power_rank},
             {"power_residual", r.power_residual},
             {"spectrum_residual", r.spectrum_residual},
             {"eigenvalues", complex_list_json(r.eigenvalues)},
             {"raw_eigenvalues", complex_list_json(r.raw_eigenvalues)}};
    if (sic.pass) {
        run.check_le("left-fixed-point", r.left_fixed_residual, tol);
        run.check_le("right-fixed-point", r.right_fixed_residual, tol);
        run.check_le("spectrum", r.spectrum_residual, 1e-8);
        run.check("power-rank", r.power_rank == 1, std::abs(r.power_rank - 1), 0);
    }
    run.json_file("transfer.json", out);
}

void run_sff(const Values& v, Run& run) {
    EnsembleSpec e;
    e.L = v.integer("l");
    const std::string b = v.str("boundary");
    if (b != "periodic" && b != "open") throw ArgumentError("--boundary: expected periodic or open");
    e.boundary = b == "periodic" ? Boundary::periodic : Boundary::open;
    e.mode = parse_ensemble(v.str("ensemble"));
    e.samples = v.integer("samples");
    e.seed = v.u64("seed");
    const int tmax = v.integer("tmax");
    const double threshold = v.real("threshold");
    const auto window = split(v.str("coe-window"), ':');
    if (window.size() != 2) throw ArgumentError("--coe-window: expected lo:hi");
    const int lo = static_cast<int>(parse_integer(window[0], "--coe-window")),
              hi = static_cast<int>(parse_integer(window[1], "--coe-window"));
    run.tolerance("revival_threshold", threshold);
    run.tolerance("coe_standard_errors", 3.0);

    const SFFSeries s = sff(e, tmax);
    const RevivalReport rev = detect_revivals(s, e.L, threshold);
    Csv csv({"t", "K", "stderr", "coe", "ratio", "z"});
    double max_z = 0.0;
    int worst_t = 0;
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        const int t = s.t[i];
        if (t == 0) {
            csv.row({"0", num(s.mean[i]), num(s.stderr_[i]), "", "", ""});
            continue;
        }
        const double coe = coe_reference(t, e.L);
        const double z = s.stderr_[i] > 0 ? (s.mean[i] - coe) / s.stderr_[i] : 0.0;
        if (t >= lo && t <= hi && std::abs(z) > max_z) {
            max_z = std::abs(z);
            worst_t = t;
        }
        csv.row({std::to_string(t), num(s.mean[i]), num(s.stderr_[i]), num(coe), num(s.mean[i] / coe), num(z)});
    }
    json out{{"l", e.L},
             {"boundary", b},
             {"ensemble", to_string(e.mode)},
             {"samples", s.samples},
             {"seed", e.seed},
             {"tmax", tmax},
             {"coe", {{"window", {lo, hi}}, {"max_abs_z", max_z}, {"worst_t", worst_t}, {"within_3_se", max_z <= 3.0}}},
             {"revivals",
              {{"threshold", rev.threshold},
               {"max_ratio", rev.max_ratio},
               {"argmax_t", rev.argmax_t},
               {"times", rev.times}}}};
    const double k0 = s.mean.empty() ? 0.0 : std::abs(s.mean[0] - std::ldexp(1.0, 2 * e.L));
    run.check("k0-exact", k0 == 0.0, k0, 0.0);
    run.file("sff.csv", csv.text());
    run.json_file("sff.json", out);
}

struct StabilizerEval {
    double entropy = 0.0;
    StabilizerSet set;
    std::vector<std::vector<double>> profile;  // [cut - 1][i]
    double involution = 0.0, commutation = 0.0, traceless = 0.0;
};

StabilizerEval evaluate_stabilizers(int na, GatePhases ph, const PureState& psi, int t, double tol) {
    const Channel ch = build_channel(na, ph);
    const DensityMatrix rho(na, ch.apply_power(psi.amplitudes * psi.amplitudes.adjoint(), t), 1e-8);
    StabilizerEval e;
    e.entropy = entropy(rho);
    e.set = stabilizer_decomposition(rho, tol);
    const Eigen::Index d = Eigen::Index{1} << na;
    const auto& ops = e.set.operators;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        e.involution = std::max(e.involution, max_abs(ops[i] * ops[i] - Matrix::Identity(d, d)));
        e.traceless = std::max(e.traceless, std::abs(ops[i].trace()) / static_cast<double>(d));
        for (std::size_t j = i + 1; j < ops.size(); ++j)
            e.commutation = std::max(e.commutation, max_abs(ops[i] * ops[j] - ops[j] * ops[i]));
    }
    for (int cut = 1; cut < na; ++cut) e.profile.push_back(stabilizer_opent_profile(e.set, cut));
    return e;
}

void run_stabilizers(const Values& v, Run& run) {
    const GatePhases ph = v.phases();
    const int na = v.integer("na"), t = v.integer("t");
    const double tol = v.real("tol");
    if (t < 0) throw ArgumentError("--t must be >= 0");
    run.tolerance("tol", tol);
    run.tolerance("reconstruction", 1e-8);
    const std::string state = v.str("state");
    const PureState psi = parse_state(state, na);
    json out{{"na", na}, {"g0", ph.g0}, {"g1", ph.g1}, {"state", state}, {"t", t}};
    try {
        const StabilizerEval e = evaluate_stabilizers(na, ph, psi, t, tol);
        Csv csv({"index", "label", "cut", "operator_entanglement"});
        double max_opent = 0.0;
        for (std::size_t i = 0; i < e.set.operators.size(); ++i)
            for (int cut = 1; cut < na; ++cut) {
                const double x = e.profile[cut - 1][i];
                max_opent = std::max(max_opent, x);
                csv.row({std::to_string(i), e.set.labels[i], std::to_string(cut), num(x)});
            }
        out["entropy"] = e.entropy;
        out["m"] = e.set.operators.size();
        out["pauli_count"] = e.set.pauli_count;
        out["labels"] = e.set.labels;
        out["reconstruction_residual"] = e.set.residual;
        out["involution_residual"] = e.involution;
        out["commutation_residual"] = e.commutation;
        out["traceless_residual"] = e.traceless;
        out["operator_entanglement_by_cut"] = e.profile;
        out["max_operator_entanglement"] = max_opent;
        run.check("decomposable", true, 0.0, tol);
        run.check_le("reconstruction", e.set.residual, 1e-8);
        run.check_le("involution", e.involution, tol);
        run.check_le("commutation", e.commutation, tol);
        run.check_le("traceless", e.traceless, tol);
        run.file("stabilizers.csv", csv.text());
    } catch (const NotDecomposableError& err) {
        out["error"] = err.what();
        out["spectrum"] = err.spectrum;
        run.check("decomposable", false, 1.0, tol);
    }

    if (v.flag("heatmap")) {
        const int grid = v.integer("grid");
        if (grid < 1 || grid > 128) throw ArgumentError("--grid: expected 1..128");
        const int cut = na / 2;
        Csv csv({"g1", "theta", "entropy", "m", "max_operator_entanglement", "reconstruction_residual"});
        double worst = 0.0, peak = 0.0;
        int failures = 0;
        for (int i = 0; i < grid; ++i)
            for (int j = 0; j < grid; ++j) {
                const double g1 = 2 * kPi * i / grid, theta = kPi * j / grid;
                const StateFamily f{'a', 1, 0, false, ""};
                const auto [a, b] = f.generate(theta);
                std::vector<Vector2> sites;
                for (int k = 0; k < na; ++k) sites.push_back(k % 2 ? b : a);
                try {
                    const StabilizerEval e =
                        evaluate_stabilizers(na, GatePhases(ph.g0, g1), PureState::product(sites), t, tol);
                    double mx = 0.0;
                    for (double x : e.profile[cut - 1]) mx = std::max(mx, x);
                    worst = std::max(worst, e.set.residual);
                    peak = std::max(peak, mx);
                    csv.row({num(g1), num(theta), num(e.entropy), std::to_string(e.set.operators.size()), num(mx),
                             num(e.set.residual)});
                } catch (const NotDecomposableError&) {
                    ++failures;
                    csv.row({num(g1), num(theta), "", "", "", ""});
                }
            }
        out["heatmap"] = {{"grid", grid}, {"cut", cut}, {"max_operator_entanglement", peak},
                          {"max_reconstruction_residual", worst}, {"not_decomposable", failures}};
        run.check_le("heatmap-reconstruction", worst, 1e-8);
        run.check("heatmap-decomposable", failures == 0, failures, 0);
        run.file("stabilizers-heatmap.csv", csv.text());
    }
    run.json_file("stabilizers.json", out);
}

// Desk-scale run of every invariant suite.
void run_verify_all(const Values& v, Run& run) {
    const int na = v.integer("na");
    if (na < 2 || na % 2 != 0 || na > 6) throw ArgumentError("--na: expected an even value in 2..6");
    run.tolerance("identity", 1e-10);
    run.tolerance("oracle", 1e-9);
    run.tolerance("law", 1e-7);
    json out{{"na", na}};
    auto note = [&](const std::string& name, double residual, double tol) {
        run.check_le(name, residual, tol);
        out["suites"][name] = {{"residual", residual}, {"tolerance", tol}, {"pass", residual <= tol}};
    };

    double w2 = 0.0;
    int cliff = 0;
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) {
            const GatePhases g(2 * kPi * i / 16, 2 * kPi * j / 16);
            w2 = std::max(w2, check_2du(g).residual);
            cliff += check_clifford(build_gate(g)) != (i % 4 == 0 && j % 4 == 0);
        }
    note("2du-grid", w2, 1e-12);
    note("clifford-grid", cliff, 0);

    double wf = 0.0;
    for (char c : {'a', 'b'}) {
        std::vector<GatePhases> phases;
        if (c == 'a') phases = {{0.0, 0.3}, {0.0, 1.7}, {kPi, 5.0}};
        else phases = {{kPi / 2, kPi / 2}};
        for (const auto& f : solvable_families(c))
            for (double th : {0.0, kPi / 5, kPi / 2})
                for (const auto& g : phases) {
                    const auto [a, b] = f.generate(th);
                    wf = std::max({wf, check_sic(a, b, g).residual, check_sec(a, b, g).residual});
                }
    }
    note("families", wf, 1e-10);

    const Vector2 zero(1, 0);
    const TransferReport tr = transfer_checks(build_transfer_matrix(2, {0.0, 0.7}, zero, zero));
    note("transfer", std::max({tr.left_fixed_residual, tr.right_fixed_residual, tr.spectrum_residual}), 1e-10);

    const int nq = std::min(na, 4);
    const GatePhases gq(1.1, 2.3);
    const PureState pz = PureState::product(std::vector<Vector2>(nq, zero));
    const Channel cq = build_channel(nq, gq);
    Matrix rho = pz.amplitudes * pz.amplitudes.adjoint();
    double wq = 0.0;
    for (int t = 1; t <= 3; ++t) {
        rho = cq.apply(rho);
        const DensityMatrix o = quench_oracle(nq, pz, zero, zero, gq, t);
        const auto [l, r] = bath_ims(t, gq, zero, zero);
        const DensityMatrix im = rdm_via_im(pz, t, gq, l, r);
        wq = std::max({wq, max_abs(o.matrix - im.matrix), max_abs(o.matrix - rho), max_abs(im.matrix - rho)});
    }
    note("triangulation", wq, 1e-9);

    const auto [a0, a1] = solvable_families('a')[0].generate(0.3);
    std::vector<Vector2> sites;
    for (int k = 0; k < na; ++k) sites.push_back(k % 2 ? a1 : a0);
    const TrajectoryReport law =
        entanglement_trajectory(na, {0.0, 1.7}, PureState::product(sites), na + 2, Reference::saturate_full);
    note("law-case-a", law.max_deviation, 1e-7);
    const TrajectoryReport half = entanglement_trajectory(na, {kPi / 2, kPi / 2},
                                                          PureState::product(std::vector<Vector2>(na, zero)),
                                                          na + 2, Reference::saturate_half);
    note("law-case-b-zero", half.max_deviation, 1e-7);

    const FiniteTimeReport fa = finite_time_identity('a', na, {0.0, 0.7});
    const FiniteTimeReport fb = finite_time_identity('b', na, {kPi / 2, kPi / 2});
    note("finite-time-a", std::max(fa.residual, fa.fixed_dimension == 1 ? 0.0 : 1.0), 1e-10);
    note("finite-time-b", std::max(fb.residual, fb.fixed_dimension == (1 << (na - 1)) ? 0.0 : 1.0), 1e-10);
    const CaseCReport cc = case_c_cycle(na);
    note("case-c", std::max({cc.even_residual, cc.odd_residual, std::abs(cc.min_real_eigenvalue + 1.0)}), 1e-8);

    const StabilizerEval se = evaluate_stabilizers(na, {0.0, 0.7}, PureState::product(sites), 1, 1e-9);
    note("stabilizers", std::max({se.set.residual, se.involution, se.commutation}), 1e-8);

    EnsembleSpec e;
    e.L = 4;
    e.samples = 20;
    const SFFSeries s = sff(e, 4);
    note("sff-k0", std::abs(s.mean[0] - 256.0), 0.0);

    run.json_file("verify-all.json", out);
}

std::vector<Command> commands() {
    const std::array<std::string, 3> g0{"g0", "0", "phase g0 (radians, or multiples of pi: 0.5pi)"};
    const std::array<std::string, 3> g1{"g1", "0.7", "phase g1"};
    std::vector<Command> c;
    c.push_back({"gate", "Local gate u(g0,g1): tiles, unitarity, 2DU, Clifford",
                 {g0, g1, {"tol", "1e-12", "2DU tolerance"}}, {}, run_gate});
    c.push_back({"check-duality", "2DU, SIC and SEC for a bath dimer; optional (g0,g1) grid",
                 {g0, g1,
                  {"bath", "zero", "bath dimer descriptor"},
                  {"require", "none", "conditions that must hold: none, sic, sec"},
                  {"grid", "0", "also sweep an N x N grid of phases (0: off)"},
                  {"tol", "1e-10", "residual tolerance"}},
                 {}, run_check_duality});
    c.push_back({"scan-solvable", "Bloch-grid scan for SIC or SIC+SEC dimers",
                 {g0, g1,
                  {"resolution", "8", "grid points per Bloch angle (>= 8)"},
                  {"target", "sec", "sic or sec (SIC and SEC)"},
                  {"families", "auto", "compare hits to the solvable families: auto, a, b, none"},
                  {"family-tol", "1e-6", "fidelity distance counted as on-family"}},
                 {}, run_scan});
    c.push_back({"quench", "Oracle vs influence-matrix vs channel reduced states",
                 {{"na", "4", "subsystem size N_A"}, g0, g1,
                  {"state", "zero", "A-state descriptor"},
                  {"bath", "", "bath dimer descriptor (default: the A-state dimer, else zero)"},
                  {"tmax", "3", "last time step"},
                  {"margin", "2", "extra bath sites beyond the light cone"},
                  {"tol", "1e-9", "max-norm agreement"}},
                 {}, run_quench});
    c.push_back({"trajectory", "Entanglement entropy S(t) of A under the reduced channel",
                 {{"na", "8", "subsystem size N_A"}, g0, g1,
                  {"state", "case-a:theta=0", "A-state descriptor"},
                  {"tmax", "", "last time step (default N_A + 2)"},
                  {"reference", "auto", "auto, min(2t,N_A), min(2t,N_A/2), early-2t, none"},
                  {"tol", "1e-7", "deviation from the reference (bits)"},
                  {"flat-tol", "1e-9", "flat entanglement spectrum tolerance"}},
                 {}, run_trajectory});
    c.push_back({"channel-spectrum", "Spectrum, fixed space and case structure of the channel",
                 {{"na", "4", "subsystem size N_A"}, g0, g1,
                  {"case", "auto", "auto, none, a, b, c"},
                  {"tol", "1e-10", "identity tolerance"}},
                 {}, run_channel_spectrum});
    c.push_back({"transfer", "Spatial transfer matrix of a bath dimer",
                 {{"t", "2", "number of time steps"}, g0, g1,
                  {"bath", "zero", "bath dimer descriptor"},
                  {"tol", "1e-10", "fixed-point tolerance"}},
                 {}, run_transfer});
    c.push_back({"sff", "Spectral form factor of a random-phase ensemble",
                 {{"l", "8", "chain length"},
                  {"boundary", "periodic", "periodic or open"},
                  {"ensemble", "random", "random, g0-zero, g0-zero-shared"},
                  {"samples", "1000", "number of realisations"},
                  {"seed", "0", "ensemble seed"},
                  {"tmax", "100", "last time step"},
                  {"threshold", "10", "revival threshold on K/COE"},
                  {"coe-window", "5:50", "t range for the COE comparison"}},
                 {}, run_sff});
    c.push_back({"stabilizers", "Stabilizer decomposition of rho_A(t) and its operator entanglement",
                 {{"na", "6", "subsystem size N_A"}, {"g0", "0", "phase g0"}, g1,
                  {"state", "case-a:theta=0.4", "A-state descriptor"},
                  {"t", "2", "time step"},
                  {"grid", "16", "heatmap points per axis"},
                  {"tol", "1e-9", "invariant tolerance"}},
                 {{"heatmap", "false", "sweep g1 in [0,2pi) x theta in [0,pi) for |0> e^{i theta X}|0> states"}},
                 run_stabilizers});
    c.push_back({"verify-all", "Every invariant suite at desk scale",
                 {{"na", "4", "subsystem size N_A"}}, {}, run_verify_all});
    return c;
}

std::string default_out_dir() {
    const char* env = std::getenv("AKIM_OUT_DIR");
    return env && *env ? env : ".";
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + p.string() + " for writing");
    f << content;
    f.close();
    if (!f) throw IoError("write to " + p.string() + " failed");
}

json manifest_json(const RunConfig& cfg, const Run& run) {
    json tol = json::object();
    for (const auto& [k, v] : run.tolerances) tol[k] = v;
    json checks = json::array();
    bool pass = true;
    for (const auto& c : run.checks) {
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"residual", c.residual}, {"tolerance", c.tolerance}});
        pass = pass && c.pass;
    }
    json files = json::array();
    for (const auto& f : run.files) files.push_back(f.first);
    return {{"artifact", "akim"},
            {"version", kVersion},
            {"subcommand", cfg.subcommand},
            {"config", json::parse(to_json_text(cfg))},
            {"tolerances", tol},
            {"checks", checks},
            {"status", pass ? "pass" : "fail"},
            {"files", files}};
}

}  // namespace

// ------------------------------------------------------------ public helpers

double parse_angle(const std::string& raw) {
    const std::string s = trim(raw);
    const auto p = s.find("pi");
    if (p == std::string::npos) return parse_real(s, "angle");
    const std::string coef = trim(s.substr(0, p)), rest = trim(s.substr(p + 2));
    double c = 1.0;
    if (coef == "-") c = -1.0;
    else if (!coef.empty() && coef != "+") c = parse_real(coef, "angle");
    double den = 1.0;
    if (!rest.empty()) {
        if (rest[0] != '/') throw ArgumentError("angle: '" + raw + "' is not of the form [c]pi[/d]");
        den = parse_real(rest.substr(1), "angle");
        if (den == 0.0) throw ArgumentError("angle: zero denominator");
    }
    return c * kPi / den;
}

bool is_dimer_descriptor(const std::string& d) {
    const auto [kind, body] = split_descriptor(d);
    if (kind == "zero" || kind == "case-a" || kind == "case-b" || kind == "bloch") return true;
    return kind == "product" && split(body, ',').size() == 2;
}

std::pair<Vector2, Vector2> parse_dimer(const std::string& d) {
    const auto [kind, body] = split_descriptor(d);
    if (kind == "zero") return {Vector2(1, 0), Vector2(1, 0)};
    if (kind == "case-a" || kind == "case-b") {
        std::map<std::string, std::string> kv{{"theta", "0"}, {"branch", "1"}, {"variant", "0"}, {"swapped", "0"}};
        if (!trim(body).empty())
            for (const auto& item : split(body, ',')) {
                const auto eq = item.find('=');
                if (eq == std::string::npos) throw ArgumentError("state: expected key=value, got '" + item + "'");
                const std::string k = trim(item.substr(0, eq));
                if (!kv.count(k)) throw ArgumentError("state: unknown family key '" + k + "'");
                kv[k] = trim(item.substr(eq + 1));
            }
        StateFamily f;
        f.solvable_case = kind.back();
        f.branch = static_cast<int>(parse_integer(kv["branch"], "branch"));
        f.variant = static_cast<int>(parse_integer(kv["variant"], "variant"));
        f.swapped = parse_bool(kv["swapped"], "swapped");
        if (f.branch != 1 && f.branch != 2) throw ArgumentError("state: branch must be 1 or 2");
        if (f.variant != 0 && f.variant != 1) throw ArgumentError("state: variant must be 0 or 1");
        if (f.solvable_case == 'a' && f.swapped) throw ArgumentError("state: case-a families have no swapped form");
        return f.generate(parse_angle(kv["theta"]));
    }
    if (kind == "bloch") {
        const auto a = split(body, ',');
        if (a.size() != 4) throw ArgumentError("state: bloch needs theta0,phi0,theta1,phi1");
        return {bloch_state(parse_angle(a[0]), parse_angle(a[1])), bloch_state(parse_angle(a[2]), parse_angle(a[3]))};
    }
    if (kind == "product") {
        const auto t = split(body, ',');
        if (t.size() != 2) throw ArgumentError("state: a dimer needs exactly two product tokens");
        return {parse_token(t[0]), parse_token(t[1])};
    }
    throw ArgumentError("unknown state descriptor '" + d + "'");
}

PureState parse_state(const std::string& d, int n) {
    if (n < 1) throw ArgumentError("state: qubit count must be >= 1");
    const auto [kind, body] = split_descriptor(d);
    if (kind == "amplitudes") {
        const auto a = split(body, ',');
        const std::size_t dim = std::size_t{1} << n;
        if (a.size() != 2 * dim)
            throw ArgumentError("state: amplitudes needs " + std::to_string(2 * dim) + " numbers (re,im pairs)");
        Vector amp(static_cast<Eigen::Index>(dim));
        for (std::size_t i = 0; i < dim; ++i) amp(i) = cplx(parse_real(a[2 * i], "amplitude"), parse_real(a[2 * i + 1], "amplitude"));
        if (amp.norm() == 0.0) throw ArgumentError("state: zero amplitude vector");
        return PureState(n, amp / amp.norm());
    }
    if (kind == "product") {
        const auto t = split(body, ',');
        if (static_cast<int>(t.size()) == n) {
            std::vector<Vector2> sites;
            for (const auto& x : t) sites.push_back(parse_token(x));
            return PureState::product(sites);
        }
        if (t.size() != 2)
            throw ArgumentError("state: product needs " + std::to_string(n) + " tokens (or 2 to repeat)");
    }
    if (!is_dimer_descriptor(d)) throw ArgumentError("unknown state descriptor '" + d + "'");
    if (n % 2 != 0) throw ArgumentError("state: a dimer descriptor needs an even number of sites");
    const auto [a, b] = parse_dimer(d);
    std::vector<Vector2> sites;
    for (int k = 0; k < n; ++k) sites.push_back(k % 2 ? b : a);
    return PureState::product(sites);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::string to_json_text(const RunConfig& c) {
    json j = json::object();
    j["subcommand"] = c.subcommand;
    for (const auto& [k, v] : c.values) j[k] = v;
    return j.dump(2);
}

RunConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ArgumentError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw ArgumentError("config: top level must be an object");
    if (j.contains("config") && j["config"].is_object()) j = j["config"];  // a manifest.json
    RunConfig c;
    for (const auto& [k, v] : j.items()) {
        if (k == "subcommand") {
            if (!v.is_string()) throw ArgumentError("config: subcommand must be a string");
            c.subcommand = v.get<std::string>();
        } else if (v.is_string()) {
            c.values[k] = v.get<std::string>();
        } else if (v.is_boolean()) {
            c.values[k] = v.get<bool>() ? "true" : "false";
        } else if (v.is_number()) {
            c.values[k] = v.dump();
        } else {
            throw ArgumentError("config: value of '" + k + "' must be a string, number or boolean");
        }
    }
    return c;
}

int dispatch(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return dispatch(args);
}

int dispatch(const std::vector<std::string>& input) {
    const auto start = std::chrono::steady_clock::now();
    const auto cmds = commands();

    // --config is expanded into leading option arguments; later command-line
    // flags override them (every option keeps its last value).
    std::vector<std::string> args;
    std::string config_path;
    for (std::size_t i = 0; i < input.size(); ++i) {
        if (input[i] == "--config") {
            if (i + 1 >= input.size()) {
                std::cerr << "--config requires a file\n";
                return kArgumentError;
            }
            config_path = input[++i];
        } else if (input[i].rfind("--config=", 0) == 0) {
            config_path = input[i].substr(9);
        } else {
            args.push_back(input[i]);
        }
    }
    if (!config_path.empty()) {
        std::ifstream f(config_path, std::ios::binary);
        if (!f) {
            std::cerr << "cannot read config file " << config_path << "\n";
            return kArgumentError;
        }
        std::stringstream ss;
        ss << f.rdbuf();
        RunConfig cfg;
        try {
            cfg = config_from_json_text(ss.str());
        } catch (const ArgumentError& e) {
            std::cerr << e.what() << "\n";
            return kArgumentError;
        }
        auto pos = std::find_if(args.begin(), args.end(), [&](const std::string& a) {
            return std::any_of(cmds.begin(), cmds.end(), [&](const Command& c) { return c.name == a; });
        });
        if (pos == args.end()) {
            if (cfg.subcommand.empty()) {
                std::cerr << "no subcommand given on the command line or in the config file\n";
                return kArgumentError;
            }
            args.insert(args.begin(), cfg.subcommand);
            pos = args.begin();
        }
        std::vector<std::string> expanded;
        for (const auto& [k, v] : cfg.values) expanded.push_back("--" + k + "=" + v);
        args.insert(pos + 1, expanded.begin(), expanded.end());
    }

    CLI::App app{"Exact numerics for the alternating kicked Ising model"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    std::string unused_config;
    app.add_option("--config", unused_config, "JSON file of option values (a manifest.json also works)");
    std::vector<std::map<std::string, std::string>> store(cmds.size());
    std::vector<std::string> out_dir(cmds.size(), default_out_dir());
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < cmds.size(); ++i) {
        auto* sub = app.add_subcommand(cmds[i].name, cmds[i].help);
        for (const auto& [name, def, help] : cmds[i].options) {
            store[i][name] = def;
            sub->add_option("--" + name, store[i][name], help)
                ->capture_default_str()
                ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        }
        for (const auto& [name, def, help] : cmds[i].flags) {
            store[i][name] = def;
            sub->add_flag("--" + name + "{true}", store[i][name], help)
                ->capture_default_str()
                ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        }
        sub->add_option("--out", out_dir[i], "output directory (default: $AKIM_OUT_DIR or .)")
            ->capture_default_str()
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        subs.push_back(sub);
    }

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return kArgumentError;
    }

    std::size_t which = 0;
    while (which < subs.size() && !subs[which]->parsed()) ++which;
    if (which == subs.size()) return kArgumentError;

    RunConfig cfg{cmds[which].name, store[which]};
    Run run;
    try {
        cmds[which].body(Values(store[which]), run);
    } catch (const ArgumentError& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return kArgumentError;
    } catch (const CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return kArgumentError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kCheckFailed;
    }

    const json manifest = manifest_json(cfg, run);
    try {
        const fs::path dir(out_dir[which]);
        fs::create_directories(dir);
        for (const auto& [name, content] : run.files) write_file(dir / name, content);
        write_file(dir / "manifest.json", manifest.dump(2) + "\n");
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_file(dir / "timing.json", json{{"wall_clock_seconds", secs}}.dump(2) + "\n");
    } catch (const std::exception& e) {
        std::cerr << "output error: " << e.what() << "\n";
        return kCheckFailed;
    }

    bool pass = true;
    for (const auto& c : run.checks) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "  residual " << format_number(c.residual)
                  << "  tolerance " << format_number(c.tolerance) << "\n";
        pass = pass && c.pass;
    }
    std::cout << cfg.subcommand << ": " << (pass ? "pass" : "fail") << ", " << run.files.size() + 2
              << " files in " << out_dir[which] << "\n";
    return pass ? kOk : kCheckFailed;
}

}  // namespace akim::cli
