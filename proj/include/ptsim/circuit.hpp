// Minimal exact gate-level simulator for 1-3 qubits: gate application,
// seeded shot sampling with an optional measurement bit-flip channel,
// Pauli-basis state tomography by linear inversion, single-qubit state
// preparation, Schmidt-based two-qubit state preparation, and exact
// synthesis of two-qubit diagonal unitaries from RZ and CNOT gates.
//
// Conventions (fixed):
//   RX(theta) = exp(-i theta sigma_x / 2), RZ(theta) = exp(-i theta sigma_z / 2).
//   Qubit 0 owns the leftmost bit of a bitstring and the most significant
//   bit of a basis index (ancilla-first in the dilation circuits).
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ptsim/numerics.hpp"

namespace ptsim {

struct PostSelectionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shot budget: either a finite count or exact mode (analytic expectations,
// the infinite-shot limit). Exact mode keeps algorithm-correctness tests
// independent of sampling statistics.
struct Shots {
    bool is_exact;
    long count;

    static Shots exact() { return Shots{true, 0}; }
    static Shots of(long n) {
        if (n <= 0) throw std::invalid_argument("shot count must be positive");
        return Shots{false, n};
    }
};

// Independent bit-flip probability applied to every measured qubit.
struct MeasNoise {
    double p_flip = 0.0;

    MeasNoise() = default;
    explicit MeasNoise(double p) : p_flip(p) {
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p_flip must be in [0,1]");
    }
};

struct Gate {
    enum class Kind { RX, RZ, H, CNOT, U1Q, U2Q };

    Kind kind;
    double angle = 0.0;            // RX/RZ
    int q0 = 0;                    // target (1q), control (CNOT), first qubit (U2Q)
    int q1 = -1;                   // CNOT target / U2Q second qubit
    std::optional<CMatrix> matrix; // U1Q (2x2) / U2Q (4x4)

    static Gate rx(int qubit, double theta) { return Gate{Kind::RX, theta, qubit, -1, {}}; }
    static Gate rz(int qubit, double theta) { return Gate{Kind::RZ, theta, qubit, -1, {}}; }
    static Gate h(int qubit) { return Gate{Kind::H, 0.0, qubit, -1, {}}; }
    static Gate cnot(int control, int target) {
        if (control == target) throw std::invalid_argument("cnot: control equals target");
        return Gate{Kind::CNOT, 0.0, control, target, {}};
    }
    static Gate u1q(int qubit, const CMatrix& u) {
        if (u.dim() != 2) throw DimensionError("u1q: matrix must be 2x2");
        if (!u.is_unitary(tol::structural)) throw NumericsError("u1q: matrix not unitary");
        return Gate{Kind::U1Q, 0.0, qubit, -1, u};
    }
    static Gate u2q(int qa, int qb, const CMatrix& u) {
        if (u.dim() != 4) throw DimensionError("u2q: matrix must be 4x4");
        if (qa == qb) throw std::invalid_argument("u2q: qubits must differ");
        if (!u.is_unitary(tol::structural)) throw NumericsError("u2q: matrix not unitary");
        return Gate{Kind::U2Q, 0.0, qa, qb, u};
    }

    int max_qubit() const { return std::max(q0, q1); }

    CMatrix local_unitary() const {
        switch (kind) {
            case Kind::RX: {
                const double c = std::cos(angle / 2), s = std::sin(angle / 2);
                return CMatrix(2, {c, cplx(0, -s), cplx(0, -s), c});
            }
            case Kind::RZ:
                return CMatrix(2, {std::polar(1.0, -angle / 2), 0, 0, std::polar(1.0, angle / 2)});
            case Kind::H: {
                const double r = 1.0 / std::sqrt(2.0);
                return CMatrix(2, {r, r, r, -r});
            }
            case Kind::CNOT:
                return CMatrix(4, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0});
            case Kind::U1Q:
            case Kind::U2Q:
                return *matrix;
        }
        throw std::logic_error("unreachable gate kind");
    }
};

class Circuit {
  public:
    explicit Circuit(int n_qubits) : n_qubits_(n_qubits) {
        if (n_qubits < 1 || n_qubits > 3)
            throw DimensionError("circuit supports 1 to 3 qubits");
    }

    int n_qubits() const { return n_qubits_; }
    int state_dim() const { return 1 << n_qubits_; }
    const std::vector<Gate>& gates() const { return gates_; }
    double global_phase() const { return global_phase_; }
    void set_global_phase(double phi) { global_phase_ = phi; }

    Circuit& add(const Gate& g) {
        if (g.q0 < 0 || g.q0 >= n_qubits_ || (g.q1 >= 0 && g.q1 >= n_qubits_) ||
            ((g.kind == Gate::Kind::CNOT || g.kind == Gate::Kind::U2Q) && g.q1 < 0))
            throw DimensionError("gate qubit index out of range");
        gates_.push_back(g);
        return *this;
    }
    Circuit& append(const Circuit& other) {
        if (other.n_qubits_ != n_qubits_) throw DimensionError("append: qubit count mismatch");
        for (const Gate& g : other.gates_) gates_.push_back(g);
        global_phase_ += other.global_phase_;
        return *this;
    }

  private:
    int n_qubits_;
    std::vector<Gate> gates_;
    double global_phase_ = 0.0;
};

namespace detail {

// Qubit k owns bit (n-1-k) of a basis index.
inline int bit_of(int index, int qubit, int n_qubits) {
    return (index >> (n_qubits - 1 - qubit)) & 1;
}
inline int flip_bit(int index, int qubit, int n_qubits) {
    return index ^ (1 << (n_qubits - 1 - qubit));
}

inline void apply_1q(std::vector<cplx>& amp, const CMatrix& u, int qubit, int n) {
    const int stride = 1 << (n - 1 - qubit);
    const int dim = 1 << n;
    for (int base = 0; base < dim; ++base) {
        if (base & stride) continue;
        const cplx a0 = amp[static_cast<size_t>(base)];
        const cplx a1 = amp[static_cast<size_t>(base | stride)];
        amp[static_cast<size_t>(base)] = u.at(0, 0) * a0 + u.at(0, 1) * a1;
        amp[static_cast<size_t>(base | stride)] = u.at(1, 0) * a0 + u.at(1, 1) * a1;
    }
}

inline void apply_gate(std::vector<cplx>& amp, const Gate& g, int n) {
    switch (g.kind) {
        case Gate::Kind::RX:
        case Gate::Kind::RZ:
        case Gate::Kind::H:
        case Gate::Kind::U1Q:
            apply_1q(amp, g.local_unitary(), g.q0, n);
            return;
        case Gate::Kind::CNOT: {
            const int dim = 1 << n;
            for (int i = 0; i < dim; ++i) {
                if (bit_of(i, g.q0, n) != 1 || bit_of(i, g.q1, n) != 0) continue;
                std::swap(amp[static_cast<size_t>(i)],
                          amp[static_cast<size_t>(flip_bit(i, g.q1, n))]);
            }
            return;
        }
        case Gate::Kind::U2Q: {
            const CMatrix& u = *g.matrix;
            const int dim = 1 << n;
            std::vector<cplx> next(amp.size());
            for (int i = 0; i < dim; ++i) {
                const int ra = bit_of(i, g.q0, n), rb = bit_of(i, g.q1, n);
                const int row = 2 * ra + rb;
                for (int ca = 0; ca < 2; ++ca)
                    for (int cb = 0; cb < 2; ++cb) {
                        const cplx w = u.at(row, 2 * ca + cb);
                        if (w == cplx{}) continue;
                        int j = i;
                        if (ra != ca) j = flip_bit(j, g.q0, n);
                        if (rb != cb) j = flip_bit(j, g.q1, n);
                        next[static_cast<size_t>(i)] += w * amp[static_cast<size_t>(j)];
                    }
            }
            amp = std::move(next);
            return;
        }
    }
}

// Uniform double in [0,1) from the top 53 bits, identical on every platform
// (std::uniform_real_distribution is not portable across standard libraries).
class SeededRng {
  public:
    explicit SeededRng(std::uint64_t seed) : state_(seed) {}

    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

  private:
    // splitmix64: tiny, well-mixed, reproducible.
    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    std::uint64_t state_;
};

}  // namespace detail

inline CVector run_statevector(const Circuit& c, const CVector& init) {
    if (init.dim() != c.state_dim())
        throw DimensionError("run_statevector: state dimension mismatch");
    std::vector<cplx> amp(static_cast<size_t>(init.dim()));
    for (int i = 0; i < init.dim(); ++i) amp[static_cast<size_t>(i)] = init[i];
    for (const Gate& g : c.gates()) detail::apply_gate(amp, g, c.n_qubits());
    const cplx phase = std::polar(1.0, c.global_phase());
    CVector out(init.dim());
    for (int i = 0; i < init.dim(); ++i) out[i] = phase * amp[static_cast<size_t>(i)];
    return out.normalized();
}

inline CMatrix unitary_of(const Circuit& c) {
    const int dim = c.state_dim();
    CMatrix u(dim);
    for (int col = 0; col < dim; ++col) {
        std::vector<cplx> amp(static_cast<size_t>(dim));
        amp[static_cast<size_t>(col)] = 1.0;
        for (const Gate& g : c.gates()) detail::apply_gate(amp, g, c.n_qubits());
        const cplx phase = std::polar(1.0, c.global_phase());
        for (int row = 0; row < dim; ++row) u.at(row, col) = phase * amp[static_cast<size_t>(row)];
    }
    return u;
}

struct Counts {
    std::map<std::string, long> table;
    long shots = 0;
};

inline std::string bitstring_of(int index, int n_qubits) {
    std::string s(static_cast<size_t>(n_qubits), '0');
    for (int k = 0; k < n_qubits; ++k)
        if (detail::bit_of(index, k, n_qubits)) s[static_cast<size_t>(k)] = '1';
    return s;
}

// Multinomial draw from |amplitude|^2, then independent bit flips with
// probability noise.p_flip on every measured qubit. Deterministic per seed.
inline Counts sample(const CVector& state, long shots, const MeasNoise& noise,
                     std::uint64_t seed) {
    if (shots <= 0) throw std::invalid_argument("sample: shots must be positive");
    const int dim = state.dim();
    int n_qubits = 0;
    while ((1 << n_qubits) < dim) ++n_qubits;
    if ((1 << n_qubits) != dim) throw DimensionError("sample: state dim must be a power of two");

    std::vector<double> prob(static_cast<size_t>(dim));
    double total = 0.0;
    for (int i = 0; i < dim; ++i) total += prob[static_cast<size_t>(i)] = std::norm(state[i]);
    for (double& p : prob) p /= total;

    detail::SeededRng rng(seed);
    Counts counts;
    counts.shots = shots;
    for (long s = 0; s < shots; ++s) {
        const double r = rng.uniform();
        double acc = 0.0;
        int outcome = dim - 1;
        for (int i = 0; i < dim; ++i) {
            acc += prob[static_cast<size_t>(i)];
            if (r < acc) {
                outcome = i;
                break;
            }
        }
        if (noise.p_flip > 0.0)
            for (int k = 0; k < n_qubits; ++k)
                if (rng.uniform() < noise.p_flip) outcome = detail::flip_bit(outcome, k, n_qubits);
        ++counts.table[bitstring_of(outcome, n_qubits)];
    }
    return counts;
}

namespace detail {

enum class PauliOp : int { I = 0, X = 1, Y = 2, Z = 3 };

inline CMatrix pauli_matrix(PauliOp p) {
    switch (p) {
        case PauliOp::I: return pauli::id();
        case PauliOp::X: return pauli::x();
        case PauliOp::Y: return pauli::y();
        case PauliOp::Z: return pauli::z();
    }
    throw std::logic_error("unreachable pauli");
}

// Basis-rotation gates mapping the Pauli eigenbasis onto the Z basis:
// X -> H; Y -> RZ(-pi/2) then H (an S^dag up to global phase).
inline void append_rotation(Circuit& c, PauliOp p, int qubit) {
    if (p == PauliOp::X) {
        c.add(Gate::h(qubit));
    } else if (p == PauliOp::Y) {
        c.add(Gate::rz(qubit, -std::numbers::pi / 2));
        c.add(Gate::h(qubit));
    }
}

// All non-identity Pauli strings on n qubits, in a fixed I<X<Y<Z
// lexicographic order so seeded sampling is reproducible.
inline std::vector<std::vector<PauliOp>> pauli_strings(int n_qubits) {
    std::vector<std::vector<PauliOp>> out;
    const int total = 1;
    int settings = 1;
    for (int k = 0; k < n_qubits; ++k) settings *= 4;
    for (int code = total; code < settings; ++code) {
        std::vector<PauliOp> s(static_cast<size_t>(n_qubits));
        int c = code;
        for (int k = n_qubits - 1; k >= 0; --k) {
            s[static_cast<size_t>(k)] = static_cast<PauliOp>(c & 3);
            c >>= 2;
        }
        out.push_back(std::move(s));
    }
    return out;
}

inline CMatrix pauli_string_matrix(const std::vector<PauliOp>& s) {
    CMatrix m = pauli_matrix(s[0]);
    for (size_t k = 1; k < s.size(); ++k) m = kron(m, pauli_matrix(s[static_cast<size_t>(k)]));
    return m;
}

inline int weight(const std::vector<PauliOp>& s) {
    int w = 0;
    for (PauliOp p : s)
        if (p != PauliOp::I) ++w;
    return w;
}

}  // namespace detail

// Linear-inversion reconstruction rho = 2^-n (I + sum <P> P), projected
// onto the PSD unit-trace cone. Expectations follow the fixed Pauli-string
// order of detail::pauli_strings.
inline CMatrix reconstruct_from_pauli(const std::vector<double>& expectations, int n_qubits) {
    const auto strings = detail::pauli_strings(n_qubits);
    if (expectations.size() != strings.size())
        throw DimensionError("reconstruct_from_pauli: expectation count mismatch");
    const int dim = 1 << n_qubits;
    CMatrix rho = CMatrix::identity(dim);
    for (size_t idx = 0; idx < strings.size(); ++idx) {
        const CMatrix p = detail::pauli_string_matrix(strings[idx]);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) rho.at(i, j) += expectations[idx] * p.at(i, j);
    }
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) rho.at(i, j) = rho.at(i, j) / static_cast<double>(dim);
    return nearest_psd(rho);
}

// Analytic tomography of a density matrix: expectations Tr(rho P), each
// damped by (1-2p)^weight under the measurement bit-flip channel. This is
// the infinite-shot limit of the sampled path below.
inline CMatrix tomography_exact(const CMatrix& rho, int n_qubits, const MeasNoise& noise) {
    if (n_qubits != 1 && n_qubits != 2)
        throw DimensionError("tomography: only 1 or 2 qubits supported");
    if (rho.dim() != (1 << n_qubits)) throw DimensionError("tomography: dimension mismatch");
    const auto strings = detail::pauli_strings(n_qubits);
    const double damp = 1.0 - 2.0 * noise.p_flip;
    std::vector<double> expectations;
    expectations.reserve(strings.size());
    for (const auto& s : strings) {
        const CMatrix p = detail::pauli_string_matrix(s);
        expectations.push_back((rho * p).trace().real() * std::pow(damp, detail::weight(s)));
    }
    return reconstruct_from_pauli(expectations, n_qubits);
}

// Pauli-basis tomography by linear inversion: measure every non-identity
// Pauli string (3 settings on one qubit, 15 on two) via basis rotation and
// sampling, reconstruct, and project onto the PSD unit-trace cone.
inline CMatrix tomography(const CVector& state, int n_qubits, const Shots& shots_per_setting,
                          const MeasNoise& noise, std::uint64_t seed) {
    if (n_qubits != 1 && n_qubits != 2)
        throw DimensionError("tomography: only 1 or 2 qubits supported");
    if (state.dim() != (1 << n_qubits))
        throw DimensionError("tomography: state dimension mismatch");
    if (shots_per_setting.is_exact) return tomography_exact(projector(state), n_qubits, noise);

    const auto strings = detail::pauli_strings(n_qubits);
    std::vector<double> expectations;
    expectations.reserve(strings.size());
    std::uint64_t setting_index = 0;
    for (const auto& s : strings) {
        double val = 0.0;
        {
            Circuit rot(n_qubits);
            for (int k = 0; k < n_qubits; ++k)
                detail::append_rotation(rot, s[static_cast<size_t>(k)], k);
            const CVector rotated = run_statevector(rot, state);
            const Counts counts =
                sample(rotated, shots_per_setting.count, noise, seed + 0x1000 * setting_index);
            double acc = 0.0;
            for (const auto& [bits, cnt] : counts.table) {
                int parity = 1;
                for (int k = 0; k < n_qubits; ++k)
                    if (s[static_cast<size_t>(k)] != detail::PauliOp::I &&
                        bits[static_cast<size_t>(k)] == '1')
                        parity = -parity;
                acc += parity * static_cast<double>(cnt);
            }
            val = acc / static_cast<double>(counts.shots);
        }
        expectations.push_back(val);
        ++setting_index;
    }
    return reconstruct_from_pauli(expectations, n_qubits);
}

// One-qubit preparation unitary with U|0> = target exactly; the second
// column is the orthogonal completion.
inline Gate prepare_state_gate(const CVector& target) {
    if (target.dim() != 2) throw DimensionError("prepare_state_gate: target must have dim 2");
    if (target.norm() < 1e-14) throw NumericsError("prepare_state_gate: zero vector");
    const CVector t = target.normalized();
    CMatrix u(2, {t[0], -std::conj(t[1]), t[1], std::conj(t[0])});
    return Gate::u1q(0, u);
}

inline Gate prepare_state_gate(int qubit, const CVector& target) {
    Gate g = prepare_state_gate(target);
    g.q0 = qubit;
    return g;
}

// Exact synthesis of diag(e^{i phi_00}, e^{i phi_01}, e^{i phi_10}, e^{i phi_11})
// from RZ and CNOT gates. Writing the phase as
//   phi(x,y) = c0 + c1 (-1)^x + c2 (-1)^y + c3 (-1)^(x XOR y),
// the three oscillating terms become RZ(-2c1) on qubit 0, RZ(-2c2) on
// qubit 1 and a CNOT-conjugated RZ(-2c3); c0 is recorded as the circuit's
// global phase, so unitary_of reproduces the target exactly.
inline Circuit synth_diagonal_2q(const std::array<double, 4>& phases) {
    const double c0 = 0.25 * (phases[0] + phases[1] + phases[2] + phases[3]);
    const double c1 = 0.25 * (phases[0] + phases[1] - phases[2] - phases[3]);
    const double c2 = 0.25 * (phases[0] - phases[1] + phases[2] - phases[3]);
    const double c3 = 0.25 * (phases[0] - phases[1] - phases[2] + phases[3]);

    Circuit c(2);
    c.set_global_phase(c0);
    const double skip = 1e-14;
    if (std::abs(c1) > skip) c.add(Gate::rz(0, -2.0 * c1));
    if (std::abs(c2) > skip) c.add(Gate::rz(1, -2.0 * c2));
    if (std::abs(c3) > skip) {
        c.add(Gate::cnot(0, 1));
        c.add(Gate::rz(1, -2.0 * c3));
        c.add(Gate::cnot(0, 1));
    }
    return c;
}

// Schmidt-based two-qubit state preparation: one entangling U2Q that maps
// |00> to s0|00> + s1|11>, then one local unitary per qubit. Product states
// need no entangling core.
inline Circuit prepare_state_2q(const CVector& target) {
    if (target.dim() != 4) throw DimensionError("prepare_state_2q: target must have dim 4");
    if (target.norm() < 1e-14) throw NumericsError("prepare_state_2q: zero vector");
    const CVector t = target.normalized();

    // Reshape to the 2x2 coefficient matrix M[i][j] = <ij|t>.
    CMatrix m(2, {t[0], t[1], t[2], t[3]});
    const CMatrix gram = m.adjoint() * m;
    const EighResult eg = eigh(gram);

    // Descending singular values.
    const double s0 = std::sqrt(std::max(0.0, eg.values[1]));
    const double s1 = std::sqrt(std::max(0.0, eg.values[0]));
    const CVector b0 = eg.vectors.column(1);
    const CVector b1 = eg.vectors.column(0);

    auto complete = [](const CVector& first) {
        return CMatrix(2, {first[0], -std::conj(first[1]), first[1], std::conj(first[0])});
    };

    const CVector a0 = (cplx(1.0 / s0) * (m * b0));
    Circuit c(2);
    auto add_local = [&c](int qubit, const CMatrix& u) {
        // near-identity locals contribute nothing; keep the circuit minimal
        if (std::abs(u.at(0, 0) - cplx(1.0)) < 1e-12 && std::abs(u.at(1, 1) - cplx(1.0)) < 1e-12 &&
            std::abs(u.at(0, 1)) < 1e-12 && std::abs(u.at(1, 0)) < 1e-12)
            return;
        c.add(Gate::u1q(qubit, u));
    };
    if (s1 < 1e-12) {
        add_local(0, complete(a0.normalized()));
        add_local(1, complete(b0.conjugate()));
        return c;
    }

    const CVector a1 = (cplx(1.0 / s1) * (m * b1));
    CMatrix ua(2);
    ua.set_column(0, a0);
    ua.set_column(1, a1);
    CMatrix ub(2);
    ub.set_column(0, b0.conjugate());
    ub.set_column(1, b1.conjugate());

    // Entangling core: |00> -> s0|00> + s1|11> via CNOT (s0, s1)-prep.
    const CMatrix prep(2, {s0, -s1, s1, s0});
    const CMatrix cnot(4, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0});
    const CMatrix core = cnot * kron(prep, CMatrix::identity(2));

    c.add(Gate::u2q(0, 1, core));
    add_local(0, ua);
    add_local(1, ub);
    return c;
}

}  // namespace ptsim
