// The two single-qubit PT evolution algorithms.
//
// Hybrid: prepare tau|psi0>/N with a one-qubit gate, evolve with
// RX(2 omega cos(alpha) t) = exp(-i h t), tomograph the circuit state, and
// apply tau^-1 on both sides classically (tau^-1 is Hermitian), renormalizing
// the trace.
//
// Dilation: implement tau^-1 as the post-selected block of a two-qubit
// unitary. tau^-1 is eigendecomposed as V diag(b, a) V^dag; the spectrum
// normalized by its largest eigenvalue ("scale") gives a contraction
// d = (1, a^2) which dilates to the unit-modulus pair d_pm = d +- i sqrt(1-d^2).
// Hadamards on the ancilla around the block-diagonal U_D average the two
// blocks, so post-selecting ancilla |0> applies V diag(d) V^dag = tau^-1/scale.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ptsim/circuit.hpp"
#include "ptsim/numerics.hpp"
#include "ptsim/ptmodel.hpp"

namespace ptsim {

struct TrajectoryPoint {
    double t = 0.0;
    CMatrix rho{2};
    std::vector<double> populations;  // diagonal of rho
    double p_success = 1.0;           // ancilla post-selection probability (1 for hybrid)
};

namespace detail {

inline std::uint64_t point_seed(std::uint64_t seed, size_t index) {
    return seed ^ static_cast<std::uint64_t>(index);
}

inline std::vector<double> diag_populations(const CMatrix& rho) {
    std::vector<double> pops(static_cast<size_t>(rho.dim()));
    for (int i = 0; i < rho.dim(); ++i) pops[static_cast<size_t>(i)] = rho.at(i, i).real();
    return pops;
}

// Single-qubit core shared by both algorithms: state preparation to
// tau|psi0>/N then the Hermitian-equivalent rotation,
// theta = 2 omega cos(alpha) t.
inline Circuit hybrid_circuit(const PtParams& p, const SimilarityTransform& st,
                              const CVector& psi0, double t) {
    Circuit c(1);
    c.add(prepare_state_gate(0, (st.tau * psi0).normalized()));
    c.add(Gate::rx(0, 2.0 * p.omega * std::cos(p.alpha()) * t));
    return c;
}

}  // namespace detail

// Hybrid algorithm trajectory. In exact mode each point reproduces
// exact_evolve's pure state to 1e-10; with finite shots the tomography
// statistics propagate through the tau^-1 post-processing.
inline std::vector<TrajectoryPoint> hybrid_evolve(const PtParams& p, const CVector& psi0,
                                                  const std::vector<double>& times,
                                                  const Shots& shots, const MeasNoise& noise,
                                                  std::uint64_t seed) {
    p.require_unbroken();
    const SimilarityTransform st = build_similarity(p);
    std::vector<TrajectoryPoint> out;
    out.reserve(times.size());
    for (size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        const Circuit c = detail::hybrid_circuit(p, st, psi0, t);
        const CVector state = run_statevector(c, CVector::basis(2, 0));
        const CMatrix rho_circ = tomography(state, 1, shots, noise, detail::point_seed(seed, i));

        CMatrix rho_pt = st.tau_inv * rho_circ * st.tau_inv;
        const double tr = rho_pt.trace().real();
        rho_pt = cplx(1.0 / tr) * rho_pt;

        TrajectoryPoint pt;
        pt.t = t;
        pt.rho = rho_pt;
        pt.populations = detail::diag_populations(rho_pt);
        pt.p_success = 1.0;
        out.push_back(std::move(pt));
    }
    return out;
}

// Spectral data for the dilated tau^-1.
struct DilationSpec {
    CMatrix eigvecs{2};             // V, columns ordered by descending eigenvalue of tau^-1
    std::array<double, 2> d_norm;   // spectrum / scale = (1, a^2)
    double scale;                   // largest eigenvalue of tau^-1 (= b)
    std::array<cplx, 2> d_plus;     // d + i sqrt(1 - d^2), unit modulus
    std::array<cplx, 2> d_minus;    // conjugates
};

inline DilationSpec build_dilation(const PtParams& p) {
    p.require_unbroken();
    const SimilarityTransform st = build_similarity(p);
    const EighResult e = eigh(st.tau_inv);  // ascending: (a, b)

    DilationSpec spec;
    spec.scale = e.values[1];
    spec.eigvecs.set_column(0, e.vectors.column(1));
    spec.eigvecs.set_column(1, e.vectors.column(0));
    spec.d_norm = {1.0, e.values[0] / e.values[1]};
    for (int j = 0; j < 2; ++j) {
        const double d = spec.d_norm[static_cast<size_t>(j)];
        const double imag = std::sqrt(std::max(0.0, 1.0 - d * d));
        spec.d_plus[static_cast<size_t>(j)] = cplx(d, imag);
        spec.d_minus[static_cast<size_t>(j)] = cplx(d, -imag);
    }
    return spec;
}

namespace detail {

// Block-diagonal U_D = |0><0| (x) diag(d_plus) + |1><1| (x) diag(d_minus),
// realized exactly as an RZ/CNOT ladder in the eigenbasis of tau^-1.
inline Circuit dilation_block_circuit(const DilationSpec& spec) {
    return synth_diagonal_2q({std::arg(spec.d_plus[0]), std::arg(spec.d_plus[1]),
                              std::arg(spec.d_minus[0]), std::arg(spec.d_minus[1])});
}

}  // namespace detail

// Two-qubit dilation circuit: qubit 0 is the ancilla, qubit 1 the system.
// System prep and RX as in the hybrid circuit, then V^dag, H on the ancilla,
// the diagonal block unitary, H, and V. Post-selecting ancilla |0> leaves
// tau^-1/scale applied.
inline Circuit dilation_circuit(const DilationSpec& spec, const PtParams& p, const CVector& psi0,
                                double t) {
    p.require_unbroken();
    const SimilarityTransform st = build_similarity(p);

    Circuit c(2);
    c.add(prepare_state_gate(1, (st.tau * psi0).normalized()));
    c.add(Gate::rx(1, 2.0 * p.omega * std::cos(p.alpha()) * t));
    c.add(Gate::u1q(1, spec.eigvecs.adjoint()));
    c.add(Gate::h(0));
    c.append(detail::dilation_block_circuit(spec));
    c.add(Gate::h(0));
    c.add(Gate::u1q(1, spec.eigvecs));
    return c;
}

namespace detail {

// Independent bit flips with probability p on every bit of a probability
// vector over bitstrings (analytic form of the sampling noise channel).
inline std::vector<double> apply_flip_channel(const std::vector<double>& probs, int n_qubits,
                                              double p_flip) {
    if (p_flip == 0.0) return probs;
    const int dim = 1 << n_qubits;
    std::vector<double> out(static_cast<size_t>(dim), 0.0);
    for (int src = 0; src < dim; ++src) {
        for (int dst = 0; dst < dim; ++dst) {
            double w = 1.0;
            for (int k = 0; k < n_qubits; ++k)
                w *= (bit_of(src, k, n_qubits) != bit_of(dst, k, n_qubits)) ? p_flip
                                                                            : (1.0 - p_flip);
            out[static_cast<size_t>(dst)] += probs[static_cast<size_t>(src)] * w;
        }
    }
    return out;
}

inline std::vector<double> outcome_probabilities(const CVector& state) {
    std::vector<double> probs(static_cast<size_t>(state.dim()));
    for (int i = 0; i < state.dim(); ++i) probs[static_cast<size_t>(i)] = std::norm(state[i]);
    return probs;
}

}  // namespace detail

// Dilation algorithm trajectory: sample the two-qubit circuit in the
// computational basis, discard shots whose ancilla reads 1, renormalize.
// Exact mode uses the analytic branch amplitudes (plus the analytic flip
// channel when measurement noise is enabled).
inline std::vector<TrajectoryPoint> dilation_evolve(const PtParams& p, const CVector& psi0,
                                                    const std::vector<double>& times,
                                                    const Shots& shots, const MeasNoise& noise,
                                                    std::uint64_t seed) {
    p.require_unbroken();
    const DilationSpec spec = build_dilation(p);
    std::vector<TrajectoryPoint> out;
    out.reserve(times.size());
    for (size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        const Circuit c = dilation_circuit(spec, p, psi0, t);
        const CVector full = run_statevector(c, CVector::basis(4, 0));

        TrajectoryPoint pt;
        pt.t = t;
        if (shots.is_exact) {
            if (noise.p_flip == 0.0) {
                CVector branch{full[0], full[1]};
                pt.p_success = branch.norm() * branch.norm();
                if (pt.p_success <= 0.0)
                    throw PostSelectionError("dilation_evolve: zero post-selection probability");
                const CVector sys = branch.normalized();
                pt.rho = projector(sys);
            } else {
                auto probs = detail::apply_flip_channel(detail::outcome_probabilities(full), 2,
                                                        noise.p_flip);
                const double sel = probs[0] + probs[1];
                if (sel <= 0.0)
                    throw PostSelectionError("dilation_evolve: zero post-selection probability");
                pt.p_success = sel;
                pt.rho = CMatrix(2, {probs[0] / sel, 0, 0, probs[1] / sel});
            }
        } else {
            const Counts counts = sample(full, shots.count, noise, detail::point_seed(seed, i));
            long kept[2] = {0, 0};
            long n_post = 0;
            for (const auto& [bits, cnt] : counts.table) {
                if (bits[0] != '0') continue;
                kept[bits[1] - '0'] += cnt;
                n_post += cnt;
            }
            if (n_post == 0)
                throw PostSelectionError(
                    "dilation_evolve: all shots post-selected away (p_success estimate 0)");
            pt.p_success = static_cast<double>(n_post) / static_cast<double>(counts.shots);
            const double pg = static_cast<double>(kept[0]) / static_cast<double>(n_post);
            pt.rho = CMatrix(2, {pg, 0, 0, 1.0 - pg});
        }
        pt.populations = detail::diag_populations(pt.rho);
        out.push_back(std::move(pt));
    }
    return out;
}

// System-qubit tomography of the dilation output (three settings, X/Y/Z),
// post-selecting the ancilla per setting. This is the dilation-side input to
// the measurement-error fidelity sweeps.
inline CMatrix dilation_system_tomography(const PtParams& p, const CVector& psi0, double t,
                                          const Shots& shots, const MeasNoise& noise,
                                          std::uint64_t seed) {
    p.require_unbroken();
    const DilationSpec spec = build_dilation(p);
    const Circuit base = dilation_circuit(spec, p, psi0, t);
    const CVector full = run_statevector(base, CVector::basis(4, 0));

    const std::array<detail::PauliOp, 3> settings = {detail::PauliOp::X, detail::PauliOp::Y,
                                                     detail::PauliOp::Z};
    std::array<double, 3> expectation{};
    for (size_t s = 0; s < settings.size(); ++s) {
        Circuit rot(2);
        detail::append_rotation(rot, settings[s], 1);
        const CVector rotated = run_statevector(rot, full);
        double kept0 = 0.0, kept1 = 0.0;
        if (shots.is_exact) {
            const auto probs = detail::apply_flip_channel(detail::outcome_probabilities(rotated),
                                                          2, noise.p_flip);
            kept0 = probs[0];
            kept1 = probs[1];
        } else {
            const Counts counts = sample(rotated, shots.count, noise, seed + 0x2000 * s);
            for (const auto& [bits, cnt] : counts.table) {
                if (bits[0] != '0') continue;
                (bits[1] == '0' ? kept0 : kept1) += static_cast<double>(cnt);
            }
        }
        const double sel = kept0 + kept1;
        if (sel <= 0.0)
            throw PostSelectionError("dilation tomography: all shots post-selected away");
        expectation[s] = (kept0 - kept1) / sel;
    }

    CMatrix rho(2, {0.5 * (1.0 + expectation[2]), 0.5 * cplx(expectation[0], -expectation[1]),
                    0.5 * cplx(expectation[0], expectation[1]), 0.5 * (1.0 - expectation[2])});
    return nearest_psd(rho);
}

}  // namespace ptsim
