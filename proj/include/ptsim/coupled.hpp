// Two weakly coupled PT-symmetric qubits. The interaction
// J (sigma_+ sigma_- + sigma_- sigma_+) couples |01> and |10>; first-order
// perturbation theory in the biorthogonal eigenbasis of the non-interacting
// Hamiltonian (the unperturbed eigenbasis is non-orthogonal, so left
// eigenvectors are required) yields four real energies and a 4x4 similarity
// transform tau2 whose columns are the perturbed eigenstates, ordered
// (--, 1, 2, ++) with psi_1,2 = psi_-+ -+ psi_+-. Evolution then follows the
// hybrid algorithm: prepare tau2^-1 psi0, apply the diagonal phase unitary,
// tomograph, and apply tau2 classically on both sides.
//
// Entanglement is scored by the concurrence; the eigenvalues of rho rho~ are
// taken through the Hermitian-equivalent form sqrt(rho) rho~ sqrt(rho),
// which has the same spectrum.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ptsim/algorithms.hpp"
#include "ptsim/circuit.hpp"
#include "ptsim/numerics.hpp"
#include "ptsim/ptmodel.hpp"

namespace ptsim {

struct CoupledParams {
    PtParams single;
    double j;  // coupling strength, rad/us

    CoupledParams(const PtParams& p, double j_) : single(p), j(j_) {
        if (!(j >= 0.0)) throw std::invalid_argument("coupling j must be non-negative");
    }

    // First-order treatment is trustworthy only for j well below the level
    // spacing; callers may still explore the breakdown deliberately.
    bool within_perturbative_range() const {
        return j <= 0.1 * single.omega * std::cos(single.alpha());
    }
};

inline CMatrix build_interaction(double j) {
    if (!(j >= 0.0)) throw std::invalid_argument("coupling j must be non-negative");
    const CMatrix sp = pauli::plus(), sm = pauli::minus();
    return cplx(j) * (kron(sp, sm) + kron(sm, sp));
}

inline CMatrix build_total(const CoupledParams& cp) {
    const CMatrix h1 = build_hamiltonian(cp.single);
    const CMatrix eye = CMatrix::identity(2);
    return kron(h1, eye) + kron(eye, h1) + build_interaction(cp.j);
}

// Product eigenstates of the J = 0 Hamiltonian, ordered (--, +-, -+, ++)
// with eigenvalues (-2 omega cos a, 0, 0, +2 omega cos a).
inline std::array<CVector, 4> unperturbed_products(const PtParams& p) {
    const PtEigensystem es = eigensystem(p);
    return {kron(es.psi_minus, es.psi_minus), kron(es.psi_plus, es.psi_minus),
            kron(es.psi_minus, es.psi_plus), kron(es.psi_plus, es.psi_plus)};
}

struct PerturbedSystem {
    std::array<double, 4> energies;  // diagonal of E12, order (--, 1, 2, ++)
    CMatrix tau2{4};                 // unit-norm perturbed eigenstate columns
    CMatrix tau2_inv{4};
};

inline PerturbedSystem perturbed_eigensystem(const CoupledParams& cp) {
    cp.single.require_unbroken();
    if (!(cp.j > 0.0))
        throw std::invalid_argument("perturbed_eigensystem: j must be positive");

    const double e1 = cp.single.omega * std::cos(cp.single.alpha());
    const auto prods = unperturbed_products(cp.single);
    const std::array<double, 4> e0 = {-2.0 * e1, 0.0, 0.0, 2.0 * e1};
    const CMatrix v = build_interaction(cp.j);

    // Left partners: phi = conj(psi) componentwise, biorthonormal to the
    // products, so <phi_k|x> = sum_i psi_k[i] x[i].
    auto left_dot = [](const CVector& psi_k, const CVector& x) {
        cplx s = 0.0;
        for (int i = 0; i < x.dim(); ++i) s += psi_k[i] * x[i];
        return s;
    };

    // Zeroth-order states per level; the degenerate E = 0 pair resolves into
    // the combinations psi_1 = psi_-+ - psi_+- and psi_2 = psi_-+ + psi_+-.
    std::array<CVector, 4> zeroth = {prods[0], prods[2] - prods[1], prods[2] + prods[1],
                                     prods[3]};
    // Members of each level's degenerate subspace, excluded from corrections.
    const std::array<std::array<bool, 4>, 4> in_level = {{{true, false, false, false},
                                                          {false, true, true, false},
                                                          {false, true, true, false},
                                                          {false, false, false, true}}};

    // Sanity: the interaction must be diagonal in the resolved pair.
    {
        const CVector phi1_v = v * zeroth[2];
        cplx cross = 0.0;
        for (int i = 0; i < 4; ++i) cross += (prods[2][i] - prods[1][i]) * phi1_v[i];
        if (std::abs(cross) > 1e-10 * cp.j)
            throw NumericsError("perturbed_eigensystem: degenerate pair not resolved");
    }

    PerturbedSystem ps;
    for (int lvl = 0; lvl < 4; ++lvl) {
        const CVector& psi = zeroth[static_cast<size_t>(lvl)];
        const CVector v_psi = v * psi;

        cplx norm_bi = 0.0;
        CVector phi_conj = psi;  // phi = conj(psi); left_dot uses psi directly
        for (int i = 0; i < 4; ++i) norm_bi += psi[i] * psi[i];
        const cplx de = left_dot(phi_conj, v_psi) / norm_bi;
        if (std::abs(de.imag()) > 1e-10 * std::max(1.0, std::abs(de.real())))
            throw NumericsError(
                "perturbed_eigensystem: non-real perturbed energy (outside validity regime)");
        ps.energies[static_cast<size_t>(lvl)] = e0[static_cast<size_t>(lvl)] + de.real();

        CVector corrected = psi;
        for (int k = 0; k < 4; ++k) {
            if (in_level[static_cast<size_t>(lvl)][static_cast<size_t>(k)]) continue;
            const cplx mix = left_dot(prods[static_cast<size_t>(k)], v_psi) /
                             (e0[static_cast<size_t>(lvl)] - e0[static_cast<size_t>(k)]);
            corrected = corrected + mix * prods[static_cast<size_t>(k)];
        }
        ps.tau2.set_column(lvl, corrected.normalized());
    }
    ps.tau2_inv = inverse(ps.tau2);
    return ps;
}

// Exact 4x4 oracle: normalize(expm(-i H12 t) psi0).
inline CVector exact_coupled_evolve(const CoupledParams& cp, const CVector& psi0, double t) {
    if (psi0.dim() != 4) throw DimensionError("exact_coupled_evolve: psi0 must have dim 4");
    const CMatrix h = build_total(cp);
    CMatrix gen(4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) gen.at(i, j) = cplx(0, -t) * h.at(i, j);
    return (expm(gen) * psi0).normalized();
}

// Perturbative propagator tau2 e^{-i E t} tau2^-1 applied to psi0, normalized.
inline CVector perturbative_coupled_state(const PerturbedSystem& ps, const CVector& psi0,
                                          double t) {
    CVector coeff = ps.tau2_inv * psi0;
    for (int k = 0; k < 4; ++k)
        coeff[k] *= std::polar(1.0, -ps.energies[static_cast<size_t>(k)] * t);
    return (ps.tau2 * coeff).normalized();
}

// Coupled hybrid evolution: prepare tau2^-1 psi0 / N with Schmidt-based
// two-qubit preparation, apply exp(-i diag(E) t) as an exact RZ/CNOT diagonal,
// tomograph all 15 Pauli settings, then classically conjugate by tau2 and
// renormalize the trace.
inline std::vector<TrajectoryPoint> coupled_hybrid_evolve(const CoupledParams& cp,
                                                          const CVector& psi0,
                                                          const std::vector<double>& times,
                                                          const Shots& shots,
                                                          const MeasNoise& noise,
                                                          std::uint64_t seed) {
    cp.single.require_unbroken();
    if (psi0.dim() != 4) throw DimensionError("coupled_hybrid_evolve: psi0 must have dim 4");
    const PerturbedSystem ps = perturbed_eigensystem(cp);
    const Circuit prep = prepare_state_2q((ps.tau2_inv * psi0).normalized());
    const CMatrix tau2_dag = ps.tau2.adjoint();

    std::vector<TrajectoryPoint> out;
    out.reserve(times.size());
    for (size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        Circuit c(2);
        c.append(prep);
        c.append(synth_diagonal_2q({-ps.energies[0] * t, -ps.energies[1] * t,
                                    -ps.energies[2] * t, -ps.energies[3] * t}));
        const CVector state = run_statevector(c, CVector::basis(4, 0));
        const CMatrix rho_circ = tomography(state, 2, shots, noise, detail::point_seed(seed, i));

        CMatrix rho_pt = ps.tau2 * rho_circ * tau2_dag;
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

// Wootters concurrence C = max(0, l1 - l2 - l3 - l4), where l_i are the
// square roots of the eigenvalues of rho rho~ in decreasing order and
// rho~ = (sy x sy) conj(rho) (sy x sy). Eigenvalues that dip slightly
// negative from tomographic noise are clipped at zero before the root.
inline double concurrence(const CMatrix& rho) {
    if (rho.dim() != 4) throw DimensionError("concurrence: density matrix must be 4x4");
    require_density_matrix(rho, tol::tomographic, "concurrence");

    const CMatrix yy = kron(pauli::y(), pauli::y());
    const CMatrix rho_tilde = yy * rho.conjugate() * yy;

    // rho rho~ and sqrt(rho) rho~ sqrt(rho) share a spectrum, and the
    // latter is Hermitian PSD, so the Jacobi solver applies.
    const EighResult er = eigh(cplx(0.5) * (rho + rho.adjoint()));
    CMatrix sr(4);
    for (int k = 0; k < 4; ++k) {
        const double r = std::sqrt(std::max(0.0, er.values[static_cast<size_t>(k)]));
        const CVector col = er.vectors.column(k);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) sr.at(i, j) += r * col[i] * std::conj(col[j]);
    }
    CMatrix m = sr * rho_tilde * sr;
    m = cplx(0.5) * (m + m.adjoint());
    const EighResult em = eigh(m);

    // Unit-scale input: eigenvalues below ~100 eps are rounding noise whose
    // square roots would pollute the lambda differences.
    std::array<double, 4> lam;
    for (int k = 0; k < 4; ++k) {
        const double v = em.values[static_cast<size_t>(k)];
        lam[static_cast<size_t>(k)] = v >= 1e-14 ? std::sqrt(v) : 0.0;
    }
    // ascending from eigh; combination below wants the largest first
    const double c = lam[3] - lam[2] - lam[1] - lam[0];
    return std::clamp(c, 0.0, 1.0);
}

struct ConcurrencePoint {
    double t;
    double value;
};

struct ConcurrenceTrajectory {
    std::vector<ConcurrencePoint> points;
    double t_peak = 0.0;
    double c_peak = 0.0;
    std::vector<double> populations_at_peak;
    // how far the four basis populations are from coinciding at the peak
    // (the "approximately equal populations" observation)
    double max_pairwise_population_gap_at_peak = 0.0;
};

inline ConcurrenceTrajectory concurrence_trajectory(const CoupledParams& cp, const CVector& psi0,
                                                    const std::vector<double>& times,
                                                    const Shots& shots, const MeasNoise& noise,
                                                    std::uint64_t seed) {
    const auto traj = coupled_hybrid_evolve(cp, psi0, times, shots, noise, seed);
    ConcurrenceTrajectory out;
    out.points.reserve(traj.size());
    size_t peak_idx = 0;
    for (size_t i = 0; i < traj.size(); ++i) {
        const double c = concurrence(traj[i].rho);
        out.points.push_back({traj[i].t, c});
        if (c > out.c_peak) {
            out.c_peak = c;
            out.t_peak = traj[i].t;
            peak_idx = i;
        }
    }
    if (!traj.empty()) {
        out.populations_at_peak = traj[peak_idx].populations;
        double gap = 0.0;
        for (double a : out.populations_at_peak)
            for (double b : out.populations_at_peak) gap = std::max(gap, std::abs(a - b));
        out.max_pairwise_population_gap_at_peak = gap;
    }
    return out;
}

}  // namespace ptsim
