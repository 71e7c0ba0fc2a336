#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "ptsim/coupled.hpp"

using namespace ptsim;

namespace {

double max_entry_diff(const CMatrix& a, const CMatrix& b) {
    double m = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) m = std::max(m, std::abs(a.at(i, j) - b.at(i, j)));
    return m;
}

double vec_residual(const CMatrix& h, const CVector& v, double e) {
    const CVector r = h * v - cplx(e) * v;
    return r.norm();
}

const PtParams kNearEp(7.82, 7.0);
const double kWeakJ = 0.019;

std::vector<double> grid(double t_max, int n) {
    std::vector<double> ts(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) ts[static_cast<size_t>(k)] = t_max * k / (n - 1);
    return ts;
}

}  // namespace

TEST_CASE("build_interaction: couples only |01> and |10>") {
    const CMatrix z = build_interaction(0.0);
    CHECK(z.max_abs() == 0.0);

    const CMatrix v = build_interaction(0.019);
    CHECK(v.is_hermitian(1e-15));
    CHECK(v.at(1, 2) == cplx(0.019));
    CHECK(v.at(2, 1) == cplx(0.019));
    for (int i = 0; i < 4; ++i) CHECK(v.at(i, i) == cplx(0.0));
    double off_mass = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (!((i == 1 && j == 2) || (i == 2 && j == 1))) off_mass += std::abs(v.at(i, j));
    CHECK(off_mass == 0.0);
}

TEST_CASE("build_total: Kronecker oracle and tracelessness") {
    const CoupledParams cp(kNearEp, kWeakJ);
    const CMatrix h = build_total(cp);
    CHECK(std::abs(h.trace()) == 0.0);

    // independent entrywise tensor construction
    const CMatrix h1 = build_hamiltonian(cp.single);
    CMatrix want(4);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) {
                    cplx val = 0.0;
                    if (b == d) val += h1.at(a, c);
                    if (a == c) val += h1.at(b, d);
                    want.at(2 * a + b, 2 * c + d) = val;
                }
    want.at(1, 2) += kWeakJ;
    want.at(2, 1) += kWeakJ;
    CHECK(max_entry_diff(h, want) <= 1e-15);

    // j = 0, gamma = 0: Omega (sx x 1 + 1 x sx)
    const CoupledParams herm(PtParams(3.0, 0.0), 0.0);
    const CMatrix eye = CMatrix::identity(2);
    const CMatrix want2 = cplx(3.0) * (kron(pauli::x(), eye) + kron(eye, pauli::x()));
    CHECK(max_entry_diff(build_total(herm), want2) <= 1e-15);
}

TEST_CASE("unperturbed_products: eigenvectors of the J=0 Hamiltonian") {
    const auto prods = unperturbed_products(kNearEp);
    const CMatrix h0 = build_total(CoupledParams(kNearEp, 0.0));
    const double e1 = kNearEp.omega * std::cos(kNearEp.alpha());
    const double energies[4] = {-2 * e1, 0.0, 0.0, 2 * e1};
    for (int k = 0; k < 4; ++k)
        CHECK(vec_residual(h0, prods[static_cast<size_t>(k)], energies[k]) <= 1e-10);

    // gamma = 0: products of (1, +-1)/sqrt(2)
    const auto hp = unperturbed_products(PtParams(2.0, 0.0));
    const double r = 0.5;
    CHECK(std::abs(std::abs(hp[3][0]) - r) <= 1e-12);
    CHECK(std::abs(std::abs(hp[0][3]) - r) <= 1e-12);
}

TEST_CASE("perturbed_eigensystem: energies, residuals, and the j->0 limit") {
    const CoupledParams cp(kNearEp, kWeakJ);
    const PerturbedSystem ps = perturbed_eigensystem(cp);
    const double al = kNearEp.alpha();
    const double e1 = kNearEp.omega * std::cos(al);

    SUBCASE("degenerate pair resolves to E1 = -J, E2 = -J tan^2(alpha)") {
        CHECK(ps.energies[1] == doctest::Approx(-kWeakJ).epsilon(1e-10));
        CHECK(ps.energies[2] ==
              doctest::Approx(-kWeakJ * std::pow(std::tan(al), 2)).epsilon(1e-10));
    }

    SUBCASE("tau2 invariants") {
        CHECK(max_entry_diff(ps.tau2 * ps.tau2_inv, CMatrix::identity(4)) <= 1e-10);
        for (int k = 0; k < 4; ++k)
            CHECK(ps.tau2.column(k).norm() == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("eigenpair residuals are O(J^2 / (Omega cos a))") {
        const CMatrix h = build_total(cp);
        const double bound = 10.0 * kWeakJ * kWeakJ / e1;
        for (int k = 0; k < 4; ++k)
            CHECK(vec_residual(h, ps.tau2.column(k), ps.energies[static_cast<size_t>(k)]) <=
                  bound);
    }

    SUBCASE("reconstruction tau2 diag(E) tau2^-1 approximates H12 at second order in J") {
        auto reconstruction_residual = [&](double jv) {
            const CoupledParams c2(kNearEp, jv);
            const PerturbedSystem p2 = perturbed_eigensystem(c2);
            CMatrix diag(4);
            for (int k = 0; k < 4; ++k) diag.at(k, k) = p2.energies[static_cast<size_t>(k)];
            return (p2.tau2 * diag * p2.tau2_inv - build_total(c2)).fro_norm();
        };
        const double r1 = reconstruction_residual(kWeakJ);
        const double r2 = reconstruction_residual(kWeakJ / 2);
        CHECK(r1 <= 50.0 * kWeakJ * kWeakJ / e1);
        CHECK(r2 <= 0.3 * r1);  // second-order scaling quarters per halving
    }

    SUBCASE("energies match the dense eigensolver oracle to O(J^2)") {
        auto exact = oracles::eigenvalues_general(build_total(cp));
        std::vector<double> ex;
        for (const cplx& e : exact) {
            CHECK(std::abs(e.imag()) <= 1e-9);
            ex.push_back(e.real());
        }
        std::sort(ex.begin(), ex.end());
        std::vector<double> pert(ps.energies.begin(), ps.energies.end());
        std::sort(pert.begin(), pert.end());
        const double bound = 10.0 * kWeakJ * kWeakJ / e1;
        for (int k = 0; k < 4; ++k)
            CHECK(std::abs(pert[static_cast<size_t>(k)] - ex[static_cast<size_t>(k)]) <= bound);
    }

    SUBCASE("j -> 0 limit recovers the unperturbed system") {
        const PerturbedSystem tiny = perturbed_eigensystem(CoupledParams(kNearEp, 1e-9));
        CHECK(tiny.energies[0] == doctest::Approx(-2 * e1).epsilon(1e-8));
        CHECK(tiny.energies[3] == doctest::Approx(2 * e1).epsilon(1e-8));
        CHECK(std::abs(tiny.energies[1]) <= 1e-8);
        CHECK(std::abs(tiny.energies[2]) <= 1e-8);
        // columns converge to (normalized) combinations of the products
        const auto prods = unperturbed_products(kNearEp);
        const CVector want0 = prods[0].normalized();
        CHECK(max_entry_diff(projector(tiny.tau2.column(0)), projector(want0)) <= 1e-7);
    }

    SUBCASE("spectrum reality holds across random unbroken params") {
        oracles::Rng rng(41);
        for (int rep = 0; rep < 12; ++rep) {
            const double omega = rng.uniform(2.0, 10.0);
            const PtParams p(omega, rng.uniform(0.0, 0.9) * omega);
            const double jmax = 0.05 * omega * std::cos(p.alpha());
            const CoupledParams rcp(p, rng.uniform(0.1, 1.0) * jmax);
            const PerturbedSystem rps = perturbed_eigensystem(rcp);  // throws if non-real
            for (double e : rps.energies) CHECK(std::isfinite(e));
        }
    }
}

TEST_CASE("exact_coupled_evolve: identity and factorization at j=0") {
    const CVector psi0 = CVector::basis(4, 3);
    const CoupledParams cp(kNearEp, kWeakJ);
    CHECK(max_entry_diff(projector(exact_coupled_evolve(cp, psi0, 0.0)), projector(psi0)) <=
          1e-12);

    // j = 0 factorizes into the tensor product of single-qubit evolutions
    const CoupledParams uncoupled(kNearEp, 0.0);
    for (double t : {0.3, 0.9}) {
        const CVector joint = exact_coupled_evolve(uncoupled, psi0, t);
        const EvolveResult single = exact_evolve(kNearEp, CVector::basis(2, 1), t);
        const CVector prod = kron(single.state, single.state);
        CHECK(max_entry_diff(projector(joint), projector(prod)) <= 1e-10);
    }
}

TEST_CASE("coupled_hybrid_evolve: exact mode equals the perturbative propagator") {
    const CoupledParams cp(kNearEp, kWeakJ);
    const CVector psi0 = CVector::basis(4, 3);  // |11>
    const PerturbedSystem ps = perturbed_eigensystem(cp);
    const auto ts = grid(1.6, 9);
    const auto traj = coupled_hybrid_evolve(cp, psi0, ts, Shots::exact(), MeasNoise(), 1);

    CHECK(max_entry_diff(traj[0].rho, projector(psi0)) <= 1e-10);
    for (size_t i = 0; i < ts.size(); ++i) {
        const CVector want = perturbative_coupled_state(ps, psi0, ts[i]);
        CHECK(max_entry_diff(traj[i].rho, projector(want)) <= 1e-10);
        double sum = 0.0;
        for (double p : traj[i].populations) sum += p;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("prepare_state_2q realizes tau2^-1 |11> near the exceptional point") {
    const CoupledParams cp(kNearEp, kWeakJ);
    const PerturbedSystem ps = perturbed_eigensystem(cp);
    const CVector target = (ps.tau2_inv * CVector::basis(4, 3)).normalized();
    const Circuit c = prepare_state_2q(target);
    const CVector got = run_statevector(c, CVector::basis(4, 0));
    CHECK(max_entry_diff(projector(got), projector(target)) <= 1e-10);
}

TEST_CASE("coupled_hybrid_evolve vs the expm oracle: trace distance <= 0.05") {
    const CoupledParams cp(kNearEp, kWeakJ);
    const CVector psi0 = CVector::basis(4, 3);
    const auto ts = grid(1.6, 33);
    const auto traj = coupled_hybrid_evolve(cp, psi0, ts, Shots::exact(), MeasNoise(), 1);
    for (size_t i = 0; i < ts.size(); ++i) {
        const CVector oracle = exact_coupled_evolve(cp, psi0, ts[i]);
        CHECK(trace_distance(traj[i].rho, projector(oracle)) <= 0.05);
    }
}

TEST_CASE("concurrence: Bell, product, Werner") {
    const double r = 1.0 / std::sqrt(2.0);
    const CVector bell{r, 0.0, 0.0, r};
    CHECK(concurrence(projector(bell)) == doctest::Approx(1.0).epsilon(1e-10));

    oracles::Rng rng(43);
    for (int rep = 0; rep < 5; ++rep) {
        const CVector prod = kron(oracles::random_state(rng, 2), oracles::random_state(rng, 2));
        CHECK(concurrence(projector(prod)) <= 1e-10);
    }

    // Werner state p|Phi+><Phi+| + (1-p) I/4: C = max(0, (3p-1)/2)
    for (double p : {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}) {
        CMatrix werner(4);
        const CMatrix proj = projector(bell);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                werner.at(i, j) = p * proj.at(i, j);
                if (i == j) werner.at(i, j) += (1.0 - p) * 0.25;
            }
        const double want = std::max(0.0, (3.0 * p - 1.0) / 2.0);
        CHECK(std::abs(concurrence(werner) - want) <= 1e-10);
    }
}

TEST_CASE("concurrence: bounds and local-unitary invariance") {
    oracles::Rng rng(47);
    for (int rep = 0; rep < 10; ++rep) {
        const CMatrix rho = oracles::random_density(rng, 4);
        const double c = concurrence(rho);
        CHECK(c >= 0.0);
        CHECK(c <= 1.0);

        const CMatrix u = kron(oracles::random_unitary(rng, 2), oracles::random_unitary(rng, 2));
        const CMatrix rotated = u * rho * u.adjoint();
        CHECK(std::abs(concurrence(rotated) - c) <= 1e-10);
    }
}

TEST_CASE("concurrence_trajectory: weak-coupling trajectory peaks near 1 with equal populations") {
    const CoupledParams cp(kNearEp, kWeakJ);
    const CVector psi0 = CVector::basis(4, 3);
    const auto ts = grid(1.6, 81);
    const ConcurrenceTrajectory ct =
        concurrence_trajectory(cp, psi0, ts, Shots::exact(), MeasNoise(), 1);

    CHECK(ct.points.front().value <= 1e-10);  // |11> is a product state
    CHECK(ct.c_peak >= 0.99);
    CHECK(ct.t_peak > 0.0);
    CHECK(ct.t_peak <= 1.6);
    CHECK(ct.max_pairwise_population_gap_at_peak <= 0.2);
    REQUIRE(ct.populations_at_peak.size() == 4);
    for (double p : ct.populations_at_peak) CHECK(std::abs(p - 0.25) <= 0.1);

    // perturbative C(t) never strays more than 0.05 from the expm-oracle C(t)
    double max_dev = 0.0;
    for (size_t i = 0; i < ts.size(); ++i) {
        const double oracle = concurrence(projector(exact_coupled_evolve(cp, psi0, ts[i])));
        max_dev = std::max(max_dev, std::abs(ct.points[i].value - oracle));
    }
    CHECK(max_dev <= 0.05);
}

TEST_CASE("oracle convergence: halving J at least halves the max deviation") {
    const CVector psi0 = CVector::basis(4, 3);
    const auto ts = grid(1.6, 17);
    auto max_dev = [&](double j) {
        const CoupledParams cp(kNearEp, j);
        const auto traj = coupled_hybrid_evolve(cp, psi0, ts, Shots::exact(), MeasNoise(), 1);
        double m = 0.0;
        for (size_t i = 0; i < ts.size(); ++i)
            m = std::max(m, trace_distance(traj[i].rho,
                                           projector(exact_coupled_evolve(cp, psi0, ts[i]))));
        return m;
    };
    const double d1 = max_dev(kWeakJ);
    const double d2 = max_dev(kWeakJ / 2);
    const double d4 = max_dev(kWeakJ / 4);
    CHECK(d2 <= 0.5 * d1 + 1e-12);
    CHECK(d4 <= 0.5 * d2 + 1e-12);
}

TEST_CASE("validation and warnings") {
    CHECK_THROWS_AS(CoupledParams(kNearEp, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(perturbed_eigensystem(CoupledParams(kNearEp, 0.0)),
                    std::invalid_argument);
    CHECK(CoupledParams(kNearEp, kWeakJ).within_perturbative_range());
    CHECK_FALSE(CoupledParams(kNearEp, 1.0).within_perturbative_range());
}
