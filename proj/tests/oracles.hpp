// Test-only oracles, kept independent of the implementation paths they
// check: naive triple-loop products, the analytic biorthogonal propagator
// for the PT Hamiltonian, characteristic-polynomial eigenvalues for small
// non-Hermitian matrices (Faddeev-LeVerrier + Durand-Kerner), and seeded
// random generators for property tests.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "ptsim/numerics.hpp"

namespace oracles {

using ptsim::CMatrix;
using ptsim::CVector;
using ptsim::cplx;

inline CMatrix matmul_naive(const CMatrix& a, const CMatrix& b) {
    const int n = a.dim();
    CMatrix out(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (int k = 0; k < n; ++k) s += a.at(i, k) * b.at(k, j);
            out.at(i, j) = s;
        }
    return out;
}

// e^{-i H_PT t} assembled from the closed-form eigensystem,
//   e^{-iHt} = e^{-iE+t} |psi+><phi+| + e^{-iE-t} |psi-><phi-|,
// with <phi|x> the biorthogonal pairing (phi = conj(psi), so the pairing is
// a plain transpose product). Never calls expm.
inline CMatrix pt_propagator_spectral(double omega, double gamma, double t) {
    const double al = std::asin(gamma / omega);
    const double e = omega * std::cos(al);
    const double pref = 1.0 / std::sqrt(2.0 * std::cos(al));
    const cplx eph = std::polar(1.0, al / 2.0), emh = std::polar(1.0, -al / 2.0);
    const cplx psi_p[2] = {pref * emh, pref * eph};
    const cplx psi_m[2] = {-pref * eph, pref * emh};

    CMatrix u(2);
    const cplx wp = std::polar(1.0, -e * t), wm = std::polar(1.0, e * t);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            u.at(i, j) = wp * psi_p[i] * psi_p[j] + wm * psi_m[i] * psi_m[j];
    return u;
}

// Characteristic polynomial coefficients by Faddeev-LeVerrier:
// p(x) = x^n + c[n-1] x^(n-1) + ... + c[0].
inline std::vector<cplx> char_poly(const CMatrix& m) {
    const int n = m.dim();
    std::vector<cplx> c(static_cast<size_t>(n));
    std::vector<cplx> coeff;  // c_{n-1}, c_{n-2}, ...
    CMatrix aux = m;
    coeff.push_back(-aux.trace());
    for (int k = 2; k <= n; ++k) {
        CMatrix shifted = aux;
        for (int i = 0; i < n; ++i) shifted.at(i, i) += coeff.back();
        aux = matmul_naive(m, shifted);
        coeff.push_back(-aux.trace() / cplx(static_cast<double>(k)));
    }
    for (int k = 0; k < n; ++k) c[static_cast<size_t>(n - 1 - k)] = coeff[static_cast<size_t>(k)];
    return c;
}

// All roots of a monic polynomial by Durand-Kerner iteration.
inline std::vector<cplx> poly_roots(const std::vector<cplx>& c) {
    const int n = static_cast<int>(c.size());
    auto p = [&](cplx x) {
        cplx v = 1.0;
        for (int k = n - 1; k >= 0; --k) v = v * x + c[static_cast<size_t>(k)];
        return v;
    };
    std::vector<cplx> r(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) r[static_cast<size_t>(k)] = std::pow(cplx(0.4, 0.9), k);
    for (int iter = 0; iter < 500; ++iter) {
        double moved = 0.0;
        for (int k = 0; k < n; ++k) {
            cplx denom = 1.0;
            for (int j = 0; j < n; ++j)
                if (j != k) denom *= (r[static_cast<size_t>(k)] - r[static_cast<size_t>(j)]);
            const cplx delta = p(r[static_cast<size_t>(k)]) / denom;
            r[static_cast<size_t>(k)] -= delta;
            moved = std::max(moved, std::abs(delta));
        }
        if (moved < 1e-13) break;
    }
    return r;
}

inline std::vector<cplx> eigenvalues_general(const CMatrix& m) {
    return poly_roots(char_poly(m));
}

// ---- seeded random generators for property tests ----

struct Rng {
    std::mt19937_64 eng;
    explicit Rng(std::uint64_t seed) : eng(seed) {}
    double uniform(double lo = 0.0, double hi = 1.0) {
        return lo + (hi - lo) * (static_cast<double>(eng() >> 11) * 0x1.0p-53);
    }
    cplx gaussian_pair() {
        // Box-Muller on portable uniforms
        const double u1 = std::max(1e-300, uniform());
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return cplx(r * std::cos(2 * 3.14159265358979323846 * u2),
                    r * std::sin(2 * 3.14159265358979323846 * u2));
    }
};

inline CMatrix random_matrix(Rng& rng, int n) {
    CMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m.at(i, j) = rng.gaussian_pair();
    return m;
}

inline CMatrix random_hermitian(Rng& rng, int n) {
    const CMatrix m = random_matrix(rng, n);
    CMatrix h(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) h.at(i, j) = 0.5 * (m.at(i, j) + std::conj(m.at(j, i)));
    return h;
}

inline CMatrix random_psd(Rng& rng, int n) {
    const CMatrix m = random_matrix(rng, n);
    return matmul_naive(m.adjoint(), m);
}

inline CMatrix random_unitary(Rng& rng, int n) {
    return ptsim::eigh(random_hermitian(rng, n)).vectors;
}

inline CVector random_state(Rng& rng, int n) {
    CVector v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.gaussian_pair();
    return v.normalized();
}

inline CMatrix random_density(Rng& rng, int n) {
    CMatrix psd = random_psd(rng, n);
    const double tr = psd.trace().real();
    return cplx(1.0 / tr) * psd;
}

}  // namespace oracles
