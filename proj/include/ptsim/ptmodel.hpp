// Single two-level PT-symmetric system: Hamiltonian [[-i gamma, omega],
// [omega, i gamma]], its eigensystem in the unbroken phase, the metric
// eta and its positive square root tau, the Hermitian equivalent
// h = tau H tau^-1 = omega cos(alpha) sigma_x, and the exact evolution
// oracle with its faster-than-Hermitian transfer-time comparison.
//
// Units follow the source data: time in microseconds, omega in rad/us,
// gamma in 1/us. No internal rescaling.
#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "ptsim/numerics.hpp"

namespace ptsim {

struct RegimeError : std::domain_error {
    using std::domain_error::domain_error;
};

enum class Regime { Unbroken, ExceptionalPoint, Broken };

inline const char* to_string(Regime r) {
    switch (r) {
        case Regime::Unbroken: return "unbroken";
        case Regime::ExceptionalPoint: return "exceptional-point";
        case Regime::Broken: return "broken";
    }
    return "?";
}

// Physical parameters of one PT-symmetric qubit. alpha (sin alpha =
// gamma/omega) is defined only in the unbroken regime; querying it
// elsewhere raises RegimeError because the similarity transform diverges
// at and beyond the exceptional point.
struct PtParams {
    double omega;  // coupling rate, rad/us
    double gamma;  // gain/loss rate, 1/us

    PtParams(double omega_, double gamma_) : omega(omega_), gamma(gamma_) {
        if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
        if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be non-negative");
    }

    Regime regime() const {
        const double eps = 1e-12 * omega;
        if (std::abs(gamma - omega) <= eps) return Regime::ExceptionalPoint;
        return gamma < omega ? Regime::Unbroken : Regime::Broken;
    }

    double alpha() const {
        require_unbroken();
        return std::asin(gamma / omega);
    }

    void require_unbroken() const {
        const Regime r = regime();
        if (r != Regime::Unbroken)
            throw RegimeError(std::string("operation requires the unbroken regime, got ") +
                              to_string(r));
    }
};

inline Regime classify_regime(const PtParams& p) { return p.regime(); }

inline CMatrix build_hamiltonian(const PtParams& p) {
    return CMatrix(2, {cplx(0, -p.gamma), p.omega, p.omega, cplx(0, p.gamma)});
}

// Right eigenvectors psi_pm of H_PT and the left family phi_pm = conj(psi_pm)
// (which are the eigenvectors of H_PT^dag). With the 1/sqrt(2 cos alpha)
// prefactor the pair is biorthonormal: <phi_s|psi_s'> = delta_ss'.
struct PtEigensystem {
    double e_plus, e_minus;        // +-omega cos(alpha)
    CVector psi_plus, psi_minus;   // right eigenvectors
    CVector phi_plus, phi_minus;   // left eigenvectors, = conj of the right ones
};

inline PtEigensystem eigensystem(const PtParams& p) {
    p.require_unbroken();
    const double al = p.alpha();
    const double pref = 1.0 / std::sqrt(2.0 * std::cos(al));
    const cplx eph = std::polar(1.0, al / 2.0);   // e^{+i alpha/2}
    const cplx emh = std::polar(1.0, -al / 2.0);  // e^{-i alpha/2}

    CVector psi_p{pref * emh, pref * eph};
    CVector psi_m{-pref * eph, pref * emh};
    return PtEigensystem{p.omega * std::cos(al), -p.omega * std::cos(al),
                         psi_p, psi_m, psi_p.conjugate(), psi_m.conjugate()};
}

// eta = sum |phi><phi|, tau = sqrt(eta) in closed form with
// a = sqrt(sec alpha - tan alpha), b = sqrt(sec alpha + tan alpha), ab = 1.
struct SimilarityTransform {
    CMatrix eta;
    CMatrix tau;
    CMatrix tau_inv;
    double a;
    double b;
};

inline SimilarityTransform build_similarity(const PtParams& p) {
    p.require_unbroken();
    const double al = p.alpha();
    const double sec = 1.0 / std::cos(al);
    const double tan = std::tan(al);
    const double a = std::sqrt(sec - tan);
    const double b = std::sqrt(sec + tan);
    const double half_sum = 0.5 * (a + b);
    const double half_diff = 0.5 * (a - b);

    CMatrix eta(2, {sec, cplx(0, tan), cplx(0, -tan), sec});
    CMatrix tau(2, {half_sum, cplx(0, -half_diff), cplx(0, half_diff), half_sum});
    // tau = p I + q sigma_y with p^2 - q^2 = ab = 1, so the inverse flips q.
    CMatrix tau_inv(2, {half_sum, cplx(0, half_diff), cplx(0, -half_diff), half_sum});
    return SimilarityTransform{eta, tau, tau_inv, a, b};
}

inline CMatrix hermitian_equivalent(const PtParams& p) {
    p.require_unbroken();
    const double hx = p.omega * std::cos(p.alpha());
    return CMatrix(2, {0, hx, hx, 0});
}

struct EvolveResult {
    CVector state;  // normalized
    double norm;    // pre-normalization norm of e^{-i H t} psi0
};

// Exact (non-circuit) evolution oracle. Evaluates e^{-i H_PT t} psi0 along
// two independent routes -- direct expm, and tau^-1 e^{-i h t} tau with the
// analytic single-qubit rotation -- and insists they agree to 1e-10.
inline EvolveResult exact_evolve(const PtParams& p, const CVector& psi0, double t) {
    p.require_unbroken();
    if (psi0.dim() != 2) throw DimensionError("exact_evolve: psi0 must have dim 2");

    const CMatrix h_pt = build_hamiltonian(p);
    CMatrix gen(2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) gen.at(i, j) = cplx(0, -t) * h_pt.at(i, j);
    const CVector direct = expm(gen) * psi0;

    const SimilarityTransform st = build_similarity(p);
    const double theta = p.omega * std::cos(p.alpha()) * t;
    const CMatrix rot(2, {std::cos(theta), cplx(0, -std::sin(theta)),
                          cplx(0, -std::sin(theta)), std::cos(theta)});
    const CVector via_tau = st.tau_inv * (rot * (st.tau * psi0));

    double dev = 0.0;
    for (int i = 0; i < 2; ++i) dev = std::max(dev, std::abs(direct[i] - via_tau[i]));
    if (dev > 1e-10)
        throw NumericsError("exact_evolve: expm and similarity routes disagree by " +
                            std::to_string(dev));

    return EvolveResult{direct.normalized(), direct.norm()};
}

struct TransferTimes {
    double t_pt;    // first excited-population maximum under H_PT, us
    double t_herm;  // same under the matched-spectrum Hermitian h, us
};

namespace detail {

// First local maximum of a smooth population curve: coarse grid scan
// followed by bisection on the finite-difference derivative, to 1e-6 us.
template <typename F>
double first_population_peak(F&& pop, double t_hi) {
    const double step = 1e-3;
    double prev = pop(0.0);
    double t_prev = 0.0;
    double t = step;
    double cur = pop(t);
    while (t < t_hi) {
        const double next_t = t + step;
        const double next = pop(next_t);
        if (cur >= prev && cur >= next) break;
        prev = cur;
        t_prev = t;
        cur = next;
        t = next_t;
    }
    double lo = t_prev, hi = std::min(t + step, t_hi);
    const double h = 1e-7;
    auto slope = [&](double x) { return pop(x + h) - pop(x - h); };
    for (int iter = 0; iter < 80 && (hi - lo) > 1e-6; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (slope(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

// Fig-1(a)-style comparison: time for |0> to reach the first excited-state
// population maximum under H_PT versus under the Hermitian matched-spectrum
// Hamiltonian omega cos(alpha) sigma_x.
inline TransferTimes transfer_time_comparison(const PtParams& p) {
    p.require_unbroken();
    const CVector zero = CVector::basis(2, 0);
    const double rate = p.omega * std::cos(p.alpha());
    const double horizon = 1.2 * std::numbers::pi / rate;

    auto pt_pop = [&](double t) {
        const EvolveResult r = exact_evolve(p, zero, t);
        return std::norm(r.state[1]);
    };
    auto herm_pop = [&](double t) {
        const double theta = rate * t;
        return std::sin(theta) * std::sin(theta);
    };
    return TransferTimes{detail::first_population_peak(pt_pop, horizon),
                         detail::first_population_peak(herm_pop, horizon)};
}

}  // namespace ptsim
