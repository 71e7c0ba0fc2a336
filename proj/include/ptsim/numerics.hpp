// Dense complex linear algebra for small fixed dimensions (2, 4, 8):
// products, adjoints, Hermitian eigendecomposition (cyclic Jacobi),
// matrix exponentials (scaling-and-squaring), PSD square roots,
// Uhlmann fidelity and PSD projection of near-density-matrices.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptsim {

using cplx = std::complex<double>;

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NumericsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace tol {
// Structural (exact-math) checks default to 1e-10; tomography-facing
// checks relax to 1e-8 to absorb statistical reconstruction noise.
inline constexpr double structural = 1e-10;
inline constexpr double tomographic = 1e-8;
}  // namespace tol

class CVector {
  public:
    explicit CVector(int dim) : dim_(check_dim(dim)), v_(dim) {}
    CVector(std::initializer_list<cplx> entries)
        : dim_(check_dim(static_cast<int>(entries.size()))), v_(entries) {}

    static CVector basis(int dim, int k) {
        CVector v(dim);
        if (k < 0 || k >= dim) throw DimensionError("basis index out of range");
        v[k] = 1.0;
        return v;
    }

    int dim() const { return dim_; }
    cplx& operator[](int i) { return v_[static_cast<size_t>(i)]; }
    const cplx& operator[](int i) const { return v_[static_cast<size_t>(i)]; }

    double norm() const {
        double s = 0.0;
        for (const cplx& x : v_) s += std::norm(x);
        return std::sqrt(s);
    }

    // Unit-norm copy; the zero vector is returned unchanged.
    CVector normalized() const {
        double n = norm();
        if (n == 0.0) return *this;
        CVector out(dim_);
        for (int i = 0; i < dim_; ++i) out[i] = v_[static_cast<size_t>(i)] / n;
        return out;
    }

    // <this|other>, conjugate-linear in *this.
    cplx dot(const CVector& other) const {
        if (other.dim_ != dim_) throw DimensionError("dot: dimension mismatch");
        cplx s = 0.0;
        for (int i = 0; i < dim_; ++i) s += std::conj(v_[static_cast<size_t>(i)]) * other[i];
        return s;
    }

    CVector conjugate() const {
        CVector out(dim_);
        for (int i = 0; i < dim_; ++i) out[i] = std::conj(v_[static_cast<size_t>(i)]);
        return out;
    }

  private:
    static int check_dim(int d) {
        if (d <= 0) throw DimensionError("vector dimension must be positive");
        return d;
    }
    int dim_;
    std::vector<cplx> v_;
};

inline CVector operator*(const cplx& s, const CVector& v) {
    CVector out(v.dim());
    for (int i = 0; i < v.dim(); ++i) out[i] = s * v[i];
    return out;
}

inline CVector operator+(const CVector& a, const CVector& b) {
    if (a.dim() != b.dim()) throw DimensionError("vector add: dimension mismatch");
    CVector out(a.dim());
    for (int i = 0; i < a.dim(); ++i) out[i] = a[i] + b[i];
    return out;
}

inline CVector operator-(const CVector& a, const CVector& b) {
    if (a.dim() != b.dim()) throw DimensionError("vector sub: dimension mismatch");
    CVector out(a.dim());
    for (int i = 0; i < a.dim(); ++i) out[i] = a[i] - b[i];
    return out;
}

// Square row-major complex matrix.
class CMatrix {
  public:
    explicit CMatrix(int dim) : dim_(check_dim(dim)), a_(static_cast<size_t>(dim) * dim) {}
    CMatrix(int dim, std::initializer_list<cplx> entries) : CMatrix(dim) {
        if (static_cast<int>(entries.size()) != dim * dim)
            throw DimensionError("entry count does not match dim^2");
        std::copy(entries.begin(), entries.end(), a_.begin());
    }

    static CMatrix identity(int dim) {
        CMatrix m(dim);
        for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
        return m;
    }
    static CMatrix zero(int dim) { return CMatrix(dim); }

    int dim() const { return dim_; }
    cplx& at(int i, int j) { return a_[static_cast<size_t>(i) * dim_ + j]; }
    const cplx& at(int i, int j) const { return a_[static_cast<size_t>(i) * dim_ + j]; }

    CMatrix adjoint() const {
        CMatrix out(dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) out.at(i, j) = std::conj(at(j, i));
        return out;
    }
    CMatrix conjugate() const {
        CMatrix out(dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) out.at(i, j) = std::conj(at(i, j));
        return out;
    }
    CMatrix transposed() const {
        CMatrix out(dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) out.at(i, j) = at(j, i);
        return out;
    }

    cplx trace() const {
        cplx s = 0.0;
        for (int i = 0; i < dim_; ++i) s += at(i, i);
        return s;
    }

    double max_abs() const {
        double m = 0.0;
        for (const cplx& x : a_) m = std::max(m, std::abs(x));
        return m;
    }
    double fro_norm() const {
        double s = 0.0;
        for (const cplx& x : a_) s += std::norm(x);
        return std::sqrt(s);
    }
    // Maximum absolute column sum.
    double one_norm() const {
        double m = 0.0;
        for (int j = 0; j < dim_; ++j) {
            double s = 0.0;
            for (int i = 0; i < dim_; ++i) s += std::abs(at(i, j));
            m = std::max(m, s);
        }
        return m;
    }

    CVector column(int j) const {
        CVector v(dim_);
        for (int i = 0; i < dim_; ++i) v[i] = at(i, j);
        return v;
    }
    void set_column(int j, const CVector& v) {
        if (v.dim() != dim_) throw DimensionError("set_column: dimension mismatch");
        for (int i = 0; i < dim_; ++i) at(i, j) = v[i];
    }

    bool is_hermitian(double tolerance = tol::structural) const {
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j)
                if (std::abs(at(i, j) - std::conj(at(j, i))) > tolerance) return false;
        return true;
    }
    bool is_unitary(double tolerance = tol::structural) const;
    bool is_psd(double tolerance = tol::structural) const;

  private:
    static int check_dim(int d) {
        if (d <= 0) throw DimensionError("matrix dimension must be positive");
        return d;
    }
    int dim_;
    std::vector<cplx> a_;
};

inline CMatrix matmul(const CMatrix& a, const CMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionError("matmul: dimension mismatch");
    const int n = a.dim();
    CMatrix out(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const cplx aik = a.at(i, k);
            if (aik == cplx{}) continue;
            for (int j = 0; j < n; ++j) out.at(i, j) += aik * b.at(k, j);
        }
    return out;
}

inline CMatrix operator*(const CMatrix& a, const CMatrix& b) { return matmul(a, b); }

inline CVector operator*(const CMatrix& m, const CVector& v) {
    if (m.dim() != v.dim()) throw DimensionError("matvec: dimension mismatch");
    CVector out(m.dim());
    for (int i = 0; i < m.dim(); ++i) {
        cplx s = 0.0;
        for (int j = 0; j < m.dim(); ++j) s += m.at(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

inline CMatrix operator*(const cplx& s, const CMatrix& m) {
    CMatrix out(m.dim());
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) out.at(i, j) = s * m.at(i, j);
    return out;
}

inline CMatrix operator+(const CMatrix& a, const CMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionError("matrix add: dimension mismatch");
    CMatrix out(a.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) out.at(i, j) = a.at(i, j) + b.at(i, j);
    return out;
}

inline CMatrix operator-(const CMatrix& a, const CMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionError("matrix sub: dimension mismatch");
    CMatrix out(a.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) out.at(i, j) = a.at(i, j) - b.at(i, j);
    return out;
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    const int na = a.dim(), nb = b.dim();
    CMatrix out(na * nb);
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < na; ++j)
            for (int k = 0; k < nb; ++k)
                for (int l = 0; l < nb; ++l)
                    out.at(i * nb + k, j * nb + l) = a.at(i, j) * b.at(k, l);
    return out;
}

inline CVector kron(const CVector& a, const CVector& b) {
    CVector out(a.dim() * b.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < b.dim(); ++j) out[i * b.dim() + j] = a[i] * b[j];
    return out;
}

inline CMatrix outer(const CVector& a, const CVector& b) {
    if (a.dim() != b.dim()) throw DimensionError("outer: dimension mismatch");
    CMatrix out(a.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) out.at(i, j) = a[i] * std::conj(b[j]);
    return out;
}

inline CMatrix projector(const CVector& v) { return outer(v, v); }

struct EighResult {
    std::vector<double> values;  // ascending; ties keep original index order
    CMatrix vectors;             // unitary, columns paired with values
    EighResult(int n) : values(static_cast<size_t>(n)), vectors(n) {}
};

// Hermitian eigendecomposition by cyclic Jacobi sweeps. Sweeps run until the
// off-diagonal Frobenius norm drops below 1e-14 of the matrix scale.
inline EighResult eigh(const CMatrix& h) {
    if (!h.is_hermitian(tol::structural)) throw NumericsError("eigh: matrix not Hermitian");
    const int n = h.dim();

    // Symmetrize to remove floating-point asymmetry before rotating.
    CMatrix a(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a.at(i, j) = 0.5 * (h.at(i, j) + std::conj(h.at(j, i)));
    CMatrix v = CMatrix::identity(n);

    const double scale = std::max(1.0, a.fro_norm());
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += 2.0 * std::norm(a.at(p, q));
        if (std::sqrt(off) <= 1e-14 * scale) break;

        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx z = a.at(p, q);
                const double m = std::abs(z);
                if (m <= 1e-300) continue;
                const cplx u = z / m;  // phase of the pivot
                const double app = a.at(p, p).real();
                const double aqq = a.at(q, q).real();
                const double theta = 0.5 * std::atan2(2.0 * m, app - aqq);
                const double c = std::cos(theta), s = std::sin(theta);
                const cplx ubar = std::conj(u);

                // Column update A <- A G, G = [[c, -s],[ubar s, ubar c]] on (p,q).
                for (int i = 0; i < n; ++i) {
                    const cplx aip = a.at(i, p), aiq = a.at(i, q);
                    a.at(i, p) = c * aip + ubar * s * aiq;
                    a.at(i, q) = -s * aip + ubar * c * aiq;
                }
                // Row update A <- G^dag A.
                for (int j = 0; j < n; ++j) {
                    const cplx apj = a.at(p, j), aqj = a.at(q, j);
                    a.at(p, j) = c * apj + u * s * aqj;
                    a.at(q, j) = -s * apj + u * c * aqj;
                }
                // Accumulate eigenvectors V <- V G.
                for (int i = 0; i < n; ++i) {
                    const cplx vip = v.at(i, p), viq = v.at(i, q);
                    v.at(i, p) = c * vip + ubar * s * viq;
                    v.at(i, q) = -s * vip + ubar * c * viq;
                }
            }
        }
    }

    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
        return a.at(i, i).real() < a.at(j, j).real();
    });

    EighResult res(n);
    for (int k = 0; k < n; ++k) {
        res.values[static_cast<size_t>(k)] = a.at(order[static_cast<size_t>(k)], order[static_cast<size_t>(k)]).real();
        res.vectors.set_column(k, v.column(order[static_cast<size_t>(k)]));
    }
    return res;
}

inline bool CMatrix::is_unitary(double tolerance) const {
    const CMatrix p = matmul(*this, adjoint());
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) {
            const cplx want = (i == j) ? cplx{1.0} : cplx{};
            if (std::abs(p.at(i, j) - want) > tolerance) return false;
        }
    return true;
}

inline bool CMatrix::is_psd(double tolerance) const {
    if (!is_hermitian(tolerance)) return false;
    CMatrix herm(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) herm.at(i, j) = 0.5 * (at(i, j) + std::conj(at(j, i)));
    const EighResult e = eigh(herm);
    return e.values.front() >= -tolerance;
}

// e^m by scaling-and-squaring with a fixed-order truncated series.
// Accurate to well below 1e-10 for the operator norms used here (<= ~50).
inline CMatrix expm(const CMatrix& m) {
    const int n = m.dim();
    int squarings = 0;
    double nrm = m.one_norm();
    while (nrm > 0.5 && squarings < 60) {
        nrm *= 0.5;
        ++squarings;
    }
    const double factor = std::ldexp(1.0, -squarings);
    CMatrix a(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a.at(i, j) = m.at(i, j) * factor;

    CMatrix x = CMatrix::identity(n);
    CMatrix term = CMatrix::identity(n);
    constexpr int series_order = 24;
    for (int k = 1; k <= series_order; ++k) {
        term = matmul(term, a);
        const double inv_k = 1.0 / k;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                term.at(i, j) *= inv_k;
                x.at(i, j) += term.at(i, j);
            }
    }
    for (int s = 0; s < squarings; ++s) x = matmul(x, x);
    return x;
}

// Principal square root of a PSD Hermitian matrix.
inline CMatrix sqrtm_psd(const CMatrix& m) {
    if (!m.is_hermitian(tol::structural)) throw NumericsError("sqrtm_psd: matrix not Hermitian");
    const EighResult e = eigh(m);
    const double floor = -tol::structural * std::max(1.0, std::abs(e.values.back()));
    CMatrix out(m.dim());
    for (int k = 0; k < m.dim(); ++k) {
        const double lam = e.values[static_cast<size_t>(k)];
        if (lam < floor) throw NumericsError("sqrtm_psd: negative eigenvalue beyond tolerance");
        const double r = std::sqrt(std::max(0.0, lam));
        const CVector col = e.vectors.column(k);
        for (int i = 0; i < m.dim(); ++i)
            for (int j = 0; j < m.dim(); ++j) out.at(i, j) += r * col[i] * std::conj(col[j]);
    }
    return out;
}

inline void require_density_matrix(const CMatrix& rho, double tolerance, const char* who) {
    if (!rho.is_hermitian(tolerance))
        throw NumericsError(std::string(who) + ": density matrix not Hermitian");
    if (std::abs(rho.trace() - cplx{1.0}) > tolerance)
        throw NumericsError(std::string(who) + ": density matrix trace not 1");
    if (!rho.is_psd(tolerance))
        throw NumericsError(std::string(who) + ": density matrix not PSD");
}

// Uhlmann fidelity F = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, clamped to [0,1].
inline double fidelity(const CMatrix& rho, const CMatrix& sigma) {
    if (rho.dim() != sigma.dim()) throw DimensionError("fidelity: dimension mismatch");
    require_density_matrix(rho, tol::tomographic, "fidelity");
    require_density_matrix(sigma, tol::tomographic, "fidelity");

    // Clip tiny negative eigenvalues so the square root is defined.
    const EighResult er = eigh(rho);
    CMatrix sr(rho.dim());
    for (int k = 0; k < rho.dim(); ++k) {
        const double r = std::sqrt(std::max(0.0, er.values[static_cast<size_t>(k)]));
        const CVector col = er.vectors.column(k);
        for (int i = 0; i < rho.dim(); ++i)
            for (int j = 0; j < rho.dim(); ++j) sr.at(i, j) += r * col[i] * std::conj(col[j]);
    }
    CMatrix m = matmul(matmul(sr, sigma), sr);
    CMatrix herm(m.dim());
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) herm.at(i, j) = 0.5 * (m.at(i, j) + std::conj(m.at(j, i)));
    const EighResult em = eigh(herm);
    // Inputs are unit-trace, so eigenvalues below ~100 eps are rounding
    // noise; the square root would amplify them to ~1e-8 and break the
    // symmetry of F. Drop them.
    double tr = 0.0;
    for (double lam : em.values)
        if (lam >= 1e-14) tr += std::sqrt(lam);
    return std::clamp(tr * tr, 0.0, 1.0);
}

// Project a Hermitian near-density-matrix to the PSD unit-trace cone:
// clip negative eigenvalues at zero, renormalize the trace. Idempotent on
// valid density matrices.
inline CMatrix nearest_psd(const CMatrix& m) {
    if (!m.is_hermitian(tol::tomographic)) throw NumericsError("nearest_psd: matrix not Hermitian");
    CMatrix herm(m.dim());
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) herm.at(i, j) = 0.5 * (m.at(i, j) + std::conj(m.at(j, i)));
    const EighResult e = eigh(herm);
    CMatrix out(m.dim());
    double tr = 0.0;
    for (int k = 0; k < m.dim(); ++k) {
        const double lam = std::max(0.0, e.values[static_cast<size_t>(k)]);
        tr += lam;
        if (lam == 0.0) continue;
        const CVector col = e.vectors.column(k);
        for (int i = 0; i < m.dim(); ++i)
            for (int j = 0; j < m.dim(); ++j) out.at(i, j) += lam * col[i] * std::conj(col[j]);
    }
    if (tr <= 0.0) throw NumericsError("nearest_psd: no positive spectral weight");
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) out.at(i, j) = out.at(i, j) / tr;
    return out;
}

// (1/2)||a - b||_1 for Hermitian a, b.
inline double trace_distance(const CMatrix& a, const CMatrix& b) {
    CMatrix d = a - b;
    CMatrix herm(d.dim());
    for (int i = 0; i < d.dim(); ++i)
        for (int j = 0; j < d.dim(); ++j) herm.at(i, j) = 0.5 * (d.at(i, j) + std::conj(d.at(j, i)));
    const EighResult e = eigh(herm);
    double s = 0.0;
    for (double lam : e.values) s += std::abs(lam);
    return 0.5 * s;
}

// Gauss-Jordan inverse with partial pivoting.
inline CMatrix inverse(const CMatrix& m) {
    const int n = m.dim();
    CMatrix a = m;
    CMatrix inv = CMatrix::identity(n);
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a.at(r, col)) > std::abs(a.at(pivot, col))) pivot = r;
        if (std::abs(a.at(pivot, col)) < 1e-300) throw NumericsError("inverse: singular matrix");
        if (pivot != col)
            for (int j = 0; j < n; ++j) {
                std::swap(a.at(pivot, j), a.at(col, j));
                std::swap(inv.at(pivot, j), inv.at(col, j));
            }
        const cplx d = a.at(col, col);
        for (int j = 0; j < n; ++j) {
            a.at(col, j) /= d;
            inv.at(col, j) /= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const cplx f = a.at(r, col);
            if (f == cplx{}) continue;
            for (int j = 0; j < n; ++j) {
                a.at(r, j) -= f * a.at(col, j);
                inv.at(r, j) -= f * inv.at(col, j);
            }
        }
    }
    return inv;
}

namespace pauli {
inline CMatrix id() { return CMatrix::identity(2); }
inline CMatrix x() { return CMatrix(2, {0, 1, 1, 0}); }
inline CMatrix y() { return CMatrix(2, {0, cplx(0, -1), cplx(0, 1), 0}); }
inline CMatrix z() { return CMatrix(2, {1, 0, 0, -1}); }
inline CMatrix plus() { return CMatrix(2, {0, 1, 0, 0}); }   // sigma_+
inline CMatrix minus() { return CMatrix(2, {0, 0, 1, 0}); }  // sigma_-
}  // namespace pauli

}  // namespace ptsim
