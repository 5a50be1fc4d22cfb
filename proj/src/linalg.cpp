#include "trspec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace trspec {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_square(const ComplexMatrix& m, const char* who) {
    if (!m.square() || m.rows == 0)
        throw NonSquare(std::string(who) + ": matrix must be square and non-empty");
}

void require_finite(const ComplexMatrix& m, const char* who) {
    if (!all_finite(m))
        throw NonFinite(std::string(who) + ": matrix has a non-finite entry");
}

} // namespace

ComplexMatrix ComplexMatrix::identity(int n) {
    ComplexMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

ComplexMatrix operator*(const ComplexMatrix& x, const ComplexMatrix& y) {
    if (x.cols != y.rows) throw NonSquare("operator*: inner dimensions disagree");
    ComplexMatrix z(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i) {
        for (int l = 0; l < x.cols; ++l) {
            const cplx xl = x.at(i, l);
            if (xl == cplx(0.0)) continue;
            for (int j = 0; j < y.cols; ++j) z.at(i, j) += xl * y.at(l, j);
        }
    }
    return z;
}

ComplexMatrix operator+(const ComplexMatrix& x, const ComplexMatrix& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw NonSquare("operator+: shapes disagree");
    ComplexMatrix z = x;
    for (size_t i = 0; i < z.a.size(); ++i) z.a[i] += y.a[i];
    return z;
}

ComplexMatrix operator-(const ComplexMatrix& x, const ComplexMatrix& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw NonSquare("operator-: shapes disagree");
    ComplexMatrix z = x;
    for (size_t i = 0; i < z.a.size(); ++i) z.a[i] -= y.a[i];
    return z;
}

ComplexMatrix operator*(const cplx& s, const ComplexMatrix& x) {
    ComplexMatrix z = x;
    for (auto& e : z.a) e *= s;
    return z;
}

std::vector<cplx> operator*(const ComplexMatrix& x, const std::vector<cplx>& v) {
    if (x.cols != static_cast<int>(v.size()))
        throw NonSquare("operator*: vector length disagrees with matrix");
    std::vector<cplx> w(x.rows);
    for (int i = 0; i < x.rows; ++i) {
        cplx s = 0.0;
        for (int j = 0; j < x.cols; ++j) s += x.at(i, j) * v[j];
        w[i] = s;
    }
    return w;
}

cplx trace(const ComplexMatrix& m) {
    require_square(m, "trace");
    cplx s = 0.0;
    for (int i = 0; i < m.rows; ++i) s += m.at(i, i);
    return s;
}

double frobenius_norm(const ComplexMatrix& m) {
    double s = 0.0;
    for (const auto& e : m.a) s += std::norm(e);
    return std::sqrt(s);
}

double inf_norm(const ComplexMatrix& m) {
    double best = 0.0;
    for (int i = 0; i < m.rows; ++i) {
        double r = 0.0;
        for (int j = 0; j < m.cols; ++j) r += std::abs(m.at(i, j));
        best = std::max(best, r);
    }
    return best;
}

bool all_finite(const ComplexMatrix& m) {
    for (const auto& e : m.a)
        if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) return false;
    return true;
}

cplx det(const ComplexMatrix& m) {
    require_square(m, "det");
    require_finite(m, "det");
    ComplexMatrix lu = m;
    const int n = lu.rows;
    cplx d = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(lu.at(r, c)) > std::abs(lu.at(piv, c))) piv = r;
        if (piv != c) {
            for (int j = 0; j < n; ++j) std::swap(lu.at(c, j), lu.at(piv, j));
            d = -d;
        }
        const cplx p = lu.at(c, c);
        if (p == cplx(0.0)) return 0.0;
        d *= p;
        for (int r = c + 1; r < n; ++r) {
            const cplx f = lu.at(r, c) / p;
            for (int j = c; j < n; ++j) lu.at(r, j) -= f * lu.at(c, j);
        }
    }
    return d;
}

namespace {

// Similarity reduction to upper Hessenberg form with complex Householder
// reflectors P = I - 2 v v^H.
void hessenberg(ComplexMatrix& h) {
    const int n = h.rows;
    std::vector<cplx> v(n);
    for (int c = 0; c + 2 < n; ++c) {
        double xnorm = 0.0;
        for (int i = c + 1; i < n; ++i) xnorm += std::norm(h.at(i, c));
        xnorm = std::sqrt(xnorm);
        if (xnorm == 0.0) continue;
        const cplx x0 = h.at(c + 1, c);
        const cplx phase = (x0 == cplx(0.0)) ? cplx(1.0) : x0 / std::abs(x0);
        const cplx alpha = -phase * xnorm;
        double vnorm = 0.0;
        for (int i = c + 1; i < n; ++i) {
            v[i] = h.at(i, c) - (i == c + 1 ? alpha : cplx(0.0));
            vnorm += std::norm(v[i]);
        }
        vnorm = std::sqrt(vnorm);
        if (vnorm <= kEps * xnorm) continue;
        for (int i = c + 1; i < n; ++i) v[i] /= vnorm;

        for (int j = c; j < n; ++j) {
            cplx s = 0.0;
            for (int i = c + 1; i < n; ++i) s += std::conj(v[i]) * h.at(i, j);
            s *= 2.0;
            for (int i = c + 1; i < n; ++i) h.at(i, j) -= v[i] * s;
        }
        for (int i = 0; i < n; ++i) {
            cplx s = 0.0;
            for (int j = c + 1; j < n; ++j) s += h.at(i, j) * v[j];
            s *= 2.0;
            for (int j = c + 1; j < n; ++j) h.at(i, j) -= s * std::conj(v[j]);
        }
        for (int i = c + 2; i < n; ++i) h.at(i, c) = 0.0;
        h.at(c + 1, c) = alpha;
    }
}

// Eigenvalues of [[a, b], [c, d]] with the larger-magnitude root computed
// first and its partner recovered from the determinant to avoid cancellation.
std::pair<cplx, cplx> eig2(cplx a, cplx b, cplx c, cplx d) {
    const cplx t = 0.5 * (a + d);
    const cplx disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
    const cplx l1 = (std::abs(t + disc) >= std::abs(t - disc)) ? t + disc : t - disc;
    const cplx dt = a * d - b * c;
    const cplx l2 = (l1 == cplx(0.0)) ? t - disc : dt / l1;
    return {l1, l2};
}

struct Givens {
    double c;
    cplx s;
};

// One explicit shifted QR sweep on the Hessenberg window [lo, hi].
void qr_step(ComplexMatrix& h, int lo, int hi, cplx mu) {
    for (int i = lo; i <= hi; ++i) h.at(i, i) -= mu;
    std::vector<Givens> rot(hi - lo);
    for (int i = lo; i < hi; ++i) {
        const cplx f = h.at(i, i);
        const cplx g = h.at(i + 1, i);
        double c;
        cplx s, r;
        const double af = std::abs(f), ag = std::abs(g);
        if (ag == 0.0) {
            c = 1.0; s = 0.0; r = f;
        } else if (af == 0.0) {
            c = 0.0; s = std::conj(g) / ag; r = ag;
        } else {
            const double hyp = std::hypot(af, ag);
            const cplx fs = f / af;
            c = af / hyp;
            s = fs * std::conj(g) / hyp;
            r = fs * hyp;
        }
        rot[i - lo] = {c, s};
        h.at(i, i) = r;
        h.at(i + 1, i) = 0.0;
        for (int j = i + 1; j <= hi; ++j) {
            const cplx t1 = h.at(i, j);
            const cplx t2 = h.at(i + 1, j);
            h.at(i, j) = c * t1 + s * t2;
            h.at(i + 1, j) = -std::conj(s) * t1 + c * t2;
        }
    }
    for (int i = lo; i < hi; ++i) {
        const double c = rot[i - lo].c;
        const cplx s = rot[i - lo].s;
        for (int r = lo; r <= std::min(i + 1, hi); ++r) {
            const cplx t1 = h.at(r, i);
            const cplx t2 = h.at(r, i + 1);
            h.at(r, i) = c * t1 + std::conj(s) * t2;
            h.at(r, i + 1) = -s * t1 + c * t2;
        }
    }
    for (int i = lo; i <= hi; ++i) h.at(i, i) += mu;
}

// Solve (a - lambda I) y = x by LU with partial pivoting, substituting a tiny
// pivot when the shifted matrix is numerically singular. Used for inverse
// iteration only, where the solve direction matters and the scale does not.
std::vector<cplx> shifted_solve(const ComplexMatrix& a, cplx lambda,
                                const std::vector<cplx>& x, double scale) {
    const int n = a.rows;
    ComplexMatrix lu = a;
    for (int i = 0; i < n; ++i) lu.at(i, i) -= lambda;
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    const double tiny = kEps * (scale > 0.0 ? scale : 1.0);
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(lu.at(r, c)) > std::abs(lu.at(piv, c))) piv = r;
        if (piv != c) {
            for (int j = 0; j < n; ++j) std::swap(lu.at(c, j), lu.at(piv, j));
            std::swap(perm[c], perm[piv]);
        }
        if (std::abs(lu.at(c, c)) < tiny) lu.at(c, c) = tiny;
        for (int r = c + 1; r < n; ++r) {
            const cplx f = lu.at(r, c) / lu.at(c, c);
            lu.at(r, c) = f;
            for (int j = c + 1; j < n; ++j) lu.at(r, j) -= f * lu.at(c, j);
        }
    }
    std::vector<cplx> y(n);
    for (int i = 0; i < n; ++i) y[i] = x[perm[i]];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) y[i] -= lu.at(i, j) * y[j];
    for (int i = n - 1; i >= 0; --i) {
        for (int j = i + 1; j < n; ++j) y[i] -= lu.at(i, j) * y[j];
        y[i] /= lu.at(i, i);
    }
    return y;
}

double vec_norm(const std::vector<cplx>& v) {
    double s = 0.0;
    for (const auto& e : v) s += std::norm(e);
    return std::sqrt(s);
}

} // namespace

EigenSet eigenvalues(const ComplexMatrix& m) {
    require_square(m, "eigenvalues");
    require_finite(m, "eigenvalues");
    const int n = m.rows;

    EigenSet out;
    out.values.resize(n);
    out.residuals.assign(n, 0.0);

    ComplexMatrix h = m;
    hessenberg(h);

    const double fro = frobenius_norm(h);
    const int max_iters = 100 * n;
    int total = 0, stuck = 0;
    int hi = n - 1;
    while (hi >= 0) {
        if (hi == 0) {
            out.values[0] = h.at(0, 0);
            break;
        }
        int lo = hi;
        while (lo > 0) {
            double s = std::abs(h.at(lo - 1, lo - 1)) + std::abs(h.at(lo, lo));
            if (s == 0.0) s = fro;
            if (std::abs(h.at(lo, lo - 1)) <= kEps * s) {
                h.at(lo, lo - 1) = 0.0;
                break;
            }
            --lo;
        }
        if (lo == hi) {
            out.values[hi] = h.at(hi, hi);
            --hi;
            stuck = 0;
            continue;
        }
        if (lo == hi - 1) {
            auto [l1, l2] = eig2(h.at(lo, lo), h.at(lo, hi), h.at(hi, lo), h.at(hi, hi));
            out.values[hi] = l1;
            out.values[lo] = l2;
            hi -= 2;
            stuck = 0;
            continue;
        }
        if (++total > max_iters)
            throw NoConvergence("eigenvalues: QR iteration cap exceeded");
        ++stuck;
        cplx mu;
        if (stuck % 10 == 0) {
            mu = h.at(hi, hi) + 0.75 * (std::abs(h.at(hi, hi - 1)) + std::abs(h.at(hi - 1, hi - 2)));
        } else {
            auto [l1, l2] = eig2(h.at(hi - 1, hi - 1), h.at(hi - 1, hi), h.at(hi, hi - 1), h.at(hi, hi));
            mu = (std::abs(l1 - h.at(hi, hi)) <= std::abs(l2 - h.at(hi, hi))) ? l1 : l2;
        }
        qr_step(h, lo, hi, mu);
    }

    // Backward-error estimate: two rounds of inverse iteration on the original
    // matrix, then the residual of the resulting unit vector.
    const double scale = inf_norm(m);
    for (int e = 0; e < n; ++e) {
        if (!std::isfinite(out.values[e].real()) || !std::isfinite(out.values[e].imag()))
            throw NoConvergence("eigenvalues: non-finite value from QR iteration");
        std::vector<cplx> x(n);
        uint64_t state = 0x9e3779b97f4a7c15ull + 0x1000193ull * static_cast<uint64_t>(e);
        for (int i = 0; i < n; ++i) {
            state = state * 6364136223846793005ull + 1442695040888963407ull;
            const double re = static_cast<double>(state >> 11) / 9007199254740992.0 - 0.5;
            state = state * 6364136223846793005ull + 1442695040888963407ull;
            const double im = static_cast<double>(state >> 11) / 9007199254740992.0 - 0.5;
            x[i] = cplx(re, im);
        }
        const double solve_scale = scale + std::abs(out.values[e]);
        for (int round = 0; round < 2; ++round) {
            x = shifted_solve(m, out.values[e], x, solve_scale);
            const double nx = vec_norm(x);
            if (nx == 0.0 || !std::isfinite(nx)) break;
            for (auto& c : x) c /= nx;
        }
        std::vector<cplx> r = m * x;
        for (int i = 0; i < n; ++i) r[i] -= out.values[e] * x[i];
        out.residuals[e] = vec_norm(r);
    }
    return out;
}

ComplexMatrix expm(const ComplexMatrix& m, double t) {
    require_square(m, "expm");
    require_finite(m, "expm");
    if (!std::isfinite(t)) throw NonFinite("expm: time is not finite");
    const int n = m.rows;

    ComplexMatrix a = cplx(t) * m;
    const double eta = inf_norm(a);
    int squarings = 0;
    if (eta > 0.5) squarings = static_cast<int>(std::ceil(std::log2(eta / 0.5)));
    const double f = std::ldexp(1.0, -squarings);
    for (auto& e : a.a) e *= f;

    ComplexMatrix x = ComplexMatrix::identity(n);
    ComplexMatrix term = ComplexMatrix::identity(n);
    for (int k = 1; k <= 60; ++k) {
        term = cplx(1.0 / k) * (term * a);
        x = x + term;
        if (frobenius_norm(term) <= 1e-17 * frobenius_norm(x)) break;
    }
    for (int s = 0; s < squarings; ++s) x = x * x;
    if (!all_finite(x)) throw NonFinite("expm: overflow in result");
    return x;
}

std::vector<cplx> char_poly(const ComplexMatrix& m) {
    require_square(m, "char_poly");
    require_finite(m, "char_poly");
    const int n = m.rows;
    if (n > 8) throw OrderTooLarge("char_poly: supported up to order 8");

    // Faddeev-LeVerrier: M_1 = I, c_k = -trace(m M_k)/k, M_{k+1} = m M_k + c_k I.
    std::vector<cplx> coeffs(n + 1);
    coeffs[0] = 1.0;
    ComplexMatrix mk = ComplexMatrix::identity(n);
    for (int k = 1; k <= n; ++k) {
        ComplexMatrix am = m * mk;
        const cplx ck = -trace(am) / cplx(static_cast<double>(k));
        coeffs[k] = ck;
        if (k < n) {
            mk = am;
            for (int i = 0; i < n; ++i) mk.at(i, i) += ck;
        }
    }
    return coeffs;
}

} // namespace trspec
