#pragma once

#include <complex>
#include <vector>

#include "trspec/errors.hpp"

namespace trspec {

using cplx = std::complex<double>;

// Dense row-major complex matrix. Sizes in this library are tiny (the number
// of species), so everything is kept simple and allocation-friendly.
struct ComplexMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<cplx> a;

    ComplexMatrix() = default;
    ComplexMatrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}

    cplx& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const cplx& at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    static ComplexMatrix identity(int n);
    static ComplexMatrix zero(int r, int c) { return ComplexMatrix(r, c); }

    bool square() const { return rows == cols; }
};

ComplexMatrix operator*(const ComplexMatrix& x, const ComplexMatrix& y);
ComplexMatrix operator+(const ComplexMatrix& x, const ComplexMatrix& y);
ComplexMatrix operator-(const ComplexMatrix& x, const ComplexMatrix& y);
ComplexMatrix operator*(const cplx& s, const ComplexMatrix& x);
std::vector<cplx> operator*(const ComplexMatrix& x, const std::vector<cplx>& v);

cplx trace(const ComplexMatrix& m);
double frobenius_norm(const ComplexMatrix& m);
double inf_norm(const ComplexMatrix& m);  // max absolute row sum
bool all_finite(const ComplexMatrix& m);

// Determinant via LU with partial pivoting.
cplx det(const ComplexMatrix& m);

// Eigenvalues with multiplicity plus a backward-error estimate per value.
// residuals[i] is ||m x - values[i] x|| for a unit vector x obtained by
// inverse iteration, which is within a small factor of sigma_min(m - values[i] I).
struct EigenSet {
    std::vector<cplx> values;
    std::vector<double> residuals;
};

// Complex Hessenberg reduction followed by shifted QR. Throws NonSquare,
// NonFinite, or NoConvergence (iteration cap 100 * order).
EigenSet eigenvalues(const ComplexMatrix& m);

// e^{t m} by scaling and squaring with a truncated Taylor core; the number of
// squarings is chosen so the scaled norm is at most 0.5.
ComplexMatrix expm(const ComplexMatrix& m, double t);

// Coefficients of det(lambda I - m), highest degree first (monic). Uses the
// Faddeev-LeVerrier recursion, exact on integer inputs. Throws OrderTooLarge
// for order > 8.
std::vector<cplx> char_poly(const ComplexMatrix& m);

} // namespace trspec
