// Shared builders for the operator examples exercised across the test suites.
#pragma once

#include <sobscale/operators.hpp>
#include <sobscale/torus.hpp>

#include <complex>
#include <map>
#include <utility>
#include <vector>

namespace sobscale::testing {

using Complex = std::complex<double>;

// -i d/dx_j as a scalar operator in n variables.
inline ScalarDiffOp make_d(int dim, int j) {
    MultiIndex alpha(static_cast<std::size_t>(dim), 0);
    alpha[static_cast<std::size_t>(j)] = 1;
    return ScalarDiffOp::derivative_op(dim, alpha);
}

// Multiplication by a constant.
inline ScalarDiffOp make_const(int dim, Complex c) {
    return ScalarDiffOp::multiplication(TrigPoly::constant(dim, c));
}

// diag(D, D) on the circle: kernel and cokernel are both spanned by the
// constant vectors, so the index is zero with two-dimensional defect spaces.
inline MatrixDiffOp make_diag_dd() {
    const ScalarDiffOp d = make_d(1, 0);
    const ScalarDiffOp zero(1);
    return MatrixDiffOp(2, 1, {d, zero, zero, d});
}

// [[D, 1], [-1, D]] on the circle: elliptic and bijective (det(k) = k^2 + 1
// never vanishes, so there are no singular frequencies).
inline MatrixDiffOp make_coupled() {
    return MatrixDiffOp(2, 1,
                        {make_d(1, 0), make_const(1, 1.0),
                         make_const(1, -1.0), make_d(1, 0)});
}

// [[D - 1, 0], [0, D]]: singular frequencies k = 0 and k = 1, one null
// direction each.
inline MatrixDiffOp make_split_shift() {
    const ScalarDiffOp d_minus_1 = make_d(1, 0) + make_const(1, -1.0);
    return MatrixDiffOp(2, 1,
                        {d_minus_1, ScalarDiffOp(1),
                         ScalarDiffOp(1), make_d(1, 0)});
}

// Cauchy-Riemann system [[D1, -D2], [D2, D1]] on the 2-torus: the principal
// determinant is xi_1^2 + xi_2^2, identically one on the unit sphere.
inline MatrixDiffOp make_cauchy_riemann() {
    const ScalarDiffOp d1 = make_d(2, 0);
    const ScalarDiffOp d2 = make_d(2, 1);
    return MatrixDiffOp(2, 2, {d1, d2 * Complex(-1.0, 0.0), d2, d1});
}

// [[D1, D2], [D2, D1]]: determinant xi_1^2 - xi_2^2 vanishes on the
// diagonals, so the system is not elliptic.
inline MatrixDiffOp make_hyperbolic() {
    const ScalarDiffOp d1 = make_d(2, 0);
    const ScalarDiffOp d2 = make_d(2, 1);
    return MatrixDiffOp(2, 2, {d1, d2, d2, d1});
}

// 2 cos x as a trig polynomial on the circle.
inline TrigPoly make_two_cos_x() {
    return TrigPoly(1, {{Frequency{{1}}, Complex(1.0, 0.0)},
                        {Frequency{{-1}}, Complex(1.0, 0.0)}});
}

// [[D + 0.2 cos x, 1], [-1, D]]: same principal part as make_coupled() but
// with a genuinely x-dependent lower-order coefficient.
inline MatrixDiffOp make_variable_coupled() {
    const ScalarDiffOp top =
        make_d(1, 0) + ScalarDiffOp::multiplication(make_two_cos_x() * Complex(0.1, 0.0));
    return MatrixDiffOp(2, 1,
                        {top, make_const(1, 1.0),
                         make_const(1, -1.0), make_d(1, 0)});
}

// Exact term-by-term equality of two scalar expressions (coefficient maps
// compared bitwise).
inline bool same_terms(const ScalarDiffOp& a, const ScalarDiffOp& b) {
    if (a.terms().size() != b.terms().size()) return false;
    for (const auto& [alpha, poly] : a.terms()) {
        const auto it = b.terms().find(alpha);
        if (it == b.terms().end() || it->second.coeffs() != poly.coeffs()) return false;
    }
    return true;
}

// Single-mode basis vector e^{i<k,x>} in component `comp` of a p-vector.
inline TrigVector make_mode(int p, int dim, const Frequency& k, int comp,
                            Complex coeff = Complex(1.0, 0.0)) {
    std::vector<TrigPoly> comps;
    comps.reserve(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) {
        if (j == comp) {
            comps.push_back(TrigPoly::monomial(dim, k, coeff));
        } else {
            comps.emplace_back(dim);
        }
    }
    return TrigVector(std::move(comps));
}

}  // namespace sobscale::testing
