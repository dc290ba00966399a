#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sobscale/errors.hpp>
#include <sobscale/fredholm.hpp>

#include "test_helpers.hpp"

#include <cmath>
#include <complex>
#include <vector>

using namespace sobscale;
using namespace sobscale::testing;
using namespace std::complex_literals;

namespace {
const RoFunction kFlat = RoFunction::log_power(0.0);

TrigVector random_vector(int p, int dim, int band, std::uint64_t seed) {
    std::vector<TrigPoly> comps;
    for (int j = 0; j < p; ++j) comps.push_back(random_trig(dim, band, kFlat, 1.0, seed + 17 * j));
    return TrigVector(std::move(comps));
}
}  // namespace

TEST_CASE("frequency symbols of constant-coefficient systems") {
    const Eigen::MatrixXcd M = full_symbol_const(make_coupled(), Frequency{{3}});
    CHECK(M(0, 0) == 3.0 + 0.0i);
    CHECK(M(0, 1) == 1.0 + 0.0i);
    CHECK(M(1, 0) == -1.0 + 0.0i);
    CHECK(M(1, 1) == 3.0 + 0.0i);

    CHECK_THROWS_AS(full_symbol_const(make_variable_coupled(), Frequency{{0}}), DomainError);
    CHECK_THROWS_AS(full_symbol_const(make_coupled(), Frequency{{1, 2}}), DimensionError);
}

TEST_CASE("singular frequencies on the line carry a certified radius") {
    const SingularScan dd = singular_frequencies(make_diag_dd());
    REQUIRE(dd.frequencies.size() == 1);
    CHECK(dd.frequencies[0].first == Frequency{{0}});
    CHECK(dd.frequencies[0].second == 2);  // nullity of the zero matrix in C^2
    CHECK(dd.guarantee == ScanGuarantee::Exact);

    const SingularScan split = singular_frequencies(make_split_shift());
    REQUIRE(split.frequencies.size() == 2);
    CHECK(split.frequencies[0].first == Frequency{{0}});
    CHECK(split.frequencies[0].second == 1);
    CHECK(split.frequencies[1].first == Frequency{{1}});
    CHECK(split.frequencies[1].second == 1);
    CHECK(split.guarantee == ScanGuarantee::Exact);

    // det(k) = k^2 + 1 never vanishes
    CHECK(singular_frequencies(make_coupled()).frequencies.empty());
    CHECK(singular_frequencies(make_coupled()).guarantee == ScanGuarantee::Exact);

    CHECK_THROWS_AS(singular_frequencies(make_variable_coupled()), DomainError);
}

TEST_CASE("singular frequencies on the plane: certified lower bound") {
    const SingularScan cr = singular_frequencies(make_cauchy_riemann());
    REQUIRE(cr.frequencies.size() == 1);
    CHECK(cr.frequencies[0].first == Frequency{{0, 0}});
    CHECK(cr.frequencies[0].second == 2);
    CHECK(cr.guarantee == ScanGuarantee::Exact);
    CHECK(cr.radius >= 16);

    CHECK_THROWS_AS(singular_frequencies(make_hyperbolic()), EllipticityError);
}

TEST_CASE("kernel and cokernel bases are orthonormal with matching dimensions") {
    const FredholmReport dd = kernel_cokernel(make_diag_dd());
    CHECK(dd.kernel_basis.size() == 2);
    CHECK(dd.cokernel_basis.size() == 2);
    CHECK(dd.index == 0);
    for (const auto& v : dd.kernel_basis) CHECK(v.bandwidth() == 0);  // constants

    const FredholmReport split = kernel_cokernel(make_split_shift());
    CHECK(split.kernel_basis.size() == 2);
    CHECK(split.cokernel_basis.size() == 2);
    CHECK(split.index == 0);

    const FredholmReport none = kernel_cokernel(make_coupled());
    CHECK(none.kernel_basis.empty());
    CHECK(none.cokernel_basis.empty());
    CHECK(none.index == 0);

    for (const FredholmReport& rep : {dd, split}) {
        for (std::size_t i = 0; i < rep.kernel_basis.size(); ++i) {
            for (std::size_t j = 0; j < rep.kernel_basis.size(); ++j) {
                const Complex g = inner_product(rep.kernel_basis[i], rep.kernel_basis[j]);
                CHECK(std::abs(g - (i == j ? 1.0 : 0.0)) <= 1e-12);
            }
        }
        for (std::size_t i = 0; i < rep.cokernel_basis.size(); ++i) {
            for (std::size_t j = 0; j < rep.cokernel_basis.size(); ++j) {
                const Complex g = inner_product(rep.cokernel_basis[i], rep.cokernel_basis[j]);
                CHECK(std::abs(g - (i == j ? 1.0 : 0.0)) <= 1e-12);
            }
        }
    }
}

TEST_CASE("the image of the operator is orthogonal to the cokernel") {
    for (const MatrixDiffOp& A : {make_diag_dd(), make_split_shift()}) {
        const FredholmReport rep = kernel_cokernel(A);
        for (std::uint64_t seed = 1; seed <= 25; ++seed) {
            const TrigVector u = random_vector(2, 1, 12, 1000 * seed);
            const TrigVector Au = A.apply(u);
            for (const TrigVector& c : rep.cokernel_basis) {
                CHECK(std::abs(inner_product(Au, c)) <= 1e-10 * (1.0 + hnorm_vector(Au, kFlat)));
            }
        }
    }
}

TEST_CASE("kernel-complement and range projections") {
    const FredholmReport rep = kernel_cokernel(make_diag_dd());
    const TrigVector u = random_vector(2, 1, 6, 9);
    const TrigVector pu = project_kernel_complement(u, rep);
    for (const TrigVector& b : rep.kernel_basis) CHECK(std::abs(inner_product(pu, b)) <= 1e-12);
    // idempotent
    const TrigVector ppu = project_kernel_complement(pu, rep);
    CHECK(hnorm_vector(ppu - pu, kFlat) <= 1e-13 * (1.0 + hnorm_vector(pu, kFlat)));

    const TrigVector f = random_vector(2, 1, 6, 21);
    const TrigVector pf = project_range(f, rep);
    for (const TrigVector& c : rep.cokernel_basis) CHECK(std::abs(inner_product(pf, c)) <= 1e-12);
}

TEST_CASE("frequency-wise solve: explicit inverses") {
    // diag(D, D): each mode divides by its frequency
    const TrigVector f =
        make_mode(2, 1, Frequency{{1}}, 0) + make_mode(2, 1, Frequency{{2}}, 1);
    const SolveResult sol = solve_const(make_diag_dd(), f, kFlat);
    CHECK(std::abs(sol.u[0].coeff(Frequency{{1}}) - 1.0) <= 1e-13);
    CHECK(std::abs(sol.u[1].coeff(Frequency{{2}}) - 0.5) <= 1e-13);
    CHECK(sol.u[0].coeffs().size() == 1);
    CHECK(sol.u[1].coeffs().size() == 1);
    CHECK(sol.residual <= 1e-12);
    CHECK(sol.compatibility_violation <= 1e-14);
    CHECK_FALSE(sol.projected);  // no data at the singular frequency

    // [[D, 1], [-1, D]] at k = 0 is the symplectic matrix: (1, 0) -> (0, 1)
    const TrigVector g = make_mode(2, 1, Frequency{{0}}, 0);
    const SolveResult sym = solve_const(make_coupled(), g, kFlat);
    CHECK(std::abs(sym.u[0].coeff(Frequency{{0}})) <= 1e-13);
    CHECK(std::abs(sym.u[1].coeff(Frequency{{0}}) - 1.0) <= 1e-13);
    CHECK(sym.residual <= 1e-12);
}

TEST_CASE("incompatible data throws with the violating cokernel direction") {
    const TrigVector f = make_mode(2, 1, Frequency{{0}}, 0);  // constant in comp 0
    try {
        solve_const(make_diag_dd(), f, kFlat);
        FAIL("expected IncompatibleDataError");
    } catch (const IncompatibleDataError& e) {
        CHECK(e.overlap() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(e.witness().p() == 2);
        CHECK(e.witness().bandwidth() == 0);
        CHECK(std::abs(inner_product(f, e.witness())) == doctest::Approx(1.0).epsilon(1e-12));
    }

    // with the tolerance lifted the solver projects the data instead
    SolveOptions loose;
    loose.compat_tol = 2.0;
    const SolveResult forced = solve_const(make_diag_dd(), f, kFlat, loose);
    CHECK(forced.projected);
    CHECK(forced.compatibility_violation == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(forced.residual == doctest::Approx(1.0).epsilon(1e-12));  // dropped component
}

TEST_CASE("minimum-norm pseudo-solution is orthogonal to the kernel") {
    // data at the singular frequency k = 0 of [[D-1, 0], [0, D]] in the range
    // direction only: component 0 sees (k-1) u = f
    const TrigVector f = make_mode(2, 1, Frequency{{0}}, 0, 3.0);
    const SolveResult sol = solve_const(make_split_shift(), f, kFlat);
    CHECK(sol.projected);
    CHECK(std::abs(sol.u[0].coeff(Frequency{{0}}) - (-3.0)) <= 1e-13);  // (0-1)^{-1} * 3
    CHECK(sol.u[1].is_zero());  // kernel direction suppressed
    CHECK(sol.residual <= 1e-12);

    const FredholmReport rep = kernel_cokernel(make_split_shift());
    for (const TrigVector& b : rep.kernel_basis)
        CHECK(std::abs(inner_product(sol.u, b)) <= 1e-12);
}

TEST_CASE("dense compression agrees with the frequency-wise solve") {
    const TrigVector f =
        make_mode(2, 1, Frequency{{1}}, 0) + make_mode(2, 1, Frequency{{0}}, 0, 0.3) +
        make_mode(2, 1, Frequency{{-2}}, 1, Complex(0.0, 0.7));
    const SolveResult direct = solve_const(make_coupled(), f, kFlat);
    const GalerkinResult dense = solve_galerkin(make_coupled(), f, 8);
    CHECK(hnorm_vector(dense.result.u - direct.u, kFlat) <= 1e-10);
    CHECK(dense.numerical_kernel_dim == 0);
    CHECK(dense.numerical_cokernel_dim == 0);
    CHECK(dense.two_path_gap <= 1e-8);
    CHECK(dense.result.residual <= 1e-10);

    // with defect spaces present both solvers return the same minimum-norm answer
    const TrigVector g =
        make_mode(2, 1, Frequency{{3}}, 0) + make_mode(2, 1, Frequency{{1}}, 1, 2.0);
    const SolveResult pdirect = solve_const(make_diag_dd(), g, kFlat);
    const GalerkinResult pdense = solve_galerkin(make_diag_dd(), g, 8);
    CHECK(hnorm_vector(pdense.result.u - pdirect.u, kFlat) <= 1e-10);
    CHECK(pdense.numerical_kernel_dim == 2);
    CHECK(pdense.numerical_cokernel_dim == 2);
}

TEST_CASE("dense compression recovers a known variable-coefficient solution") {
    const MatrixDiffOp A = make_variable_coupled();
    const TrigVector u_true =
        make_mode(2, 1, Frequency{{1}}, 0) + make_mode(2, 1, Frequency{{2}}, 1, 2.0) +
        make_mode(2, 1, Frequency{{0}}, 1, 1.0);
    const TrigVector f = A.apply(u_true);  // exact sparse data, bandwidth 3
    const GalerkinResult sol = solve_galerkin(A, f, 16);
    CHECK(sol.numerical_kernel_dim == 0);
    CHECK(hnorm_vector(sol.result.u - u_true, kFlat) <= 1e-8);
    CHECK(sol.result.residual <= 1e-8);

    // the reported residual measures the full action, not the compressed one
    const double recomputed = hnorm_vector(A.apply(sol.result.u) - f, kFlat);
    CHECK(sol.result.residual == doctest::Approx(recomputed).epsilon(1e-10));
}

TEST_CASE("dense compression guards its preconditions") {
    // right-hand side band must leave room for coefficient convolution
    const TrigVector wide = make_mode(2, 1, Frequency{{8}}, 0);
    CHECK_THROWS_AS(solve_galerkin(make_variable_coupled(), wide, 8), DomainError);

    // memory guard
    GalerkinOptions tiny;
    tiny.max_rows = 10;
    CHECK_THROWS_AS(solve_galerkin(make_coupled(), make_mode(2, 1, Frequency{{1}}, 0), 8, tiny),
                    DomainError);

    // ellipticity is required
    CHECK_THROWS_AS(solve_galerkin(make_hyperbolic(), TrigVector(2, 2), 4), EllipticityError);

    // incompatible data is rejected with a witness
    CHECK_THROWS_AS(solve_galerkin(make_diag_dd(), make_mode(2, 1, Frequency{{0}}, 0), 8),
                    IncompatibleDataError);
}

TEST_CASE("residual norm honors the requested weight") {
    const RoFunction t = RoFunction::log_power(1.0);
    const TrigVector f = make_mode(2, 1, Frequency{{0}}, 0);
    SolveOptions loose;
    loose.compat_tol = 2.0;
    // residual (1, 0) measured in the weight t: hnorm = phi(1) = 1 at k = 0
    const SolveResult r = solve_const(make_diag_dd(), f, t, loose);
    CHECK(r.residual == doctest::Approx(1.0).epsilon(1e-12));

    GalerkinOptions gopt;
    gopt.residual_phi = t;
    const TrigVector g = make_mode(2, 1, Frequency{{1}}, 0);
    const GalerkinResult gr = solve_galerkin(make_coupled(), g, 8, gopt);
    CHECK(gr.result.residual <= 1e-10);
}
