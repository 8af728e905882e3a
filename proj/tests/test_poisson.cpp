#include "doctest.h"
#include "laxforge/linalg.hpp"
#include "laxforge/poisson.hpp"
#include "support/fixtures.hpp"

using namespace laxforge;
using namespace laxforge::testing;

namespace {

constexpr cplx kI{0.0, 1.0};

AdmissiblePair ref_pair(const ValidatedSystem& sys) { return select_admissible_pair(sys, cplx(1, 2), quadruple_w()); }

AdmissiblePair ref_conj_pair(const ValidatedSystem& sys) {
    return select_admissible_pair(sys, cplx(1, -2), conj(std::span<const cplx>(quadruple_w())));
}

// One pair per λ² up to conjugation.
std::vector<AdmissiblePair> distinct_class_pairs(const ValidatedSystem& sys) {
    std::vector<AdmissiblePair> out;
    for (const auto& p : all_pairs(sys)) {
        bool clash = false;
        for (const auto& q : out) clash = clash || std::abs(p.lambda_sq() - std::conj(q.lambda_sq())) < 1e-8;
        if (!clash) out.push_back(p);
    }
    return out;
}

}  // namespace

TEST_CASE("bracket_functions") {
    const auto ps = system_poisson(oscillator());
    CHECK(bracket_functions(ps, RealVector{1.0, 0.0}, RealVector{0.0, 1.0}) == doctest::Approx(1.0));
    CHECK(norm_max(ps.w_inv - inverse(RealMatrix(-standard_j()))) < 1e-15);

    SystemFactory f(2);
    for (int t = 0; t < 20; ++t) {
        const auto sys = f.gaussian(1 + t % 3);
        const auto p = system_poisson(sys);
        const auto a = f.random_vector(sys.dim());
        const auto b = f.random_vector(sys.dim());
        const auto c = f.random_vector(sys.dim());
        CHECK(std::abs(bracket_functions(p, a, a)) < 1e-12);
        CHECK(std::abs(bracket_functions(p, a, b) + bracket_functions(p, b, a)) < 1e-12);
        RealVector bc(sys.dim());
        for (std::size_t i = 0; i < bc.size(); ++i) bc[i] = 2.0 * b[i] - 3.0 * c[i];
        CHECK(std::abs(bracket_functions(p, a, bc) - (2.0 * bracket_functions(p, a, b) - 3.0 * bracket_functions(p, a, c))) <
              1e-12 * (1.0 + std::abs(bracket_functions(p, a, bc))) * 10);
    }
    CHECK_THROWS_AS(bracket_functions(ps, RealVector{1.0}, RealVector{1.0, 0.0}), Error);
    CHECK_THROWS_AS(poisson_structure(RealMatrix::identity(2)), Error);
}

TEST_CASE("hamiltonian_vector_field") {
    const auto sys = oscillator();
    const auto ps = system_poisson(sys);
    const RealVector x{1.0, 0.0};
    const RealVector grad = sys.p() * x;
    const RealVector v = hamiltonian_vector_field(ps, grad);
    const RealVector rhs = sys.flow_generator() * x;
    CHECK(v[0] == doctest::Approx(rhs[0]));
    CHECK(v[1] == doctest::Approx(rhs[1]));
    CHECK(v[1] == doctest::Approx(-1.0));
    CHECK(hamiltonian_vector_field(ps, RealVector{0.0, 0.0}) == RealVector{0.0, 0.0});

    SystemFactory f(3);
    for (int t = 0; t < 10; ++t) {
        const auto s = f.gaussian(2);
        const auto p = system_poisson(s);
        const auto y = f.random_vector(4);
        const auto field = hamiltonian_vector_field(p, s.p() * y);
        const auto direct = s.flow_generator() * y;
        for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(field[i] - direct[i]) < 1e-12 * (1.0 + std::abs(direct[i])));
        const auto g1 = f.random_vector(4);
        const auto g2 = f.random_vector(4);
        RealVector sum(4);
        for (std::size_t i = 0; i < 4; ++i) sum[i] = g1[i] + 0.5 * g2[i];
        const auto lhs = hamiltonian_vector_field(p, sum);
        const auto a = hamiltonian_vector_field(p, g1);
        const auto b = hamiltonian_vector_field(p, g2);
        for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(lhs[i] - a[i] - 0.5 * b[i]) < 1e-12 * (1.0 + std::abs(lhs[i])));
    }
}

TEST_CASE("quadratic_bracket") {
    const auto sys = quadruple_system();
    const auto i1 = integral_of_pair(ref_pair(sys));
    const auto i2 = integral_of_pair(ref_conj_pair(sys));
    CHECK(norm_max(quadratic_bracket(i1.s, i1.s, sys)) == 0.0);
    const auto br = quadratic_bracket(i1.s, i2.s, sys);
    CHECK(norm_max(br) < 1e-12);
    CHECK(involution_check(i1, i2, sys) < 1e-10);

    SystemFactory f(5);
    for (int t = 0; t < 20; ++t) {
        const auto s = f.gaussian(1 + t % 3);
        const std::size_t d = s.dim();
        ComplexMatrix m(d, d), n(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                m(i, j) = m(j, i) = cplx(f.gauss(), f.gauss());
                n(i, j) = n(j, i) = f.gauss();
            }
        const auto b = quadratic_bracket(m, n, s);
        CHECK(norm_max(b - b.transpose()) < 1e-12 * std::max(1.0, norm_max(b)));
        // pointwise: {xᵀMx, xᵀNx} from the gradients 2Mx, 2Nx
        const auto x = to_complex(f.random_vector(d));
        const auto gm = scale(m * x, 2.0);
        const auto gn = scale(n * x, 2.0);
        const cplx pointwise = bilinear(gm, to_complex(system_poisson(s).w_inv), gn);
        CHECK(std::abs(bilinear(x, b, x) - pointwise) < 1e-10 * std::max(1.0, std::abs(pointwise)));
        // consistency with the normalized residual
        const QuadraticIntegral qm{m, "m"}, qn{n, "n"};
        CHECK(involution_check(qm, qn, s) == doctest::Approx(norm_inf(b) / (norm_inf(m) * norm_inf(n))));
    }
    ComplexMatrix asym(4, 4);
    asym(0, 1) = 1.0;
    CHECK_THROWS_AS(quadratic_bracket(asym, i1.s, sys), Error);
}

TEST_CASE("involution_check") {
    const auto sys = quadruple_system();
    const auto i1 = integral_of_pair(ref_pair(sys));
    CHECK(involution_check(i1, i1, sys) == 0.0);

    SystemFactory f(6);
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = 1 + t % 3;
        const auto s = t % 2 ? f.mixed(n) : f.gaussian(n);
        const auto pairs = all_pairs(s);
        for (std::size_t i = 0; i < pairs.size(); ++i)
            for (std::size_t j = i + 1; j < pairs.size(); ++j) {
                if (std::abs(pairs[i].lambda_sq() - pairs[j].lambda_sq()) < 1e-8) continue;
                CHECK(involution_check(integral_of_pair(pairs[i]), integral_of_pair(pairs[j]), s) < 1e-9);
            }
    }
}

TEST_CASE("independence_check") {
    const auto sys = quadruple_system();
    const auto [re, im] = real_imag_split(integral_of_pair(ref_pair(sys)), integral_of_pair(ref_conj_pair(sys)));
    const std::vector<QuadraticIntegral> integrals{re, im};
    SystemFactory f(7);
    std::vector<RealVector> samples;
    for (int t = 0; t < 10; ++t) samples.push_back(f.random_vector(4));
    CHECK(independence_check(integrals, samples).min_rank == 2);
    const std::vector<RealVector> origin{RealVector(4)};
    CHECK(independence_check(integrals, origin).min_rank == 0);

    SUBCASE("on the codimension-2 locus g₁ = g₂ = 0 one gradient vanishes") {
        SystemFactory g(8);
        for (int t = 0; t < 10; ++t) {
            const auto s = g.from_blocks({BlockKind::Imaginary, BlockKind::Real, BlockKind::Imaginary});
            const auto pairs = all_pairs(s);
            std::vector<QuadraticIntegral> ints;
            for (const auto& p : pairs) ints.push_back(integral_of_pair(p));
            // x with xᵀw = xᵀŵ = 0 for the first pair: kernel of a real 2×6 system.
            std::vector<ComplexVector> rows{pairs[0].w, pairs[0].w_hat};
            const auto ker = null_space(stack_rows(rows), 1e-10);
            REQUIRE(ker.size() == 4);
            ComplexVector xc(6);
            for (std::size_t k = 0; k < ker.size(); ++k) xc = add(xc, scale(ker[k], g.gauss()));
            // λ² is real for pairs[0], so both constraints are real up to a phase
            const RealVector x = real_part(xc);
            const std::vector<RealVector> pts{x};
            CHECK(norm2(ints[0].s * to_complex(x)) < 1e-10 * norm2(x) * norm_max(ints[0].s));
            CHECK(independence_check(ints, pts, 1e-8).min_rank == 2);
            const std::vector<RealVector> generic{g.random_vector(6)};
            CHECK(independence_check(ints, generic, 1e-8).min_rank == 3);
        }
    }
}

TEST_CASE("gradient_formula_check") {
    SystemFactory f(9);
    for (int t = 0; t < 20; ++t) {
        const auto sys = f.gaussian(2);
        for (const auto& pair : all_pairs(sys)) {
            const auto r = gradient_formula_check(sys, pair, f.random_vector(4));
            CHECK(r.formula_residual < 1e-10);
            CHECK(r.eigen_residual < 1e-8);
        }
    }
    const auto sys = quadruple_system();
    const auto r0 = gradient_formula_check(sys, ref_pair(sys), RealVector(4));
    CHECK(r0.formula_residual == 0.0);
    CHECK(r0.eigen_residual == 0.0);
}

TEST_CASE("k_constant") {
    SUBCASE("three forms agree; scaling w by c scales K by c²") {
        SystemFactory f(10);
        for (int t = 0; t < 20; ++t) {
            const auto sys = t % 2 ? f.mixed(1 + t % 3) : f.gaussian(1 + t % 3);
            for (const auto& pair : all_pairs(sys)) {
                const auto forms = k_forms(pair, sys);
                CHECK(forms.spread < 1e-10);
                const cplx k = k_constant(pair, sys);
                const cplx c(0.7, -1.2);
                const auto scaled = unchecked_pair(sys, pair.lambda, scale(pair.w, c));
                CHECK(std::abs(k_constant(scaled, sys) - c * c * k) < 1e-10 * std::abs(c * c * k));
            }
        }
    }
    SUBCASE("normalized n = 1 pair: K = −iλ") {
        SystemFactory f(11);
        for (int t = 0; t < 10; ++t) {
            const auto sys = f.mixed(1);
            const auto pair = normalize_n1(all_pairs(sys).front(), sys);
            CHECK(std::abs(k_constant(pair, sys) + kI * pair.lambda) < 1e-10 * std::abs(pair.lambda));
        }
    }
    SUBCASE("an eigenvector w gives K = 0") {
        const auto sys = quadruple_system();
        const auto s = system_spectrum(sys);
        const auto pair = unchecked_pair(sys, s.eigenvalues[0], s.eigenvectors[0]);
        try {
            k_constant(pair, sys);
            FAIL("expected DegenerateK");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::DegenerateK);
        }
    }
}

TEST_CASE("target_structure") {
    SUBCASE("case 1 with K = 2") {
        // Oscillator, λ = i, w = (a, 0): K = −iλ·wᵀP⁻¹w = a², so a = √2 gives K = 2.
        const auto sys = oscillator();
        const auto pair = select_admissible_pair(sys, kI, ComplexVector{std::sqrt(2.0), 0.0});
        const auto ts = target_structure(pair, sys);
        CHECK(ts.kind == TargetCase::PureImaginary);
        CHECK(std::abs(ts.k - 2.0) < 1e-14);
        CHECK(norm_max(ts.matrix - RealMatrix{{0.0, -0.5}, {0.5, 0.0}}) < 1e-14);
    }
    SUBCASE("case 3: bracket table and det R") {
        const auto sys = quadruple_system();
        const auto ts = target_structure(ref_pair(sys), sys);
        CHECK(ts.kind == TargetCase::Complex);
        const RealMatrix y = inverse(ts.matrix);
        CHECK(std::abs(y(0, 1)) < 1e-12);
        CHECK(std::abs(y(2, 3)) < 1e-12);
        CHECK(determinant(ts.r) == doctest::Approx(-std::norm(ts.k) / 4.0));
        CHECK(ts.r(0, 0) + ts.r(1, 1) == 0.0);
        const RealMatrix r_inv = inverse(ts.r);
        CHECK(std::abs(r_inv(0, 0) + r_inv(1, 1)) < 1e-14);
        CHECK(std::abs(r_inv(0, 1) - r_inv(1, 0)) < 1e-14);

        SystemFactory f(12);
        for (int t = 0; t < 20; ++t) {
            const auto s = f.from_blocks({BlockKind::Complex});
            const auto pairs = all_pairs(s);
            for (const auto& p : pairs) {
                const auto tsr = target_structure(p, s);
                CHECK(determinant(tsr.r) == doctest::Approx(-std::norm(tsr.k) / 4.0).epsilon(1e-12));
            }
        }
    }
    SUBCASE("case 2 gives a real matrix") {
        const auto sys = validate_system(standard_j(), RealMatrix{{0.0, 1.5}, {1.5, 0.0}});
        const auto pair = all_pairs(sys).front();
        REQUIRE(pair.lambda_class == LambdaClass::Real);
        const auto ts = target_structure(pair, sys);
        CHECK(ts.kind == TargetCase::Real);
        CHECK(std::abs(ts.k.real()) < 1e-12 * std::abs(ts.k));
        CHECK(ts.matrix(0, 1) == -ts.matrix(1, 0));
    }
    SUBCASE("a non-real w in case 1 is a case mismatch") {
        const auto sys = oscillator();
        const auto pair = select_admissible_pair(sys, kI, ComplexVector{1.0, cplx(0.5, 0.5)});
        try {
            target_structure(pair, sys);
            FAIL("expected CaseMismatch");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::CaseMismatch);
        }
    }
}

TEST_CASE("poisson_map_check") {
    SUBCASE("case 1: {xᵀw, xᵀŵ} = K") {
        const auto sys = oscillator();
        const auto pair = all_pairs(sys).front();
        const auto ts = target_structure(pair, sys);
        const auto ps = system_poisson(sys);
        const auto cov = pullback_covectors(pair, ts.kind);
        CHECK(std::abs(bracket_functions(ps, cov[0], cov[1]) - ts.k.real()) < 1e-14);
        CHECK(bracket_functions(ps, cov[0], cov[0]) == 0.0);
        CHECK(poisson_map_check(pair, sys, ts) < 1e-12);
    }
    SUBCASE("case 3 on the reference system: every entry of the R table") {
        const auto sys = quadruple_system();
        const auto pair = ref_pair(sys);
        const auto ts = target_structure(pair, sys);
        CHECK(poisson_map_check(pair, sys, ts) < 1e-10);
        const auto cov = pullback_covectors(pair, ts.kind);
        const auto ps = system_poisson(sys);
        const cplx k = ts.k;
        CHECK(std::abs(bracket_functions(ps, cov[0], cov[2]) - (k + std::conj(k)).real() / 4.0) < 1e-12);
        CHECK(std::abs(bracket_functions(ps, cov[0], cov[3]) - (kI / 4.0 * (std::conj(k) - k)).real()) < 1e-12);
        CHECK(std::abs(bracket_functions(ps, cov[1], cov[2]) - (kI / 4.0 * (std::conj(k) - k)).real()) < 1e-12);
        CHECK(std::abs(bracket_functions(ps, cov[1], cov[3]) + (k + std::conj(k)).real() / 4.0) < 1e-12);
        CHECK(std::abs(bracket_functions(ps, cov[0], cov[1])) < 1e-12);
        CHECK(std::abs(bracket_functions(ps, cov[2], cov[3])) < 1e-12);
        for (std::size_t i = 0; i < 4; ++i) CHECK(bracket_functions(ps, cov[i], cov[i]) == doctest::Approx(0.0));
    }
    SUBCASE("property: every valid pair on random systems") {
        SystemFactory f(13);
        for (int t = 0; t < 30; ++t) {
            const auto sys = t % 2 ? f.mixed(1 + t % 3) : f.gaussian(1 + t % 3);
            for (const auto& pair : all_pairs(sys)) {
                const auto ts = target_structure(pair, sys);
                CHECK(poisson_map_check(pair, sys, ts, 10, static_cast<std::uint64_t>(t)) < 1e-9);
            }
        }
    }
}

TEST_CASE("pushforward_hamiltonian_check") {
    SUBCASE("case 1: real scalar matrix") {
        const auto sys = oscillator();
        const auto pair = all_pairs(sys).front();
        const auto r = pushforward_hamiltonian_check(sys, pair, target_structure(pair, sys));
        CHECK(r.ok);
        CHECK(r.reality_residual < 1e-12);
        CHECK(std::abs(r.hamiltonian(0, 1)) < 1e-14);
        CHECK(r.hamiltonian(0, 0) == doctest::Approx(r.hamiltonian(1, 1)));
    }
    SUBCASE("case 3 on the reference system: Q = diag(M, M)") {
        const auto sys = quadruple_system();
        const auto pair = ref_pair(sys);
        const auto r = pushforward_hamiltonian_check(sys, pair, target_structure(pair, sys));
        CHECK(r.ok);
        CHECK(r.block_residual < 1e-12);
        CHECK(std::abs(r.det_m) > 1e-6);
        CHECK(r.flow_residual < 1e-12);
    }
    SUBCASE("symmetric traceless times F stays symmetric traceless") {
        SystemFactory f(14);
        for (int t = 0; t < 20; ++t) {
            const double p = f.gauss(), q = f.gauss(), a1 = f.gauss(), a2 = f.gauss();
            const RealMatrix m{{p, q}, {q, -p}};
            const RealMatrix fm{{a2, a1}, {-a1, a2}};
            const RealMatrix prod = m * fm;
            CHECK(std::abs(prod(0, 1) - prod(1, 0)) < 1e-12);
            CHECK(std::abs(prod(0, 0) + prod(1, 1)) < 1e-12);
        }
    }
    SUBCASE("property: all cases on random systems") {
        SystemFactory f(15);
        for (int t = 0; t < 30; ++t) {
            const auto sys = f.mixed(1 + t % 3);
            for (const auto& pair : all_pairs(sys)) {
                const auto r = pushforward_hamiltonian_check(sys, pair, target_structure(pair, sys));
                CHECK(r.ok);
            }
        }
    }
}

TEST_CASE("product_poisson_check") {
    SUBCASE("random n = 2 systems, distinct classes") {
        SystemFactory f(16);
        for (int t = 0; t < 15; ++t) {
            const auto sys = t % 3 == 0 ? f.from_blocks({BlockKind::Imaginary, BlockKind::Real}) : f.mixed(2 + t % 2);
            const auto pairs = distinct_class_pairs(sys);
            const auto r = product_poisson_check(pairs, sys);
            CHECK(r.cross_bracket_max < 1e-10);
            CHECK(r.total_residual < 1e-9);
            for (double b : r.block_residuals) CHECK(b < 1e-9);
        }
    }
    SUBCASE("single pair reduces to poisson_map_check") {
        const auto sys = quadruple_system();
        const std::vector<AdmissiblePair> one{ref_pair(sys)};
        const auto r = product_poisson_check(one, sys);
        CHECK(r.cross_bracket_max == 0.0);
        CHECK(r.total_residual == doctest::Approx(poisson_map_check(one[0], sys, target_structure(one[0], sys), 0)));
    }
    SUBCASE("λ₁² = conj(λ₂²) is rejected") {
        const auto sys = quadruple_system();
        const std::vector<AdmissiblePair> clash{ref_pair(sys), ref_conj_pair(sys)};
        try {
            product_poisson_check(clash, sys);
            FAIL("expected HypothesisViolation");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::HypothesisViolation);
        }
    }
}
