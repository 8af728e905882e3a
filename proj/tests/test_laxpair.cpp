#include "doctest.h"
#include "laxforge/laxpair.hpp"
#include "laxforge/linalg.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace laxforge;
using namespace laxforge::testing;

namespace {

constexpr cplx kI{0.0, 1.0};

// ‖L(ẋ) − [B, L(x)]‖ along the exact vector field ẋ = −Γ⁻¹Px.
double lax_defect(const ValidatedSystem& sys, const LaxPairModel& m, const RealVector& x) {
    const RealVector xdot = sys.flow_generator() * x;
    const ComplexMatrix l = m.evaluate(x);
    return norm_max(m.evaluate(xdot) - commutator(m.b, l)) / std::max(1.0, norm_max(l));
}

double h1(const RealVector& x) { return x[0] * x[1] + x[2] * x[3]; }
double h2(const RealVector& x) { return x[0] * x[3] - x[1] * x[2]; }

// Tr(AB)
cplx trace_square_mixed(const ComplexMatrix& a, const ComplexMatrix& b) {
    cplx acc{};
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * b(j, i);
    return acc;
}

double rel(cplx got, cplx want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

}  // namespace

TEST_CASE("build_lax2") {
    SUBCASE("reference system: covectors are w and w_hat") {
        const auto sys = quadruple_system();
        const auto pair = select_admissible_pair(sys, cplx(1, 2), quadruple_w());
        const auto m = build_lax2(pair);
        CHECK(m.k == 2);
        CHECK(m.kind == LaxKind::Dim2);
        const RealVector x{0.3, -1.1, 0.7, 2.0};
        const auto l = m.evaluate(x);
        const auto xc = to_complex(x);
        const ComplexVector w_hat{kI, -kI, -1.0, -1.0};
        CHECK(std::abs(l(0, 0) - dot(xc, quadruple_w())) < 1e-14);
        CHECK(std::abs(l(0, 1) - dot(xc, w_hat)) < 1e-14);
        CHECK(l(0, 1) == l(1, 0));
        CHECK(l(0, 0) == -l(1, 1));
        CHECK(lax_defect(sys, m, x) < 1e-13);
    }
    SUBCASE("x = 0 gives L = 0 and leaves B alone") {
        const auto m = build_lax2(select_admissible_pair(quadruple_system(), cplx(1, 2), quadruple_w()));
        CHECK(norm_max(m.evaluate(RealVector(4))) == 0.0);
        CHECK(std::abs(m.b(0, 1) - (-kI * cplx(1, 2) / 2.0)) < 1e-15);
    }
    SUBCASE("oscillator, λ = i, w = e₁") {
        const auto sys = oscillator();
        const ComplexVector e1{1.0, 0.0};
        const auto m = build_lax2(select_admissible_pair(sys, kI, e1));
        CHECK(norm_max(m.b - ComplexMatrix{{0.0, 0.5}, {-0.5, 0.0}}) < 1e-15);
        CHECK(lax_defect(sys, m, RealVector{0.4, -0.9}) < 1e-14);
    }
}

TEST_CASE("integral_of_pair") {
    SUBCASE("reference system: Tr(L²) = 16H₁ − 16H₂ i") {
        for (auto [a, b] : {std::pair{1.0, 2.0}, std::pair{0.7, -1.3}, std::pair{-2.0, 0.5}}) {
            const auto sys = quadruple_system(a, b);
            const auto pair = select_admissible_pair(sys, cplx(a, b), quadruple_w());
            const auto integral = integral_of_pair(pair);
            const auto m = build_lax2(pair);
            SystemFactory f(1);
            for (int t = 0; t < 10; ++t) {
                const RealVector x = f.random_vector(4);
                const cplx tr = trace_square(m.evaluate(x));
                CHECK(rel(tr, integral.evaluate(x)) < 1e-12);
                // Tr(L²) of the same-λ 4×4 model is 2I and equals 16H₁ − 16H₂i.
                CHECK(rel(2.0 * integral.evaluate(x), cplx(16 * h1(x), -16 * h2(x))) < 1e-12);
            }
        }
    }
    SUBCASE("an eigenvector w gives I ≡ 0") {
        const auto sys = quadruple_system();
        const auto s = system_spectrum(sys);
        const auto pair = unchecked_pair(sys, s.eigenvalues[0], s.eigenvectors[0]);
        CHECK(norm_max(integral_of_pair(pair).s) < 1e-12);
    }
    SUBCASE("xᵀSx matches 2((xᵀw)² + (xᵀŵ)²)") {
        SystemFactory f(4);
        for (int t = 0; t < 20; ++t) {
            const auto sys = f.gaussian(1 + t % 3);
            for (const auto& pair : all_pairs(sys)) {
                const auto integral = integral_of_pair(pair);
                CHECK(integral.s == integral.s.transpose());
                const auto x = to_complex(f.random_vector(sys.dim()));
                const cplx a = dot(x, pair.w);
                const cplx d = dot(x, pair.w_hat);
                CHECK(rel(integral.evaluate(x), 2.0 * (a * a + d * d)) < 1e-12);
            }
        }
    }
}

TEST_CASE("factorized_integral") {
    SUBCASE("agrees with the quadratic form over 100 random draws") {
        SystemFactory f(100);
        int draws = 0;
        while (draws < 100) {
            const auto sys = f.mixed(1 + draws % 3);
            for (const auto& pair : all_pairs(sys)) {
                const auto x = f.random_vector(sys.dim());
                const cplx direct = integral_of_pair(pair).evaluate(x);
                CHECK(std::abs(factorized_integral(sys, pair, x) - direct) <=
                      1e-10 * std::max(1.0, std::abs(direct)) * std::norm(norm2(pair.w)) * std::norm(norm2(x)));
                ++draws;
            }
        }
    }
    SUBCASE("x = 0") {
        const auto sys = quadruple_system();
        const auto pair = select_admissible_pair(sys, cplx(1, 2), quadruple_w());
        CHECK(factorized_integral(sys, pair, RealVector(4)) == cplx(0.0));
    }
    SUBCASE("an eigenvector w makes one factor vanish") {
        const auto sys = quadruple_system();
        const auto s = system_spectrum(sys);
        const auto pair = unchecked_pair(sys, s.eigenvalues[1], s.eigenvectors[1]);
        CHECK(std::abs(factorized_integral(sys, pair, RealVector{1.0, -2.0, 0.5, 3.0})) < 1e-12);
    }
}

TEST_CASE("trace_power") {
    const auto pair = select_admissible_pair(quadruple_system(), cplx(1, 2), quadruple_w());
    const auto l = build_lax2(pair).evaluate(RealVector{0.2, 0.4, -1.0, 0.9});
    CHECK(trace_power(l, 3) == cplx(0.0));
    CHECK(trace_power(ComplexMatrix{{1.0, 0.0}, {0.0, -1.0}}, 4) == cplx(2.0));
    const ComplexMatrix rnd{{cplx(0.3, -0.2), cplx(1.1, 0.4)}, {cplx(1.1, 0.4), cplx(-0.3, 0.2)}};
    for (int k = 1; k <= 6; ++k) {
        const auto pw = matrix_power(rnd, k);
        CHECK(std::abs(trace_power(rnd, k) - (pw(0, 0) + pw(1, 1))) < 1e-12);
    }
    CHECK_THROWS_AS(trace_power(ComplexMatrix{{1.0, 2.0}, {3.0, -1.0}}, 2), Error);
}

TEST_CASE("normalize_n1") {
    SUBCASE("oscillator: normalized integral is 2(x₁² + x₂²)") {
        const auto sys = oscillator();
        for (const auto& w : {ComplexVector{1.0, 0.0}, ComplexVector{0.3, -2.0}}) {
            const auto pair = normalize_n1(select_admissible_pair(sys, kI, w), sys);
            const auto s = integral_of_pair(pair).s;
            CHECK(norm_max(s - ComplexMatrix{{2.0, 0.0}, {0.0, 2.0}}) < 1e-12);
        }
    }
    SUBCASE("random n = 1 systems: S = 2P and wᵀP⁻¹w = 1") {
        SystemFactory f(31);
        for (int t = 0; t < 30; ++t) {
            const auto sys = t % 2 ? f.gaussian(1) : f.mixed(1);
            const auto pair = normalize_n1(all_pairs(sys).front(), sys);
            const auto s = integral_of_pair(pair).s;
            CHECK(norm_max(s - to_complex(sys.p()) * cplx(2.0)) < 1e-10 * std::max(1.0, norm_max(sys.p())));
            CHECK(std::abs(bilinear(pair.w, to_complex(inverse(sys.p())), pair.w) - 1.0) < 1e-10);
        }
    }
    SUBCASE("prescaling w by 5 gives the same integral") {
        const auto sys = validate_system(standard_j(), RealMatrix{{2.0, 0.5}, {0.5, 1.0}});
        const auto base = select_admissible_pair(sys, positive_representatives(system_spectrum(sys).eigenvalues)[0]);
        const auto scaled = unchecked_pair(sys, base.lambda, scale(base.w, 5.0));
        const auto s1 = integral_of_pair(normalize_n1(base, sys)).s;
        const auto s2 = integral_of_pair(normalize_n1(scaled, sys)).s;
        CHECK(norm_max(s1 - s2) < 1e-12);
    }
    SUBCASE("requires n = 1") { CHECK_THROWS_AS(normalize_n1(all_pairs(quadruple_system()).front(), quadruple_system()), Error); }
}

TEST_CASE("sqrt_lax_n1") {
    SUBCASE("P = diag(4, 9): T = diag(2, 3), B = −3Γ⁻¹") {
        const auto sys = validate_system(standard_j(), RealMatrix{{4.0, 0.0}, {0.0, 9.0}});
        const auto r = sqrt_lax_n1(sys);
        CHECK(norm_max(r.t - ComplexMatrix{{2.0, 0.0}, {0.0, 3.0}}) < 1e-14);
        CHECK(norm_max(r.model.b - to_complex(sys.gamma_inv()) * cplx(-3.0)) < 1e-14);
    }
    SUBCASE("P = E: T = E and L(x) = [[x₁, x₂], [x₂, −x₁]]") {
        const auto r = sqrt_lax_n1(oscillator());
        CHECK(norm_max(r.t - ComplexMatrix::identity(2)) < 1e-15);
        CHECK(norm_max(r.model.evaluate(RealVector{0.6, -1.5}) - ComplexMatrix{{0.6, -1.5}, {-1.5, -0.6}}) < 1e-15);
    }
    SUBCASE("random n = 1: identity residual, explicit form, B formulas, traces, Lax equation") {
        SystemFactory f(77);
        for (int t = 0; t < 40; ++t) {
            const auto sys = t % 2 ? f.gaussian(1) : f.mixed(1);
            const auto r = sqrt_lax_n1(sys);
            CHECK(r.identity_residual < 1e-10);
            CHECK(norm_max(r.t * r.t - to_complex(sys.p())) < 1e-12 * std::max(1.0, norm_max(sys.p())));
            CHECK(r.t == r.t.transpose());
            const auto tgt = r.t * to_complex(sys.gamma_inv()) * r.t * cplx(-0.5);
            CHECK(norm_max(r.model.b - tgt) < 1e-10 * std::max(1.0, norm_max(tgt)));
            const RealVector x = f.random_vector(2);
            const auto l = r.model.evaluate(x);
            const auto tx = r.t * to_complex(x);
            CHECK(norm_max(l - ComplexMatrix{{tx[0], tx[1]}, {tx[1], -tx[0]}}) < 1e-12 * (1.0 + norm_max(l)));
            const double q = dot(x, sys.p() * x);
            for (int lpow = 1; lpow <= 3; ++lpow) {
                const auto pw = matrix_power(l, 2 * lpow);
                CHECK(rel(pw(0, 0) + pw(1, 1), 2.0 * std::pow(q, lpow)) < 1e-11);
            }
            CHECK(lax_defect(sys, r.model, x) < 1e-12);
        }
    }
    SUBCASE("requires n = 1") { CHECK_THROWS_AS(sqrt_lax_n1(quadruple_system()), Error); }
}

TEST_CASE("block_lax_2n") {
    SUBCASE("n = 1 reduces to build_lax2") {
        const auto sys = oscillator();
        const auto pairs = all_pairs(sys);
        const auto blk = block_lax_2n(pairs);
        const auto single = build_lax2(pairs.front());
        CHECK(blk.b == single.b);
        CHECK(blk.covectors == single.covectors);
    }
    SUBCASE("reference system with λ and λ̄: Tr(L²) = 16H₁") {
        const auto sys = quadruple_system();
        const auto p1 = select_admissible_pair(sys, cplx(1, 2), quadruple_w());
        const auto p2 = select_admissible_pair(sys, cplx(1, -2), conj(std::span<const cplx>(quadruple_w())));
        const std::vector<AdmissiblePair> pairs{p1, p2};
        const auto m = block_lax_2n(pairs);
        CHECK(m.k == 4);
        SystemFactory f(6);
        for (int t = 0; t < 10; ++t) {
            const auto x = f.random_vector(4);
            CHECK(rel(trace_square(m.evaluate(x)), 16.0 * h1(x)) < 1e-12);
            CHECK(lax_defect(sys, m, x) < 1e-12);
        }
    }
    SUBCASE("random n = 3: covectors have rank 6, Lax equation holds") {
        SystemFactory f(12);
        for (int t = 0; t < 10; ++t) {
            const auto sys = f.gaussian(3);
            const auto pairs = all_pairs(sys);
            const auto m = block_lax_2n(pairs);
            std::vector<ComplexVector> rows;
            for (const auto& p : pairs) {
                rows.push_back(p.w);
                rows.push_back(p.w_hat);
            }
            CHECK(numerical_rank(stack_rows(rows), 1e-8) == 6);
            const auto x = f.random_vector(6);
            CHECK(lax_defect(sys, m, x) < 1e-10);
            cplx sum{};
            for (const auto& p : pairs) sum += integral_of_pair(p).evaluate(x);
            CHECK(rel(trace_square(m.evaluate(x)), sum) < 1e-11);
        }
    }
    SUBCASE("errors") {
        const auto sys = quadruple_system();
        const auto p = select_admissible_pair(sys, cplx(1, 2), quadruple_w());
        const std::vector<AdmissiblePair> dup{p, p};
        CHECK_THROWS_AS(block_lax_2n(dup), Error);
        try {
            block_lax_2n(dup);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::DuplicateLambdaSq);
        }
        const std::vector<AdmissiblePair> one{p};
        try {
            block_lax_2n(one);
            FAIL("expected WrongCount");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::WrongCount);
        }
    }
}

TEST_CASE("same_lambda_block_lax") {
    const auto sys = quadruple_system();
    const ComplexVector w = quadruple_w();
    const ComplexVector w_hat{kI, -kI, -1.0, -1.0};
    const ComplexVector w_tilde = scale(w_hat, -1.0);

    SUBCASE("reproduces the displayed 4×4 L and B") {
        const std::vector<FillingEntry> filling{{0, 0, w}, {1, 1, w_tilde}};
        const auto m = same_lambda_block_lax(sys, cplx(1, 2), filling);
        const cplx h = -kI * cplx(1, 2) / 2.0;
        CHECK(std::abs(h - (-0.5 * cplx(-2.0, 1.0))) < 1e-15);
        const ComplexMatrix b_expected{{0, 0, h, 0}, {0, 0, 0, h}, {-h, 0, 0, 0}, {0, -h, 0, 0}};
        CHECK(norm_max(m.b - b_expected) < 1e-15);
        SystemFactory f(9);
        for (int t = 0; t < 5; ++t) {
            const auto x = f.random_vector(4);
            const auto xc = to_complex(x);
            const cplx a = dot(xc, w);
            const cplx d = dot(xc, w_hat);
            const ComplexMatrix want{{a, 0, d, 0}, {0, -d, 0, a}, {d, 0, -a, 0}, {0, a, 0, d}};
            CHECK(norm_max(m.evaluate(x) - want) < 1e-13);
            CHECK(lax_defect(sys, m, x) < 1e-12);
            const cplx i_w = 2.0 * (a * a + d * d);
            CHECK(rel(trace_square(m.evaluate(x)), 2.0 * i_w) < 1e-12);
        }
    }
    SUBCASE("trace sums over the filling, off-diagonal slots counted twice") {
        SystemFactory f(10);
        for (int t = 0; t < 10; ++t) {
            const auto s = f.gaussian(3);
            const auto lam = positive_representatives(system_spectrum(s).eigenvalues)[0];
            const auto basis = v_lambda_basis(s, lam);
            auto mix = [&](double c0, double c1) { return add(scale(basis[0], c0), scale(basis[1], c1)); };
            const std::vector<FillingEntry> filling{
                {0, 0, mix(1.0, 0.3)}, {0, 2, mix(-0.4, 1.0)}, {1, 1, mix(0.8, -0.6)}, {2, 2, mix(0.2, 0.9)}};
            const auto m = same_lambda_block_lax(s, lam, filling);
            const auto x = f.random_vector(6);
            cplx expected{};
            for (const auto& e : filling) {
                const double weight = e.k == e.l ? 1.0 : 2.0;
                expected += weight * integral_of_pair(unchecked_pair(s, lam, e.w)).evaluate(x);
            }
            CHECK(rel(trace_square(m.evaluate(x)), expected) < 1e-10);
            CHECK(lax_defect(s, m, x) < 1e-10);
        }
    }
    SUBCASE("the same w on both diagonal slots doubles the integral") {
        const std::vector<FillingEntry> filling{{0, 0, w}, {1, 1, w}};
        const auto m = same_lambda_block_lax(sys, cplx(1, 2), filling);
        const RealVector x{0.5, -0.25, 1.5, 0.75};
        const auto pair = select_admissible_pair(sys, cplx(1, 2), w);
        CHECK(rel(trace_square(m.evaluate(x)), 2.0 * integral_of_pair(pair).evaluate(x)) < 1e-12);
    }
    SUBCASE("x = 0 gives L = 0") {
        const std::vector<FillingEntry> filling{{0, 0, w}};
        CHECK(norm_max(same_lambda_block_lax(sys, cplx(1, 2), filling).evaluate(RealVector(4))) == 0.0);
    }
    SUBCASE("a vector outside V_λ is rejected") {
        const std::vector<FillingEntry> filling{{0, 1, ComplexVector{1.0, 0.0, 0.0, 0.0}}};
        try {
            same_lambda_block_lax(sys, cplx(1, 2), filling);
            FAIL("expected VectorNotInVLambda");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::VectorNotInVLambda);
        }
    }
}

TEST_CASE("real_form_lax") {
    SUBCASE("λ = 1 ± 2i: B carries N₁, N₂ and is real") {
        const auto sys = quadruple_system();
        const auto p1 = select_admissible_pair(sys, cplx(1, 2), quadruple_w());
        const auto p2 = select_admissible_pair(sys, cplx(1, -2), conj(std::span<const cplx>(quadruple_w())));
        const std::vector<AdmissiblePair> pairs{p1, p2};
        const auto m = real_form_lax(pairs);
        const ComplexMatrix n1{{1.0, 2.0}, {2.0, -1.0}};
        const ComplexMatrix n2{{1.0, -2.0}, {-2.0, -1.0}};
        for (std::size_t r = 0; r < 2; ++r)
            for (std::size_t c = 0; c < 2; ++c) {
                CHECK(m.b(r, 2 + c) == n1(r, c) / 2.0);
                CHECK(m.b(2 + r, c) == n2(r, c) / 2.0);
            }
        CHECK(norm_max(imag_part(m.b)) == 0.0);

        const auto complex_model = block_lax_2n(pairs);
        const auto [re, im] = split_real_imag(m);
        SystemFactory f(15);
        for (int t = 0; t < 10; ++t) {
            const auto x = f.random_vector(4);
            CHECK(lax_defect(sys, m, x) < 1e-12);
            CHECK(lax_defect(sys, re, x) < 1e-12);
            CHECK(lax_defect(sys, im, x) < 1e-12);
            const cplx tr = trace_square(complex_model.evaluate(x));
            CHECK(rel(trace_square(m.evaluate(x)), tr) < 1e-12);
            const auto lre = re.evaluate(x);
            const auto lim = im.evaluate(x);
            CHECK(norm_max(imag_part(lre)) == 0.0);
            CHECK(norm_max(imag_part(lim)) == 0.0);
            CHECK(std::abs(trace_square(lre) - trace_square(lim) - tr.real()) < 1e-11 * (1.0 + std::abs(tr)));
            CHECK(std::abs(2.0 * trace_square_mixed(lre, lim) - tr.imag()) < 1e-11 * (1.0 + std::abs(tr)));
        }
    }
    SUBCASE("eigenvalues of [[0,N₁],[N₂,0]] match twice the complex 2×2 blocks") {
        const double a = 1.0, b = 2.0;
        ComplexMatrix big(4, 4);
        const ComplexMatrix n1{{a, b}, {b, -a}};
        const ComplexMatrix n2{{a, -b}, {-b, -a}};
        for (std::size_t r = 0; r < 2; ++r)
            for (std::size_t c = 0; c < 2; ++c) {
                big(r, 2 + c) = n1(r, c);
                big(2 + r, c) = n2(r, c);
            }
        std::vector<cplx> blocks;
        for (const cplx lam : {cplx(a, b), cplx(a, -b)}) {
            const cplx h = -kI * lam / 2.0;
            for (auto e : eigenvalues(ComplexMatrix{{0.0, h}, {-h, 0.0}})) blocks.push_back(2.0 * e);
        }
        CHECK(same_multiset(polynomial_roots(characteristic_polynomial(big)), blocks, 1e-9));
    }
    SUBCASE("mixed random systems: real B, Lax equation, same trace") {
        SystemFactory f(33);
        for (int t = 0; t < 15; ++t) {
            const auto sys = f.mixed(2 + t % 2);
            const auto pairs = all_pairs(sys);
            const auto m = real_form_lax(pairs);
            CHECK(norm_max(imag_part(m.b)) == 0.0);
            const auto x = f.random_vector(sys.dim());
            CHECK(lax_defect(sys, m, x) < 1e-10);
            cplx sum{};
            for (const auto& p : pairs) sum += integral_of_pair(p).evaluate(x);
            CHECK(rel(trace_square(m.evaluate(x)), sum) < 1e-10);
            const auto [re, im] = split_real_imag(m);
            CHECK(lax_defect(sys, re, x) < 1e-10);
            CHECK(lax_defect(sys, im, x) < 1e-10);
        }
    }
    SUBCASE("only real λ² passes through") {
        const auto sys = oscillator();
        const auto m = real_form_lax(all_pairs(sys));
        CHECK(norm_max(m.b - build_lax2(all_pairs(sys).front()).b) < 1e-15);
    }
    SUBCASE("a lone complex λ is rejected") {
        const auto sys = quadruple_system();
        const auto p1 = select_admissible_pair(sys, cplx(1, 2), quadruple_w());
        const auto p2 = select_admissible_pair(sys, cplx(1, 2), scale(quadruple_w(), 2.0));
        const std::vector<AdmissiblePair> pairs{p1, p2};
        try {
            real_form_lax(pairs);
            FAIL("expected NotConjugateClosed");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NotConjugateClosed);
        }
    }
}

TEST_CASE("real_imag_split") {
    SUBCASE("reference system: Re and Im give 8H₁ and −8H₂") {
        const auto sys = quadruple_system();
        const auto i1 = integral_of_pair(select_admissible_pair(sys, cplx(1, 2), quadruple_w()));
        const auto i2 =
            integral_of_pair(select_admissible_pair(sys, cplx(1, -2), conj(std::span<const cplx>(quadruple_w()))));
        const auto [re, im] = real_imag_split(i1, i2);
        SystemFactory f(3);
        for (int t = 0; t < 5; ++t) {
            const auto x = f.random_vector(4);
            CHECK(rel(re.evaluate(x), (i1.evaluate(x) + i2.evaluate(x)) / 2.0) < 1e-12);
            CHECK(rel(re.evaluate(x), 8.0 * h1(x)) < 1e-12);
            CHECK(rel(im.evaluate(x), -8.0 * h2(x)) < 1e-12);
        }
    }
    SUBCASE("a real integral splits into (I, 0)") {
        const auto i = integral_of_pair(all_pairs(oscillator()).front());
        const auto [re, im] = real_imag_split(i, i);
        CHECK(norm_max(re.s - i.s) == 0.0);
        CHECK(norm_max(im.s) == 0.0);
    }
    SUBCASE("random conjugate pairs: real outputs matching Re and Im") {
        SystemFactory f(44);
        for (int t = 0; t < 10; ++t) {
            const auto sys = f.from_blocks({BlockKind::Complex});
            const auto pairs = all_pairs(sys);
            REQUIRE(pairs.size() == 2);
            const auto p1 = pairs[0];
            const auto p2 = unchecked_pair(sys, std::conj(p1.lambda), conj(std::span<const cplx>(p1.w)));
            const auto i1 = integral_of_pair(p1);
            const auto [re, im] = real_imag_split(i1, integral_of_pair(p2));
            const auto x = f.random_vector(4);
            const cplx v = i1.evaluate(x);
            CHECK(std::abs(re.evaluate(x) - v.real()) < 1e-12 * (1.0 + std::abs(v)));
            CHECK(std::abs(im.evaluate(x) - v.imag()) < 1e-12 * (1.0 + std::abs(v)));
        }
    }
    SUBCASE("a non-conjugate pair is rejected") {
        const auto pairs = all_pairs(quadruple_system());
        try {
            real_imag_split(integral_of_pair(pairs[0]), integral_of_pair(pairs[0]));
            FAIL("expected NotConjugatePair");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NotConjugatePair);
        }
    }
}

TEST_CASE("property: trace identity, odd traces, nonvanishing over random DIM2 models") {
    SystemFactory f(500);
    for (int t = 0; t < 40; ++t) {
        const auto sys = t % 2 ? f.mixed(1 + t % 3) : f.gaussian(1 + t % 3);
        for (const auto& pair : all_pairs(sys)) {
            const auto m = build_lax2(pair);
            const auto integral = integral_of_pair(pair);
            CHECK(norm_fro(integral.s) > 1e-10 * std::norm(norm2(pair.w)));
            for (int draw = 0; draw < 5; ++draw) {
                const auto x = f.random_vector(sys.dim());
                const auto l = m.evaluate(x);
                CHECK(l == l.transpose());
                CHECK(l(0, 0) + l(1, 1) == cplx(0.0));
                CHECK(rel(trace_square(l), integral.evaluate(x)) < 1e-11);
                for (int k : {1, 3, 5}) {
                    const auto pw = matrix_power(l, k);
                    CHECK(std::abs(pw(0, 0) + pw(1, 1)) < 1e-11 * std::max(1.0, std::pow(norm_max(l), k)));
                }
            }
        }
    }
}

TEST_CASE("property: factorized form equals the quadratic form on 1000 draws") {
    SystemFactory f(1000);
    int draws = 0;
    while (draws < 1000) {
        const auto sys = f.mixed(1 + draws % 3);
        const auto pairs = all_pairs(sys);
        for (int k = 0; k < 10; ++k) {
            const auto& pair = pairs[static_cast<std::size_t>(k) % pairs.size()];
            const auto x = f.random_vector(sys.dim());
            const cplx direct = integral_of_pair(pair).evaluate(x);
            const double scale = std::norm(norm2(pair.w)) * std::norm(norm2(x)) + std::abs(direct);
            CHECK(std::abs(factorized_integral(sys, pair, x) - direct) <= 1e-10 * scale);
            ++draws;
        }
    }
}
