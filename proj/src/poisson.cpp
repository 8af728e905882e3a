#include "laxforge/poisson.hpp"

#include <random>

#include "laxforge/linalg.hpp"

namespace laxforge {

namespace {

constexpr cplx kI{0.0, 1.0};

RealMatrix stack_real(const std::vector<RealVector>& rows) {
    RealMatrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    return m;
}

double rel_gap(cplx a, cplx b, double scale) { return std::abs(a - b) / std::max(scale, 1e-300); }

bool symmetric_within(const ComplexMatrix& m, double tol) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (std::abs(m(i, j) - m(j, i)) > tol) return false;
    return true;
}

// Target flow ż = G z induced by the Lax equation on the pulled-back coordinates.
RealMatrix target_generator(cplx lambda, TargetCase kind) {
    switch (kind) {
        case TargetCase::PureImaginary: {
            const double mu = (-kI * lambda).real();
            return RealMatrix{{0.0, mu}, {-mu, 0.0}};
        }
        case TargetCase::Real:
            return RealMatrix{{0.0, lambda.real()}, {lambda.real(), 0.0}};
        case TargetCase::Complex: {
            const double a1 = lambda.real();
            const double a2 = lambda.imag();
            return RealMatrix{{0, 0, a2, a1}, {0, 0, -a1, a2}, {-a2, -a1, 0, 0}, {a1, -a2, 0, 0}};
        }
    }
    return {};
}

TargetCase case_of(LambdaClass c) {
    switch (c) {
        case LambdaClass::PureImaginary: return TargetCase::PureImaginary;
        case LambdaClass::Real: return TargetCase::Real;
        case LambdaClass::GenuinelyComplex: return TargetCase::Complex;
    }
    return TargetCase::Complex;
}

}  // namespace

PoissonStructure poisson_structure(const RealMatrix& w) {
    if (!w.is_square()) throw Error(ErrorKind::DimensionMismatch, "W must be square");
    for (std::size_t i = 0; i < w.rows(); ++i)
        for (std::size_t j = 0; j <= i; ++j)
            if (std::abs(w(i, j) + w(j, i)) > 1e-12 * std::max(1.0, norm_max(w))) {
                throw Error(ErrorKind::NotSkewSymmetric, "W is not skew-symmetric");
            }
    return {inverse(w)};
}

PoissonStructure system_poisson(const ValidatedSystem& sys) { return {-sys.gamma_inv()}; }

double bracket_functions(const PoissonStructure& ps, std::span<const double> grad_f, std::span<const double> grad_g) {
    if (grad_f.size() != ps.dim() || grad_g.size() != ps.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "gradient length differs from the structure");
    }
    return dot(grad_f, std::span<const double>(ps.w_inv * grad_g));
}

cplx bracket_linear(const PoissonStructure& ps, std::span<const cplx> u, std::span<const cplx> v) {
    if (u.size() != ps.dim() || v.size() != ps.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "covector length differs from the structure");
    }
    return bilinear(u, to_complex(ps.w_inv), v);
}

RealVector hamiltonian_vector_field(const PoissonStructure& ps, std::span<const double> grad_h) {
    if (grad_h.size() != ps.dim()) throw Error(ErrorKind::DimensionMismatch, "gradient length differs");
    return ps.w_inv * grad_h;
}

ComplexMatrix quadratic_bracket(const ComplexMatrix& m, const ComplexMatrix& n, const ValidatedSystem& sys) {
    if (m.rows() != sys.dim() || n.rows() != sys.dim() || !m.is_square() || !n.is_square()) {
        throw Error(ErrorKind::DimensionMismatch, "quadratic forms must be 2n x 2n");
    }
    if (!symmetric_within(m, 1e-12 * std::max(1.0, norm_max(m))) ||
        !symmetric_within(n, 1e-12 * std::max(1.0, norm_max(n)))) {
        throw Error(ErrorKind::NotSymmetric, "quadratic forms must be symmetric");
    }
    const ComplexMatrix gi = to_complex(sys.gamma_inv());
    return (m * gi * n - n * gi * m) * cplx(-2.0);
}

double involution_check(const QuadraticIntegral& i1, const QuadraticIntegral& i2, const ValidatedSystem& sys) {
    const double denom = norm_inf(i1.s) * norm_inf(i2.s);
    if (denom == 0.0) return 0.0;
    return norm_inf(quadratic_bracket(i1.s, i2.s, sys)) / denom;
}

IndependenceReport independence_check(std::span<const QuadraticIntegral> integrals,
                                      std::span<const RealVector> samples, double rel_tol) {
    IndependenceReport report;
    report.min_rank = integrals.size();
    for (const auto& x : samples) {
        const auto xc = to_complex(x);
        std::vector<ComplexVector> grads;
        for (const auto& integral : integrals) grads.push_back(scale(integral.s * xc, 2.0));
        const std::size_t r = grads.empty() ? 0 : numerical_rank(stack_rows(grads), rel_tol);
        report.ranks.push_back(r);
        report.min_rank = std::min(report.min_rank, r);
    }
    if (samples.empty()) report.min_rank = 0;
    return report;
}

GradientReport gradient_formula_check(const ValidatedSystem& sys, const AdmissiblePair& pair,
                                      std::span<const double> x) {
    const ComplexMatrix a = to_complex(sys.p_gamma_inv());
    const auto xc = to_complex(x);
    const auto grad = scale(integral_of_pair(pair).s * xc, 2.0);
    const auto aw = a * pair.w;
    const cplx g1 = 4.0 * dot(std::span<const cplx>(xc), std::span<const cplx>(pair.w));
    const cplx g2 = 4.0 / pair.lambda_sq() * dot(std::span<const cplx>(xc), std::span<const cplx>(aw));
    const auto formula = sub(scale(pair.w, g1), scale(aw, g2));
    GradientReport r;
    const double gn = norm2(grad);
    r.formula_residual = norm2(sub(grad, formula)) / std::max(gn, 1e-300);
    if (gn == 0.0) {
        r.formula_residual = norm2(formula);
        r.eigen_residual = 0.0;
        return r;
    }
    const auto a2g = a * (a * grad);
    r.eigen_residual = norm2(sub(a2g, scale(grad, pair.lambda_sq()))) / (std::abs(pair.lambda_sq()) * gn);
    return r;
}

KForms k_forms(const AdmissiblePair& pair, const ValidatedSystem& sys) {
    const ComplexMatrix gi = to_complex(sys.gamma_inv());
    const ComplexMatrix gpg = to_complex(sys.gamma_inv() * sys.p_gamma_inv());
    const ComplexMatrix p_inv = to_complex(sys.p_inv());
    KForms k;
    k.direct = -bilinear(pair.w, gi, pair.w_hat);
    k.via_system = -kI / pair.lambda * bilinear(pair.w, gpg, pair.w);
    k.via_p_inv = -kI * pair.lambda * bilinear(pair.w, p_inv, pair.w);
    const double scale = std::max(std::abs(k.direct), 1e-300);
    k.spread = std::max({rel_gap(k.direct, k.via_system, scale), rel_gap(k.direct, k.via_p_inv, scale),
                         rel_gap(k.via_system, k.via_p_inv, scale)});
    return k;
}

cplx k_constant(const AdmissiblePair& pair, const ValidatedSystem& sys, double tol) {
    const KForms k = k_forms(pair, sys);
    const double size = norm2(pair.w) * norm2(pair.w_hat) * norm_inf(sys.gamma_inv());
    if (std::abs(k.direct) <= 1e-12 * size) throw Error(ErrorKind::DegenerateK, "K_{lambda,w} vanishes");
    if (k.spread > tol) {
        throw Error(ErrorKind::PreconditionViolation,
                    "the three expressions for K disagree (spread " + std::to_string(k.spread) + ")");
    }
    return k.direct;
}

std::string_view to_string(TargetCase c) {
    switch (c) {
        case TargetCase::PureImaginary: return "CASE1_PURE_IMAG";
        case TargetCase::Real: return "CASE2_REAL";
        case TargetCase::Complex: return "CASE3_COMPLEX";
    }
    return "?";
}

TargetStructure target_structure(const AdmissiblePair& pair, const ValidatedSystem& sys, double reality_tol) {
    TargetStructure ts;
    ts.kind = case_of(pair.lambda_class);
    ts.k = k_constant(pair, sys);
    const cplx k = ts.k;
    switch (ts.kind) {
        case TargetCase::PureImaginary: {
            if (std::abs(k.imag()) > reality_tol * std::abs(k)) {
                throw Error(ErrorKind::CaseMismatch, "K is not real for imaginary lambda");
            }
            const double c = 1.0 / k.real();
            ts.matrix = RealMatrix{{0.0, -c}, {c, 0.0}};
            break;
        }
        case TargetCase::Real: {
            if (std::abs(k.real()) > reality_tol * std::abs(k)) {
                throw Error(ErrorKind::CaseMismatch, "K is not imaginary for real lambda");
            }
            const double c = (kI / k).real();
            ts.matrix = RealMatrix{{0.0, -c}, {c, 0.0}};
            break;
        }
        case TargetCase::Complex: {
            ts.r = RealMatrix{{k.real() / 2.0, k.imag() / 2.0}, {k.imag() / 2.0, -k.real() / 2.0}};
            const double det_r = determinant(ts.r);
            if (std::abs(det_r + std::norm(k) / 4.0) > 1e-12 * std::norm(k) || det_r == 0.0) {
                throw Error(ErrorKind::DegenerateK, "det R differs from -|K|^2/4");
            }
            const RealMatrix r_inv = inverse(ts.r);
            ts.matrix = RealMatrix(4, 4);
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t j = 0; j < 2; ++j) {
                    ts.matrix(i, 2 + j) = -r_inv(i, j);
                    ts.matrix(2 + i, j) = r_inv(i, j);
                }
            break;
        }
    }
    return ts;
}

std::vector<RealVector> pullback_covectors(const AdmissiblePair& pair, TargetCase kind) {
    switch (kind) {
        case TargetCase::PureImaginary:
            return {real_part(pair.w), real_part(pair.w_hat)};
        case TargetCase::Real: {
            const auto z4 = scale(pair.w_hat, -kI);
            return {real_part(pair.w), real_part(z4)};
        }
        case TargetCase::Complex:
            return {real_part(pair.w), imag_part(pair.w), real_part(pair.w_hat), imag_part(pair.w_hat)};
    }
    return {};
}

double poisson_map_check(const AdmissiblePair& pair, const ValidatedSystem& sys, const TargetStructure& ts,
                         int trials, std::uint64_t seed) {
    const RealMatrix cov = stack_real(pullback_covectors(pair, ts.kind));
    const RealMatrix source = cov * (-sys.gamma_inv()) * cov.transpose();
    const RealMatrix target = inverse(ts.matrix);
    const double scale = std::max(1.0, norm_max(target));
    double worst = norm_max(source - target) / scale;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    const std::size_t k = cov.rows();
    auto random_function = [&] {
        RealVector lin(k);
        RealMatrix quad(k, k);
        for (auto& v : lin) v = g(rng);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j <= i; ++j) quad(i, j) = quad(j, i) = g(rng);
        return std::pair{lin, quad};
    };
    const PoissonStructure ps = system_poisson(sys);
    for (int t = 0; t < trials; ++t) {
        const auto [l1, q1] = random_function();
        const auto [l2, q2] = random_function();
        RealVector x(sys.dim());
        for (auto& v : x) v = g(rng);
        const RealVector z = cov * x;
        RealVector d1 = q1 * z;
        RealVector d2 = q2 * z;
        for (std::size_t i = 0; i < k; ++i) {
            d1[i] += l1[i];
            d2[i] += l2[i];
        }
        const double tgt = dot(std::span<const double>(d1), std::span<const double>(target * d2));
        const double src = bracket_functions(ps, cov.transpose() * d1, cov.transpose() * d2);
        worst = std::max(worst, std::abs(src - tgt) / (scale * (1.0 + norm2(d1) * norm2(d2))));
    }
    return worst;
}

HamiltonianReport pushforward_hamiltonian_check(const ValidatedSystem& sys, const AdmissiblePair& pair,
                                                const TargetStructure& ts, double tol) {
    HamiltonianReport r;
    r.kind = ts.kind;
    r.generator = target_generator(pair.lambda, ts.kind);
    r.hamiltonian = ts.matrix * r.generator;
    const double hscale = std::max(1e-300, norm_max(r.hamiltonian));
    r.symmetry_residual = norm_max(r.hamiltonian - r.hamiltonian.transpose()) / hscale;

    const cplx scalar = kI * pair.lambda / ts.k;
    switch (ts.kind) {
        case TargetCase::PureImaginary: {
            r.reality_residual = std::abs(scalar.imag()) / std::abs(scalar);
            // Γ_{λ,w}ż = −P_{λ,w}z with P_{λ,w} = iλK⁻¹E.
            const RealMatrix p = RealMatrix::identity(2) * scalar.real();
            r.displayed_form_residual = norm_max(r.hamiltonian + p) / std::abs(scalar);
            break;
        }
        case TargetCase::Real: {
            r.reality_residual = std::abs(scalar.imag()) / std::abs(scalar);
            const RealMatrix p{{-scalar.real(), 0.0}, {0.0, scalar.real()}};
            r.displayed_form_residual = norm_max(r.hamiltonian - p) / std::abs(scalar);
            break;
        }
        case TargetCase::Complex: {
            const RealMatrix& q = r.hamiltonian;
            double off = 0.0;
            double same = 0.0;
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t j = 0; j < 2; ++j) {
                    off = std::max({off, std::abs(q(i, 2 + j)), std::abs(q(2 + i, j))});
                    same = std::max(same, std::abs(q(i, j) - q(2 + i, 2 + j)));
                }
            const double trace_m = std::abs(q(0, 0) + q(1, 1));
            r.block_residual = std::max({off, same, trace_m}) / hscale;
            r.det_m = q(0, 0) * q(1, 1) - q(0, 1) * q(1, 0);
            r.displayed_form_residual = r.symmetry_residual;
            break;
        }
    }
    const RealMatrix cov = stack_real(pullback_covectors(pair, ts.kind));
    const RealMatrix lhs = cov * sys.flow_generator();
    const RealMatrix rhs = r.generator * cov;
    r.flow_residual = norm_max(lhs - rhs) / std::max(1.0, norm_max(cov) * norm_max(sys.flow_generator()));

    const bool det_ok = ts.kind != TargetCase::Complex || std::abs(r.det_m) > tol * hscale * hscale;
    r.ok = r.reality_residual <= tol && r.symmetry_residual <= tol && r.displayed_form_residual <= tol &&
           r.block_residual <= tol && r.flow_residual <= tol && det_ok;
    if (!r.ok) {
        throw Error(ErrorKind::NotHamiltonian,
                    "pushed system fails the Hamiltonian form for " + std::string(to_string(ts.kind)));
    }
    return r;
}

ProductReport product_poisson_check(std::span<const AdmissiblePair> pairs, const ValidatedSystem& sys,
                                    double clash_tol) {
    for (std::size_t i = 0; i < pairs.size(); ++i)
        for (std::size_t j = i + 1; j < pairs.size(); ++j) {
            const cplx a = pairs[i].lambda_sq();
            const cplx b = pairs[j].lambda_sq();
            const double s = clash_tol * std::max(std::abs(a), std::abs(b));
            if (std::abs(a - b) <= s || std::abs(a - std::conj(b)) <= s) {
                throw Error(ErrorKind::HypothesisViolation,
                            "pairs " + std::to_string(i) + " and " + std::to_string(j) + " have clashing lambda^2");
            }
        }
    ProductReport report;
    std::vector<std::vector<RealVector>> covs;
    std::vector<RealMatrix> blocks;
    std::size_t total = 0;
    for (const auto& p : pairs) {
        const auto ts = target_structure(p, sys);
        report.block_residuals.push_back(poisson_map_check(p, sys, ts, 0));
        covs.push_back(pullback_covectors(p, ts.kind));
        blocks.push_back(ts.matrix);
        total += ts.matrix.rows();
    }
    const RealMatrix w_inv = -sys.gamma_inv();
    for (std::size_t i = 0; i < covs.size(); ++i)
        for (std::size_t j = i + 1; j < covs.size(); ++j)
            for (const auto& u : covs[i])
                for (const auto& v : covs[j]) {
                    const double b = dot(std::span<const double>(u), std::span<const double>(w_inv * v));
                    report.cross_bracket_max = std::max(report.cross_bracket_max, std::abs(b));
                }
    report.target = RealMatrix(total, total);
    std::vector<RealVector> all;
    std::size_t off = 0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        for (std::size_t i = 0; i < blocks[b].rows(); ++i)
            for (std::size_t j = 0; j < blocks[b].cols(); ++j) report.target(off + i, off + j) = blocks[b](i, j);
        off += blocks[b].rows();
        all.insert(all.end(), covs[b].begin(), covs[b].end());
    }
    if (total > 0) {
        const RealMatrix cov = stack_real(all);
        const RealMatrix tgt = inverse(report.target);
        report.total_residual = norm_max(cov * w_inv * cov.transpose() - tgt) / std::max(1.0, norm_max(tgt));
    }
    return report;
}

}  // namespace laxforge
