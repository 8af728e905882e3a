#include "laxforge/laxpair.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "laxforge/linalg.hpp"

namespace laxforge {

namespace {

constexpr cplx kI{0.0, 1.0};

const RealMatrix kJ2{{0.0, 1.0}, {-1.0, 0.0}};

std::string lambda_label(cplx lambda) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "I[lambda=%.6g%+.6gi]", lambda.real(), lambda.imag());
    return buf;
}

// Basis matrices L(e_m) back into per-entry covectors.
std::vector<ComplexVector> covectors_from_basis(const std::vector<ComplexMatrix>& basis, std::size_t k) {
    std::vector<ComplexVector> cov(k * k, ComplexVector(basis.size()));
    for (std::size_t m = 0; m < basis.size(); ++m)
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) cov[i * k + j][m] = basis[m](i, j);
    return cov;
}

std::vector<ComplexMatrix> basis_from_model(const LaxPairModel& model) {
    const std::size_t dim = model.state_dim();
    std::vector<ComplexMatrix> basis;
    for (std::size_t m = 0; m < dim; ++m) {
        ComplexVector e(dim);
        e[m] = 1.0;
        basis.push_back(model.evaluate(e));
    }
    return basis;
}

void place(ComplexMatrix& dst, std::size_t off, const ComplexMatrix& block) {
    for (std::size_t i = 0; i < block.rows(); ++i)
        for (std::size_t j = 0; j < block.cols(); ++j) dst(off + i, off + j) = block(i, j);
}

ComplexMatrix lax2_b(cplx lambda) { return to_complex(kJ2) * (-kI * lambda / 2.0); }

double v_lambda_residual(const ValidatedSystem& sys, cplx lambda, std::span<const cplx> w) {
    const ComplexMatrix a = to_complex(sys.p_gamma_inv());
    const auto a2w = a * (a * w);
    return norm2(sub(a2w, scale(w, lambda * lambda)));
}

}  // namespace

std::string_view to_string(LaxKind k) {
    switch (k) {
        case LaxKind::Dim2: return "DIM2";
        case LaxKind::SqrtN1: return "SQRT_N1";
        case LaxKind::BlockDiag: return "BLOCK_DIAG";
        case LaxKind::SameLambda: return "SAME_LAMBDA";
        case LaxKind::RealForm: return "REAL_FORM";
    }
    return "?";
}

ComplexMatrix LaxPairModel::evaluate(std::span<const cplx> x) const {
    if (x.size() != state_dim()) throw Error(ErrorKind::DimensionMismatch, "state has wrong length");
    ComplexMatrix l(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            const auto& c = covectors[i * k + j];
            cplx acc{};
            for (std::size_t m = 0; m < x.size(); ++m) acc += c[m] * x[m];
            l(i, j) = acc;
        }
    return l;
}

ComplexMatrix LaxPairModel::evaluate(std::span<const double> x) const {
    const auto xc = to_complex(x);
    return evaluate(std::span<const cplx>(xc));
}

cplx QuadraticIntegral::evaluate(std::span<const cplx> x) const { return bilinear(x, s, x); }

cplx QuadraticIntegral::evaluate(std::span<const double> x) const {
    const auto xc = to_complex(x);
    return evaluate(std::span<const cplx>(xc));
}

LaxPairModel build_lax2(const AdmissiblePair& pair) {
    LaxPairModel m;
    m.k = 2;
    m.kind = LaxKind::Dim2;
    m.b = lax2_b(pair.lambda);
    m.covectors = {pair.w, pair.w_hat, pair.w_hat, scale(pair.w, -1.0)};
    m.pairs = {pair};
    return m;
}

QuadraticIntegral integral_of_pair(const AdmissiblePair& pair, std::string label) {
    ComplexMatrix s = (outer(pair.w, pair.w) + outer(pair.w_hat, pair.w_hat)) * cplx(2.0);
    return {std::move(s), label.empty() ? lambda_label(pair.lambda) : std::move(label)};
}

cplx factorized_integral(const ValidatedSystem& sys, const AdmissiblePair& pair, std::span<const double> x) {
    const ComplexMatrix a = to_complex(sys.p_gamma_inv());
    const auto u = scale(a * pair.w, 1.0 / pair.lambda);
    const auto xc = to_complex(x);
    const auto minus = sub(pair.w, u);
    const auto plus = add(pair.w, u);
    return 2.0 * dot(std::span<const cplx>(xc), std::span<const cplx>(minus)) *
           dot(std::span<const cplx>(xc), std::span<const cplx>(plus));
}

cplx trace_power(const ComplexMatrix& l, int k) {
    if (l.rows() != 2 || l.cols() != 2) throw Error(ErrorKind::DimensionMismatch, "trace_power needs 2x2");
    if (k < 1) throw Error(ErrorKind::PreconditionViolation, "k must be positive");
    const double tol = 1e-12 * std::max(1.0, norm_max(l));
    if (std::abs(l(0, 1) - l(1, 0)) > tol || std::abs(l(0, 0) + l(1, 1)) > tol) {
        throw Error(ErrorKind::PreconditionViolation, "L must be symmetric and traceless");
    }
    if (k % 2 == 1) return 0.0;
    const cplx q = l(0, 0) * l(0, 0) + l(0, 1) * l(0, 1);
    return 2.0 * std::pow(q, k / 2);
}

AdmissiblePair normalize_n1(const AdmissiblePair& pair, const ValidatedSystem& sys) {
    if (sys.n() != 1) throw Error(ErrorKind::PreconditionViolation, "normalization is defined for n = 1");
    const ComplexMatrix m = to_complex(sys.gamma() * sys.p_gamma_inv());
    const cplx lhs = bilinear(pair.w, m, pair.w);
    const double det_p = determinant(sys.p());
    if (std::abs(lhs) <= 1e-12 * norm_fro(m) * std::norm(norm2(pair.w))) {
        throw Error(ErrorKind::DegenerateForm, "w^T Gamma P Gamma^-1 w vanishes");
    }
    cplx c = std::sqrt(cplx(det_p) / lhs);
    if (c.real() == 0.0 && c.imag() < 0.0) c = -c;
    AdmissiblePair out = pair;
    out.w = scale(pair.w, c);
    out.w_hat = scale(pair.w_hat, c);
    return out;
}

ComplexMatrix symmetric_sqrt_2x2(const RealMatrix& p) {
    if (p.rows() != 2 || p.cols() != 2) throw Error(ErrorKind::DimensionMismatch, "expected 2x2");
    const double theta = 0.5 * std::atan2(2.0 * p(0, 1), p(0, 0) - p(1, 1));
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double mu1 = c * c * p(0, 0) + 2.0 * c * s * p(0, 1) + s * s * p(1, 1);
    const double mu2 = s * s * p(0, 0) - 2.0 * c * s * p(0, 1) + c * c * p(1, 1);
    auto root = [](double mu) { return mu >= 0.0 ? cplx(std::sqrt(mu), 0.0) : cplx(0.0, std::sqrt(-mu)); };
    const cplx r1 = root(mu1);
    const cplx r2 = root(mu2);
    ComplexMatrix t(2, 2);
    t(0, 0) = c * c * r1 + s * s * r2;
    t(1, 1) = s * s * r1 + c * c * r2;
    t(0, 1) = c * s * (r1 - r2);
    t(1, 0) = t(0, 1);
    return t;
}

SqrtLax sqrt_lax_n1(const ValidatedSystem& sys) {
    if (sys.n() != 1) throw Error(ErrorKind::PreconditionViolation, "square-root pair is defined for n = 1");
    SqrtLax out;
    out.t = symmetric_sqrt_2x2(sys.p());
    const ComplexMatrix& t = out.t;
    const cplx det_t = t(0, 0) * t(1, 1) - t(0, 1) * t(1, 0);
    if (std::abs(det_t) <= 1e-12 * std::max(1.0, norm_max(sys.p()))) {
        throw Error(ErrorKind::SingularRoot, "det T vanishes");
    }
    const ComplexMatrix g = to_complex(sys.gamma());
    const ComplexMatrix gi = to_complex(sys.gamma_inv());
    out.identity_residual = norm_max(g * t - inverse(t) * g * det_t);

    std::vector<ComplexMatrix> basis;
    for (std::size_t m = 0; m < 2; ++m) {
        ComplexMatrix z(2, 2);
        z(m, 0) = 1.0;
        basis.push_back(t * z - gi * t * z * g);
    }
    out.model.k = 2;
    out.model.kind = LaxKind::SqrtN1;
    out.model.b = gi * (-det_t / 2.0);
    out.model.covectors = covectors_from_basis(basis, 2);
    return out;
}

LaxPairModel block_lax_2n(std::span<const AdmissiblePair> pairs, double tol) {
    if (pairs.empty()) throw Error(ErrorKind::WrongCount, "no pairs given");
    const std::size_t dim = pairs.front().w.size();
    if (dim != 2 * pairs.size()) {
        throw Error(ErrorKind::WrongCount,
                    "need " + std::to_string(dim / 2) + " pairs, got " + std::to_string(pairs.size()));
    }
    for (std::size_t i = 0; i < pairs.size(); ++i)
        for (std::size_t j = i + 1; j < pairs.size(); ++j) {
            const cplx a = pairs[i].lambda_sq();
            const cplx b = pairs[j].lambda_sq();
            if (std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b))) {
                throw Error(ErrorKind::DuplicateLambdaSq,
                            "pairs " + std::to_string(i) + " and " + std::to_string(j) + " share lambda^2");
            }
        }
    std::vector<ComplexVector> rows;
    for (const auto& p : pairs) {
        rows.push_back(p.w);
        rows.push_back(p.w_hat);
    }
    if (numerical_rank(stack_rows(rows), tol) < dim) {
        throw Error(ErrorKind::RankDeficient, "the vectors w, w_hat do not span C^2n");
    }
    LaxPairModel m;
    m.k = dim;
    m.kind = LaxKind::BlockDiag;
    m.b = ComplexMatrix(dim, dim);
    m.covectors.assign(dim * dim, ComplexVector(dim));
    for (std::size_t j = 0; j < pairs.size(); ++j) {
        const auto blk = build_lax2(pairs[j]);
        place(m.b, 2 * j, blk.b);
        for (std::size_t r = 0; r < 2; ++r)
            for (std::size_t c = 0; c < 2; ++c) m.covectors[(2 * j + r) * dim + 2 * j + c] = blk.covectors[r * 2 + c];
    }
    m.pairs.assign(pairs.begin(), pairs.end());
    return m;
}

LaxPairModel same_lambda_block_lax(const ValidatedSystem& sys, cplx lambda, std::span<const FillingEntry> filling) {
    if (lambda == cplx{}) throw Error(ErrorKind::PreconditionViolation, "lambda must be nonzero");
    const std::size_t n = sys.n();
    const std::size_t dim = sys.dim();
    const ComplexMatrix a = to_complex(sys.p_gamma_inv());
    const double scale_a = std::max(norm_fro(a * a), std::norm(lambda));

    LaxPairModel m;
    m.k = dim;
    m.kind = LaxKind::SameLambda;
    m.b = ComplexMatrix(dim, dim);
    const cplx h = -kI * lambda / 2.0;
    for (std::size_t i = 0; i < n; ++i) {
        m.b(i, n + i) = h;
        m.b(n + i, i) = -h;
    }
    m.covectors.assign(dim * dim, ComplexVector(dim));
    std::vector<bool> taken(n * n, false);
    auto set = [&](std::size_t i, std::size_t j, const ComplexVector& v) { m.covectors[i * dim + j] = v; };
    for (const auto& e : filling) {
        if (e.k > e.l || e.l >= n) throw Error(ErrorKind::PreconditionViolation, "filling slot out of range");
        if (taken[e.k * n + e.l]) throw Error(ErrorKind::PreconditionViolation, "filling slot given twice");
        taken[e.k * n + e.l] = true;
        if (e.w.size() != dim) throw Error(ErrorKind::DimensionMismatch, "filling vector has wrong length");
        const double wn = norm2(e.w);
        if (v_lambda_residual(sys, lambda, e.w) > kVLambdaTol * scale_a * wn || wn == 0.0) {
            throw Error(ErrorKind::VectorNotInVLambda,
                        "slot (" + std::to_string(e.k) + "," + std::to_string(e.l) + ") is not in V_lambda");
        }
        const auto pair = unchecked_pair(sys, lambda, e.w);
        if (auto why = admissibility_violation(sys, pair, false)) throw Error(ErrorKind::NotAdmissible, *why);
        const auto minus_w = scale(pair.w, -1.0);
        set(e.k, e.l, pair.w);
        set(e.l, e.k, pair.w);
        set(n + e.k, n + e.l, minus_w);
        set(n + e.l, n + e.k, minus_w);
        set(e.k, n + e.l, pair.w_hat);
        set(e.l, n + e.k, pair.w_hat);
        set(n + e.k, e.l, pair.w_hat);
        set(n + e.l, e.k, pair.w_hat);
        m.pairs.push_back(pair);
    }
    return m;
}

LaxPairModel real_form_lax(std::span<const AdmissiblePair> pairs, double tol) {
    if (pairs.empty()) throw Error(ErrorKind::WrongCount, "no pairs given");
    const std::size_t dim = pairs.front().w.size();
    if (dim != 2 * pairs.size()) throw Error(ErrorKind::WrongCount, "need one pair per block");

    std::vector<std::size_t> order;
    std::vector<bool> used(pairs.size(), false);
    ComplexMatrix b_real(dim, dim);
    ComplexMatrix s(dim, dim);
    std::size_t off = 0;
    for (std::size_t j = 0; j < pairs.size(); ++j) {
        if (used[j]) continue;
        used[j] = true;
        order.push_back(j);
        const cplx lam = pairs[j].lambda;
        switch (pairs[j].lambda_class) {
            case LambdaClass::PureImaginary: {
                const double h = (-kI * lam / 2.0).real();
                place(b_real, off, ComplexMatrix{{0.0, h}, {-h, 0.0}});
                place(s, off, ComplexMatrix::identity(2));
                off += 2;
                break;
            }
            case LambdaClass::Real: {
                place(b_real, off, ComplexMatrix{{lam.real() / 2.0, 0.0}, {0.0, -lam.real() / 2.0}});
                place(s, off, ComplexMatrix{{1.0, 1.0}, {kI, -kI}});
                off += 2;
                break;
            }
            case LambdaClass::GenuinelyComplex: {
                std::size_t partner = pairs.size();
                for (std::size_t k = j + 1; k < pairs.size(); ++k) {
                    if (!used[k] && std::abs(pairs[k].lambda - std::conj(lam)) <= tol * std::abs(lam)) {
                        partner = k;
                        break;
                    }
                }
                if (partner == pairs.size()) {
                    throw Error(ErrorKind::NotConjugateClosed,
                                "no conjugate partner for pair " + std::to_string(j));
                }
                used[partner] = true;
                order.push_back(partner);
                const double a = lam.real();
                const double b = lam.imag();
                const ComplexMatrix n1{{a, b}, {b, -a}};
                const ComplexMatrix n2{{a, -b}, {-b, -a}};
                ComplexMatrix blk(4, 4);
                for (std::size_t r = 0; r < 2; ++r)
                    for (std::size_t c = 0; c < 2; ++c) {
                        blk(r, 2 + c) = n1(r, c) / 2.0;
                        blk(2 + r, c) = n2(r, c) / 2.0;
                    }
                place(b_real, off, blk);
                // Eigenvectors of the complex blocks and of the real block,
                // matched eigenvalue by eigenvalue: λ/2, −λ/2, λ̄/2, −λ̄/2.
                ComplexMatrix vc(4, 4);
                vc(0, 0) = 1.0, vc(1, 0) = kI;
                vc(0, 1) = 1.0, vc(1, 1) = -kI;
                vc(2, 2) = 1.0, vc(3, 2) = kI;
                vc(2, 3) = 1.0, vc(3, 3) = -kI;
                const cplx mus[4] = {lam / 2.0, -lam / 2.0, std::conj(lam) / 2.0, -std::conj(lam) / 2.0};
                ComplexMatrix vr(4, 4);
                for (std::size_t c = 0; c < 4; ++c) {
                    const ComplexVector p = c < 2 ? ComplexVector{1.0, -kI} : ComplexVector{1.0, kI};
                    const auto q = scale(n2 * p, 1.0 / (2.0 * mus[c]));
                    vr(0, c) = p[0], vr(1, c) = p[1], vr(2, c) = q[0], vr(3, c) = q[1];
                }
                place(s, off, vc * inverse(vr));
                off += 4;
                break;
            }
        }
    }
    std::vector<AdmissiblePair> ordered;
    for (auto idx : order) ordered.push_back(pairs[idx]);
    LaxPairModel complex_model;
    complex_model.k = dim;
    complex_model.covectors.assign(dim * dim, ComplexVector(dim));
    for (std::size_t j = 0; j < ordered.size(); ++j) {
        const auto blk = build_lax2(ordered[j]);
        for (std::size_t r = 0; r < 2; ++r)
            for (std::size_t c = 0; c < 2; ++c)
                complex_model.covectors[(2 * j + r) * dim + 2 * j + c] = blk.covectors[r * 2 + c];
    }
    const ComplexMatrix s_inv = inverse(s);
    std::vector<ComplexMatrix> basis;
    for (const auto& l : basis_from_model(complex_model)) basis.push_back(s_inv * l * s);

    LaxPairModel m;
    m.k = dim;
    m.kind = LaxKind::RealForm;
    m.b = b_real;
    m.covectors = covectors_from_basis(basis, dim);
    m.pairs = std::move(ordered);
    return m;
}

std::pair<LaxPairModel, LaxPairModel> split_real_imag(const LaxPairModel& model) {
    if (norm_max(to_complex(imag_part(model.b))) > 1e-12 * std::max(1.0, norm_max(model.b))) {
        throw Error(ErrorKind::PreconditionViolation, "B is not real");
    }
    LaxPairModel re = model;
    LaxPairModel im = model;
    re.b = to_complex(real_part(model.b));
    im.b = re.b;
    for (std::size_t e = 0; e < model.covectors.size(); ++e) {
        re.covectors[e] = to_complex(real_part(model.covectors[e]));
        im.covectors[e] = to_complex(imag_part(model.covectors[e]));
    }
    return {std::move(re), std::move(im)};
}

std::pair<QuadraticIntegral, QuadraticIntegral> real_imag_split(const QuadraticIntegral& i1,
                                                                const QuadraticIntegral& i2, double tol) {
    if (i1.s.rows() != i2.s.rows() || i1.s.cols() != i2.s.cols()) {
        throw Error(ErrorKind::DimensionMismatch, "integrals have different sizes");
    }
    const double gap = norm_max(i2.s - i1.s.conjugate());
    if (gap > tol * std::max(1.0, norm_max(i1.s))) {
        throw Error(ErrorKind::NotConjugatePair, "second integral is not the conjugate of the first");
    }
    const ComplexMatrix re = (i1.s + i2.s) * cplx(0.5);
    const ComplexMatrix im = (i1.s - i2.s) * (1.0 / (2.0 * kI));
    return {QuadraticIntegral{to_complex(real_part(re)), "Re " + i1.label},
            QuadraticIntegral{to_complex(real_part(im)), "Im " + i1.label}};
}

cplx trace_square(const ComplexMatrix& m) {
    cplx acc{};
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) acc += m(i, j) * m(j, i);
    return acc;
}

}  // namespace laxforge
