#include "laxforge/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "laxforge/linalg.hpp"

namespace laxforge {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

/// Householder reduction to upper Hessenberg form.
ComplexMatrix hessenberg(ComplexMatrix h) {
    const std::size_t n = h.rows();
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double xnorm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) xnorm += std::norm(h(i, k));
        xnorm = std::sqrt(xnorm);
        if (xnorm == 0.0) continue;
        const cplx x0 = h(k + 1, k);
        const cplx phase = std::abs(x0) == 0.0 ? cplx{1.0} : x0 / std::abs(x0);
        const cplx alpha = -phase * xnorm;
        ComplexVector v(n, cplx{});
        for (std::size_t i = k + 1; i < n; ++i) v[i] = h(i, k);
        v[k + 1] -= alpha;
        const double vnorm = norm2(v);
        if (vnorm == 0.0) continue;
        for (auto& e : v) e /= vnorm;
        // H ← (I − 2vvᴴ) H
        for (std::size_t j = 0; j < n; ++j) {
            cplx s{};
            for (std::size_t i = k + 1; i < n; ++i) s += std::conj(v[i]) * h(i, j);
            for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= 2.0 * v[i] * s;
        }
        // H ← H (I − 2vvᴴ)
        for (std::size_t i = 0; i < n; ++i) {
            cplx s{};
            for (std::size_t j = k + 1; j < n; ++j) s += h(i, j) * v[j];
            for (std::size_t j = k + 1; j < n; ++j) h(i, j) -= 2.0 * s * std::conj(v[j]);
        }
        for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
    }
    return h;
}

/// Eigenvalue of the trailing 2x2 block closest to its last diagonal entry.
cplx wilkinson_shift(cplx a, cplx b, cplx c, cplx d) {
    const cplx tr = a + d;
    const cplx det = a * d - b * c;
    const cplx disc = std::sqrt(tr * tr / 4.0 - det);
    const cplx l1 = tr / 2.0 + disc;
    const cplx l2 = tr / 2.0 - disc;
    return std::abs(l1 - d) < std::abs(l2 - d) ? l1 : l2;
}

struct QrResult {
    ComplexVector values;
    bool converged = true;
    std::size_t unconverged = 0;  // leading block size left undeflated
};

QrResult qr_eigenvalues(const ComplexMatrix& m) {
    const std::size_t n = m.rows();
    QrResult out;
    out.values.assign(n, cplx{});
    if (n == 0) return out;
    ComplexMatrix h = hessenberg(m);
    const double scale = std::max(norm_fro(m), std::numeric_limits<double>::min());
    std::size_t hi = n - 1;
    int iter = 0;
    const int cap = 100 * static_cast<int>(n);
    int total = 0;
    std::vector<cplx> cs(n);
    std::vector<cplx> ss(n);
    std::vector<double> cr(n);

    while (hi > 0) {
        std::size_t lo = hi;
        while (lo > 0) {
            const double sub = std::abs(h(lo, lo - 1));
            const double diag = std::abs(h(lo, lo)) + std::abs(h(lo - 1, lo - 1));
            if (sub <= kEps * (diag == 0.0 ? scale : diag)) {
                h(lo, lo - 1) = 0.0;
                break;
            }
            --lo;
        }
        if (lo == hi) {
            out.values[hi] = h(hi, hi);
            --hi;
            iter = 0;
            continue;
        }
        if (++total > cap) {
            out.converged = false;
            out.unconverged = hi + 1;
            for (std::size_t i = 0; i <= hi; ++i) out.values[i] = h(i, i);
            return out;
        }
        ++iter;
        cplx mu;
        if (iter % 11 == 0) {
            // exceptional shift to break cycles
            mu = h(hi, hi) + cplx(std::abs(h(hi, hi - 1)), 0.75 * std::abs(h(hi, hi - 1)));
        } else {
            mu = wilkinson_shift(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
        }
        for (std::size_t i = lo; i <= hi; ++i) h(i, i) -= mu;
        // QR of the active block by Givens rotations from the left.
        for (std::size_t k = lo; k < hi; ++k) {
            const cplx a = h(k, k);
            const cplx b = h(k + 1, k);
            const double r = std::hypot(std::abs(a), std::abs(b));
            double c;
            cplx s;
            if (r == 0.0) {
                c = 1.0;
                s = 0.0;
            } else if (std::abs(a) == 0.0) {
                c = 0.0;
                s = std::conj(b) / r;
            } else {
                c = std::abs(a) / r;
                s = (a / std::abs(a)) * std::conj(b) / r;
            }
            cr[k] = c;
            ss[k] = s;
            for (std::size_t j = k; j <= hi; ++j) {
                const cplx x = h(k, j);
                const cplx y = h(k + 1, j);
                h(k, j) = c * x + s * y;
                h(k + 1, j) = -std::conj(s) * x + c * y;
            }
        }
        // RQ: apply the adjoint rotations from the right.
        for (std::size_t k = lo; k < hi; ++k) {
            const double c = cr[k];
            const cplx s = ss[k];
            const std::size_t last = std::min(k + 2, hi);
            for (std::size_t i = lo; i <= last; ++i) {
                const cplx x = h(i, k);
                const cplx y = h(i, k + 1);
                h(i, k) = x * c + y * std::conj(s);
                h(i, k + 1) = -x * s + y * c;
            }
        }
        for (std::size_t i = lo; i <= hi; ++i) h(i, i) += mu;
    }
    out.values[0] = h(0, 0);
    return out;
}

void canonicalize_phase(ComplexVector& v) {
    double best = 0.0;
    for (const auto& x : v) best = std::max(best, std::abs(x));
    if (best == 0.0) return;
    for (const auto& x : v) {
        if (std::abs(x) >= (1.0 - 1e-9) * best) {
            const cplx ph = std::conj(x) / std::abs(x);
            for (auto& y : v) y *= ph;
            return;
        }
    }
}

void normalize(ComplexVector& v) {
    const double nv = norm2(v);
    if (nv > 0.0)
        for (auto& x : v) x /= nv;
}

double residual(const ComplexMatrix& m, std::span<const cplx> v, cplx lambda) {
    const auto mv = m * v;
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += std::norm(mv[i] - lambda * v[i]);
    return std::sqrt(s);
}

ComplexVector inverse_iteration(const ComplexMatrix& m, cplx lambda, std::span<const ComplexVector> deflate,
                                std::size_t seed) {
    const std::size_t n = m.rows();
    const double scale = std::max(norm_fro(m), 1.0);
    ComplexMatrix shifted = m;
    const cplx delta = cplx(1.0, 0.5) * (1e-13 * scale);
    for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= lambda + delta;
    auto lu = lu_decompose(shifted);
    if (lu.singular) {
        for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= delta * 10.0;
        lu = lu_decompose(shifted);
    }
    ComplexVector v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = cplx(1.0 + 0.1 * static_cast<double>((i * 7 + seed * 3) % 11),
                    0.05 * static_cast<double>((i * 5 + seed) % 7));
    }
    for (int it = 0; it < 4; ++it) {
        for (const auto& d : deflate) {
            const cplx c = inner(d, v);
            for (std::size_t i = 0; i < n; ++i) v[i] -= c * d[i];
        }
        normalize(v);
        v = solve(shifted, std::span<const cplx>(v));
        normalize(v);
    }
    for (const auto& d : deflate) {
        const cplx c = inner(d, v);
        for (std::size_t i = 0; i < n; ++i) v[i] -= c * d[i];
    }
    normalize(v);
    canonicalize_phase(v);
    return v;
}

/// Deterministic ordering key, insensitive to rounding noise below the grid.
double grid(double x, double step) { return std::round(x / step) * step; }

void sort_spectrum(ComplexVector& values, double scale) {
    const double step = 1e-9 * std::max(scale, 1.0);
    std::stable_sort(values.begin(), values.end(), [step](cplx a, cplx b) {
        const double ar = grid(a.real(), step), br = grid(b.real(), step);
        if (ar != br) return ar > br;
        return grid(a.imag(), step) > grid(b.imag(), step);
    });
}

}  // namespace

double SpectralData::max_residual() const {
    return residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
}

double SpectralData::spectral_radius() const {
    double r = 0.0;
    for (const auto& l : eigenvalues) r = std::max(r, std::abs(l));
    return r;
}

ComplexVector eigenvalues(const ComplexMatrix& m) {
    if (!m.is_square()) throw Error(ErrorKind::DimensionMismatch, "eigenvalues of " + m.shape());
    auto qr = qr_eigenvalues(m);
    if (!qr.converged) {
        SpectralData partial;
        partial.eigenvalues.assign(qr.values.begin() + static_cast<std::ptrdiff_t>(qr.unconverged),
                                   qr.values.end());
        throw NoConvergenceError("QR iteration cap reached", std::move(partial));
    }
    sort_spectrum(qr.values, norm_fro(m));
    return qr.values;
}

SpectralData eigen_decompose(const ComplexMatrix& m, double tol) {
    if (!m.is_square()) throw Error(ErrorKind::DimensionMismatch, "eigen_decompose of " + m.shape());
    if (m.rows() > 64) throw Error(ErrorKind::DimensionMismatch, "dimension above 64");
    SpectralData out;
    out.operator_norm = norm_fro(m);
    out.eigenvalues = eigenvalues(m);
    const double scale = std::max(out.operator_norm, 1.0);
    const double cluster = std::max(tol, 1e-8) * scale;
    for (std::size_t k = 0; k < out.eigenvalues.size(); ++k) {
        std::vector<ComplexVector> same;
        for (std::size_t j = 0; j < k; ++j) {
            if (std::abs(out.eigenvalues[j] - out.eigenvalues[k]) <= cluster) same.push_back(out.eigenvectors[j]);
        }
        auto v = inverse_iteration(m, out.eigenvalues[k], same, k);
        out.residuals.push_back(residual(m, v, out.eigenvalues[k]));
        out.eigenvectors.push_back(std::move(v));
    }
    return out;
}

SpectralData system_spectrum(const ValidatedSystem& sys, double tol) {
    return eigen_decompose(to_complex(sys.p_gamma_inv()), tol);
}

std::size_t QuadrupleReport::full_quadruples() const {
    return static_cast<std::size_t>(
        std::count_if(orbits.begin(), orbits.end(), [](const auto& o) { return o.size() == 4; }));
}

QuadrupleReport quadruple_symmetry_check(std::span<const cplx> values, double pairing_tol) {
    QuadrupleReport report;
    double radius = 0.0;
    for (const auto& l : values) radius = std::max(radius, std::abs(l));
    const double tol = pairing_tol * std::max(radius, 1.0);
    const std::size_t n = values.size();
    std::vector<int> orbit_of(n, -1);
    auto nearest = [&](cplx target) {
        std::size_t best = 0;
        double dist = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            const double d = std::abs(values[j] - target);
            if (d < dist) {
                dist = d;
                best = j;
            }
        }
        return std::pair{best, dist};
    };
    for (std::size_t i = 0; i < n; ++i) {
        const cplx l = values[i];
        const cplx partners[3] = {std::conj(l), -l, -std::conj(l)};
        const char* names[3] = {"conjugate", "negative", "negated conjugate"};
        std::vector<std::size_t> members{i};
        for (int p = 0; p < 3; ++p) {
            const auto [j, d] = nearest(partners[p]);
            report.max_partner_distance = std::max(report.max_partner_distance, d);
            if (d > tol) {
                throw Error(ErrorKind::SymmetryViolation,
                            std::string(names[p]) + " of eigenvalue (" + std::to_string(l.real()) + "," +
                                std::to_string(l.imag()) + ") is missing; nearest distance " + std::to_string(d));
            }
            members.push_back(j);
        }
        if (orbit_of[i] >= 0) continue;
        // Collect the orbit as the set of distinct eigenvalue positions.
        std::vector<std::size_t> orbit;
        for (std::size_t j = 0; j < n; ++j) {
            if (orbit_of[j] >= 0) continue;
            for (const cplx target : {l, partners[0], partners[1], partners[2]}) {
                if (std::abs(values[j] - target) <= tol) {
                    orbit.push_back(j);
                    break;
                }
            }
        }
        // Distinct values in the orbit: 4 for a genuine quadruple, 2 otherwise.
        std::vector<cplx> distinct;
        for (const auto j : orbit) {
            if (std::none_of(distinct.begin(), distinct.end(),
                             [&](cplx d) { return std::abs(d - values[j]) <= tol; })) {
                distinct.push_back(values[j]);
            }
        }
        const int id = static_cast<int>(report.orbits.size());
        for (const auto j : orbit) orbit_of[j] = id;
        report.orbits.push_back(orbit);
    }
    return report;
}

QuadrupleReport quadruple_symmetry_check(const SpectralData& s, double pairing_tol) {
    return quadruple_symmetry_check(std::span<const cplx>(s.eigenvalues), pairing_tol);
}

bool is_simple_spectrum(std::span<const cplx> values, double gap_tol) {
    double radius = 0.0;
    for (const auto& l : values) radius = std::max(radius, std::abs(l));
    for (std::size_t i = 0; i < values.size(); ++i)
        for (std::size_t j = i + 1; j < values.size(); ++j)
            if (!(std::abs(values[i] - values[j]) > gap_tol * radius)) return false;
    return true;
}

bool is_simple_spectrum(const SpectralData& s, double gap_tol) {
    return is_simple_spectrum(std::span<const cplx>(s.eigenvalues), gap_tol);
}

std::vector<ComplexVector> v_lambda_basis(const ValidatedSystem& sys, cplx lambda, double tol) {
    const ComplexMatrix a = to_complex(sys.p_gamma_inv());
    ComplexMatrix m = a * a;
    const double scale = norm_fro(m) + std::norm(lambda);
    for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) -= lambda * lambda;
    auto basis = null_space(m, tol, scale);
    if (basis.size() < 2) {
        throw Error(ErrorKind::DimensionTooSmall,
                    "V_lambda has dimension " + std::to_string(basis.size()) + " (expected >= 2)");
    }
    for (auto& v : basis) canonicalize_phase(v);
    return basis;
}

std::string_view to_string(LambdaClass c) {
    switch (c) {
        case LambdaClass::PureImaginary: return "pure_imaginary";
        case LambdaClass::Real: return "real";
        case LambdaClass::GenuinelyComplex: return "genuinely_complex";
    }
    return "unknown";
}

LambdaClass classify_lambda(cplx lambda, double tol) {
    const double mag = std::abs(lambda);
    if (std::abs(lambda.real()) < tol * mag) return LambdaClass::PureImaginary;
    if (std::abs(lambda.imag()) < tol * mag) return LambdaClass::Real;
    return LambdaClass::GenuinelyComplex;
}

bool AdmissiblePair::w_is_real() const {
    return std::all_of(w.begin(), w.end(), [](cplx x) { return x.imag() == 0.0; });
}

ComplexVector hat(const ValidatedSystem& sys, cplx lambda, std::span<const cplx> w) {
    if (w.size() != sys.dim()) throw Error(ErrorKind::DimensionMismatch, "w has wrong length");
    if (lambda == cplx{}) throw Error(ErrorKind::PreconditionViolation, "lambda must be nonzero");
    const auto aw = to_complex(sys.p_gamma_inv()) * w;
    return scale(aw, cplx(0.0, 1.0) / lambda);
}

namespace {

/// Snaps λ exactly onto iℝ or ℝ when its class says it belongs there.
cplx snap(cplx lambda, LambdaClass c) {
    switch (c) {
        case LambdaClass::PureImaginary: return {0.0, lambda.imag()};
        case LambdaClass::Real: return {lambda.real(), 0.0};
        case LambdaClass::GenuinelyComplex: return lambda;
    }
    return lambda;
}

AdmissiblePair assemble(const ValidatedSystem& sys, cplx lambda, ComplexVector w) {
    AdmissiblePair pair;
    pair.lambda_class = classify_lambda(lambda);
    pair.lambda = snap(lambda, pair.lambda_class);
    pair.w = std::move(w);
    pair.w_hat = hat(sys, pair.lambda, pair.w);
    if (pair.w_is_real()) {
        // ŵ is exactly real (λ ∈ iℝ) or exactly imaginary (λ ∈ ℝ).
        if (pair.lambda_class == LambdaClass::PureImaginary)
            for (auto& x : pair.w_hat) x = {x.real(), 0.0};
        if (pair.lambda_class == LambdaClass::Real)
            for (auto& x : pair.w_hat) x = {0.0, x.imag()};
    }
    return pair;
}

/// Unit vector spanning (approximately) ker(A − μE); throws if μ is not an
/// eigenvalue to working accuracy.
ComplexVector eigenvector_for(const ComplexMatrix& a, cplx mu) {
    ComplexMatrix m = a;
    for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) -= mu;
    const Svd d = svd(m);
    const double scale = std::max(norm_fro(a), std::abs(mu)) + 1.0;
    if (d.singular_values.back() > 1e-7 * scale) {
        throw Error(ErrorKind::PreconditionViolation,
                    "(" + std::to_string(mu.real()) + "," + std::to_string(mu.imag()) +
                        ") is not an eigenvalue of P*Gamma^-1 (smallest singular value " +
                        std::to_string(d.singular_values.back()) + ")");
    }
    ComplexVector v = d.v.col(d.v.cols() - 1);
    normalize(v);
    canonicalize_phase(v);
    return v;
}

/// Rotates v by the phase making vᵀv real and nonnegative; the result is
/// real whenever v is a complex multiple of a real vector.
void rotate_towards_real(ComplexVector& v) {
    const cplx vv = dot(std::span<const cplx>(v), std::span<const cplx>(v));
    if (std::abs(vv) <= 1e-14 * std::pow(norm2(v), 2)) return;
    const cplx ph = std::polar(1.0, -std::arg(vv) / 2.0);
    for (auto& x : v) x *= ph;
}

void fix_sign(ComplexVector& v) {
    double best = 0.0;
    for (const auto& x : v) best = std::max(best, std::abs(x));
    for (auto& x : v) {
        if (std::abs(x) >= (1.0 - 1e-9) * best) {
            if (x.real() < 0.0)
                for (auto& y : v) y = -y;
            return;
        }
    }
}

}  // namespace

std::optional<std::string> admissibility_violation(const ValidatedSystem& sys, const AdmissiblePair& pair,
                                                   bool require_real_w) {
    if (pair.lambda == cplx{}) return "lambda is zero";
    if (pair.w.size() != sys.dim()) return "w has wrong length";
    const double wn = norm2(pair.w);
    if (wn == 0.0) return "w is zero";
    const ComplexMatrix a = to_complex(sys.p_gamma_inv());
    const auto aw = a * pair.w;
    const double scale = std::max(norm_fro(a * a), std::norm(pair.lambda)) + 1e-300;
    const double vres = residual(a * a, pair.w, pair.lambda_sq());
    if (vres > kVLambdaTol * scale * wn) return "w is not in V_lambda (residual " + std::to_string(vres) + ")";
    // Angle between PΓ⁻¹w and w: eigenvectors give |cos| = 1.
    const double awn = norm2(aw);
    const double cosang = std::abs(inner(pair.w, aw)) / (wn * awn);
    if (cosang > 1.0 - 1e-10) return "w is an eigenvector of P*Gamma^-1";
    if (require_real_w && pair.lambda_class != LambdaClass::GenuinelyComplex && !pair.w_is_real()) {
        return "w must be real when lambda^2 is real";
    }
    return std::nullopt;
}

AdmissiblePair select_admissible_pair(const ValidatedSystem& sys, cplx lambda) {
    if (lambda == cplx{}) throw Error(ErrorKind::PreconditionViolation, "lambda must be nonzero");
    const LambdaClass cls = classify_lambda(lambda);
    lambda = snap(lambda, cls);
    const ComplexMatrix a = to_complex(sys.p_gamma_inv());
    ComplexVector vp = eigenvector_for(a, lambda);
    ComplexVector vm;
    if (cls == LambdaClass::PureImaginary) {
        rotate_towards_real(vp);
        vm = conj(vp);
    } else {
        vm = eigenvector_for(a, -lambda);
        if (cls == LambdaClass::Real) {
            rotate_towards_real(vp);
            rotate_towards_real(vm);
        }
    }
    if (std::abs(inner(vp, vm)) > 1.0 - 1e-8) {
        throw Error(ErrorKind::EigenvectorDegenerate, "eigenvectors for lambda and -lambda are parallel");
    }
    ComplexVector w = add(vp, vm);
    if (cls != LambdaClass::GenuinelyComplex) {
        rotate_towards_real(w);
        const double imag_norm = norm2(imag_part(w));
        if (imag_norm > 1e-8 * norm2(w)) {
            throw Error(ErrorKind::SelectionFailure,
                        "cannot realize a real w for real lambda^2 (imaginary norm " + std::to_string(imag_norm) + ")");
        }
        for (auto& x : w) x = {x.real(), 0.0};
    }
    fix_sign(w);
    auto pair = assemble(sys, lambda, std::move(w));
    if (auto why = admissibility_violation(sys, pair, true)) throw Error(ErrorKind::SelectionFailure, *why);
    return pair;
}

AdmissiblePair select_admissible_pair(const ValidatedSystem& sys, cplx lambda, std::span<const cplx> w_candidate) {
    if (lambda == cplx{}) throw Error(ErrorKind::PreconditionViolation, "lambda must be nonzero");
    if (w_candidate.size() != sys.dim()) throw Error(ErrorKind::DimensionMismatch, "w has wrong length");
    auto pair = assemble(sys, lambda, ComplexVector(w_candidate.begin(), w_candidate.end()));
    if (auto why = admissibility_violation(sys, pair, false)) throw Error(ErrorKind::NotAdmissible, *why);
    return pair;
}

AdmissiblePair unchecked_pair(const ValidatedSystem& sys, cplx lambda, std::span<const cplx> w) {
    return assemble(sys, lambda, ComplexVector(w.begin(), w.end()));
}

double orthogonality_check(const ValidatedSystem& sys, std::span<const cplx> v1, std::span<const cplx> v2) {
    return std::abs(bilinear(v1, to_complex(sys.gamma_inv()), v2));
}

cplx nondegeneracy_check(const ValidatedSystem& sys, std::span<const cplx> v) {
    const auto av = to_complex(sys.p_gamma_inv()) * v;
    return bilinear(v, to_complex(sys.gamma_inv()), av);
}

ComplexVector positive_representatives(std::span<const cplx> values, double tol) {
    ComplexVector reps;
    for (const auto& l : values) {
        const double mag = std::abs(l);
        const bool re_zero = std::abs(l.real()) < tol * mag;
        if ((!re_zero && l.real() > 0.0) || (re_zero && l.imag() > 0.0)) reps.push_back(l);
    }
    return reps;
}

}  // namespace laxforge
