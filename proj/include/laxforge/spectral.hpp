#pragma once

#include <optional>
#include <vector>

#include "laxforge/matrix.hpp"
#include "laxforge/system.hpp"

namespace laxforge {

inline constexpr double kPairingTol = 1e-6;
inline constexpr double kGapTol = 1e-9;
inline constexpr double kClassTol = 1e-9;
inline constexpr double kSpectralTol = 1e-10;
inline constexpr double kVLambdaTol = 1e-8;

/// Eigenvalues (with multiplicity), unit eigenvectors and the residual
/// ‖Mv − λv‖ of every computed pair.
struct SpectralData {
    ComplexVector eigenvalues;
    std::vector<ComplexVector> eigenvectors;
    std::vector<double> residuals;
    double operator_norm = 0.0;  // ‖M‖_F of the decomposed matrix

    double max_residual() const;
    double spectral_radius() const;
};

/// Raised when the QR iteration hits its cap; carries whatever converged.
class NoConvergenceError : public Error {
public:
    NoConvergenceError(const std::string& what, SpectralData partial)
        : Error(ErrorKind::NoConvergence, what), partial_(std::move(partial)) {}
    const SpectralData& partial() const noexcept { return partial_; }

private:
    SpectralData partial_;
};

/// Hessenberg reduction, Wilkinson-shifted complex QR for the eigenvalues and
/// inverse iteration for the eigenvectors. Eigenvalues come out sorted by
/// descending real part, then descending imaginary part.
SpectralData eigen_decompose(const ComplexMatrix& m, double tol = kSpectralTol);

/// Spectrum of PΓ⁻¹.
SpectralData system_spectrum(const ValidatedSystem& sys, double tol = kSpectralTol);

/// Eigenvalues only, via the QR iteration (no eigenvectors).
ComplexVector eigenvalues(const ComplexMatrix& m);

struct QuadrupleReport {
    /// Each orbit of λ ↦ {λ̄, −λ, −λ̄} as indices into the eigenvalue list.
    std::vector<std::vector<std::size_t>> orbits;
    double max_partner_distance = 0.0;
    std::size_t full_quadruples() const;
};

/// Confirms every eigenvalue has its conjugate, negative and negated
/// conjugate in the spectrum; throws SymmetryViolation naming the first gap.
QuadrupleReport quadruple_symmetry_check(const SpectralData& s, double pairing_tol = kPairingTol);
QuadrupleReport quadruple_symmetry_check(std::span<const cplx> eigenvalues,
                                         double pairing_tol = kPairingTol);

/// True iff the minimum pairwise eigenvalue distance exceeds gap_tol times
/// the spectral radius.
bool is_simple_spectrum(const SpectralData& s, double gap_tol = kGapTol);
bool is_simple_spectrum(std::span<const cplx> eigenvalues, double gap_tol = kGapTol);

/// Orthonormal basis of V_λ = ker((PΓ⁻¹)² − λ²E).
std::vector<ComplexVector> v_lambda_basis(const ValidatedSystem& sys, cplx lambda,
                                          double tol = kVLambdaTol);

enum class LambdaClass { PureImaginary, Real, GenuinelyComplex };

std::string_view to_string(LambdaClass c);

/// λ ∈ iℝ when |Re λ| < tol·|λ|, λ ∈ ℝ when |Im λ| < tol·|λ|.
LambdaClass classify_lambda(cplx lambda, double tol = kClassTol);

/// An eigenvalue λ of PΓ⁻¹ with w ∈ V_λ not an eigenvector of PΓ⁻¹, and the
/// companion ŵ = iλ⁻¹PΓ⁻¹w.
struct AdmissiblePair {
    cplx lambda;
    ComplexVector w;
    ComplexVector w_hat;
    LambdaClass lambda_class = LambdaClass::GenuinelyComplex;

    bool w_is_real() const;
    cplx lambda_sq() const { return lambda * lambda; }
};

/// ŵ = iλ⁻¹PΓ⁻¹w.
ComplexVector hat(const ValidatedSystem& sys, cplx lambda, std::span<const cplx> w);

/// Picks w = v₊ + v₋ from unit eigenvectors of PΓ⁻¹ for λ and −λ, rotated to a
/// real vector when λ² is real.
AdmissiblePair select_admissible_pair(const ValidatedSystem& sys, cplx lambda);

/// Validates a caller-supplied w instead of choosing one.
AdmissiblePair select_admissible_pair(const ValidatedSystem& sys, cplx lambda,
                                      std::span<const cplx> w_candidate);

/// Builds (λ, w, ŵ) without any admissibility check. Only meant for probing
/// what happens on degenerate inputs such as an eigenvector w.
AdmissiblePair unchecked_pair(const ValidatedSystem& sys, cplx lambda, std::span<const cplx> w);

/// Same checks as the override path, reported as a message instead of thrown.
std::optional<std::string> admissibility_violation(const ValidatedSystem& sys, const AdmissiblePair& pair,
                                                   bool require_real_w);

/// |v₁ᵀΓ⁻¹v₂|. Vanishes when v₁, v₂ are eigenvectors of (PΓ⁻¹)² with different
/// eigenvalues; for equal eigenvalues the value is returned uninterpreted.
double orthogonality_check(const ValidatedSystem& sys, std::span<const cplx> v1, std::span<const cplx> v2);

/// vᵀΓ⁻¹(PΓ⁻¹v); nonzero for v in V_λ that is not an eigenvector of PΓ⁻¹ when
/// the spectrum is simple.
cplx nondegeneracy_check(const ValidatedSystem& sys, std::span<const cplx> v);

/// One representative of each ± pair: Re λ > 0, or Re λ ≈ 0 and Im λ > 0.
/// Conjugate eigenvalues are both kept, so complex quadruples yield (λ, λ̄).
ComplexVector positive_representatives(std::span<const cplx> eigenvalues, double tol = kClassTol);

}  // namespace laxforge
