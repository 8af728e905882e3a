#pragma once

#include <string>
#include <vector>

#include "laxforge/matrix.hpp"
#include "laxforge/spectral.hpp"
#include "laxforge/system.hpp"

namespace laxforge {

enum class LaxKind { Dim2, SqrtN1, BlockDiag, SameLambda, RealForm };

std::string_view to_string(LaxKind k);

/// A constant matrix B and a linear map x ↦ L(x), stored entrywise: entry
/// (i, j) of L(x) is covectors[i·k + j]ᵀx.
struct LaxPairModel {
    ComplexMatrix b;
    std::vector<ComplexVector> covectors;
    std::size_t k = 0;
    LaxKind kind = LaxKind::Dim2;
    std::vector<AdmissiblePair> pairs;  // the pairs the model was assembled from, if any

    std::size_t state_dim() const { return covectors.empty() ? 0 : covectors.front().size(); }
    ComplexMatrix evaluate(std::span<const double> x) const;
    ComplexMatrix evaluate(std::span<const cplx> x) const;
};

/// I(x) = xᵀSx for a complex symmetric S.
struct QuadraticIntegral {
    ComplexMatrix s;
    std::string label;

    cplx evaluate(std::span<const double> x) const;
    cplx evaluate(std::span<const cplx> x) const;
};

/// B = −(iλ/2)[[0,1],[−1,0]], L = [[a,d],[d,−a]] with a = xᵀw, d = xᵀŵ.
LaxPairModel build_lax2(const AdmissiblePair& pair);

/// S = 2(wwᵀ + ŵŵᵀ), so that I(x) = Tr(L(x)²).
QuadraticIntegral integral_of_pair(const AdmissiblePair& pair, std::string label = {});

/// 2·(xᵀ(E − λ⁻¹PΓ⁻¹)w)·(xᵀ(E + λ⁻¹PΓ⁻¹)w).
cplx factorized_integral(const ValidatedSystem& sys, const AdmissiblePair& pair, std::span<const double> x);

/// Tr(Lᵏ) for a symmetric traceless 2×2 L, via L² = (g² + h²)E.
cplx trace_power(const ComplexMatrix& l, int k);

/// For n = 1: rescales w by c, c² = det P / (wᵀΓPΓ⁻¹w), picking arg c in
/// (−π/2, π/2]. The result satisfies wᵀP⁻¹w = 1 and I = 4H.
AdmissiblePair normalize_n1(const AdmissiblePair& pair, const ValidatedSystem& sys);

/// Principal symmetric square root of a real symmetric 2×2 matrix.
ComplexMatrix symmetric_sqrt_2x2(const RealMatrix& p);

struct SqrtLax {
    LaxPairModel model;
    ComplexMatrix t;
    double identity_residual = 0.0;  // ‖ΓT − det T·T⁻¹Γ‖_max
};

/// For n = 1: T² = P, L = TZ − Γ⁻¹TZΓ with Z = [[x₁,0],[x₂,0]], B = −(det T/2)Γ⁻¹.
SqrtLax sqrt_lax_n1(const ValidatedSystem& sys);

/// Block diagonal model from n pairs with pairwise distinct λ².
LaxPairModel block_lax_2n(std::span<const AdmissiblePair> pairs, double tol = 1e-8);

/// One slot (k, l), l ≥ k, of the symmetric n×n fillings A, D.
struct FillingEntry {
    std::size_t k = 0;
    std::size_t l = 0;
    ComplexVector w;
};

/// B = −(iλ/2)[[0,E],[−E,0]], L = [[A,D],[D,−A]] with a_kl = xᵀw_kl,
/// d_kl = xᵀŵ_kl. Slots not listed stay zero.
LaxPairModel same_lambda_block_lax(const ValidatedSystem& sys, cplx lambda,
                                   std::span<const FillingEntry> filling);

/// Block diagonal model over conjugation-closed eigenvalues, moved to a basis
/// where B is real. Conjugate pairs λ = a ± bi share one 4×4 block
/// ½[[0,N₁],[N₂,0]], real λ blocks are diagonalized, imaginary λ blocks pass
/// through.
LaxPairModel real_form_lax(std::span<const AdmissiblePair> pairs, double tol = 1e-8);

/// The real Lax pairs (B, Re L) and (B, Im L) of a model with real B.
std::pair<LaxPairModel, LaxPairModel> split_real_imag(const LaxPairModel& model);

/// (½(s₁+s₂), (1/2i)(s₁−s₂)) for a conjugate pair of integrals.
std::pair<QuadraticIntegral, QuadraticIntegral> real_imag_split(const QuadraticIntegral& i1,
                                                                const QuadraticIntegral& i2,
                                                                double tol = 1e-10);

/// Tr(M²) for a square complex matrix.
cplx trace_square(const ComplexMatrix& m);

}  // namespace laxforge
