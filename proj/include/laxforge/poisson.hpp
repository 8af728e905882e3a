#pragma once

#include <cstdint>
#include <vector>

#include "laxforge/laxpair.hpp"
#include "laxforge/matrix.hpp"
#include "laxforge/spectral.hpp"
#include "laxforge/system.hpp"

namespace laxforge {

/// Bracket {f, g} = ∇fᵀ W⁻¹ ∇g for a symplectic matrix W.
struct PoissonStructure {
    RealMatrix w_inv;
    std::size_t dim() const { return w_inv.rows(); }
};

/// From W itself; W must be skew-symmetric and nonsingular.
PoissonStructure poisson_structure(const RealMatrix& w);

/// The structure of the system, W = −Γ.
PoissonStructure system_poisson(const ValidatedSystem& sys);

double bracket_functions(const PoissonStructure& ps, std::span<const double> grad_f, std::span<const double> grad_g);

/// {uᵀx, vᵀx} = uᵀW⁻¹v for linear forms with complex coefficients.
cplx bracket_linear(const PoissonStructure& ps, std::span<const cplx> u, std::span<const cplx> v);

/// sgrad h = W⁻¹∇h.
RealVector hamiltonian_vector_field(const PoissonStructure& ps, std::span<const double> grad_h);

/// Bracket of quadratic forms as a matrix: {xᵀMx, xᵀNx} = xᵀ(−2(MΓ⁻¹N − NΓ⁻¹M))x.
ComplexMatrix quadratic_bracket(const ComplexMatrix& m, const ComplexMatrix& n, const ValidatedSystem& sys);

/// ‖{S₁, S₂}‖∞ / (‖S₁‖∞‖S₂‖∞); zero when the integrals commute identically in x.
double involution_check(const QuadraticIntegral& i1, const QuadraticIntegral& i2, const ValidatedSystem& sys);

struct IndependenceReport {
    std::vector<std::size_t> ranks;  // one per sample
    std::size_t min_rank = 0;
};

/// Numerical rank of the gradients 2S_jx at each sample.
IndependenceReport independence_check(std::span<const QuadraticIntegral> integrals,
                                      std::span<const RealVector> samples, double rel_tol = 1e-9);

struct GradientReport {
    double formula_residual = 0.0;  // ‖2Sx − (g₁E − g₂PΓ⁻¹)w‖, relative
    double eigen_residual = 0.0;    // ‖(PΓ⁻¹)²g − λ²g‖ / (|λ|²‖g‖)
};

/// Gradient of I_{λ,w} against (g₁E − g₂PΓ⁻¹)w, g₁ = 4xᵀw, g₂ = 4λ⁻²xᵀPΓ⁻¹w.
GradientReport gradient_formula_check(const ValidatedSystem& sys, const AdmissiblePair& pair,
                                      std::span<const double> x);

struct KForms {
    cplx direct;       // −wᵀΓ⁻¹ŵ
    cplx via_system;   // −iλ⁻¹wᵀΓ⁻¹PΓ⁻¹w
    cplx via_p_inv;    // −iλwᵀP⁻¹w
    double spread = 0.0;  // largest pairwise gap, relative to |direct|
};

KForms k_forms(const AdmissiblePair& pair, const ValidatedSystem& sys);

/// K = −wᵀΓ⁻¹ŵ after checking that all three forms agree; throws DegenerateK
/// when K vanishes.
cplx k_constant(const AdmissiblePair& pair, const ValidatedSystem& sys, double tol = 1e-10);

enum class TargetCase { PureImaginary, Real, Complex };

std::string_view to_string(TargetCase c);

/// Symplectic matrix on the image of x ↦ (pullback coordinates). Its inverse
/// is the table of coordinate brackets.
struct TargetStructure {
    TargetCase kind = TargetCase::PureImaginary;
    RealMatrix matrix;  // Γ_{λ,w}, Γ̃_{λ,w} or Y⁻¹
    cplx k;
    RealMatrix r;  // Complex case only
};

TargetStructure target_structure(const AdmissiblePair& pair, const ValidatedSystem& sys, double reality_tol = 1e-9);

/// Real covectors of the target coordinates: (w, ŵ), (w, i⁻¹ŵ) or
/// (Re w, Im w, Re ŵ, Im ŵ).
std::vector<RealVector> pullback_covectors(const AdmissiblePair& pair, TargetCase kind);

/// Largest gap between source brackets of the pulled-back coordinates and the
/// target bracket table, also over `trials` random quadratic functions.
double poisson_map_check(const AdmissiblePair& pair, const ValidatedSystem& sys, const TargetStructure& ts,
                         int trials = 20, std::uint64_t seed = 1);

struct HamiltonianReport {
    TargetCase kind = TargetCase::PureImaginary;
    RealMatrix generator;        // ż = G z on the target
    RealMatrix hamiltonian;      // W_t·G, symmetric when the pushed system is Hamiltonian
    double reality_residual = 0.0;
    double symmetry_residual = 0.0;
    double displayed_form_residual = 0.0;  // against the displayed matrix equation of each case
    double block_residual = 0.0;       // Complex case: Q = diag(M, M), M traceless
    double flow_residual = 0.0;        // pulled-back target flow against ẋ = −Γ⁻¹Px
    double det_m = 0.0;
    bool ok = false;
};

/// Throws NotHamiltonian if any residual exceeds tol.
HamiltonianReport pushforward_hamiltonian_check(const ValidatedSystem& sys, const AdmissiblePair& pair,
                                                const TargetStructure& ts, double tol = 1e-9);

struct ProductReport {
    double cross_bracket_max = 0.0;
    std::vector<double> block_residuals;
    double total_residual = 0.0;  // whole product map against the block diagonal target
    RealMatrix target;            // block diagonal symplectic matrix
};

/// Requires λ_i² ≠ λ_j² and λ_i² ≠ conj(λ_j²) for i ≠ j.
ProductReport product_poisson_check(std::span<const AdmissiblePair> pairs, const ValidatedSystem& sys,
                                    double clash_tol = 1e-8);

}  // namespace laxforge
