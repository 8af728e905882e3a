#pragma once

#include <vector>

#include "laxforge/laxpair.hpp"
#include "laxforge/matrix.hpp"
#include "laxforge/system.hpp"

namespace laxforge {

/// exp(A) by scaling and squaring with the degree 13 Padé approximant.
RealMatrix expm(const RealMatrix& a);

/// `count` equally spaced points on [t0, t1]; count = 1 gives {t0}.
std::vector<double> time_grid(double t0, double t1, std::size_t count);

/// Samples of x(t) = exp(tG)x₀ with G = −Γ⁻¹P. Immutable once built.
struct Trajectory {
    std::vector<double> times;
    std::vector<RealVector> states;
    RealMatrix generator;
    std::vector<RealMatrix> propagators;  // exp(t_k G), one per sample
    double flow_residual = 0.0;           // max ‖ẋ − Gx‖ / ‖x‖ over the samples

    RealVector velocity(std::size_t k) const;
    /// Largest gap between the stored states and a fresh exp(t_k G)x₀.
    double recheck() const;
};

/// Throws DimensionMismatch on a wrong x₀ and PreconditionViolation unless
/// the times increase strictly.
Trajectory propagate(const ValidatedSystem& sys, std::span<const double> x0, std::span<const double> times);

/// ‖exp(tG)ᵀ Γ exp(tG) − Γ‖_max / ‖Γ‖_max.
double symplectic_residual(const ValidatedSystem& sys, double t);

struct LaxResidual {
    double exact = 0.0;   // max ‖L(ẋ) − [B, L(x)]‖ / ‖L(x)‖
    double finite_difference = 0.0;  // same with a central difference for L̇
    double fd_gap = 0.0;  // max ‖central difference − L(ẋ)‖ / ‖L(x)‖
};

LaxResidual lax_equation_residual(const LaxPairModel& model, const Trajectory& traj, double h = 1e-5);

/// For a block model: the 2n covectors {w_j, ŵ_j} must span. Returns the
/// condition number of their matrix; throws RankDeficient otherwise.
double system_equivalence_check(const LaxPairModel& model, const ValidatedSystem& sys, double rel_tol = 1e-9);

/// Per integral, max_t |I(x(t)) − I(x(0))| / max(|I(x(0))|, 1e-30).
std::vector<double> conservation_report(std::span<const QuadraticIntegral> integrals, const Trajectory& traj);

}  // namespace laxforge
