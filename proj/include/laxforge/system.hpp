#pragma once

#include "laxforge/linalg.hpp"
#include "laxforge/matrix.hpp"

namespace laxforge {

/// The pair (Γ, P) of a linear Hamiltonian system Γẋ = −Px, with Γ skew,
/// P symmetric and both nonsingular. Only validate_system constructs one.
class ValidatedSystem {
public:
    const RealMatrix& gamma() const noexcept { return gamma_; }
    const RealMatrix& p() const noexcept { return p_; }
    const RealMatrix& gamma_inv() const noexcept { return gamma_inv_; }
    const RealMatrix& p_inv() const noexcept { return p_inv_; }

    /// PΓ⁻¹, the operator whose eigenstructure drives every construction.
    const RealMatrix& p_gamma_inv() const noexcept { return p_gamma_inv_; }
    /// −Γ⁻¹P, the generator of the flow ẋ = −Γ⁻¹Px.
    const RealMatrix& flow_generator() const noexcept { return flow_; }

    std::size_t n() const noexcept { return gamma_.rows() / 2; }
    std::size_t dim() const noexcept { return gamma_.rows(); }

    /// H(x) = ½xᵀPx.
    double hamiltonian(std::span<const double> x) const;

private:
    friend ValidatedSystem validate_system(const RealMatrix&, const RealMatrix&, double);
    ValidatedSystem() = default;

    RealMatrix gamma_;
    RealMatrix p_;
    RealMatrix gamma_inv_;
    RealMatrix p_inv_;
    RealMatrix p_gamma_inv_;
    RealMatrix flow_;
};

/// Checks Γᵀ = −Γ and Pᵀ = P bitwise, then nonsingularity of both with the
/// scale-invariant threshold of singular_threshold.
ValidatedSystem validate_system(const RealMatrix& gamma, const RealMatrix& p,
                                double tol = kDefaultSingularTol);

}  // namespace laxforge
