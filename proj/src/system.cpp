#include "laxforge/system.hpp"

#include <string>

namespace laxforge {

namespace {

std::string at(std::size_t i, std::size_t j) {
    return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

}  // namespace

double ValidatedSystem::hamiltonian(std::span<const double> x) const {
    const auto px = p_ * x;
    return 0.5 * dot(x, std::span<const double>(px));
}

ValidatedSystem validate_system(const RealMatrix& gamma, const RealMatrix& p, double tol) {
    if (!gamma.is_square() || !p.is_square()) {
        throw Error(ErrorKind::DimensionMismatch, "gamma " + gamma.shape() + ", p " + p.shape() +
                                                      ": both must be square");
    }
    if (gamma.rows() != p.rows() || gamma.rows() == 0 || gamma.rows() % 2 != 0) {
        throw Error(ErrorKind::DimensionMismatch, "gamma " + gamma.shape() + ", p " + p.shape() +
                                                      ": need equal even dimension 2n >= 2");
    }
    if (gamma.rows() > 64) {
        throw Error(ErrorKind::DimensionMismatch, "dimension above 64 is not supported");
    }
    if (!all_finite(gamma) || !all_finite(p)) {
        throw Error(ErrorKind::DimensionMismatch, "non-finite entries");
    }
    const std::size_t d = gamma.rows();
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            if (gamma(i, j) != -gamma(j, i)) {
                throw Error(ErrorKind::NotSkewSymmetric, "gamma violates skew-symmetry at " + at(i, j));
            }
            if (p(i, j) != p(j, i)) {
                throw Error(ErrorKind::NotSymmetric, "p violates symmetry at " + at(i, j));
            }
        }
    }
    if (is_numerically_singular(gamma, tol)) throw Error(ErrorKind::Singular, "gamma is singular");
    if (is_numerically_singular(p, tol)) throw Error(ErrorKind::Singular, "p is singular");

    ValidatedSystem sys;
    sys.gamma_ = gamma;
    sys.p_ = p;
    sys.gamma_inv_ = inverse(gamma, tol);
    sys.p_inv_ = inverse(p, tol);
    sys.p_gamma_inv_ = p * sys.gamma_inv_;
    sys.flow_ = -(sys.gamma_inv_ * p);
    return sys;
}

}  // namespace laxforge
