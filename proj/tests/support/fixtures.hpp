#pragma once

// Test-only system generators and reference systems.

#include <algorithm>
#include <random>
#include <vector>

#include "laxforge/linalg.hpp"
#include "laxforge/spectral.hpp"
#include "laxforge/system.hpp"

namespace laxforge::testing {

inline RealMatrix standard_j() { return RealMatrix{{0.0, 1.0}, {-1.0, 0.0}}; }

inline ValidatedSystem oscillator() { return validate_system(standard_j(), RealMatrix::identity(2)); }

/// The n = 2 system with spectrum ±a ± bi used throughout the tests.
inline RealMatrix quadruple_p(double a, double b) {
    return RealMatrix{{0, a, 0, b}, {a, 0, -b, 0}, {0, -b, 0, a}, {b, 0, a, 0}};
}
inline RealMatrix quadruple_gamma() {
    return RealMatrix{{0, 1, 0, 0}, {-1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, -1, 0}};
}
inline ValidatedSystem quadruple_system(double a = 1.0, double b = 2.0) {
    return validate_system(quadruple_gamma(), quadruple_p(a, b));
}
inline ComplexVector quadruple_w() { return {1.0, 1.0, cplx(0, 1), cplx(0, -1)}; }

enum class BlockKind { Imaginary, Real, Complex };

/// Random system assembled from normal-form blocks, then moved by a random
/// congruence x ↦ Sx, which keeps the spectrum of PΓ⁻¹.
class SystemFactory {
public:
    explicit SystemFactory(std::uint64_t seed) : rng_(seed) {}

    std::mt19937_64& rng() { return rng_; }

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    double gauss() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }

    RealVector random_vector(std::size_t dim) {
        RealVector v(dim);
        for (auto& x : v) x = gauss();
        return v;
    }

    /// Blocks sized 2 (Imaginary, Real) or 4 (Complex); all λ² kept well apart.
    ValidatedSystem from_blocks(const std::vector<BlockKind>& kinds) {
        for (int attempt = 0; attempt < 200; ++attempt) {
            std::size_t dim = 0;
            for (auto k : kinds) dim += k == BlockKind::Complex ? 4 : 2;
            RealMatrix g0(dim, dim);
            RealMatrix p0(dim, dim);
            std::vector<cplx> lambda_sq;
            std::size_t off = 0;
            for (auto k : kinds) {
                if (k == BlockKind::Complex) {
                    const double a = uniform(0.4, 1.6) * sign();
                    const double b = uniform(0.4, 1.6) * sign();
                    place(g0, off, quadruple_gamma());
                    place(p0, off, quadruple_p(a, b));
                    lambda_sq.push_back(cplx(a, b) * cplx(a, b));
                    lambda_sq.push_back(cplx(a, -b) * cplx(a, -b));
                    off += 4;
                } else {
                    const double s = uniform(0.4, 2.0);
                    place(g0, off, standard_j());
                    if (k == BlockKind::Imaginary) {
                        const double sgn = sign();
                        place(p0, off, RealMatrix{{sgn * s, 0.0}, {0.0, sgn * s}});
                        lambda_sq.push_back(-s * s);
                    } else {
                        place(p0, off, RealMatrix{{0.0, s}, {s, 0.0}});
                        lambda_sq.push_back(s * s);
                    }
                    off += 2;
                }
            }
            if (min_gap(lambda_sq) < 0.15) continue;
            RealMatrix s = RealMatrix::identity(dim);
            for (std::size_t i = 0; i < dim; ++i)
                for (std::size_t j = 0; j < dim; ++j) s(i, j) += 0.35 * gauss();
            if (condition_number(to_complex(s)) > 20.0) continue;
            const RealMatrix gs = s.transpose() * g0 * s;
            const RealMatrix ps = s.transpose() * p0 * s;
            return validate_system(skew_part(gs), sym_part(ps));
        }
        throw Error(ErrorKind::PreconditionViolation, "could not generate a system");
    }

    /// A mix of block kinds totalling half-dimension n.
    ValidatedSystem mixed(std::size_t n) {
        std::vector<BlockKind> kinds;
        std::size_t left = n;
        while (left > 0) {
            const int pick = std::uniform_int_distribution<int>(0, left >= 2 ? 2 : 1)(rng_);
            if (pick == 2) {
                kinds.push_back(BlockKind::Complex);
                left -= 2;
            } else {
                kinds.push_back(pick == 0 ? BlockKind::Imaginary : BlockKind::Real);
                left -= 1;
            }
        }
        return from_blocks(kinds);
    }

    /// Unstructured Gaussian Γ, P, kept only when the spectrum is well separated.
    ValidatedSystem gaussian(std::size_t n) {
        const std::size_t dim = 2 * n;
        for (int attempt = 0; attempt < 500; ++attempt) {
            RealMatrix g(dim, dim);
            RealMatrix p(dim, dim);
            for (std::size_t i = 0; i < dim; ++i)
                for (std::size_t j = 0; j < dim; ++j) {
                    g(i, j) = gauss();
                    p(i, j) = gauss();
                }
            const RealMatrix gs = skew_part(g);
            const RealMatrix ps = sym_part(p);
            if (condition_number(to_complex(gs)) > 50.0 || condition_number(to_complex(ps)) > 50.0) continue;
            auto sys = validate_system(gs, ps);
            const auto ev = eigenvalues(to_complex(sys.p_gamma_inv()));
            std::vector<cplx> sq;
            for (auto l : positive_representatives(ev)) sq.push_back(l * l);
            if (sq.size() != n) continue;
            double radius = 0.0;
            for (auto l : ev) radius = std::max(radius, std::abs(l));
            if (min_gap(sq) < 0.05 * radius * radius) continue;
            bool small = false;
            for (auto l : ev) small = small || std::abs(l) < 0.05 * radius;
            if (small) continue;
            return sys;
        }
        throw Error(ErrorKind::PreconditionViolation, "could not generate a system");
    }

private:
    double sign() { return std::bernoulli_distribution(0.5)(rng_) ? 1.0 : -1.0; }

    static void place(RealMatrix& dst, std::size_t off, const RealMatrix& block) {
        for (std::size_t i = 0; i < block.rows(); ++i)
            for (std::size_t j = 0; j < block.cols(); ++j) dst(off + i, off + j) = block(i, j);
    }

    static double min_gap(const std::vector<cplx>& values) {
        double gap = 1e300;
        for (std::size_t i = 0; i < values.size(); ++i)
            for (std::size_t j = i + 1; j < values.size(); ++j) gap = std::min(gap, std::abs(values[i] - values[j]));
        return gap;
    }

    static RealMatrix sym_part(const RealMatrix& m) {
        RealMatrix r(m.rows(), m.cols());
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = (m(i, j) + m(j, i)) / 2.0;
        return r;
    }

    static RealMatrix skew_part(const RealMatrix& m) {
        RealMatrix r(m.rows(), m.cols());
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j) {
                r(i, j) = (m(i, j) - m(j, i)) / 2.0;
            }
        for (std::size_t i = 0; i < m.rows(); ++i) {
            r(i, i) = 0.0;
            for (std::size_t j = 0; j < i; ++j) r(i, j) = -r(j, i);
        }
        return r;
    }

    std::mt19937_64 rng_;
};

/// Admissible pairs for every ± representative of the spectrum.
inline std::vector<AdmissiblePair> all_pairs(const ValidatedSystem& sys) {
    std::vector<AdmissiblePair> pairs;
    const auto ev = eigenvalues(to_complex(sys.p_gamma_inv()));
    for (auto l : positive_representatives(ev)) pairs.push_back(select_admissible_pair(sys, l));
    return pairs;
}

}  // namespace laxforge::testing
