#include "laxforge/dynamics.hpp"

#include <array>
#include <cmath>

#include "laxforge/linalg.hpp"

namespace laxforge {

namespace {

constexpr std::array<double, 14> kPade13{64764752532480000.0,
                                         32382376266240000.0,
                                         7771770303897600.0,
                                         1187353796428800.0,
                                         129060195264000.0,
                                         10559470521600.0,
                                         670442572800.0,
                                         33522128640.0,
                                         1323241920.0,
                                         40840800.0,
                                         960960.0,
                                         16380.0,
                                         182.0,
                                         1.0};
constexpr double kTheta13 = 5.371920351148152;

double norm_one(const RealMatrix& m) { return norm_inf(m.transpose()); }

}  // namespace

RealMatrix expm(const RealMatrix& a) {
    if (!a.is_square()) throw Error(ErrorKind::DimensionMismatch, "expm needs a square matrix, got " + a.shape());
    const std::size_t n = a.rows();
    const double norm = norm_one(a);
    int s = 0;
    if (norm > kTheta13) s = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
    const RealMatrix x = a * std::ldexp(1.0, -s);
    const RealMatrix id = RealMatrix::identity(n);
    const RealMatrix x2 = x * x;
    const RealMatrix x4 = x2 * x2;
    const RealMatrix x6 = x4 * x2;
    const auto& b = kPade13;
    const RealMatrix u_inner = x6 * b[13] + x4 * b[11] + x2 * b[9];
    const RealMatrix u = x * (x6 * u_inner + x6 * b[7] + x4 * b[5] + x2 * b[3] + id * b[1]);
    const RealMatrix v_inner = x6 * b[12] + x4 * b[10] + x2 * b[8];
    const RealMatrix v = x6 * v_inner + x6 * b[6] + x4 * b[4] + x2 * b[2] + id * b[0];
    const RealMatrix num = v + u;
    const RealMatrix den = v - u;
    RealMatrix r(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const RealVector c = num.col(j);
        r.set_col(j, solve(den, std::span<const double>(c)));
    }
    for (int k = 0; k < s; ++k) r = r * r;
    return r;
}

std::vector<double> time_grid(double t0, double t1, std::size_t count) {
    if (count == 0) throw Error(ErrorKind::PreconditionViolation, "time grid needs at least one point");
    std::vector<double> t(count);
    for (std::size_t k = 0; k < count; ++k)
        t[k] = count == 1 ? t0 : t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(count - 1);
    return t;
}

RealVector Trajectory::velocity(std::size_t k) const { return generator * states.at(k); }

double Trajectory::recheck() const {
    double worst = 0.0;
    if (states.empty()) return worst;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const RealVector fresh = expm(generator * times[k]) * states.front();
        double gap = 0.0;
        for (std::size_t i = 0; i < fresh.size(); ++i) gap = std::max(gap, std::abs(fresh[i] - states[k][i]));
        worst = std::max(worst, gap / std::max(1.0, norm2(states[k])));
    }
    return worst;
}

Trajectory propagate(const ValidatedSystem& sys, std::span<const double> x0, std::span<const double> times) {
    if (x0.size() != sys.dim()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "initial state has length " + std::to_string(x0.size()) + ", expected " + std::to_string(sys.dim()));
    }
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1])) throw Error(ErrorKind::PreconditionViolation, "times must increase strictly");

    Trajectory traj;
    traj.generator = sys.flow_generator();
    traj.times.assign(times.begin(), times.end());
    const RealVector gx0 = traj.generator * x0;
    for (double t : times) {
        const RealMatrix e = expm(traj.generator * t);
        RealVector x = e * x0;
        // ẋ = exp(tG)Gx₀ must agree with Gx(t).
        const RealVector xdot = e * gx0;
        const RealVector gx = traj.generator * x;
        double gap = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) gap = std::max(gap, std::abs(xdot[i] - gx[i]));
        traj.flow_residual = std::max(traj.flow_residual, gap / std::max(norm2(x), 1e-300));
        traj.propagators.push_back(e);
        traj.states.push_back(std::move(x));
    }
    return traj;
}

double symplectic_residual(const ValidatedSystem& sys, double t) {
    const RealMatrix e = expm(sys.flow_generator() * t);
    return norm_max(e.transpose() * sys.gamma() * e - sys.gamma()) / norm_max(sys.gamma());
}

LaxResidual lax_equation_residual(const LaxPairModel& model, const Trajectory& traj, double h) {
    if (model.state_dim() != traj.generator.rows()) {
        throw Error(ErrorKind::DimensionMismatch, "model and trajectory live in different dimensions");
    }
    const RealMatrix forward = expm(traj.generator * h);
    const RealMatrix backward = expm(traj.generator * -h);
    LaxResidual r;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const RealVector& x = traj.states[k];
        const ComplexMatrix l = model.evaluate(x);
        const double scale = std::max(norm_fro(l), 1e-300);
        const ComplexMatrix rhs = commutator(model.b, l);
        const ComplexMatrix exact_dot = model.evaluate(traj.velocity(k));
        const ComplexMatrix fd_dot =
            (model.evaluate(forward * x) - model.evaluate(backward * x)) * cplx(1.0 / (2.0 * h));
        r.exact = std::max(r.exact, norm_fro(exact_dot - rhs) / scale);
        r.finite_difference = std::max(r.finite_difference, norm_fro(fd_dot - rhs) / scale);
        r.fd_gap = std::max(r.fd_gap, norm_fro(fd_dot - exact_dot) / scale);
    }
    return r;
}

double system_equivalence_check(const LaxPairModel& model, const ValidatedSystem& sys, double rel_tol) {
    if (model.kind != LaxKind::BlockDiag) {
        throw Error(ErrorKind::PreconditionViolation, "equivalence check needs a block diagonal model");
    }
    std::vector<ComplexVector> rows;
    for (const auto& pair : model.pairs) {
        if (pair.w.size() != sys.dim()) throw Error(ErrorKind::DimensionMismatch, "pair does not match the system");
        rows.push_back(pair.w);
        rows.push_back(pair.w_hat);
    }
    const std::size_t rank = rows.empty() ? 0 : numerical_rank(stack_rows(rows), rel_tol);
    if (rows.size() != sys.dim() || rank < sys.dim()) {
        throw Error(ErrorKind::RankDeficient, "covectors have rank " + std::to_string(rank) + " of " +
                                                  std::to_string(rows.size()) + ", need " + std::to_string(sys.dim()));
    }
    return condition_number(stack_rows(rows));
}

std::vector<double> conservation_report(std::span<const QuadraticIntegral> integrals, const Trajectory& traj) {
    std::vector<double> drift;
    for (const auto& integral : integrals) {
        double worst = 0.0;
        if (!traj.states.empty()) {
            const cplx i0 = integral.evaluate(traj.states.front());
            const double denom = std::max(std::abs(i0), 1e-30);
            for (const auto& x : traj.states) worst = std::max(worst, std::abs(integral.evaluate(x) - i0) / denom);
        }
        drift.push_back(worst);
    }
    return drift;
}

}  // namespace laxforge
