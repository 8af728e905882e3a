#include "laxforge/matrix.hpp"

namespace laxforge {

ComplexMatrix to_complex(const RealMatrix& m) {
    ComplexMatrix c(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) c(i, j) = m(i, j);
    return c;
}

ComplexVector to_complex(std::span<const double> v) { return {v.begin(), v.end()}; }

RealMatrix real_part(const ComplexMatrix& m) {
    RealMatrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = m(i, j).real();
    return r;
}

RealMatrix imag_part(const ComplexMatrix& m) {
    RealMatrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = m(i, j).imag();
    return r;
}

RealVector real_part(std::span<const cplx> v) {
    RealVector r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i].real();
    return r;
}

RealVector imag_part(std::span<const cplx> v) {
    RealVector r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i].imag();
    return r;
}

ComplexMatrix block_diag(std::span<const ComplexMatrix> blocks) {
    std::size_t n = 0;
    for (const auto& b : blocks) {
        if (!b.is_square()) throw Error(ErrorKind::DimensionMismatch, "block_diag needs square blocks");
        n += b.rows();
    }
    ComplexMatrix out(n, n);
    std::size_t off = 0;
    for (const auto& b : blocks) {
        for (std::size_t i = 0; i < b.rows(); ++i)
            for (std::size_t j = 0; j < b.cols(); ++j) out(off + i, off + j) = b(i, j);
        off += b.rows();
    }
    return out;
}

cplx inner(std::span<const cplx> u, std::span<const cplx> v) {
    if (u.size() != v.size()) throw Error(ErrorKind::DimensionMismatch, "inner");
    cplx acc{};
    for (std::size_t i = 0; i < u.size(); ++i) acc += std::conj(u[i]) * v[i];
    return acc;
}

cplx bilinear(std::span<const cplx> u, const ComplexMatrix& m, std::span<const cplx> v) {
    const auto mv = m * v;
    return dot(u, std::span<const cplx>(mv));
}

ComplexVector add(std::span<const cplx> u, std::span<const cplx> v) {
    if (u.size() != v.size()) throw Error(ErrorKind::DimensionMismatch, "add");
    ComplexVector r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = u[i] + v[i];
    return r;
}

ComplexVector sub(std::span<const cplx> u, std::span<const cplx> v) {
    if (u.size() != v.size()) throw Error(ErrorKind::DimensionMismatch, "sub");
    ComplexVector r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = u[i] - v[i];
    return r;
}

ComplexVector scale(std::span<const cplx> u, cplx s) {
    ComplexVector r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = u[i] * s;
    return r;
}

ComplexVector conj(std::span<const cplx> u) {
    ComplexVector r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = std::conj(u[i]);
    return r;
}

ComplexMatrix outer(std::span<const cplx> u, std::span<const cplx> v) {
    ComplexMatrix m(u.size(), v.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * v[j];
    return m;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b - b * a; }

}  // namespace laxforge
