#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace laxforge {

enum class ErrorKind {
    DimensionMismatch,
    NotSymmetric,
    NotSkewSymmetric,
    Singular,
    PreconditionViolation,
    NoConvergence,
    SymmetryViolation,
    DimensionTooSmall,
    SelectionFailure,
    EigenvectorDegenerate,
    NotAdmissible,
    DegenerateForm,
    SingularRoot,
    DuplicateLambdaSq,
    WrongCount,
    VectorNotInVLambda,
    NotConjugateClosed,
    NotConjugatePair,
    DegenerateK,
    CaseMismatch,
    NotHamiltonian,
    HypothesisViolation,
    RankDeficient,
    RingMismatch,
    ResourceExceeded,
    DenominatorZero,
    ParseError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind so the
/// CLI can map it onto an exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// True for the kinds that signal malformed input data (as opposed to a
/// numerical or verification failure).
bool is_validation_error(ErrorKind kind);

}  // namespace laxforge
