#include "laxforge/error.hpp"

namespace laxforge {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::NotSymmetric: return "NotSymmetric";
        case ErrorKind::NotSkewSymmetric: return "NotSkewSymmetric";
        case ErrorKind::Singular: return "Singular";
        case ErrorKind::PreconditionViolation: return "PreconditionViolation";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::SymmetryViolation: return "SymmetryViolation";
        case ErrorKind::DimensionTooSmall: return "DimensionTooSmall";
        case ErrorKind::SelectionFailure: return "SelectionFailure";
        case ErrorKind::EigenvectorDegenerate: return "EigenvectorDegenerate";
        case ErrorKind::NotAdmissible: return "NotAdmissible";
        case ErrorKind::DegenerateForm: return "DegenerateForm";
        case ErrorKind::SingularRoot: return "SingularRoot";
        case ErrorKind::DuplicateLambdaSq: return "DuplicateLambdaSq";
        case ErrorKind::WrongCount: return "WrongCount";
        case ErrorKind::VectorNotInVLambda: return "VectorNotInVLambda";
        case ErrorKind::NotConjugateClosed: return "NotConjugateClosed";
        case ErrorKind::NotConjugatePair: return "NotConjugatePair";
        case ErrorKind::DegenerateK: return "DegenerateK";
        case ErrorKind::CaseMismatch: return "CaseMismatch";
        case ErrorKind::NotHamiltonian: return "NotHamiltonian";
        case ErrorKind::HypothesisViolation: return "HypothesisViolation";
        case ErrorKind::RankDeficient: return "RankDeficient";
        case ErrorKind::RingMismatch: return "RingMismatch";
        case ErrorKind::ResourceExceeded: return "ResourceExceeded";
        case ErrorKind::DenominatorZero: return "DenominatorZero";
        case ErrorKind::ParseError: return "ParseError";
    }
    return "Unknown";
}

bool is_validation_error(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::DimensionMismatch:
        case ErrorKind::NotSymmetric:
        case ErrorKind::NotSkewSymmetric:
        case ErrorKind::Singular:
            return true;
        default:
            return false;
    }
}

}  // namespace laxforge
