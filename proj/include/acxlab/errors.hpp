#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace acxlab {

enum class ErrorKind {
    EmptyGrid,
    CoefficientDomainMismatch,
    NonInvertibleOnDomain,
    CannotReachTolerance,
    NonPolynomialCoefficient,
    StructureInvalidAtPoint,
    SolverDiverged,
    PreconditionSmallness,
    JetTooShort,
    BudgetExhausted,
    NotPseudoconvexWitness,
    SearchExhausted,
    ConstructionFailed,
    InfeasibleQuery,
    NotHolomorphicWitness,
    TypeExceedsCap,
    BoundaryProjectionFailed,
    SchemaError,
    TaskError,
};

inline std::string_view error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::EmptyGrid: return "EmptyGrid";
        case ErrorKind::CoefficientDomainMismatch: return "CoefficientDomainMismatch";
        case ErrorKind::NonInvertibleOnDomain: return "NonInvertibleOnDomain";
        case ErrorKind::CannotReachTolerance: return "CannotReachTolerance";
        case ErrorKind::NonPolynomialCoefficient: return "NonPolynomialCoefficient";
        case ErrorKind::StructureInvalidAtPoint: return "StructureInvalidAtPoint";
        case ErrorKind::SolverDiverged: return "SolverDiverged";
        case ErrorKind::PreconditionSmallness: return "PreconditionSmallness";
        case ErrorKind::JetTooShort: return "JetTooShort";
        case ErrorKind::BudgetExhausted: return "BudgetExhausted";
        case ErrorKind::NotPseudoconvexWitness: return "NotPseudoconvexWitness";
        case ErrorKind::SearchExhausted: return "SearchExhausted";
        case ErrorKind::ConstructionFailed: return "ConstructionFailed";
        case ErrorKind::InfeasibleQuery: return "InfeasibleQuery";
        case ErrorKind::NotHolomorphicWitness: return "NotHolomorphicWitness";
        case ErrorKind::TypeExceedsCap: return "TypeExceedsCap";
        case ErrorKind::BoundaryProjectionFailed: return "BoundaryProjectionFailed";
        case ErrorKind::SchemaError: return "SchemaError";
        case ErrorKind::TaskError: return "TaskError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace acxlab
