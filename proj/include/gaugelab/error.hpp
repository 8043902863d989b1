#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gaugelab {

enum class ErrorKind {
    NonUniqueGeodesic,
    UnsupportedGeometry,
    OutsideLogDomain,
    PreconditionViolated,
    DriftTooLarge,
    ChartDomainError,
    StepTooCoarse,
    RankNotOne,
    FluxTooLarge,
    UnsupportedCover,
    BaseMismatch,
    UnsupportedMap,
    NonClosedSurface,
    RadiusTooLarge,
    CurvatureTooLarge,
    LogDomainError,
    PlanProfileInvalid,
    GaugeNotCertified,
    CoverageMismatch,
    InvalidComplex,
    NonzeroFirstCohomology,
    SolverFailure,
    NewtonDiverged,
    HypothesisNotMet,
    UnknownScenario,
    OptimizerStalled,
    SchemaError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace gaugelab
