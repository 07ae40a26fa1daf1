#pragma once

#include <stdexcept>
#include <string>

namespace kslab {

// Exit-code taxonomy used by the CLI: 0 pass, 1 probe failure, 2 config error,
// 3 runtime error.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct RuntimeError : std::runtime_error {
    explicit RuntimeError(const std::string& what) : std::runtime_error(what) {}
};

struct TailDivergence : RuntimeError {
    explicit TailDivergence(const std::string& what) : RuntimeError(what) {}
};

struct ModeDivergence : RuntimeError {
    explicit ModeDivergence(const std::string& what) : RuntimeError(what) {}
};

struct PoissonUndefined : RuntimeError {
    explicit PoissonUndefined(const std::string& what) : RuntimeError(what) {}
};

struct SingularEvaluation : RuntimeError {
    explicit SingularEvaluation(const std::string& what) : RuntimeError(what) {}
};

struct DecayHypothesisViolated : RuntimeError {
    explicit DecayHypothesisViolated(const std::string& what) : RuntimeError(what) {}
};

struct AsymptoticMismatch : RuntimeError {
    explicit AsymptoticMismatch(const std::string& what) : RuntimeError(what) {}
};

struct CutoffOverlap : RuntimeError {
    explicit CutoffOverlap(const std::string& what) : RuntimeError(what) {}
};

struct NoSignChange : RuntimeError {
    explicit NoSignChange(const std::string& what) : RuntimeError(what) {}
};

struct LinearSolveFailure : RuntimeError {
    explicit LinearSolveFailure(const std::string& what) : RuntimeError(what) {}
};

struct TimestepUnderflow : RuntimeError {
    explicit TimestepUnderflow(const std::string& what) : RuntimeError(what) {}
};

struct InterpolationOutOfDomain : RuntimeError {
    explicit InterpolationOutOfDomain(const std::string& what) : RuntimeError(what) {}
};

struct ConfigInvalid : ConfigError {
    explicit ConfigInvalid(const std::string& what) : ConfigError(what) {}
};

struct OutputUnwritable : RuntimeError {
    explicit OutputUnwritable(const std::string& what) : RuntimeError(what) {}
};

struct SeriesMissing : RuntimeError {
    explicit SeriesMissing(const std::string& what) : RuntimeError(what) {}
};

} // namespace kslab
