#pragma once

#include <stdexcept>
#include <string>

namespace bitekit {

// Every failure the toolkit can report, one code per contract violation.
// The CLI maps these to machine-readable error JSON and exit codes.
enum class ErrorCode {
    // ingest
    MissingColumn,
    NonMonotoneBrackets,
    NegativeCount,
    InvalidRow,
    UnmappedCode,
    UnknownYear,
    UnbalancedPanel,
    // dist
    EmptyDistribution,
    ZeroWageMass,
    NonpositiveMeanWage,
    // tilt
    InfeasibleTarget,
    NonConvergence,
    IndexMismatch,
    // bite
    NoYoungEmployment,
    ZeroWageBill,
    NoEmployment,
    MissingPrePeriod,
    InsufficientUnits,
    // fe
    RankDeficient,
    ExposureMissing,
    SingleCluster,
    SingularSubmatrix,
    // honest
    MissingTarget,
    NoPrePeriods,
    // synth / cli
    InvalidSpec,
    InvalidConfig,
    MissingFit,
    MissingArtifacts,
    IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }
    const char* code_name() const { return error_code_name(code_); }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace bitekit
