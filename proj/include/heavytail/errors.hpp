#pragma once
// Error taxonomy. Every failure the library can raise derives from
// heavytail::Error so callers can catch one base type; the concrete class
// names the contract that was violated.

#include <stdexcept>
#include <string>

namespace heavytail {

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define HEAVYTAIL_DEFINE_ERROR(Name)                                        \
  class Name : public Error {                                               \
  public:                                                                   \
    explicit Name(const std::string& msg) : Error(#Name ": " + msg) {}      \
  }

// Input / argument violations.
HEAVYTAIL_DEFINE_ERROR(DomainError);          // argument outside the documented domain
HEAVYTAIL_DEFINE_ERROR(PoleArgument);         // evaluation exactly at a pole
HEAVYTAIL_DEFINE_ERROR(ParameterPole);        // a *parameter* sits on a pole
HEAVYTAIL_DEFINE_ERROR(OverflowGuard);        // result would exceed double range
HEAVYTAIL_DEFINE_ERROR(InvalidSeverity);      // inconsistent severity description
HEAVYTAIL_DEFINE_ERROR(InsufficientTailData); // fewer than two exceedances
HEAVYTAIL_DEFINE_ERROR(DegenerateData);       // all exceedances equal the threshold
HEAVYTAIL_DEFINE_ERROR(EmptyData);            // no observations at all
HEAVYTAIL_DEFINE_ERROR(DensityUnavailable);   // body variant has no density
HEAVYTAIL_DEFINE_ERROR(EmptyPortfolio);       // portfolio with zero units

// Representation / regime violations.
HEAVYTAIL_DEFINE_ERROR(KappaOutOfRange);      // x beyond the branch-point bound
HEAVYTAIL_DEFINE_ERROR(SaddleTooClose);       // saddle within 1e-3 of the branch point
HEAVYTAIL_DEFINE_ERROR(SeparationViolated);   // truncation point too close to saddle
HEAVYTAIL_DEFINE_ERROR(IntegerAlphaUnsupported); // exact integer tail index
HEAVYTAIL_DEFINE_ERROR(AlphaNearSingular);    // expansion coefficient at a pole
HEAVYTAIL_DEFINE_ERROR(BodyNotSamplable);     // moment-only body cannot be sampled

// Numerical failures.
HEAVYTAIL_DEFINE_ERROR(NonConvergence);       // refinement budget exhausted
HEAVYTAIL_DEFINE_ERROR(GrowthDetected);       // integrand grows toward the cutoff
HEAVYTAIL_DEFINE_ERROR(BracketFailure);       // root bracket could not be established
HEAVYTAIL_DEFINE_ERROR(NonMonotoneTail);      // tail not decreasing across bracket

// Front-end failures.
HEAVYTAIL_DEFINE_ERROR(ConfigError);          // malformed run configuration
HEAVYTAIL_DEFINE_ERROR(IoError);              // file could not be read/written

#undef HEAVYTAIL_DEFINE_ERROR

}  // namespace heavytail
