#pragma once

// Error taxonomy. Domain operations throw SimError subtypes carrying a stable
// machine-readable code; the CLI maps the code to its single-line error
// output and exit status. Model validation is the one place errors are
// collected instead of thrown (the caller wants the exhaustive list).

#include <stdexcept>
#include <string>
#include <utility>

namespace echosim {

class SimError : public std::runtime_error {
 public:
  SimError(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

#define ECHOSIM_DEFINE_ERROR(Name)                                    \
  class Name : public SimError {                                      \
   public:                                                            \
    explicit Name(const std::string& message) : SimError(#Name, message) {} \
  }

ECHOSIM_DEFINE_ERROR(UnnormalizedProfile);
ECHOSIM_DEFINE_ERROR(UnknownTransition);
ECHOSIM_DEFINE_ERROR(IntegrationFailure);
ECHOSIM_DEFINE_ERROR(EmptyWindow);
ECHOSIM_DEFINE_ERROR(OverlappingPulses);
ECHOSIM_DEFINE_ERROR(EchoOverlapsPulse);
ECHOSIM_DEFINE_ERROR(NonMonotoneTimings);
ECHOSIM_DEFINE_ERROR(InfeasibleConstraints);
ECHOSIM_DEFINE_ERROR(WindowOutsideGrid);
ECHOSIM_DEFINE_ERROR(MissingPopulationTrace);
ECHOSIM_DEFINE_ERROR(NoCounts);
ECHOSIM_DEFINE_ERROR(MissingBasis);
ECHOSIM_DEFINE_ERROR(InvalidBudget);
ECHOSIM_DEFINE_ERROR(ConfigInvalid);
ECHOSIM_DEFINE_ERROR(IoFailure);
ECHOSIM_DEFINE_ERROR(UnknownVariable);
ECHOSIM_DEFINE_ERROR(ParseError);

#undef ECHOSIM_DEFINE_ERROR

}  // namespace echosim
