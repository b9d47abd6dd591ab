#ifndef COOP_ERRORS_HPP
#define COOP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace coop {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define COOP_DEFINE_ERROR(Name)                                \
    class Name : public Error {                                \
    public:                                                    \
        explicit Name(const std::string& what) : Error(what) {} \
    }

COOP_DEFINE_ERROR(TimeOutOfWindow);    // queried time outside the open window (a, b)
COOP_DEFINE_ERROR(TimeOutOfRange);     // dense-output query outside [t0, last time]
COOP_DEFINE_ERROR(DimensionMismatch);
COOP_DEFINE_ERROR(NonFiniteInput);
COOP_DEFINE_ERROR(StepLimitExceeded);
COOP_DEFINE_ERROR(StepUnderflow);      // adaptive step fell below the configured minimum
COOP_DEFINE_ERROR(EmptyTrajectory);
COOP_DEFINE_ERROR(PreconditionViolated);
COOP_DEFINE_ERROR(MixedSystems);       // batch check fed reports from different systems
COOP_DEFINE_ERROR(InvalidConfig);
COOP_DEFINE_ERROR(ParseError);

#undef COOP_DEFINE_ERROR

}  // namespace coop

#endif
