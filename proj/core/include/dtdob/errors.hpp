#pragma once

#include <stdexcept>
#include <string>

namespace dtdob {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
   public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual const char* kind() const noexcept { return "Error"; }
};

#define DTDOB_DEFINE_ERROR(Name)                                            \
    class Name : public Error {                                             \
       public:                                                              \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
        const char* kind() const noexcept override { return #Name; }        \
    };

DTDOB_DEFINE_ERROR(ZeroPolynomial)
DTDOB_DEFINE_ERROR(ConvergenceFailure)
DTDOB_DEFINE_ERROR(DegenerateLeadingCoefficient)
DTDOB_DEFINE_ERROR(ImproperTransfer)
DTDOB_DEFINE_ERROR(OutOfBounds)
DTDOB_DEFINE_ERROR(DegenerateSamplingPeriod)
DTDOB_DEFINE_ERROR(SingularSubstitution)
DTDOB_DEFINE_ERROR(AmbiguousPairing)
DTDOB_DEFINE_ERROR(DegreeMismatch)
DTDOB_DEFINE_ERROR(PreconditionViolation)
DTDOB_DEFINE_ERROR(MethodNotSchur)
DTDOB_DEFINE_ERROR(SearchFailure)
DTDOB_DEFINE_ERROR(CtDesignInvalid)
DTDOB_DEFINE_ERROR(AlgebraicLoop)

#undef DTDOB_DEFINE_ERROR

}  // namespace dtdob
