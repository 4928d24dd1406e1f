#pragma once

#include <stdexcept>
#include <string>

namespace qcalc {

// Every failure surfaced by the toolkit derives from Error and carries a
// stable machine-readable code (used by the CLI for exit codes and the
// structured error object).
class Error : public std::runtime_error {
  public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

  private:
    std::string code_;
};

#define QCALC_DEFINE_ERROR(Name, code_literal)                      \
    class Name : public Error {                                     \
      public:                                                       \
        explicit Name(const std::string& message)                   \
            : Error(code_literal, message) {}                       \
    }

QCALC_DEFINE_ERROR(InvalidParameter, "InvalidParameter");
QCALC_DEFINE_ERROR(PoleError, "PoleError");
QCALC_DEFINE_ERROR(ZeroArgument, "ZeroArgument");
QCALC_DEFINE_ERROR(InsufficientSupport, "InsufficientSupport");
QCALC_DEFINE_ERROR(DivergentTail, "DivergentTail");
QCALC_DEFINE_ERROR(DivergentMoment, "DivergentMoment");
QCALC_DEFINE_ERROR(PrecisionInsufficient, "PrecisionInsufficient");
QCALC_DEFINE_ERROR(NegativeValue, "NegativeValue");
QCALC_DEFINE_ERROR(NotNormalized, "NotNormalized");
QCALC_DEFINE_ERROR(ZeroDensityValue, "ZeroDensityValue");
QCALC_DEFINE_ERROR(UnboundedPerturbation, "UnboundedPerturbation");
QCALC_DEFINE_ERROR(DegeneratePerturbation, "DegeneratePerturbation");
QCALC_DEFINE_ERROR(EpsilonOutOfRange, "EpsilonOutOfRange");
QCALC_DEFINE_ERROR(OrderMismatch, "OrderMismatch");
QCALC_DEFINE_ERROR(ParseError, "ParseError");

#undef QCALC_DEFINE_ERROR

}  // namespace qcalc
