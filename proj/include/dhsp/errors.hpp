#pragma once

#include <stdexcept>
#include <string>

namespace dhsp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DHSP_DEFINE_ERROR(Name)                 \
  class Name : public Error {                   \
   public:                                      \
    explicit Name(const std::string& what)      \
        : Error(std::string(#Name ": ") + what) {} \
  };

DHSP_DEFINE_ERROR(WidthTooLarge)
DHSP_DEFINE_ERROR(InfeasibleWidth)
DHSP_DEFINE_ERROR(ArityMismatch)
DHSP_DEFINE_ERROR(SupportTooLarge)
DHSP_DEFINE_ERROR(DegenerateWeights)
DHSP_DEFINE_ERROR(DependentRows)
DHSP_DEFINE_ERROR(TooLarge)
DHSP_DEFINE_ERROR(NonRealPhase)
DHSP_DEFINE_ERROR(InvalidArgument)
// Raised in audit mode when classical code reads the hidden slope.
DHSP_DEFINE_ERROR(InformationLeak)
// A brute-force cross-check disagreed with the production path.
DHSP_DEFINE_ERROR(CrossCheckFailure)

#undef DHSP_DEFINE_ERROR

}  // namespace dhsp
