#pragma once

#include <stdexcept>
#include <string>

namespace codedmr {

// Base class for every error raised by the library. The CLI maps
// InvalidConfig-like failures to exit code 2 and everything else to 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define CODEDMR_DEFINE_ERROR(Name)          \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  }

CODEDMR_DEFINE_ERROR(DivisionByZero);
CODEDMR_DEFINE_ERROR(ShapeError);
CODEDMR_DEFINE_ERROR(DegenerateNodes);
CODEDMR_DEFINE_ERROR(InsufficientIVs);
CODEDMR_DEFINE_ERROR(InfeasibleBatching);
CODEDMR_DEFINE_ERROR(InfeasibleShuffle);
CODEDMR_DEFINE_ERROR(InfeasibleConfig);
CODEDMR_DEFINE_ERROR(ResourceLimit);
CODEDMR_DEFINE_ERROR(ScheduleError);
CODEDMR_DEFINE_ERROR(InvalidConfig);

#undef CODEDMR_DEFINE_ERROR

}  // namespace codedmr
