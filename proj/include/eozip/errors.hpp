#pragma once

#include <stdexcept>
#include <string>

namespace eozip {

// Base class for every error thrown by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define EOZIP_DEFINE_ERROR(Name)                                       \
  struct Name : Error {                                                \
    explicit Name(const std::string& msg) : Error(#Name ": " + msg) {} \
  }

// Exact-arithmetic errors.
EOZIP_DEFINE_ERROR(NotDivisible);
EOZIP_DEFINE_ERROR(PrecisionExhausted);

// Group-layer errors.
EOZIP_DEFINE_ERROR(InvalidWeights);
EOZIP_DEFINE_ERROR(OddSizeGSp);
EOZIP_DEFINE_ERROR(ShapeMismatch);
EOZIP_DEFINE_ERROR(NotMember);
EOZIP_DEFINE_ERROR(SubgroupViolation);

// Module-layer errors.
EOZIP_DEFINE_ERROR(UnsupportedShape);
EOZIP_DEFINE_ERROR(NotADirectSummand);
EOZIP_DEFINE_ERROR(ExactnessFailure);

// Invariant-pipeline errors.
EOZIP_DEFINE_ERROR(NoTrivialization);

// Enumeration errors.
EOZIP_DEFINE_ERROR(CapExceeded);
EOZIP_DEFINE_ERROR(NotInGroup);

// I/O and front-end errors.
EOZIP_DEFINE_ERROR(InvalidInput);
EOZIP_DEFINE_ERROR(InternalError);

#undef EOZIP_DEFINE_ERROR

}  // namespace eozip
