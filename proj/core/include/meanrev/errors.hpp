#pragma once

#include <stdexcept>
#include <string>

namespace meanrev {

// Base type for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define MEANREV_ERROR_TYPE(Name) \
  class Name : public Error {    \
   public:                       \
    using Error::Error;          \
  }

MEANREV_ERROR_TYPE(IoError);             // file cannot be opened or written
MEANREV_ERROR_TYPE(MalformedRow);        // bad cell count, unparseable number or date
MEANREV_ERROR_TYPE(MissingValue);        // blank or non-finite cell
MEANREV_ERROR_TYPE(NonMonotonicDates);   // timestamps not strictly increasing
MEANREV_ERROR_TYPE(InvalidPanel);        // panel-level invariant broken
MEANREV_ERROR_TYPE(DegenerateSplit);     // train or test segment below minimum length
MEANREV_ERROR_TYPE(UnstableTransition);  // VAR(1) transition with spectral radius >= 1
MEANREV_ERROR_TYPE(LagTooLarge);         // autocovariance lag outside [0, T-2]
MEANREV_ERROR_TYPE(SingularCovariance);  // lag-0 covariance not positive definite
MEANREV_ERROR_TYPE(ZeroVector);          // weight vector with zero norm
MEANREV_ERROR_TYPE(EigenFailure);        // eigensolver did not converge
MEANREV_ERROR_TYPE(Infeasible);          // variance floor above the achievable maximum
MEANREV_ERROR_TYPE(ConstantSeries);      // series with zero variance
MEANREV_ERROR_TYPE(NonMeanReverting);    // lag-1 autocorrelation outside (0, 1)
MEANREV_ERROR_TYPE(DimensionMismatch);   // incompatible matrix or vector shapes
MEANREV_ERROR_TYPE(ConfigError);         // unusable run configuration

#undef MEANREV_ERROR_TYPE

}  // namespace meanrev
