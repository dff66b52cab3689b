#pragma once

#include <stdexcept>
#include <string>

namespace renorm {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  Error(const std::string& kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(kind) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define RENORM_ERROR(Name)                                                   \
  class Name : public Error {                                                \
   public:                                                                   \
    explicit Name(const std::string& what) : Error(#Name, what) {}           \
  };

RENORM_ERROR(InvalidSpec)
RENORM_ERROR(NonConvergence)
RENORM_ERROR(ConeDegeneracy)
RENORM_ERROR(ContinuationFailure)
RENORM_ERROR(StepUnderflow)
RENORM_ERROR(SignError)
RENORM_ERROR(TransversalityFailure)
RENORM_ERROR(RecursionStall)
RENORM_ERROR(ConeExit)
RENORM_ERROR(FiberNonConvergence)
RENORM_ERROR(SizeOverflow)
RENORM_ERROR(MeanNotZero)
RENORM_ERROR(LeafInvalid)
RENORM_ERROR(ConfigInvalid)
RENORM_ERROR(MissingArtifacts)

#undef RENORM_ERROR

}  // namespace renorm
