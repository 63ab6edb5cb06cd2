#pragma once

#include <stdexcept>
#include <string>

namespace phi3lab {

// Base class for every failure the laboratory can diagnose.  Call sites
// catch by concrete type when they can recover (e.g. retry with a finer
// grid) and by Error at module boundaries.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define PHI3LAB_DEFINE_ERROR(Name)                                \
  class Name : public Error {                                     \
   public:                                                        \
    explicit Name(const std::string& what)                        \
        : Error(std::string(#Name) + ": " + what) {}              \
  }

PHI3LAB_DEFINE_ERROR(NoBracket);
PHI3LAB_DEFINE_ERROR(NonConvergence);
PHI3LAB_DEFINE_ERROR(QuadratureUnstable);
PHI3LAB_DEFINE_ERROR(ZeroCoupling);
PHI3LAB_DEFINE_ERROR(OscillationUnderresolved);
PHI3LAB_DEFINE_ERROR(WrongTime);
PHI3LAB_DEFINE_ERROR(AliasRisk);
PHI3LAB_DEFINE_ERROR(UnderResolved);
PHI3LAB_DEFINE_ERROR(HankelUnderflow);
PHI3LAB_DEFINE_ERROR(FactorizationFailure);
PHI3LAB_DEFINE_ERROR(DegenerateGrid);
PHI3LAB_DEFINE_ERROR(NotCoercive);
PHI3LAB_DEFINE_ERROR(Overflow);
PHI3LAB_DEFINE_ERROR(ConfigInvalid);
PHI3LAB_DEFINE_ERROR(IoFailure);

#undef PHI3LAB_DEFINE_ERROR

}  // namespace phi3lab
