#pragma once

#include <stdexcept>
#include <string>

namespace modlab {

// Base class for every domain error raised by the library. The CLI maps any
// Error to exit code 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define MODLAB_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

MODLAB_DEFINE_ERROR(PreconditionError);
MODLAB_DEFINE_ERROR(AngularTie);
MODLAB_DEFINE_ERROR(InvalidPath);
MODLAB_DEFINE_ERROR(Disconnected);
MODLAB_DEFINE_ERROR(SolverFailure);
MODLAB_DEFINE_ERROR(TooManyPaths);
MODLAB_DEFINE_ERROR(CycleDetected);
MODLAB_DEFINE_ERROR(TopologyError);
MODLAB_DEFINE_ERROR(ParseError);
MODLAB_DEFINE_ERROR(NonDelaunay);
MODLAB_DEFINE_ERROR(DegenerateQuad);
MODLAB_DEFINE_ERROR(GeometryMismatch);
MODLAB_DEFINE_ERROR(NoReference);

#undef MODLAB_DEFINE_ERROR

}  // namespace modlab
