#pragma once

#include <stdexcept>
#include <string>

namespace pinch {

// Base of all library errors. module() names the component that raised it.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(std::move(module)) {}
  const std::string& module() const { return module_; }

 private:
  std::string module_;
};

#define PINCH_ERROR_KIND(Name)                                              \
  class Name : public Error {                                               \
   public:                                                                  \
    using Error::Error;                                                     \
  };

PINCH_ERROR_KIND(ParameterError)
PINCH_ERROR_KIND(ResolutionError)
PINCH_ERROR_KIND(EmptyLobeError)
PINCH_ERROR_KIND(StabilityError)
PINCH_ERROR_KIND(DomainError)
PINCH_ERROR_KIND(TopologyError)
PINCH_ERROR_KIND(HorizonError)
PINCH_ERROR_KIND(ConsistencyError)
PINCH_ERROR_KIND(PreconditionError)
PINCH_ERROR_KIND(InputError)
PINCH_ERROR_KIND(ConfigError)

#undef PINCH_ERROR_KIND

}  // namespace pinch
