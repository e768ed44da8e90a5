#include "sgkdv/error.hpp"

namespace sgkdv {

InstabilityError::InstabilityError(const std::string& what, double time)
    : Error(what), time_(time) {}

QuadratureFailure::QuadratureFailure(const std::string& what, double achieved_error)
    : Error(what), achieved_(achieved_error) {}

void require(bool condition, const std::string& message) {
    if (!condition) throw InvalidArgument(message);
}

}  // namespace sgkdv
