#include "revival/errors.hpp"

namespace revival {

IntegrationAccuracyError::IntegrationAccuracyError(const std::string& what,
                                                   double suggested_dt)
    : Error(what), suggested_dt_(suggested_dt) {}

}  // namespace revival
