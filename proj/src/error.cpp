#include "mind/error.hpp"

namespace mind {

void throw_parameter(const std::string& what) { throw ParameterError(what); }

} // namespace mind
