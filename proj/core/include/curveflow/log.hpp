#pragma once

#include <string>

namespace curveflow {

// CURVEFLOW_LOG: quiet (default) | info | debug, or a numeric level 0/1/2
int log_level();

void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace curveflow
