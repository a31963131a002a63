#include "curveflow/log.hpp"

#include <cstdio>
#include <cstdlib>

namespace curveflow {

int log_level() {
    static const int level = [] {
        const char* env = std::getenv("CURVEFLOW_LOG");
        if (!env) return 0;
        const std::string v(env);
        if (v == "debug" || v == "2") return 2;
        if (v == "info" || v == "1") return 1;
        return 0;
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::fprintf(stderr, "[curveflow] %s\n", msg.c_str());
}

void log_debug(const std::string& msg) {
    if (log_level() >= 2) std::fprintf(stderr, "[curveflow] %s\n", msg.c_str());
}

}  // namespace curveflow
