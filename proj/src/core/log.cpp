#include "core/log.hpp"

#include <cstdio>

namespace pressflow {

namespace {

void stderr_handler(const char* line, void*) {
    std::fputs(line, stderr);
    std::fputc('\n', stderr);
}

LogHandler g_handler = &stderr_handler;
void* g_user = nullptr;
bool g_verbose = false;

} // namespace

void set_log_handler(LogHandler handler, void* user) {
    g_handler = handler ? handler : &stderr_handler;
    g_user = handler ? user : nullptr;
}

void set_verbose(bool on) { g_verbose = on; }

bool verbose() { return g_verbose; }

void log_line(const std::string& line) { g_handler(line.c_str(), g_user); }

void log_debug(const std::string& line) {
    if (g_verbose) g_handler(line.c_str(), g_user);
}

} // namespace pressflow
