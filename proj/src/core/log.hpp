#pragma once

#include <string>

namespace pressflow {

// Diagnostic sink shared by every stage. Default writes to stderr; embedders
// (and the C API) may install their own handler.
using LogHandler = void (*)(const char* line, void* user);

void set_log_handler(LogHandler handler, void* user);
void set_verbose(bool on);
bool verbose();

// One line, no trailing newline required.
void log_line(const std::string& line);
// Emitted only when verbose is on.
void log_debug(const std::string& line);

} // namespace pressflow
