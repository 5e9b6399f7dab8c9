#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace fedtrident {

// Verbosity from FEDTRIDENT_LOG: 0/quiet (default), 1/info, 2/debug.
inline int log_level() {
  static const int level = [] {
    const char* env = std::getenv("FEDTRIDENT_LOG");
    if (env == nullptr || *env == '\0') return 0;
    if (std::strcmp(env, "info") == 0) return 1;
    if (std::strcmp(env, "debug") == 0) return 2;
    return std::atoi(env);
  }();
  return level;
}

inline void log_info(const std::string& msg) {
  if (log_level() >= 1) std::fprintf(stderr, "[fedtrident] %s\n", msg.c_str());
}

inline void log_debug(const std::string& msg) {
  if (log_level() >= 2) std::fprintf(stderr, "[fedtrident] %s\n", msg.c_str());
}

inline void log_warn(const std::string& msg) {
  std::fprintf(stderr, "[fedtrident] warning: %s\n", msg.c_str());
}

}  // namespace fedtrident
