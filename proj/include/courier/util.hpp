#pragma once

#include <cstdio>
#include <functional>
#include <string>
#include <vector>

namespace courier {

// Full-precision, locale-independent double formatting (round-trips exactly).
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string format_money(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string join_csv(const std::vector<std::string>& fields);

// Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware
// concurrency). Each index runs exactly once; the caller is responsible for
// making bodies independent.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace courier
