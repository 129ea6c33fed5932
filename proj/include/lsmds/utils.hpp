#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace lsmds {

/// Wall-clock stopwatch used by solvers and the bench harness.
class Stopwatch {
public:
    Stopwatch() : start_(clock::now()) {}
    void reset() { start_ = clock::now(); }
    double seconds() const {
        return std::chrono::duration<double>(clock::now() - start_).count();
    }

private:
    using clock = std::chrono::steady_clock;
    clock::time_point start_;
};

/// Runs fn(i) for i in [0, n). Splits the range over `threads` workers when
/// threads > 1; the writes of distinct iterations must not alias.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int threads = 0);

/// Process-wide default worker count (CLI --threads). 0 = hardware concurrency.
void set_default_thread_count(int threads);
int default_thread_count();

/// FNV-1a over a byte range, used to key the eigenbasis cache.
std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// Writes `content` to `path` atomically: stage to a temp file in the same
/// directory, then rename. No partial artifact remains on failure.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Formats a double with enough digits to round-trip (max_digits10).
std::string format_double(double v);

} // namespace lsmds
