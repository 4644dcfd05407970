#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "cryodaq/acquire.hpp"

namespace cryodaq::bench {

/// Synthetic fast-path session: N voltage taps with small noise and no
/// quench, archived under `archive_root`.
struct BenchOptions {
    int channels = 64;
    double rate_hz = 100000.0;
    double duration_s = 1.0;
    std::filesystem::path archive_root;
    std::uint64_t seed = 1;
    bool parallel = true;
    std::optional<acquire::OverflowPolicy> overflow;
    std::size_t queue_capacity = 256;
    std::size_t block_samples = 1000;
    std::string session_start_utc = "2000-01-01T00:00:00Z";
};

struct BenchResult {
    acquire::SessionHandle session;
    double gen_samples_per_s = 0.0;
    double det_samples_per_s = 0.0;
    double archive_mb_per_s = 0.0;
    std::int64_t gaps = 0;

    /// "bench: gen=<f> det=<f> arch=<f> gaps=<n>"
    std::string summary_line() const;
};

BenchResult run_bench(const BenchOptions& options);

}  // namespace cryodaq::bench
