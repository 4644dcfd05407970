#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cryodaq/condition.hpp"
#include "cryodaq/quench.hpp"
#include "cryodaq/registry.hpp"
#include "cryodaq/simsrc.hpp"

namespace cryodaq::acquire {

/// Time index of fast-path sample k: k / rate as one IEEE division. Nothing
/// else on the fast path produces time indices.
inline double session_clock(std::int64_t k, double rate_hz) noexcept {
    return static_cast<double>(k) / rate_hz;
}

struct FastChannelSpec {
    ChannelId id = 0;
    simsrc::QuenchScenario scenario;
    condition::AmplifierConfig amplifier;
    CalibrationTable calibration;
};

struct FastChannelState {
    double filter = 0.0;
    quench::DetectorState detector;
    bool faulted = false;
    std::int64_t breaches = 0;
};

struct FastKernelParams {
    double rate_hz = 100000.0;
    simsrc::CurrentRamp current;
    quench::DetectorConfig detector;
};

/// Generate -> condition -> calibrate -> detect for a block of sample indices
/// on every fast channel.
///
/// `run_parallel` splits channels across OpenMP threads and walks each
/// channel's block in order. `run_serial` is the reference: sample-major,
/// built only from the public per-sample operations. Both produce identical
/// samples, states and triggers, which the tests check bit for bit.
class FastKernel {
public:
    FastKernel(FastKernelParams params, std::vector<FastChannelSpec> channels);

    std::size_t channel_count() const noexcept { return channels_.size(); }
    const FastChannelSpec& channel(std::size_t i) const { return channels_[i]; }
    std::int64_t hold_samples() const noexcept { return hold_; }
    const FastKernelParams& params() const noexcept { return params_; }

    /// Fills out[c] with samples k_begin..k_end-1 of channel c and returns
    /// the triggers fired in the block ordered by (time, channel).
    std::vector<quench::QuenchTrigger> run_parallel(std::int64_t k_begin, std::int64_t k_end,
                                                    std::span<FastChannelState> states,
                                                    std::span<std::vector<Sample>> out) const;

    std::vector<quench::QuenchTrigger> run_serial(std::int64_t k_begin, std::int64_t k_end,
                                                  std::span<FastChannelState> states,
                                                  std::span<std::vector<Sample>> out) const;

private:
    FastKernelParams params_;
    std::vector<FastChannelSpec> channels_;
    std::int64_t hold_;
};

}  // namespace cryodaq::acquire
