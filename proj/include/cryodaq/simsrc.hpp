#pragma once

#include <cstdint>
#include <limits>
#include <vector>

// Deterministic stand-ins for the facility hardware. Every source is a pure
// function of its parameters, a seed and the time index, so replaying a
// session reproduces every sample bit for bit.

namespace cryodaq::simsrc {

struct FieldRampProfile {
    enum class Mode { SlowRamp, FastRamp, Custom };

    Mode mode = Mode::SlowRamp;
    double rate_T_per_s = 3.0;
    double duration_s = 5.0;

    static constexpr FieldRampProfile slow_ramp() { return {Mode::SlowRamp, 3.0, 5.0}; }
    static constexpr FieldRampProfile fast_ramp() { return {Mode::FastRamp, 20.0, 0.05}; }
    static FieldRampProfile custom(double rate_T_per_s, double duration_s);
};

/// B(t) = rate * min(t, duration).
double field_at(const FieldRampProfile& profile, double t);

struct CooldownProfile {
    double t_start_K = 300.0;
    double t_base_K = 80.0;
    double tau_s = 3600.0;
};

void validate(const CooldownProfile& profile);

/// T(t) = base + (start - base) * exp(-t / tau).
double cooldown_at(const CooldownProfile& profile, double t);

/// One voltage tap's scenario. `onset_time_s` is +inf for a tap that never
/// quenches.
struct QuenchScenario {
    double onset_time_s = std::numeric_limits<double>::infinity();
    double resistive_slope_V_per_s = 100.0;
    double mutual_inductance_H = 0.0;
    double current_amps = 50000.0;
    double noise_amp_V = 0.0;
    std::uint64_t seed = 0;
};

void validate(const QuenchScenario& sc);

/// V(t) = M * dI/dt + noise(t; seed) + max(0, slope * (t - onset)).
double voltage_tap_at(const QuenchScenario& sc, double dI_dt, double t);

/// Transport current: linear ramp up to the scenario current, then flat top.
struct CurrentRamp {
    double rate_A_per_s = 1000.0;
    double max_amps = 50000.0;
};

double current_at(const CurrentRamp& ramp, double t);
double current_slope_at(const CurrentRamp& ramp, double t);

/// Slow helium-loop channels: value = baseline + amplitude * sin(2*pi*t/period + phase).
struct SlowChannelParams {
    double baseline = 0.0;
    double amplitude = 0.0;
    double period_s = 600.0;
    double phase_rad = 0.0;
};

enum class SlowKind { Pressure, FlowRate };

double slow_channel_at(SlowKind kind, const SlowChannelParams& params, double t);

/// Signal-analyzer stand-in: a first-order low-pass transfer function sampled
/// on `bins` frequencies spaced `bin_hz` apart, starting at `bin_hz`.
struct SpectrumParams {
    int bins = 16;
    double bin_hz = 10.0;
    double amplitude = 1.0;
    double corner_hz = 50.0;
};

struct SpectralFrame {
    double time_index;
    double frequency_hz;
    double amplitude;
    double phase_shift;
};

std::vector<SpectralFrame> spectrum_at(const SpectrumParams& params, double t);

// --- noise ---------------------------------------------------------------

/// splitmix64 step: z += 0x9E3779B97F4A7C15; then two xor-shift-multiply
/// rounds with 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// xoshiro256** with the reference update equations.
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed) noexcept;
    std::uint64_t next() noexcept;
    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() noexcept;

private:
    std::uint64_t s_[4];
};

/// Uniform noise in [-amp, +amp] that depends only on (seed, t): a fresh
/// xoshiro256** generator is seeded from seed ^ (bits(t) * 0xD1B54A32D192ED03)
/// and its first output is used.
double noise_at(std::uint64_t seed, double t, double amp) noexcept;

/// Per-channel seed derived from the facility seed.
std::uint64_t channel_seed(std::uint64_t facility_seed, std::uint64_t channel) noexcept;

}  // namespace cryodaq::simsrc
