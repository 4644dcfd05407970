#include "cryodaq/simsrc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "cryodaq/error.hpp"

namespace cryodaq::simsrc {

FieldRampProfile FieldRampProfile::custom(double rate_T_per_s, double duration_s) {
    if (!std::isfinite(rate_T_per_s) || !(duration_s >= 0.0) || !std::isfinite(duration_s))
        throw Error(Errc::InvalidConfig, "field ramp needs a finite rate and a duration >= 0");
    return {Mode::Custom, rate_T_per_s, duration_s};
}

double field_at(const FieldRampProfile& profile, double t) {
    return profile.rate_T_per_s * std::min(t, profile.duration_s);
}

void validate(const CooldownProfile& p) {
    if (!(p.tau_s > 0.0)) throw Error(Errc::InvalidConfig, "cool-down tau must be > 0");
    if (!(p.t_start_K > p.t_base_K && p.t_base_K > 0.0))
        throw Error(Errc::InvalidConfig, "cool-down needs start > base > 0");
}

double cooldown_at(const CooldownProfile& p, double t) {
    return p.t_base_K + (p.t_start_K - p.t_base_K) * std::exp(-t / p.tau_s);
}

void validate(const QuenchScenario& sc) {
    if (!(sc.resistive_slope_V_per_s > 0.0))
        throw Error(Errc::InvalidConfig, "resistive slope must be > 0");
    if (!(sc.mutual_inductance_H >= 0.0))
        throw Error(Errc::InvalidConfig, "mutual inductance must be >= 0");
    if (!(sc.noise_amp_V >= 0.0)) throw Error(Errc::InvalidConfig, "noise amplitude must be >= 0");
    if (!(std::abs(sc.current_amps) <= 50000.0))
        throw Error(Errc::InvalidConfig, "scenario current is limited to 50 kA");
    if (std::isnan(sc.onset_time_s)) throw Error(Errc::InvalidConfig, "quench onset is NaN");
}

double voltage_tap_at(const QuenchScenario& sc, double dI_dt, double t) {
    double v = sc.mutual_inductance_H * dI_dt;
    if (sc.noise_amp_V > 0.0) v += noise_at(sc.seed, t, sc.noise_amp_V);
    if (t > sc.onset_time_s) v += sc.resistive_slope_V_per_s * (t - sc.onset_time_s);
    return v;
}

double current_at(const CurrentRamp& ramp, double t) {
    return std::min(ramp.rate_A_per_s * t, ramp.max_amps);
}

double current_slope_at(const CurrentRamp& ramp, double t) {
    return ramp.rate_A_per_s * t < ramp.max_amps ? ramp.rate_A_per_s : 0.0;
}

double slow_channel_at(SlowKind, const SlowChannelParams& p, double t) {
    if (p.amplitude == 0.0) return p.baseline;
    return p.baseline + p.amplitude * std::sin(2.0 * std::numbers::pi * t / p.period_s + p.phase_rad);
}

std::vector<SpectralFrame> spectrum_at(const SpectrumParams& p, double t) {
    std::vector<SpectralFrame> frames;
    frames.reserve(static_cast<std::size_t>(std::max(p.bins, 0)));
    for (int i = 1; i <= p.bins; ++i) {
        const double f = p.bin_hz * i;
        const double ratio = f / p.corner_hz;
        frames.push_back({t, f, p.amplitude / std::sqrt(1.0 + ratio * ratio), -std::atan(ratio)});
    }
    return frames;
}

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Xoshiro256::Xoshiro256(std::uint64_t seed) noexcept {
    for (auto& word : s_) word = splitmix64(seed);
}

std::uint64_t Xoshiro256::next() noexcept {
    const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
}

double Xoshiro256::uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double noise_at(std::uint64_t seed, double t, double amp) noexcept {
    Xoshiro256 gen(seed ^ (std::bit_cast<std::uint64_t>(t) * 0xD1B54A32D192ED03ULL));
    return amp * (2.0 * gen.uniform() - 1.0);
}

std::uint64_t channel_seed(std::uint64_t facility_seed, std::uint64_t channel) noexcept {
    std::uint64_t state = facility_seed ^ std::rotl(channel * 0x9E3779B97F4A7C15ULL, 17);
    return splitmix64(state);
}

}  // namespace cryodaq::simsrc
