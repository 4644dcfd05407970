#include "cryodaq/condition.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cryodaq/error.hpp"

namespace cryodaq::condition {

void validate(const AmplifierConfig& cfg) {
    if (!(cfg.gain > 0.0))
        throw Error(Errc::InvalidConfig, "amplifier gain must be > 0");
    if (!(cfg.lp_alpha > 0.0 && cfg.lp_alpha <= 1.0))
        throw Error(Errc::InvalidConfig, "amplifier lp_alpha must be in (0, 1]");
    if (!(cfg.clip_volts > 0.0))
        throw Error(Errc::InvalidConfig, "amplifier clip_volts must be > 0");
    if (!(cfg.isolation_limit_volts > 0.0))
        throw Error(Errc::InvalidConfig, "amplifier isolation_limit_volts must be > 0");
}

StepResult condition_step(const AmplifierConfig& cfg, double state, double input_volts) {
    if (!(std::abs(input_volts) <= cfg.isolation_limit_volts)) {
        throw Error(Errc::IsolationBreach,
                    "input " + std::to_string(input_volts) + " V exceeds isolation limit " +
                        std::to_string(cfg.isolation_limit_volts) + " V");
    }
    const double next = state + cfg.lp_alpha * (input_volts - state);
    const double out = std::clamp(cfg.gain * next, -cfg.clip_volts, cfg.clip_volts);
    return {next, out};
}

double step_response(const AmplifierConfig& cfg, long long n) {
    if (n <= 0) return 0.0;
    return cfg.gain * (1.0 - std::pow(1.0 - cfg.lp_alpha, static_cast<double>(n)));
}

}  // namespace cryodaq::condition
