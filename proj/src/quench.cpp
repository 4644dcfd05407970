#include "cryodaq/quench.hpp"

#include <cmath>

#include "cryodaq/error.hpp"

namespace cryodaq::quench {

void validate(const DetectorConfig& cfg) {
    if (!(cfg.threshold_volts > 0.0)) throw Error(Errc::InvalidConfig, "detector threshold must be > 0");
    if (!(cfg.hold_time_s > 0.0)) throw Error(Errc::InvalidConfig, "detector hold time must be > 0");
    if (!(cfg.mutual_inductance_H >= 0.0))
        throw Error(Errc::InvalidConfig, "detector mutual inductance must be >= 0");
}

std::int64_t hold_samples(const DetectorConfig& cfg, double fast_rate_hz) {
    const double exact = cfg.hold_time_s * fast_rate_hz;
    const auto n = static_cast<std::int64_t>(std::ceil(exact * (1.0 - 1e-12)));
    return n < 1 ? 1 : n;
}

std::optional<QuenchTrigger> detect_step(const DetectorConfig& cfg, std::int64_t hold, DetectorState& state,
                                         ChannelId channel, const Sample& sample, double dI_dt) {
    const std::int64_t index = state.next_index++;
    if (state.fired) return std::nullopt;
    const double v_comp = sample.raw - cfg.mutual_inductance_H * dI_dt;
    if (v_comp > cfg.threshold_volts) {
        if (++state.consecutive >= hold) {
            state.fired = true;
            return QuenchTrigger{channel, index, sample.time_index, v_comp};
        }
    } else {
        state.consecutive = 0;
    }
    return std::nullopt;
}

void validate(const DumpModel& m) {
    if (!(m.inductance_H > 0.0)) throw Error(Errc::InvalidConfig, "dump inductance must be > 0");
    if (!(m.dump_resistance_ohm > 0.0)) throw Error(Errc::InvalidConfig, "dump resistance must be > 0");
    if (!(m.initial_current_A >= 0.0)) throw Error(Errc::InvalidConfig, "dump initial current must be >= 0");
}

double dump_current(const DumpModel& m, double t) {
    return m.initial_current_A * std::exp(-t * m.dump_resistance_ohm / m.inductance_H);
}

double stored_energy(const DumpModel& m) {
    return 0.5 * m.inductance_H * m.initial_current_A * m.initial_current_A;
}

double dissipated_energy_exact(const DumpModel& m, double t_end) {
    return stored_energy(m) * -std::expm1(-2.0 * t_end / m.tau());
}

double dissipated_energy(const DumpModel& m, double t_end, double dt, Quadrature rule) {
    if (!(t_end > 0.0) || !(dt > 0.0))
        throw Error(Errc::InvalidConfig, "dissipated_energy needs t_end > 0 and dt > 0");
    const auto power = [&](double t) {
        const double i = dump_current(m, t);
        return i * i * m.dump_resistance_ohm;
    };
    const auto full = static_cast<std::int64_t>(std::floor(t_end / dt));
    double sum = 0.0;
    double t0 = 0.0;
    auto panel = [&](double a, double h) {
        if (rule == Quadrature::Midpoint) return h * power(a + 0.5 * h);
        return 0.5 * h * (power(a) + power(a + h));
    };
    for (std::int64_t k = 0; k < full; ++k) {
        t0 = static_cast<double>(k) * dt;
        sum += panel(t0, dt);
    }
    const double covered = static_cast<double>(full) * dt;
    const double rest = t_end - covered;
    if (rest > 0.0) sum += panel(covered, rest);
    return sum;
}

double quadrature_error_bound(const DumpModel& m, double t_end, double dt, Quadrature rule) {
    // f(t) = I0^2 R exp(-2t/tau); |f''| peaks at t = 0.
    const double tau = m.tau();
    const double f2max = m.initial_current_A * m.initial_current_A * m.dump_resistance_ohm * 4.0 / (tau * tau);
    const double k = rule == Quadrature::Midpoint ? 24.0 : 12.0;
    return t_end * dt * dt / k * f2max;
}

}  // namespace cryodaq::quench
