#pragma once

#include <cstdint>
#include <optional>

#include "cryodaq/registry.hpp"

namespace cryodaq::quench {

/// Threshold-with-hold detector on the inductively compensated tap voltage.
struct DetectorConfig {
    double threshold_volts = 0.1;
    double hold_time_s = 0.002;
    double mutual_inductance_H = 0.0;
};

void validate(const DetectorConfig& cfg);

/// ceil(hold_time * rate), at least 1. A relative slack of 1e-12 absorbs the
/// representation error of products such as 0.002 * 100000.
std::int64_t hold_samples(const DetectorConfig& cfg, double fast_rate_hz);

struct QuenchTrigger {
    ChannelId channel = 0;
    std::int64_t sample_index = 0;
    double trigger_time_s = 0.0;
    double compensated_volts_at_trigger = 0.0;
};

/// Per-channel detector state, owned by the fast loop.
struct DetectorState {
    std::int64_t consecutive = 0;
    std::int64_t next_index = 0;
    bool fired = false;
};

/// Consumes one sample. Exceedance is strict (V_comp > threshold); the
/// trigger fires once, on the sample where the run of exceedances reaches
/// `hold`. After firing the detector is latched.
std::optional<QuenchTrigger> detect_step(const DetectorConfig& cfg, std::int64_t hold, DetectorState& state,
                                         ChannelId channel, const Sample& sample, double dI_dt);

struct DumpModel {
    double inductance_H = 2.0;
    double dump_resistance_ohm = 0.1;
    double initial_current_A = 50000.0;

    double tau() const { return inductance_H / dump_resistance_ohm; }
};

void validate(const DumpModel& model);

/// I(t) = I0 * exp(-t R / L).
double dump_current(const DumpModel& model, double t_since_trigger);

/// E = L * I0^2 / 2.
double stored_energy(const DumpModel& model);

/// Closed form of the integral of I^2 R over [0, t]: E0 * (1 - exp(-2t/tau)).
double dissipated_energy_exact(const DumpModel& model, double t_end);

enum class Quadrature { Midpoint, Trapezoid };

/// Composite quadrature of I(t)^2 R over [0, t_end] with step dt; the last
/// panel is shortened to land on t_end. Midpoint is the default: for the
/// convex decay it never overshoots the stored energy, while the trapezoid
/// rule does by about (2 dt / tau)^2 / 12 relative.
double dissipated_energy(const DumpModel& model, double t_end, double dt,
                         Quadrature rule = Quadrature::Midpoint);

/// A-priori bound on |quadrature - exact|: t_end * dt^2 / k * max|f''| with
/// k = 24 (midpoint) or 12 (trapezoid), f = I^2 R.
double quadrature_error_bound(const DumpModel& model, double t_end, double dt, Quadrature rule);

}  // namespace cryodaq::quench
