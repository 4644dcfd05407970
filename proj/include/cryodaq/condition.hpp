#pragma once

// Isolation-amplifier model: single-pole IIR low-pass followed by a gain
// stage with output saturation.
//
// The smoothing coefficient is per sample. For an RC filter sampled at
// interval dt the equivalent coefficient is alpha = dt / (RC + dt).

namespace cryodaq::condition {

struct AmplifierConfig {
    double gain = 1.0;
    double lp_alpha = 1.0;
    double clip_volts = 10.0;
    double isolation_limit_volts = 20000.0;
};

/// Throws Error(InvalidConfig) when any field is out of range.
void validate(const AmplifierConfig& cfg);

struct StepResult {
    double state;
    double output_volts;
};

/// Advances the filter by one sample. Throws Error(IsolationBreach) when the
/// input exceeds the isolation limit; the filter state is not touched then.
StepResult condition_step(const AmplifierConfig& cfg, double state, double input_volts);

/// Pre-clip response after n samples of a unit step applied from zero state.
double step_response(const AmplifierConfig& cfg, long long n);

}  // namespace cryodaq::condition
