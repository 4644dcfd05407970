#include "cryodaq/fast_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "cryodaq/error.hpp"

namespace cryodaq::acquire {

namespace {

void sort_triggers(std::vector<quench::QuenchTrigger>& triggers) {
    std::sort(triggers.begin(), triggers.end(), [](const auto& a, const auto& b) {
        if (a.trigger_time_s != b.trigger_time_s) return a.trigger_time_s < b.trigger_time_s;
        return a.channel < b.channel;
    });
}

void check_sizes(std::size_t channels, std::span<FastChannelState> states, std::span<std::vector<Sample>> out) {
    if (states.size() != channels || out.size() != channels)
        throw Error(Errc::InvalidConfig, "fast kernel: state/output spans do not match the channel count");
}

}  // namespace

FastKernel::FastKernel(FastKernelParams params, std::vector<FastChannelSpec> channels)
    : params_(params), channels_(std::move(channels)), hold_(quench::hold_samples(params.detector, params.rate_hz)) {
    if (!(params_.rate_hz > 0.0)) throw Error(Errc::InvalidConfig, "fast rate must be > 0");
    quench::validate(params_.detector);
    for (const auto& c : channels_) {
        condition::validate(c.amplifier);
        validate(c.calibration);
    }
}

std::vector<quench::QuenchTrigger> FastKernel::run_parallel(std::int64_t k_begin, std::int64_t k_end,
                                                            std::span<FastChannelState> states,
                                                            std::span<std::vector<Sample>> out) const {
    check_sizes(channels_.size(), states, out);
    const auto n_channels = static_cast<std::int64_t>(channels_.size());
    const auto len = static_cast<std::size_t>(std::max<std::int64_t>(0, k_end - k_begin));
    std::vector<std::optional<quench::QuenchTrigger>> fired(channels_.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();

#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < n_channels; ++c) {
        const FastChannelSpec& spec = channels_[static_cast<std::size_t>(c)];
        const condition::AmplifierConfig& amp = spec.amplifier;
        FastChannelState& st = states[static_cast<std::size_t>(c)];
        std::vector<Sample>& dst = out[static_cast<std::size_t>(c)];
        dst.resize(len);
        double filter = st.filter;
        for (std::size_t i = 0; i < len; ++i) {
            const std::int64_t k = k_begin + static_cast<std::int64_t>(i);
            const double t = session_clock(k, params_.rate_hz);
            const double di_dt = simsrc::current_slope_at(params_.current, t);
            const double volts = simsrc::voltage_tap_at(spec.scenario, di_dt, t);
            Sample s{t, nan, nan};
            if (std::abs(volts) <= amp.isolation_limit_volts) {
                filter = filter + amp.lp_alpha * (volts - filter);
                s.raw = std::clamp(amp.gain * filter, -amp.clip_volts, amp.clip_volts);
                s.calibrated = calibrate(spec.calibration, s.raw);
            } else {
                st.faulted = true;
                ++st.breaches;
            }
            dst[i] = s;
            if (auto trig = quench::detect_step(params_.detector, hold_, st.detector, spec.id, s, di_dt))
                fired[static_cast<std::size_t>(c)] = trig;
        }
        st.filter = filter;
    }

    std::vector<quench::QuenchTrigger> triggers;
    for (auto& f : fired)
        if (f) triggers.push_back(*f);
    sort_triggers(triggers);
    return triggers;
}

std::vector<quench::QuenchTrigger> FastKernel::run_serial(std::int64_t k_begin, std::int64_t k_end,
                                                          std::span<FastChannelState> states,
                                                          std::span<std::vector<Sample>> out) const {
    check_sizes(channels_.size(), states, out);
    const auto len = static_cast<std::size_t>(std::max<std::int64_t>(0, k_end - k_begin));
    for (auto& v : out) v.assign(len, Sample{});
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<quench::QuenchTrigger> triggers;

    for (std::size_t i = 0; i < len; ++i) {
        const std::int64_t k = k_begin + static_cast<std::int64_t>(i);
        const double t = session_clock(k, params_.rate_hz);
        const double di_dt = simsrc::current_slope_at(params_.current, t);
        for (std::size_t c = 0; c < channels_.size(); ++c) {
            const FastChannelSpec& spec = channels_[c];
            FastChannelState& st = states[c];
            Sample s{t, nan, nan};
            try {
                const auto step = condition::condition_step(spec.amplifier, st.filter,
                                                            simsrc::voltage_tap_at(spec.scenario, di_dt, t));
                st.filter = step.state;
                s.raw = step.output_volts;
                s.calibrated = calibrate(spec.calibration, s.raw);
            } catch (const Error& e) {
                if (e.code() != Errc::IsolationBreach) throw;
                st.faulted = true;
                ++st.breaches;
            }
            out[c][i] = s;
            if (auto trig = quench::detect_step(params_.detector, hold_, st.detector, spec.id, s, di_dt))
                triggers.push_back(*trig);
        }
    }
    sort_triggers(triggers);
    return triggers;
}

}  // namespace cryodaq::acquire
