#include "cryodaq/config.hpp"

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

#include "cryodaq/error.hpp"

namespace fs = std::filesystem;

namespace cryodaq::config {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
    throw Error(Errc::InvalidConfig, "line " + std::to_string(line) + ": " + msg);
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(std::string_view text, int line, std::string_view key) {
    const std::string buf(text);
    char* end = nullptr;
    const double v = std::strtod(buf.c_str(), &end);
    if (buf.empty() || end != buf.c_str() + buf.size())
        fail(line, "'" + std::string(key) + "' expects a number, got '" + buf + "'");
    return v;
}

std::uint64_t to_u64(std::string_view text, int line, std::string_view key) {
    const std::string buf(text);
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(buf.c_str(), &end, 10);
    if (buf.empty() || buf[0] == '-' || end != buf.c_str() + buf.size() || errno != 0)
        fail(line, "'" + std::string(key) + "' expects a non-negative integer, got '" + buf + "'");
    return v;
}

bool to_bool(std::string_view text, int line, std::string_view key) {
    if (text == "true" || text == "yes" || text == "1") return true;
    if (text == "false" || text == "no" || text == "0") return false;
    fail(line, "'" + std::string(key) + "' expects true or false, got '" + std::string(text) + "'");
}

CalibrationTable to_calibration(std::string_view text, int line, const fs::path& base_dir) {
    try {
        if (text == "identity") return CalibrationTable::identity();
        if (text.starts_with("file:")) {
            fs::path p(std::string(text.substr(5)));
            if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
            return load_calibration_file(p);
        }
        if (text.starts_with("table:")) {
            std::vector<CalibrationTable::Breakpoint> points;
            std::string body(text.substr(6));
            std::istringstream in(body);
            std::string pair;
            while (std::getline(in, pair, ',')) {
                const auto colon = pair.find(':');
                if (colon == std::string::npos) fail(line, "calibration table entries are raw:physical");
                points.push_back({to_double(trim(std::string_view(pair).substr(0, colon)), line, "calibration"),
                                  to_double(trim(std::string_view(pair).substr(colon + 1)), line, "calibration")});
            }
            return CalibrationTable::piecewise(std::move(points));
        }
    } catch (const Error& e) {
        if (e.code() == Errc::InvalidConfig && std::string_view(e.what()).starts_with("line ")) throw;
        fail(line, e.what());
    }
    fail(line, "calibration must be identity, file:<path> or table:r:p,r:p,...");
}

struct Statement {
    std::string section;
    std::string key;
    std::string value;
    int line;
};

std::vector<Statement> tokenize(std::string_view text) {
    static const std::vector<std::string> sections = {"facility", "channels", "acquisition",
                                                      "detector", "archive",  "server"};
    std::vector<Statement> out;
    std::string section;
    int lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        const std::string_view line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(lineno, "malformed section header '" + std::string(line) + "'");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (std::find(sections.begin(), sections.end(), section) == sections.end())
                fail(lineno, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail(lineno, "expected 'key = value', got '" + std::string(line) + "'");
        if (section.empty()) fail(lineno, "statement outside of any section");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) fail(lineno, "empty key");
        out.push_back({section, key, value, lineno});
    }
    return out;
}

void apply_channel_attr(ChannelConfig& ch, const std::string& attr, const std::string& v, int line,
                        const fs::path& base_dir) {
    auto num = [&] { return to_double(v, line, attr); };
    auto amp = [&]() -> condition::AmplifierConfig& {
        if (!ch.amplifier) ch.amplifier.emplace();
        return *ch.amplifier;
    };
    if (attr == "kind") {
        try {
            ch.kind = parse_channel_kind(v);
        } catch (const Error& e) {
            fail(line, e.what());
        }
    } else if (attr == "source") {
        static const std::vector<std::string> sources = {"tap",      "cooldown", "pressure", "flow",    "field",
                                                         "current",  "constant", "setpoint", "spectrum"};
        if (std::find(sources.begin(), sources.end(), v) == sources.end()) fail(line, "unknown source '" + v + "'");
        ch.source = v;
    } else if (attr == "units_raw") ch.units_raw = v;
    else if (attr == "units_cal") ch.units_cal = v;
    else if (attr == "calibration") ch.calibration = to_calibration(v, line, base_dir);
    else if (attr == "gain") amp().gain = num();
    else if (attr == "lp_alpha") amp().lp_alpha = num();
    else if (attr == "clip_volts") amp().clip_volts = num();
    else if (attr == "isolation_limit_volts") amp().isolation_limit_volts = num();
    else if (attr == "onset_s") ch.onset_s = v == "never" ? std::numeric_limits<double>::infinity() : num();
    else if (attr == "slope_V_per_s") ch.slope_V_per_s = num();
    else if (attr == "mutual_inductance_H") ch.mutual_inductance_H = num();
    else if (attr == "noise_V") ch.noise_V = num();
    else if (attr == "baseline") ch.slow.baseline = num();
    else if (attr == "amplitude") ch.slow.amplitude = num();
    else if (attr == "period_s") ch.slow.period_s = num();
    else if (attr == "phase_rad") ch.slow.phase_rad = num();
    else if (attr == "value") ch.value = num();
    else if (attr == "writable") ch.writable = to_bool(v, line, attr);
    else if (attr == "bins") ch.spectrum.bins = static_cast<int>(to_u64(v, line, attr));
    else if (attr == "bin_hz") ch.spectrum.bin_hz = num();
    else if (attr == "spectrum_amplitude") ch.spectrum.amplitude = num();
    else if (attr == "corner_hz") ch.spectrum.corner_hz = num();
    else fail(line, "unknown channel attribute '" + attr + "'");
}

}  // namespace

DaemonConfig parse_daemon_config(std::string_view text, const fs::path& base_dir) {
    DaemonConfig cfg;
    std::string ramp_mode = "slow";
    std::optional<double> ramp_rate;
    std::optional<double> ramp_duration;
    int ramp_line = 0;
    std::map<std::string, std::size_t> channel_index;

    for (const auto& st : tokenize(text)) {
        const auto& k = st.key;
        const auto& v = st.value;
        const int line = st.line;
        auto num = [&] { return to_double(v, line, k); };
        auto unknown = [&] { fail(line, "unknown key '" + k + "' in [" + st.section + "]"); };

        if (st.section == "facility") {
            if (k == "seed") cfg.seed = to_u64(v, line, k);
            else if (k == "magnet") {
                if (!is_valid_name(v)) fail(line, "invalid magnet name '" + v + "'");
                cfg.magnet = v;
            } else if (k == "current_amps") cfg.facility.current.max_amps = num();
            else if (k == "current_ramp_A_per_s") cfg.facility.current.rate_A_per_s = num();
            else if (k == "ramp") {
                if (v != "slow" && v != "fast" && v != "custom") fail(line, "ramp must be slow, fast or custom");
                ramp_mode = v;
                ramp_line = line;
            } else if (k == "ramp_rate_T_per_s") ramp_rate = num();
            else if (k == "ramp_duration_s") ramp_duration = num();
            else if (k == "cooldown_start_K") cfg.facility.cooldown.t_start_K = num();
            else if (k == "cooldown_base_K") cfg.facility.cooldown.t_base_K = num();
            else if (k == "cooldown_tau_s") cfg.facility.cooldown.tau_s = num();
            else if (k == "magnet_inductance_H") cfg.dump.inductance_H = num();
            else if (k == "dump_resistance_ohm") cfg.dump.dump_resistance_ohm = num();
            else unknown();
        } else if (st.section == "channels") {
            const auto last_dot = k.rfind('.');
            const auto first_dot = k.find('.');
            if (first_dot == std::string::npos || first_dot == last_dot)
                fail(line, "channel keys are DEVICE.DATA.attribute, got '" + k + "'");
            const std::string device = k.substr(0, first_dot);
            const std::string data = k.substr(first_dot + 1, last_dot - first_dot - 1);
            const std::string attr = k.substr(last_dot + 1);
            if (!is_valid_name(device) || !is_valid_name(data))
                fail(line, "invalid channel name '" + device + "." + data + "'");
            const std::string full = device + "." + data;
            auto [it, inserted] = channel_index.try_emplace(full, cfg.channels.size());
            if (inserted) {
                ChannelConfig ch;
                ch.device_name = device;
                ch.data_name = data;
                ch.line = line;
                cfg.channels.push_back(std::move(ch));
            }
            apply_channel_attr(cfg.channels[it->second], attr, v, line, base_dir);
        } else if (st.section == "acquisition") {
            if (k == "fast_rate_hz") cfg.fast_rate_hz = num();
            else if (k == "slow_period_s") cfg.slow_period_s = num();
            else if (k == "duration_s") cfg.duration_s = num();
            else if (k == "realtime") cfg.realtime = to_bool(v, line, k);
            else if (k == "session_start_utc") {
                try {
                    acquire::session_date(v);
                } catch (const Error& e) {
                    fail(line, e.what());
                }
                cfg.session_start_utc = v;
            } else if (k == "archive_queue_capacity") cfg.archive_queue_capacity = to_u64(v, line, k);
            else if (k == "block_samples") cfg.block_samples = to_u64(v, line, k);
            else if (k == "archive_overflow") {
                if (v == "gap") cfg.overflow = acquire::OverflowPolicy::Gap;
                else if (v == "block") cfg.overflow = acquire::OverflowPolicy::Block;
                else fail(line, "archive_overflow must be gap or block");
            } else if (k == "parallel") cfg.parallel = to_bool(v, line, k);
            else if (k == "start_delay_s") cfg.start_delay_s = num();
            else unknown();
        } else if (st.section == "detector") {
            if (k == "threshold_volts") cfg.detector.threshold_volts = num();
            else if (k == "hold_time_s") cfg.detector.hold_time_s = num();
            else if (k == "mutual_inductance_H") cfg.detector.mutual_inductance_H = num();
            else unknown();
        } else if (st.section == "archive") {
            if (k == "root") {
                fs::path p(v);
                if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
                cfg.archive_root = p.string();
            } else unknown();
        } else if (st.section == "server") {
            if (k == "endpoint") cfg.endpoint = v;
            else if (k == "port_file") cfg.port_file = v;
            else if (k == "linger_s") cfg.linger_s = num();
            else if (k == "client_queue_capacity") cfg.client_queue_capacity = to_u64(v, line, k);
            else unknown();
        }
    }

    if (ramp_mode == "slow") cfg.facility.field = simsrc::FieldRampProfile::slow_ramp();
    else if (ramp_mode == "fast") cfg.facility.field = simsrc::FieldRampProfile::fast_ramp();
    else {
        if (!ramp_rate || !ramp_duration) fail(ramp_line, "custom ramp needs ramp_rate_T_per_s and ramp_duration_s");
        try {
            cfg.facility.field = simsrc::FieldRampProfile::custom(*ramp_rate, *ramp_duration);
        } catch (const Error& e) {
            fail(ramp_line, e.what());
        }
    }
    return cfg;
}

DaemonConfig load_daemon_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::InvalidConfig, "cannot open config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_daemon_config(buf.str(), path.parent_path());
}

Plant build_plant(const DaemonConfig& cfg) {
    Plant plant;
    plant.facility = cfg.facility;
    plant.detector = cfg.detector;
    plant.dump = cfg.dump;
    auto& acq = plant.acquisition;
    acq.fast_rate_hz = cfg.fast_rate_hz;
    acq.slow_period_s = cfg.slow_period_s;
    acq.duration_s = cfg.duration_s;
    acq.realtime = cfg.realtime;
    acq.session_start_utc = cfg.session_start_utc.empty() ? utc_now() : cfg.session_start_utc;
    acq.archive_queue_capacity = cfg.archive_queue_capacity;
    acq.block_samples = cfg.block_samples;
    acq.overflow = cfg.overflow;
    acq.parallel = cfg.parallel;

    auto channel_error = [](const ChannelConfig& ch, const std::string& msg) {
        fail(ch.line, "channel " + ch.device_name + "." + ch.data_name + ": " + msg);
    };

    for (const auto& ch : cfg.channels) {
        if (ch.source.empty()) channel_error(ch, "missing source");
        const bool is_tap = ch.source == "tap";
        if (is_tap != (ch.kind == ChannelKind::Fast)) channel_error(ch, "source=tap and kind=fast go together");
        if ((ch.source == "spectrum") != (ch.kind == ChannelKind::Spectral))
            channel_error(ch, "source=spectrum and kind=spectral go together");
        if (ch.writable && ch.source != "setpoint") channel_error(ch, "only setpoint channels are writable");

        ChannelDescriptor d;
        d.device_name = ch.device_name;
        d.data_name = ch.data_name;
        d.kind = ch.kind;
        d.units_raw = ch.units_raw;
        d.units_cal = ch.units_cal;
        d.calibration = ch.calibration;
        d.conditioning = ch.amplifier;
        if (is_tap && !d.conditioning) d.conditioning = condition::AmplifierConfig{};
        d.writable = ch.source == "setpoint";

        ChannelId id = 0;
        try {
            id = plant.registry.register_channel(d);
        } catch (const Error& e) {
            channel_error(ch, e.what());
        }

        if (is_tap) {
            acquire::FastChannelSpec spec;
            spec.id = id;
            spec.scenario.onset_time_s = ch.onset_s;
            spec.scenario.resistive_slope_V_per_s = ch.slope_V_per_s;
            spec.scenario.mutual_inductance_H = ch.mutual_inductance_H;
            spec.scenario.current_amps = cfg.facility.current.max_amps;
            spec.scenario.noise_amp_V = ch.noise_V;
            spec.scenario.seed = simsrc::channel_seed(cfg.seed, id);
            spec.amplifier = *d.conditioning;
            spec.calibration = d.calibration;
            try {
                simsrc::validate(spec.scenario);
            } catch (const Error& e) {
                channel_error(ch, e.what());
            }
            acq.fast_channels.push_back(std::move(spec));
        } else if (ch.source == "setpoint") {
            plant.setpoints.push_back({id, {0.0, ch.value, calibrate(d.calibration, ch.value)}});
        } else {
            acquire::SlowChannelSpec spec;
            spec.id = id;
            spec.params = ch.slow;
            spec.constant = ch.value;
            spec.spectrum = ch.spectrum;
            if (ch.source == "cooldown") spec.source = acquire::SlowSource::Cooldown;
            else if (ch.source == "pressure") spec.source = acquire::SlowSource::Pressure;
            else if (ch.source == "flow") spec.source = acquire::SlowSource::FlowRate;
            else if (ch.source == "field") spec.source = acquire::SlowSource::Field;
            else if (ch.source == "current") spec.source = acquire::SlowSource::Current;
            else if (ch.source == "constant") spec.source = acquire::SlowSource::Constant;
            else spec.source = acquire::SlowSource::Spectrum;
            acq.slow_channels.push_back(spec);
        }
    }

    ChannelDescriptor trig;
    trig.device_name = cfg.magnet;
    trig.data_name = "QUENCH_TRIG";
    trig.units_raw = "V";
    trig.units_cal = "flag";
    ChannelDescriptor status;
    status.device_name = "SESSION";
    status.data_name = "STATUS";
    status.units_raw = "code";
    status.units_cal = "gaps";
    try {
        acq.trigger_channel = plant.registry.register_channel(trig);
        acq.status_channel = plant.registry.register_channel(status);
        acquire::validate(acq, plant.registry);
        quench::validate(cfg.detector);
        quench::validate(cfg.dump);
        simsrc::validate(cfg.facility.cooldown);
    } catch (const Error& e) {
        throw Error(Errc::InvalidConfig, e.what());
    }
    return plant;
}

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace cryodaq::config
