#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cryodaq/acquire.hpp"
#include "cryodaq/condition.hpp"
#include "cryodaq/quench.hpp"
#include "cryodaq/registry.hpp"
#include "cryodaq/simsrc.hpp"

// Daemon config grammar, one statement per line:
//
//   # comment
//   [section]
//   key = value
//
// Sections: facility, channels, acquisition, detector, archive, server.
// Channel attributes are written DEVICE.DATA.attr = value; channels are
// registered in order of first appearance. Unknown sections or keys are
// errors that name the offending line. See docs/config.md.

namespace cryodaq::config {

struct ChannelConfig {
    std::string device_name;
    std::string data_name;
    int line = 0;  // first appearance

    ChannelKind kind = ChannelKind::Slow;
    std::string source;  // tap, cooldown, pressure, flow, field, current, constant, setpoint, spectrum
    std::string units_raw;
    std::string units_cal;
    CalibrationTable calibration;
    std::optional<condition::AmplifierConfig> amplifier;

    // tap
    double onset_s = std::numeric_limits<double>::infinity();
    double slope_V_per_s = 100.0;
    double mutual_inductance_H = 0.0;
    double noise_V = 0.0;

    // pressure / flow
    simsrc::SlowChannelParams slow;
    // constant / setpoint
    double value = 0.0;
    bool writable = false;
    // spectrum
    simsrc::SpectrumParams spectrum;
};

struct DaemonConfig {
    // [facility]
    std::uint64_t seed = 1;
    std::string magnet = "MAG";
    acquire::FacilityModel facility;
    quench::DumpModel dump;

    // [channels]
    std::vector<ChannelConfig> channels;

    // [acquisition]
    double fast_rate_hz = 100000.0;
    double slow_period_s = 1.0;
    double duration_s = 1.0;
    bool realtime = false;
    std::string session_start_utc;  // empty: current UTC second
    std::size_t archive_queue_capacity = 256;
    std::size_t block_samples = 1000;
    std::optional<acquire::OverflowPolicy> overflow;
    bool parallel = true;
    double start_delay_s = 0.0;

    // [detector]
    quench::DetectorConfig detector;

    // [archive]
    std::string archive_root;

    // [server]
    std::string endpoint;  // empty: no server
    std::string port_file;
    double linger_s = 0.0;
    std::size_t client_queue_capacity = 4096;
};

/// Throws Error(InvalidConfig) with "line N: ..." in the message.
DaemonConfig parse_daemon_config(std::string_view text, const std::filesystem::path& base_dir = {});
DaemonConfig load_daemon_config(const std::filesystem::path& path);

/// Registry and acquisition setup derived from a config.
struct Plant {
    Registry registry;
    acquire::AcquisitionConfig acquisition;
    acquire::FacilityModel facility;
    quench::DetectorConfig detector;
    quench::DumpModel dump;
    /// Writable channels and their initial values.
    std::vector<std::pair<ChannelId, Sample>> setpoints;
};

/// Registers every configured channel plus <magnet>.QUENCH_TRIG and
/// SESSION.STATUS. Throws Error(InvalidConfig) on any inconsistency.
Plant build_plant(const DaemonConfig& cfg);

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_now();

}  // namespace cryodaq::config
