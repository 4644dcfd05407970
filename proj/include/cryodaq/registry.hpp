#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cryodaq/condition.hpp"

namespace cryodaq {

using ChannelId = std::uint32_t;

enum class ChannelKind { Fast, Slow, Spectral };

std::string_view to_string(ChannelKind kind) noexcept;
ChannelKind parse_channel_kind(std::string_view text);

/// Monotone raw -> physical lookup curve.
struct CalibrationTable {
    enum class Mode { Identity, PiecewiseLinear };

    struct Breakpoint {
        double raw;
        double physical;
        bool operator==(const Breakpoint&) const = default;
    };

    Mode mode = Mode::Identity;
    std::vector<Breakpoint> breakpoints;

    static CalibrationTable identity() { return {}; }
    static CalibrationTable piecewise(std::vector<Breakpoint> points);

    bool operator==(const CalibrationTable&) const = default;
};

/// Throws Error(InvalidConfig) unless the table is usable by `calibrate`.
void validate(const CalibrationTable& table);

/// Identity passes through. Piecewise-linear interpolates between the
/// bracketing breakpoints and clamps to the endpoint value outside the table.
double calibrate(const CalibrationTable& table, double raw);

/// Inverse lookup for a table whose physical column is strictly monotone.
/// Used by the simulated sources to produce raw sensor voltages; clamps to
/// the table's raw range.
double uncalibrate(const CalibrationTable& table, double physical);

/// Reads "raw physical" pairs, one per line. Blank lines and '#' comments are
/// skipped.
CalibrationTable load_calibration_file(const std::filesystem::path& path);

/// One archived or published point: the three-double record.
struct Sample {
    double time_index = 0.0;
    double raw = 0.0;
    double calibrated = 0.0;
};

struct ChannelDescriptor {
    std::string device_name;
    std::string data_name;
    ChannelKind kind = ChannelKind::Slow;
    std::string units_raw;
    std::string units_cal;
    CalibrationTable calibration;
    std::optional<condition::AmplifierConfig> conditioning;
    bool writable = false;

    /// "DEVICE.DATA", the name used on the wire.
    std::string full_name() const { return device_name + "." + data_name; }
};

/// Names become path components and wire identifiers: printable ASCII with
/// no whitespace, and none of / \ . = # [ ].
bool is_valid_name(std::string_view name) noexcept;

/// Splits "DEVICE.DATA". Throws Error(InvalidName) on malformed input.
std::pair<std::string, std::string> split_full_name(std::string_view full);

/// Append-only during startup, read-only afterwards. Concurrent reads are
/// safe once registration has finished.
class Registry {
public:
    ChannelId register_channel(ChannelDescriptor desc);

    const ChannelDescriptor& lookup(std::string_view device_name, std::string_view data_name) const;
    const ChannelDescriptor& lookup_full(std::string_view full_name) const;
    std::optional<ChannelId> find(std::string_view device_name, std::string_view data_name) const;
    std::optional<ChannelId> find_full(std::string_view full_name) const;

    const ChannelDescriptor& at(ChannelId id) const { return channels_.at(id); }
    std::size_t size() const noexcept { return channels_.size(); }
    const std::vector<ChannelDescriptor>& channels() const noexcept { return channels_; }

private:
    std::vector<ChannelDescriptor> channels_;
    std::unordered_map<std::string, ChannelId> by_name_;
};

}  // namespace cryodaq
