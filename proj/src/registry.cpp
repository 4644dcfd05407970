#include "cryodaq/registry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cryodaq/error.hpp"

namespace cryodaq {

std::string_view to_string(ChannelKind kind) noexcept {
    switch (kind) {
    case ChannelKind::Fast: return "fast";
    case ChannelKind::Slow: return "slow";
    case ChannelKind::Spectral: return "spectral";
    }
    return "unknown";
}

ChannelKind parse_channel_kind(std::string_view text) {
    if (text == "fast") return ChannelKind::Fast;
    if (text == "slow") return ChannelKind::Slow;
    if (text == "spectral") return ChannelKind::Spectral;
    throw Error(Errc::InvalidConfig, "unknown channel kind '" + std::string(text) + "'");
}

CalibrationTable CalibrationTable::piecewise(std::vector<Breakpoint> points) {
    CalibrationTable t;
    t.mode = Mode::PiecewiseLinear;
    t.breakpoints = std::move(points);
    validate(t);
    return t;
}

void validate(const CalibrationTable& table) {
    if (table.mode == CalibrationTable::Mode::Identity) return;
    const auto& bp = table.breakpoints;
    if (bp.size() < 2)
        throw Error(Errc::InvalidConfig, "piecewise-linear calibration needs at least 2 breakpoints");
    for (std::size_t i = 0; i < bp.size(); ++i) {
        if (!std::isfinite(bp[i].raw) || !std::isfinite(bp[i].physical))
            throw Error(Errc::InvalidConfig, "calibration breakpoints must be finite");
        if (i > 0 && !(bp[i].raw > bp[i - 1].raw))
            throw Error(Errc::InvalidConfig, "calibration raw values must be strictly increasing");
    }
}

double calibrate(const CalibrationTable& table, double raw) {
    if (table.mode == CalibrationTable::Mode::Identity) return raw;
    const auto& bp = table.breakpoints;
    if (std::isnan(raw)) return raw;
    if (raw <= bp.front().raw) return bp.front().physical;
    if (raw >= bp.back().raw) return bp.back().physical;
    // First breakpoint strictly above raw; the segment starts one before it.
    auto hi = std::upper_bound(bp.begin(), bp.end(), raw,
                               [](double r, const CalibrationTable::Breakpoint& b) { return r < b.raw; });
    auto lo = hi - 1;
    const double frac = (raw - lo->raw) / (hi->raw - lo->raw);
    return lo->physical + (hi->physical - lo->physical) * frac;
}

double uncalibrate(const CalibrationTable& table, double physical) {
    if (table.mode == CalibrationTable::Mode::Identity) return physical;
    const auto& bp = table.breakpoints;
    const bool increasing = bp.back().physical > bp.front().physical;
    for (std::size_t i = 1; i < bp.size(); ++i) {
        const bool monotone = increasing ? bp[i].physical > bp[i - 1].physical
                                         : bp[i].physical < bp[i - 1].physical;
        if (!monotone)
            throw Error(Errc::InvalidConfig, "inverse calibration needs a strictly monotone physical column");
    }
    const double lo_p = increasing ? bp.front().physical : bp.back().physical;
    const double hi_p = increasing ? bp.back().physical : bp.front().physical;
    if (physical <= lo_p) return increasing ? bp.front().raw : bp.back().raw;
    if (physical >= hi_p) return increasing ? bp.back().raw : bp.front().raw;
    for (std::size_t i = 1; i < bp.size(); ++i) {
        const double p0 = bp[i - 1].physical;
        const double p1 = bp[i].physical;
        if ((physical >= std::min(p0, p1)) && (physical <= std::max(p0, p1))) {
            const double frac = (physical - p0) / (p1 - p0);
            return bp[i - 1].raw + (bp[i].raw - bp[i - 1].raw) * frac;
        }
    }
    return bp.back().raw;
}

CalibrationTable load_calibration_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::InvalidConfig, "cannot open calibration file " + path.string());
    std::vector<CalibrationTable::Breakpoint> points;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        double raw = 0.0;
        double phys = 0.0;
        if (!(fields >> raw)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw Error(Errc::InvalidConfig,
                        path.string() + ":" + std::to_string(lineno) + ": expected 'raw physical'");
        }
        std::string extra;
        if (!(fields >> phys) || (fields >> extra))
            throw Error(Errc::InvalidConfig,
                        path.string() + ":" + std::to_string(lineno) + ": expected 'raw physical'");
        points.push_back({raw, phys});
    }
    return CalibrationTable::piecewise(std::move(points));
}

bool is_valid_name(std::string_view name) noexcept {
    if (name.empty()) return false;
    for (char c : name) {
        const auto u = static_cast<unsigned char>(c);
        if (u <= 0x20 || u >= 0x7f) return false;
        switch (c) {
        case '/': case '\\': case '.': case '=': case '#': case '[': case ']':
            return false;
        default:
            break;
        }
    }
    return true;
}

std::pair<std::string, std::string> split_full_name(std::string_view full) {
    const auto dot = full.find('.');
    if (dot == std::string_view::npos)
        throw Error(Errc::InvalidName, "channel name '" + std::string(full) + "' is not DEVICE.DATA");
    std::string device(full.substr(0, dot));
    std::string data(full.substr(dot + 1));
    if (!is_valid_name(device) || !is_valid_name(data))
        throw Error(Errc::InvalidName, "channel name '" + std::string(full) + "' is not DEVICE.DATA");
    return {std::move(device), std::move(data)};
}

namespace {

std::string map_key(std::string_view device, std::string_view data) {
    std::string key;
    key.reserve(device.size() + data.size() + 1);
    key.append(device);
    key.push_back('/');
    key.append(data);
    return key;
}

}  // namespace

ChannelId Registry::register_channel(ChannelDescriptor desc) {
    if (!is_valid_name(desc.device_name) || !is_valid_name(desc.data_name)) {
        throw Error(Errc::InvalidName,
                    "invalid channel name '" + desc.device_name + "." + desc.data_name + "'");
    }
    validate(desc.calibration);
    if (desc.conditioning) condition::validate(*desc.conditioning);
    auto key = map_key(desc.device_name, desc.data_name);
    if (by_name_.contains(key))
        throw Error(Errc::DuplicateName, "channel '" + desc.full_name() + "' already registered");
    const auto id = static_cast<ChannelId>(channels_.size());
    by_name_.emplace(std::move(key), id);
    channels_.push_back(std::move(desc));
    return id;
}

std::optional<ChannelId> Registry::find(std::string_view device_name, std::string_view data_name) const {
    auto it = by_name_.find(map_key(device_name, data_name));
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

std::optional<ChannelId> Registry::find_full(std::string_view full_name) const {
    const auto dot = full_name.find('.');
    if (dot == std::string_view::npos) return std::nullopt;
    return find(full_name.substr(0, dot), full_name.substr(dot + 1));
}

const ChannelDescriptor& Registry::lookup(std::string_view device_name, std::string_view data_name) const {
    if (auto id = find(device_name, data_name)) return channels_[*id];
    throw Error(Errc::NotFound,
                "channel '" + std::string(device_name) + "." + std::string(data_name) + "' not found");
}

const ChannelDescriptor& Registry::lookup_full(std::string_view full_name) const {
    if (auto id = find_full(full_name)) return channels_[*id];
    throw Error(Errc::NotFound, "channel '" + std::string(full_name) + "' not found");
}

}  // namespace cryodaq
