#pragma once

#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cryodaq/registry.hpp"

namespace cryodaq {

/// Sink for live values. The acquisition engine publishes slow-path samples
/// and quench triggers through this interface.
class Publisher {
public:
    virtual ~Publisher() = default;
    virtual void publish(ChannelId id, const Sample& value) = 0;
};

class NullPublisher final : public Publisher {
public:
    void publish(ChannelId, const Sample&) override {}
};

/// Latest value per registered channel. One writer, many readers; every read
/// returns a whole triple.
class LiveTable {
public:
    explicit LiveTable(const Registry& registry);

    std::optional<ChannelId> find(std::string_view full_name) const;
    const std::string& name(ChannelId id) const { return entries_.at(id).name; }
    bool writable(ChannelId id) const { return entries_.at(id).writable; }
    /// Trigger channels (data name QUENCH_TRIG) carry events that are never
    /// dropped for slow subscribers.
    bool is_trigger(ChannelId id) const { return entries_.at(id).trigger; }
    std::size_t size() const noexcept { return entries_.size(); }

    /// NaN triple until the first write.
    Sample read(ChannelId id) const;
    bool has_value(ChannelId id) const;
    void write(ChannelId id, const Sample& value);

private:
    struct Entry {
        std::string name;
        bool writable = false;
        bool trigger = false;
        mutable std::mutex m;
        Sample value;
        bool has_value = false;
    };

    std::vector<Entry> entries_;
    std::unordered_map<std::string, ChannelId> by_name_;
};

}  // namespace cryodaq
