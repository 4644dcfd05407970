#include "cryodaq/live_table.hpp"

#include <limits>

namespace cryodaq {

LiveTable::LiveTable(const Registry& registry) : entries_(registry.size()) {
    for (ChannelId id = 0; id < registry.size(); ++id) {
        const auto& d = registry.at(id);
        auto& e = entries_[id];
        e.name = d.full_name();
        e.writable = d.writable;
        e.trigger = d.data_name == "QUENCH_TRIG";
        const double nan = std::numeric_limits<double>::quiet_NaN();
        e.value = {nan, nan, nan};
        by_name_.emplace(e.name, id);
    }
}

std::optional<ChannelId> LiveTable::find(std::string_view full_name) const {
    auto it = by_name_.find(std::string(full_name));
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

Sample LiveTable::read(ChannelId id) const {
    const auto& e = entries_.at(id);
    std::lock_guard lk(e.m);
    return e.value;
}

bool LiveTable::has_value(ChannelId id) const {
    const auto& e = entries_.at(id);
    std::lock_guard lk(e.m);
    return e.has_value;
}

void LiveTable::write(ChannelId id, const Sample& value) {
    auto& e = entries_.at(id);
    std::lock_guard lk(e.m);
    e.value = value;
    e.has_value = true;
}

}  // namespace cryodaq
