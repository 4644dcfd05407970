#include "cryodaq/acquire.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "cryodaq/bounded_queue.hpp"
#include "cryodaq/error.hpp"
#include "cryodaq/textfmt.hpp"

namespace fs = std::filesystem;

namespace cryodaq::acquire {

namespace {

using Clock = std::chrono::steady_clock;

struct ArchiveItem {
    std::size_t key = 0;
    std::vector<archive::Record> records;
    std::vector<simsrc::SpectralFrame> frames;
    bool spectral = false;
};

struct PublishItem {
    ChannelId id;
    Sample value;
};

/// Slack for floor() of products like duration * rate that are integral in
/// exact arithmetic.
std::int64_t floor_count(double x) { return static_cast<std::int64_t>(std::floor(x * (1.0 + 1e-12))); }

Clock::time_point deadline(Clock::time_point start, double t) {
    return start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(t));
}

const char* status_code_name(SessionHandle::Status s) {
    switch (s) {
    case SessionHandle::Status::Running: return "running";
    case SessionHandle::Status::Completed: return "completed";
    case SessionHandle::Status::Faulted: return "faulted";
    }
    return "unknown";
}

double status_code(SessionHandle::Status s) {
    switch (s) {
    case SessionHandle::Status::Running: return 0.0;
    case SessionHandle::Status::Completed: return 1.0;
    case SessionHandle::Status::Faulted: return 2.0;
    }
    return 0.0;
}

}  // namespace

TimeMode simulated_time_mode(const AcquisitionConfig& cfg) noexcept {
    return cfg.realtime ? TimeMode::Realtime : TimeMode::FasterThanRealtime;
}

OverflowPolicy effective_overflow(const AcquisitionConfig& cfg) noexcept {
    if (cfg.overflow) return *cfg.overflow;
    return cfg.realtime ? OverflowPolicy::Gap : OverflowPolicy::Block;
}

std::int64_t fast_sample_count(const AcquisitionConfig& cfg) noexcept {
    return floor_count(cfg.duration_s * cfg.fast_rate_hz) + 1;
}

std::int64_t slow_scan_count(const AcquisitionConfig& cfg) noexcept {
    return floor_count(cfg.duration_s / cfg.slow_period_s) + 1;
}

std::string session_date(const std::string& start) {
    const bool shape = start.size() == 20 && start[10] == 'T' && start[13] == ':' && start[16] == ':' &&
                       start[19] == 'Z';
    if (!shape || !archive::is_valid_date(std::string_view(start).substr(0, 10)))
        throw Error(Errc::InvalidConfig, "session start '" + start + "' is not YYYY-MM-DDTHH:MM:SSZ");
    for (std::size_t i : {11, 12, 14, 15, 17, 18})
        if (start[i] < '0' || start[i] > '9')
            throw Error(Errc::InvalidConfig, "session start '" + start + "' is not YYYY-MM-DDTHH:MM:SSZ");
    return start.substr(0, 10);
}

std::string session_id_for(const std::string& start) {
    session_date(start);
    std::string id;
    for (char c : start)
        if (c != '-' && c != ':') id.push_back(c);
    return id;
}

std::string_view to_string(SessionHandle::Status status) noexcept { return status_code_name(status); }

std::int64_t SessionHandle::total_gaps() const {
    std::int64_t n = 0;
    for (auto g : gap_count) n += g;
    return n;
}

void validate(const AcquisitionConfig& cfg, const Registry& registry) {
    auto bad = [](const std::string& msg) { throw Error(Errc::InvalidConfig, msg); };
    if (!(cfg.fast_rate_hz > 0.0) || !std::isfinite(cfg.fast_rate_hz)) bad("fast_rate_hz must be > 0");
    if (!(cfg.slow_period_s > 0.0) || !std::isfinite(cfg.slow_period_s)) bad("slow_period_s must be > 0");
    if (!(cfg.duration_s >= 0.0) || !std::isfinite(cfg.duration_s)) bad("duration_s must be >= 0");
    if (cfg.archive_queue_capacity == 0) bad("archive_queue_capacity must be >= 1");
    if (cfg.block_samples == 0) bad("block_samples must be >= 1");
    session_date(cfg.session_start_utc);

    std::unordered_set<ChannelId> seen;
    auto check_id = [&](ChannelId id, const char* list) {
        if (id >= registry.size()) bad(std::string(list) + " refers to unregistered channel id " + std::to_string(id));
        if (!seen.insert(id).second)
            bad("channel '" + registry.at(id).full_name() + "' appears in more than one acquisition list");
    };
    for (const auto& f : cfg.fast_channels) {
        check_id(f.id, "fast_channels");
        const auto& d = registry.at(f.id);
        if (d.kind != ChannelKind::Fast) bad("fast channel '" + d.full_name() + "' is not kind=fast");
        if (!d.conditioning) bad("fast channel '" + d.full_name() + "' has no conditioning chain");
        simsrc::validate(f.scenario);
    }
    for (const auto& s : cfg.slow_channels) {
        check_id(s.id, "slow_channels");
        const auto& d = registry.at(s.id);
        const bool spectral = s.source == SlowSource::Spectrum;
        if (spectral != (d.kind == ChannelKind::Spectral))
            bad("channel '" + d.full_name() + "': spectrum sources and kind=spectral go together");
        if (!spectral && d.kind != ChannelKind::Slow) bad("slow channel '" + d.full_name() + "' is not kind=slow");
        if (s.source == SlowSource::Cooldown) uncalibrate(d.calibration, 0.0);
        if ((s.source == SlowSource::Pressure || s.source == SlowSource::FlowRate) && !(s.params.period_s > 0.0))
            bad("channel '" + d.full_name() + "': modulation period must be > 0");
    }
    if (cfg.trigger_channel) check_id(*cfg.trigger_channel, "trigger_channel");
    if (cfg.status_channel) check_id(*cfg.status_channel, "status_channel");
}

SessionHandle run_session(const AcquisitionConfig& cfg, const Registry& registry, const FacilityModel& facility,
                          const quench::DetectorConfig& detector, archive::Archive& arch, Publisher& publisher,
                          const std::atomic<bool>* stop) {
    auto stopping = [stop] { return stop != nullptr && stop->load(); };
    validate(cfg, registry);
    quench::validate(detector);
    simsrc::validate(facility.cooldown);

    const auto wall_start = Clock::now();
    const std::string date = session_date(cfg.session_start_utc);
    SessionHandle handle;
    handle.session_id = session_id_for(cfg.session_start_utc);
    const std::size_t n_ids = registry.size();
    handle.gap_count.assign(n_ids, 0);
    handle.gap_samples.assign(n_ids, 0);
    handle.generated.assign(n_ids, 0);
    handle.faulted_channels.assign(n_ids, false);

    // Archive keys and sidecars. Spectral channels own two keys.
    std::vector<archive::ArchiveKey> keys;
    std::vector<archive::SidecarMeta> metas;
    std::vector<std::size_t> key_of(n_ids, SIZE_MAX);
    std::map<std::size_t, archive::ArchiveKey> spectral_base;
    auto add_key = [&](ChannelId id, std::string data_name, archive::FileKind kind, bool fast) {
        const auto& d = registry.at(id);
        archive::SidecarMeta m;
        m.device_name = d.device_name;
        m.data_name = data_name;
        m.kind = kind;
        m.units_raw = d.units_raw;
        m.units_cal = d.units_cal;
        m.session_start_utc = cfg.session_start_utc;
        if (fast) m.fast_rate_hz = cfg.fast_rate_hz;
        else m.slow_period_s = cfg.slow_period_s;
        keys.push_back({date, d.device_name, std::move(data_name)});
        metas.push_back(std::move(m));
        return keys.size() - 1;
    };
    for (const auto& f : cfg.fast_channels)
        key_of[f.id] = add_key(f.id, registry.at(f.id).data_name, archive::FileKind::TimeSeries, true);
    for (const auto& s : cfg.slow_channels) {
        const auto& d = registry.at(s.id);
        if (s.source == SlowSource::Spectrum) {
            // The amplitude key stands for the pair; the phase key follows it.
            key_of[s.id] = add_key(s.id, d.data_name + "_AMP", archive::FileKind::SpectralAmplitude, false);
            add_key(s.id, d.data_name + "_PHS", archive::FileKind::SpectralPhase, false);
            spectral_base.emplace(key_of[s.id], archive::ArchiveKey{date, d.device_name, d.data_name});
        } else {
            key_of[s.id] = add_key(s.id, d.data_name, archive::FileKind::TimeSeries, false);
        }
    }
    if (cfg.trigger_channel)
        key_of[*cfg.trigger_channel] = add_key(*cfg.trigger_channel, registry.at(*cfg.trigger_channel).data_name,
                                               archive::FileKind::TimeSeries, true);

    for (const auto& k : keys) {
        archive::validate(k);
        if (arch.exists(k))
            throw Error(Errc::StorageError, "archive already holds " + k.date + "/" + k.full_name() +
                                                "; one session per key and date");
    }
    const fs::path session_file = arch.root() / "sessions" / (handle.session_id + ".session");
    if (fs::exists(session_file))
        throw Error(Errc::StorageError, "session " + handle.session_id + " already exists in the archive root");

    // Fast kernel specs take conditioning and calibration from the registry.
    std::vector<FastChannelSpec> specs = cfg.fast_channels;
    for (auto& s : specs) {
        s.amplifier = *registry.at(s.id).conditioning;
        s.calibration = registry.at(s.id).calibration;
    }
    const FastKernel kernel(FastKernelParams{cfg.fast_rate_hz, facility.current, detector}, std::move(specs));

    const OverflowPolicy policy = effective_overflow(cfg);
    BoundedQueue<ArchiveItem> archive_q(cfg.archive_queue_capacity);
    BoundedQueue<PublishItem> publish_q(std::max<std::size_t>(cfg.slow_channels.size() * 4, 1024));
    std::vector<std::vector<archive::GapMarker>> gaps(keys.size());
    std::atomic<std::int64_t> total_gaps{0};

    // Archive writer.
    std::mutex error_mutex;
    std::string first_error;
    std::atomic<bool> storage_failed{false};
    std::int64_t archived_records = 0;
    std::int64_t archived_bytes = 0;
    std::thread writer([&] {
        while (auto item = archive_q.pop()) {
            if (storage_failed.load()) continue;
            try {
                if (item->spectral) {
                    arch.write_spectral(spectral_base.at(item->key), item->frames, metas[item->key]);
                    archived_records += 2 * static_cast<std::int64_t>(item->frames.size());
                } else {
                    arch.append(keys[item->key], item->records, metas[item->key]);
                    archived_records += static_cast<std::int64_t>(item->records.size());
                }
            } catch (const Error& e) {
                std::lock_guard lk(error_mutex);
                if (first_error.empty()) first_error = e.what();
                storage_failed = true;
            }
        }
        archived_bytes = archived_records * static_cast<std::int64_t>(archive::kRecordBytes);
    });

    std::thread pump([&] {
        while (auto item = publish_q.pop()) publisher.publish(item->id, item->value);
    });

    auto enqueue = [&](ChannelId id, ArchiveItem item, bool never_drop) {
        if (never_drop) {
            archive_q.push_force(std::move(item));
            return;
        }
        if (policy == OverflowPolicy::Block) {
            archive_q.push(std::move(item));
            return;
        }
        const std::size_t key = item.key;
        const bool spectral = item.spectral;
        archive::GapMarker marker;
        if (spectral) {
            marker = {item.frames.front().time_index, item.frames.back().time_index,
                      static_cast<std::int64_t>(item.frames.size())};
        } else {
            marker = {item.records.front().time_index, item.records.back().time_index,
                      static_cast<std::int64_t>(item.records.size())};
        }
        if (archive_q.try_push(std::move(item))) return;
        gaps[key].push_back(marker);
        if (spectral) gaps[key + 1].push_back(marker);
        ++handle.gap_count[id];
        handle.gap_samples[id] += marker.count;
        ++total_gaps;
    };

    const Clock::time_point t0 = Clock::now();
    const bool realtime = cfg.realtime;
    const std::int64_t n_fast = cfg.fast_channels.empty() ? 0 : fast_sample_count(cfg);
    const std::int64_t n_slow = cfg.slow_channels.empty() && !cfg.status_channel ? 0 : slow_scan_count(cfg);
    double fast_wall = 0.0;

    std::thread fast([&] {
        const auto start = Clock::now();
        const std::size_t n = kernel.channel_count();
        std::vector<FastChannelState> states(n);
        std::vector<std::vector<Sample>> out(n);
        const auto block = static_cast<std::int64_t>(cfg.block_samples);
        std::int64_t produced = 0;
        for (std::int64_t k0 = 0; k0 < n_fast && !stopping(); k0 += block) {
            const std::int64_t k1 = std::min(n_fast, k0 + block);
            auto triggers = cfg.parallel ? kernel.run_parallel(k0, k1, states, out)
                                         : kernel.run_serial(k0, k1, states, out);
            handle.detector_samples += (k1 - k0) * static_cast<std::int64_t>(n);
            for (std::size_t c = 0; c < n; ++c) {
                const ChannelId id = kernel.channel(c).id;
                handle.generated[id] += k1 - k0;
                enqueue(id, ArchiveItem{key_of[id], std::move(out[c]), {}, false}, false);
                out[c] = {};
            }
            for (const auto& trig : triggers) {
                handle.triggers.push_back(trig);
                if (cfg.trigger_channel) {
                    const Sample rec{trig.trigger_time_s, trig.compensated_volts_at_trigger, 1.0};
                    enqueue(*cfg.trigger_channel, ArchiveItem{key_of[*cfg.trigger_channel], {rec}, {}, false}, true);
                    publish_q.push_force({*cfg.trigger_channel, rec});
                }
            }
            produced = k1;
            if (realtime) std::this_thread::sleep_until(deadline(t0, session_clock(k1, cfg.fast_rate_hz)));
        }
        for (std::size_t c = 0; c < n; ++c)
            if (states[c].faulted) handle.faulted_channels[kernel.channel(c).id] = true;
        handle.fast_samples = produced * static_cast<std::int64_t>(n);
        fast_wall = std::chrono::duration<double>(Clock::now() - start).count();
    });

    std::thread slow([&] {
        for (std::int64_t k = 0; k < n_slow; ++k) {
            const double t = static_cast<double>(k) * cfg.slow_period_s;
            if (realtime) {
                // Sleep in short slices so an interrupt is noticed promptly.
                const auto due = deadline(t0, t);
                while (!stopping() && Clock::now() < due)
                    std::this_thread::sleep_until(std::min(due, Clock::now() + std::chrono::milliseconds(50)));
            }
            if (stopping()) break;
            for (const auto& sc : cfg.slow_channels) {
                const auto& d = registry.at(sc.id);
                ++handle.generated[sc.id];
                if (sc.source == SlowSource::Spectrum) {
                    enqueue(sc.id, ArchiveItem{key_of[sc.id], {}, simsrc::spectrum_at(sc.spectrum, t), true}, false);
                    continue;
                }
                double raw = 0.0;
                switch (sc.source) {
                case SlowSource::Cooldown:
                    raw = uncalibrate(d.calibration, simsrc::cooldown_at(facility.cooldown, t));
                    break;
                case SlowSource::Pressure:
                    raw = simsrc::slow_channel_at(simsrc::SlowKind::Pressure, sc.params, t);
                    break;
                case SlowSource::FlowRate:
                    raw = simsrc::slow_channel_at(simsrc::SlowKind::FlowRate, sc.params, t);
                    break;
                case SlowSource::Field: raw = simsrc::field_at(facility.field, t); break;
                case SlowSource::Current: raw = simsrc::current_at(facility.current, t); break;
                case SlowSource::Constant: raw = sc.constant; break;
                case SlowSource::Spectrum: break;
                }
                const Sample s{t, raw, calibrate(d.calibration, raw)};
                enqueue(sc.id, ArchiveItem{key_of[sc.id], {s}, {}, false}, false);
                publish_q.push({sc.id, s});
            }
            if (cfg.status_channel)
                publish_q.push({*cfg.status_channel,
                                {t, status_code(SessionHandle::Status::Running), static_cast<double>(total_gaps.load())}});
        }
    });

    fast.join();
    slow.join();
    archive_q.close();
    writer.join();

    handle.fast_wall_s = fast_wall;
    handle.archived_records = archived_records;
    handle.archived_bytes = archived_bytes;

    if (!storage_failed) {
        try {
            for (std::size_t i = 0; i < keys.size(); ++i) {
                if (gaps[i].empty()) continue;
                if (!arch.exists(keys[i])) arch.append(keys[i], {}, metas[i]);
                arch.add_gaps(keys[i], gaps[i]);
            }
        } catch (const Error& e) {
            first_error = e.what();
            storage_failed = true;
        }
    }

    handle.interrupted = stopping();
    handle.status = storage_failed ? SessionHandle::Status::Faulted : SessionHandle::Status::Completed;
    handle.error = first_error;

    if (cfg.status_channel)
        publish_q.push({*cfg.status_channel,
                        {cfg.duration_s, status_code(handle.status), static_cast<double>(handle.total_gaps())}});
    publish_q.close();
    pump.join();

    if (!storage_failed) {
        std::ostringstream out;
        out << "session_id=" << handle.session_id << '\n'
            << "session_start_utc=" << cfg.session_start_utc << '\n'
            << "status=" << status_code_name(handle.status) << '\n'
            << "duration_s=" << textfmt::format_value(cfg.duration_s) << '\n'
            << "fast_rate_hz=" << textfmt::format_value(cfg.fast_rate_hz) << '\n'
            << "slow_period_s=" << textfmt::format_value(cfg.slow_period_s) << '\n'
            << "fast_channels=" << cfg.fast_channels.size() << '\n'
            << "slow_channels=" << cfg.slow_channels.size() << '\n'
            << "fast_samples=" << handle.fast_samples << '\n'
            << "archived_records=" << handle.archived_records << '\n'
            << "gaps=" << handle.total_gaps() << '\n';
        for (const auto& t : handle.triggers)
            out << "trigger=" << registry.at(t.channel).full_name() << ' ' << textfmt::format_value(t.trigger_time_s)
                << ' ' << textfmt::format_value(t.compensated_volts_at_trigger) << '\n';
        std::error_code ec;
        fs::create_directories(session_file.parent_path(), ec);
        std::ofstream f(session_file, std::ios::binary);
        f << out.str();
        if (!f) {
            handle.status = SessionHandle::Status::Faulted;
            handle.error = "cannot write " + session_file.string();
        }
    }
    handle.total_wall_s = std::chrono::duration<double>(Clock::now() - wall_start).count();
    return handle;
}

}  // namespace cryodaq::acquire
