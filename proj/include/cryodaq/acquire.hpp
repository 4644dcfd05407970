#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cryodaq/archive.hpp"
#include "cryodaq/fast_kernel.hpp"
#include "cryodaq/live_table.hpp"
#include "cryodaq/quench.hpp"
#include "cryodaq/registry.hpp"
#include "cryodaq/simsrc.hpp"

namespace cryodaq::acquire {

enum class TimeMode { Realtime, FasterThanRealtime };

/// What happens when the archive queue is full. Gap records a gap marker in
/// the sidecar and carries on; Block waits for the writer.
enum class OverflowPolicy { Gap, Block };

enum class SlowSource { Cooldown, Pressure, FlowRate, Field, Current, Constant, Spectrum };

struct SlowChannelSpec {
    ChannelId id = 0;
    SlowSource source = SlowSource::Constant;
    simsrc::SlowChannelParams params;  // Pressure / FlowRate
    double constant = 0.0;             // Constant
    simsrc::SpectrumParams spectrum;   // Spectrum
};

/// Facility-wide signal models shared by the sources.
struct FacilityModel {
    simsrc::CurrentRamp current;
    simsrc::FieldRampProfile field = simsrc::FieldRampProfile::slow_ramp();
    simsrc::CooldownProfile cooldown;
};

struct AcquisitionConfig {
    double fast_rate_hz = 100000.0;
    std::vector<FastChannelSpec> fast_channels;
    double slow_period_s = 1.0;
    std::vector<SlowChannelSpec> slow_channels;
    std::string session_start_utc = "1970-01-01T00:00:00Z";
    double duration_s = 1.0;
    /// Capacity in batches; a fast batch is one block of one channel.
    std::size_t archive_queue_capacity = 256;
    std::size_t block_samples = 1000;
    bool realtime = false;
    /// Defaults to Block when running faster than real time and Gap when
    /// running against the wall clock.
    std::optional<OverflowPolicy> overflow;
    bool parallel = true;

    /// Channel receiving trigger records (DEVICE.QUENCH_TRIG); optional.
    std::optional<ChannelId> trigger_channel;
    /// Pseudo-channel published with (time, status code, total gaps); optional.
    std::optional<ChannelId> status_channel;
};

TimeMode simulated_time_mode(const AcquisitionConfig& cfg) noexcept;
OverflowPolicy effective_overflow(const AcquisitionConfig& cfg) noexcept;

/// floor(duration * rate) + 1; the sample at t = duration is included.
std::int64_t fast_sample_count(const AcquisitionConfig& cfg) noexcept;
/// floor(duration / period) + 1.
std::int64_t slow_scan_count(const AcquisitionConfig& cfg) noexcept;

/// "2026-10-18T12:34:56Z" -> "2026-10-18". Throws Error(InvalidConfig).
std::string session_date(const std::string& session_start_utc);
/// "2026-10-18T12:34:56Z" -> "20261018T123456Z".
std::string session_id_for(const std::string& session_start_utc);

/// Throws Error(InvalidConfig) naming the violated rule.
void validate(const AcquisitionConfig& cfg, const Registry& registry);

struct SessionHandle {
    enum class Status { Running, Completed, Faulted };

    std::string session_id;
    Status status = Status::Running;
    std::string error;
    bool interrupted = false;

    /// Indexed by ChannelId.
    std::vector<std::int64_t> gap_count;
    std::vector<std::int64_t> gap_samples;
    std::vector<std::int64_t> generated;
    std::vector<bool> faulted_channels;

    std::vector<quench::QuenchTrigger> triggers;
    std::int64_t fast_samples = 0;
    std::int64_t detector_samples = 0;
    std::int64_t archived_records = 0;
    std::int64_t archived_bytes = 0;

    double fast_wall_s = 0.0;
    double total_wall_s = 0.0;

    std::int64_t total_gaps() const;
};

std::string_view to_string(SessionHandle::Status status) noexcept;

/// Runs one acquisition session to completion: a fast producer (kernel ->
/// detector -> archive queue), a slow producer (scan -> archive queue and
/// publisher), one archive writer and one publish pump. Returns once the
/// archive is flushed. Writes <root>/sessions/<id>.session on completion.
///
/// Throws Error(InvalidConfig) for a bad config and Error(StorageError)
/// when the archive already holds data for one of the session's keys.
/// Archive failures during the run end in status Faulted with `error` set.
///
/// Setting `*stop` ends both producers at their next block or scan; the
/// handle then reports `interrupted`.
SessionHandle run_session(const AcquisitionConfig& cfg, const Registry& registry, const FacilityModel& facility,
                          const quench::DetectorConfig& detector, archive::Archive& archive, Publisher& publisher,
                          const std::atomic<bool>* stop = nullptr);

}  // namespace cryodaq::acquire
