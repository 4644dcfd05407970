#include "cryodaq/benchrun.hpp"

#include <cstdio>

#include "cryodaq/archive.hpp"
#include "cryodaq/error.hpp"
#include "cryodaq/live_table.hpp"

namespace cryodaq::bench {

std::string BenchResult::summary_line() const {
    char buf[160];
    std::snprintf(buf, sizeof buf, "bench: gen=%.1f det=%.1f arch=%.2f gaps=%lld", gen_samples_per_s,
                  det_samples_per_s, archive_mb_per_s, static_cast<long long>(gaps));
    return buf;
}

BenchResult run_bench(const BenchOptions& o) {
    if (o.channels < 1) throw Error(Errc::InvalidConfig, "bench needs at least one channel");
    Registry registry;
    acquire::AcquisitionConfig acq;
    acq.fast_rate_hz = o.rate_hz;
    acq.duration_s = o.duration_s;
    acq.session_start_utc = o.session_start_utc;
    acq.archive_queue_capacity = o.queue_capacity;
    acq.block_samples = o.block_samples;
    acq.overflow = o.overflow;
    acq.parallel = o.parallel;

    for (int c = 0; c < o.channels; ++c) {
        char data[16];
        std::snprintf(data, sizeof data, "VT%02d", c);
        ChannelDescriptor d;
        d.device_name = "BENCH";
        d.data_name = data;
        d.kind = ChannelKind::Fast;
        d.units_raw = "V";
        d.units_cal = "V";
        d.conditioning = condition::AmplifierConfig{1.0, 1.0, 10.0, 20000.0};
        const ChannelId id = registry.register_channel(d);
        acquire::FastChannelSpec spec;
        spec.id = id;
        spec.scenario.noise_amp_V = 0.01;
        spec.scenario.seed = simsrc::channel_seed(o.seed, id);
        acq.fast_channels.push_back(spec);
    }
    ChannelDescriptor trig;
    trig.device_name = "BENCH";
    trig.data_name = "QUENCH_TRIG";
    acq.trigger_channel = registry.register_channel(trig);

    acquire::FacilityModel facility;
    quench::DetectorConfig detector;
    archive::Archive arch(o.archive_root);
    NullPublisher publisher;

    BenchResult r;
    r.session = acquire::run_session(acq, registry, facility, detector, arch, publisher);
    const auto& s = r.session;
    if (s.fast_wall_s > 0.0) {
        r.gen_samples_per_s = static_cast<double>(s.fast_samples) / s.fast_wall_s;
        r.det_samples_per_s = static_cast<double>(s.detector_samples) / s.fast_wall_s;
    }
    if (s.total_wall_s > 0.0) r.archive_mb_per_s = static_cast<double>(s.archived_bytes) / 1e6 / s.total_wall_s;
    r.gaps = s.total_gaps();
    return r;
}

}  // namespace cryodaq::bench
