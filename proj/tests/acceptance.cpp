// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <sys/stat.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <mutex>
#include <regex>
#include <sstream>
#include <algorithm>
#include <thread>

#include "cryodaq/acquire.hpp"
#include "cryodaq/archive.hpp"
#include "cryodaq/client.hpp"
#include "cryodaq/error.hpp"
#include "cryodaq/fast_kernel.hpp"
#include "cryodaq/live_table.hpp"
#include "cryodaq/netproto.hpp"
#include "cryodaq/quench.hpp"
#include "cryodaq/server.hpp"
#include "cryodaq/simsrc.hpp"
#include "support.hpp"

using namespace cryodaq;
using testsupport::Rng;
using Clock = std::chrono::steady_clock;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Brute-force counter: first index where `hold` consecutive samples exceed
// the threshold.
std::optional<std::int64_t> counter_oracle(const std::vector<double>& v, double threshold, std::int64_t hold) {
    for (std::int64_t i = hold - 1; i < static_cast<std::int64_t>(v.size()); ++i) {
        bool all = true;
        for (std::int64_t j = i - hold + 1; j <= i && all; ++j) all = v[j] > threshold;
        if (all) return i;
    }
    return std::nullopt;
}

// --- 1 -------------------------------------------------------------------

Outcome fast_path() {
    const auto t0 = Clock::now();
    const auto r = testsupport::run_process({BENCH_BIN, "--channels", "64", "--rate", "100000", "--duration", "1"});
    const double wall = seconds_since(t0);
    std::smatch m;
    const std::regex counts(R"(samples=(\d+) detector=(\d+))");
    const std::regex summary(R"(bench: gen=\S+ det=\S+ arch=\S+ gaps=(\d+))");
    std::smatch s;
    if (r.exit_code != 0 || !std::regex_search(r.out, m, counts) || !std::regex_search(r.out, s, summary))
        return {false, "bench failed: exit " + std::to_string(r.exit_code) + " " + r.err};
    const long gen = std::stol(m[1]), det = std::stol(m[2]), gaps = std::stol(s[1]);
    const bool ok = gen == 6400064 && det == 6400064 && gaps == 0 && wall <= 60.0;
    return {ok, fmt("generated=%ld detected=%ld gaps=%ld wall=%.2fs (limit 60s)", gen, det, gaps, wall)};
}

// --- 2 -------------------------------------------------------------------

Outcome archive_ingest() {
    testsupport::TempDir dir("ingest");
    archive::Archive arch(dir.path());
    const int streams = 32;
    const double record_rate = 105000.0;  // 2.52 MB/s per stream
    const double duration = 10.0;
    std::vector<archive::ArchiveKey> keys;
    for (int s = 0; s < streams; ++s) keys.push_back({"2026-10-18", "INGEST", "S" + std::to_string(s)});

    std::atomic<bool> done{false};
    std::atomic<long> torn{0}, checks{0}, raw_midwrite{0}, bad_payload{0};
    // committed length of every stream, polled continuously
    std::thread checker([&] {
        while (!done.load()) {
            for (const auto& k : keys) {
                std::error_code ec;
                if (!fs::exists(arch.data_path(k), ec)) continue;
                if (arch.committed_bytes(k) % archive::kRecordBytes != 0) ++torn;
                struct stat st {};
                if (::stat(arch.data_path(k).c_str(), &st) == 0 && st.st_size % 24 != 0) ++raw_midwrite;
                ++checks;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(2));
        }
    });
    // a reader following one stream checks every record it sees
    std::thread follower([&] {
        double last = -INFINITY;
        while (!done.load()) {
            std::error_code ec;
            if (fs::exists(arch.data_path(keys[0]), ec)) {
                for (const auto& r : arch.tail(keys[0], last)) {
                    if (r.raw != r.time_index * 3.0 || r.calibrated != -r.time_index || !(r.time_index > last))
                        ++bad_payload;
                    last = r.time_index;
                }
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
        }
    });

    const auto t0 = Clock::now();
    std::int64_t written = 0;  // records per stream
    std::vector<Sample> batch;
    while (true) {
        const double el = seconds_since(t0);
        if (el >= duration) break;
        const auto due = static_cast<std::int64_t>(std::min(el + 0.01, duration) * record_rate);
        if (due > written) {
            for (int s = 0; s < streams; ++s) {
                batch.clear();
                for (std::int64_t k = written; k < due; ++k) {
                    const double t = static_cast<double>(k) / record_rate;
                    batch.push_back({t, t * 3.0, -t});
                }
                arch.append(keys[s], batch);
            }
            written = due;
        }
        std::this_thread::sleep_until(t0 + std::chrono::duration<double>(static_cast<double>(written) / record_rate));
    }
    const double elapsed = seconds_since(t0);
    done = true;
    checker.join();
    follower.join();

    bool sizes_ok = true;
    for (const auto& k : keys) sizes_ok = sizes_ok && fs::file_size(arch.data_path(k)) == static_cast<std::uintmax_t>(written) * 24u;
    const auto all = arch.read_all(keys[streams - 1]);
    for (std::size_t i = 0; i < all.size(); ++i)
        if (all[i].time_index != static_cast<double>(i) / record_rate || all[i].raw != all[i].time_index * 3.0)
            ++bad_payload;
    const double per_stream = static_cast<double>(written) * 24.0 / elapsed / 1e6;
    const double aggregate = per_stream * streams;
    const bool ok = per_stream >= 2.4 && aggregate >= 50.0 && elapsed >= 10.0 && torn == 0 && bad_payload == 0 &&
                    sizes_ok && checks > 0;
    return {ok, fmt("%d streams %.1fs: %.2f MB/s each, %.1f MB/s aggregate, %ld length checks, torn=%ld, "
                    "bad records=%ld (raw stat mid-write observations: %ld)",
                    streams, elapsed, per_stream, aggregate, checks.load(), torn.load(), bad_payload.load(),
                    raw_midwrite.load())};
}

// --- 3 -------------------------------------------------------------------

Outcome latency_law() {
    Rng rng(3003);
    const double rate = 100000.0;
    const quench::DetectorConfig cfg{0.1, 0.002, 0.0};
    const auto hold = quench::hold_samples(cfg, rate);
    long disagreements = 0, clean = 0, noisy = 0, noisy_triggers = 0;
    for (int sc = 0; sc < 1000; ++sc) {
        // clean step
        const auto onset = testsupport::uniform_int(rng, 0, 5000);
        const double level = cfg.threshold_volts * testsupport::uniform(rng, 1.0 + 1e-9, 100.0);
        std::vector<double> v(static_cast<std::size_t>(onset + hold + testsupport::uniform_int(rng, 0, 500)), 0.0);
        for (std::size_t k = static_cast<std::size_t>(onset); k < v.size(); ++k) v[k] = level;
        quench::DetectorState st;
        std::optional<quench::QuenchTrigger> got;
        for (std::size_t k = 0; k < v.size() && !got; ++k)
            got = quench::detect_step(cfg, hold, st, 0, {acquire::session_clock(k, rate), v[k], v[k]}, 0.0);
        if (!got || got->sample_index != onset + 199 || got->sample_index != counter_oracle(v, cfg.threshold_volts, hold))
            ++disagreements;
        ++clean;

        // noisy tap through the full fast kernel
        acquire::FastChannelSpec spec;
        spec.scenario.noise_amp_V = testsupport::uniform(rng, 0.01, 0.3);
        spec.scenario.seed = rng();
        spec.scenario.onset_time_s = testsupport::uniform(rng, 0.0, 0.02);
        spec.scenario.resistive_slope_V_per_s = testsupport::uniform(rng, 1.0, 200.0);
        acquire::FastKernelParams params;
        params.rate_hz = rate;
        params.detector = cfg;
        const acquire::FastKernel kernel(params, {spec});
        std::vector<acquire::FastChannelState> states(1);
        std::vector<std::vector<Sample>> out(1);
        const auto n = testsupport::uniform_int(rng, 1000, 4000);
        const auto trig = kernel.run_parallel(0, n, states, out);
        std::vector<double> raw;
        for (const auto& s : out[0]) raw.push_back(s.raw);
        const auto want = counter_oracle(raw, cfg.threshold_volts, hold);
        const bool agree = want.has_value() == !trig.empty() && (!want || trig[0].sample_index == *want);
        if (!agree) ++disagreements;
        noisy_triggers += !trig.empty();
        ++noisy;
    }
    return {disagreements == 0,
            fmt("hold=%lld samples; %ld clean steps (trigger = onset + 199), %ld noisy kernel streams (%ld triggered); "
                "disagreements=%ld",
                static_cast<long long>(hold), clean, noisy, noisy_triggers, disagreements)};
}

// --- 4 -------------------------------------------------------------------

Outcome no_false_positive() {
    const double rate = 100000.0;
    const quench::DetectorConfig cfg{0.1, 0.002, 0.0};
    std::vector<acquire::FastChannelSpec> specs;
    for (int c = 0; c < 64; ++c) {
        acquire::FastChannelSpec s;
        s.id = static_cast<ChannelId>(c);
        s.scenario.noise_amp_V = cfg.threshold_volts / 2;
        s.scenario.seed = simsrc::channel_seed(4004, s.id);
        specs.push_back(s);
    }
    acquire::FastKernelParams params;
    params.rate_hz = rate;
    params.detector = cfg;
    const acquire::FastKernel kernel(params, specs);
    std::vector<acquire::FastChannelState> states(64);
    std::vector<std::vector<Sample>> out(64);
    const std::int64_t n = 10 * 100000 + 1;
    long triggers = 0;
    double peak = 0.0;
    std::int64_t samples = 0;
    for (std::int64_t k = 0; k < n; k += 10000) {
        const auto k1 = std::min(n, k + 10000);
        triggers += static_cast<long>(kernel.run_parallel(k, k1, states, out).size());
        for (const auto& ch : out)
            for (const auto& s : ch) peak = std::max(peak, std::abs(s.raw));
        samples += (k1 - k) * 64;
    }
    return {triggers == 0 && peak <= cfg.threshold_volts / 2,
            fmt("64 channels x 10 s at 100 kHz = %lld samples, peak |V| = %.6f V, triggers=%ld",
                static_cast<long long>(samples), peak, triggers)};
}

// --- 5 -------------------------------------------------------------------

Outcome energy() {
    Rng rng(5005);
    double lo = 2.0, hi = 0.0;
    int bad = 0;
    for (int i = 0; i < 100; ++i) {
        quench::DumpModel m{testsupport::uniform(rng, 0.01, 20.0), testsupport::uniform(rng, 0.001, 10.0),
                            i == 0 ? 50000.0 : testsupport::uniform(rng, 0.0, 50000.0)};
        if (i == 1) m.initial_current_A = 50000.0, m.inductance_H = 2.0, m.dump_resistance_ohm = 0.1;
        if (m.initial_current_A == 0.0) m.initial_current_A = 1.0;
        const double ratio = quench::dissipated_energy(m, 10 * m.tau(), m.tau() / 1000) / quench::stored_energy(m);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        if (!(ratio >= 0.999 && ratio <= 1.0)) ++bad;
    }
    return {bad == 0, fmt("100 (L, R, I0) triples incl. I0 = 50 kA: ratio in [%.12f, %.12f]", lo, hi)};
}

// --- 6 -------------------------------------------------------------------

Outcome round_trips() {
    testsupport::TempDir dir("rt");
    archive::Archive arch(dir.path());
    Rng rng(6006);
    const archive::ArchiveKey key{"2026-10-18", "RT", "BULK"};
    std::vector<Sample> all;
    double t = 0.0;
    while (all.size() < 1000000) {
        auto batch = testsupport::random_records(rng, 10000, t);
        t = batch.back().time_index;
        arch.append(key, batch);
        all.insert(all.end(), batch.begin(), batch.end());
    }
    const bool a = testsupport::bit_equal(arch.query(key, -INFINITY, INFINITY), all) &&
                   testsupport::bit_equal(arch.read_all(key), all);
    const std::string bin = arch.export_records(key, {}, archive::ExportFormat::Binary);
    const std::string text = arch.export_records(key, {}, archive::ExportFormat::Text);
    const bool b = archive::render_binary(archive::parse_text(text)) == bin &&
                   bin == testsupport::read_file(arch.data_path(key));
    const archive::ArchiveKey one{"2026-10-18", "RT", "ONE"};
    const Sample rec{1.0, 2.0, 2.0};
    arch.append(one, std::span(&rec, 1));
    const auto hex = testsupport::hex(testsupport::read_file(arch.data_path(one)));
    const bool c = hex == "000000000000F03F00000000000000400000000000000040";
    return {a && b && c, fmt("(a) 10^6 records bit-identical: %s; (b) text->parse->binary identical: %s; (c) bytes %s",
                             a ? "yes" : "no", b ? "yes" : "no", hex.c_str())};
}

// --- 7 -------------------------------------------------------------------

Outcome query_correctness() {
    Rng rng(7007);
    testsupport::TempDir dir("query");
    archive::Archive arch(dir.path());
    long queries = 0, mismatches = 0, boundary = 0, empty_files = 0;
    for (int f = 0; f < 200; ++f) {
        const archive::ArchiveKey key{"2026-10-18", "Q", "F" + std::to_string(f)};
        const auto n = f == 0 ? 0 : testsupport::uniform_int(rng, 0, 10000);
        const auto recs = testsupport::random_records(rng, static_cast<std::size_t>(n));
        arch.append(key, recs);
        empty_files += n == 0;
        auto check = [&](double lo, double hi) {
            std::vector<Sample> want;
            for (const auto& r : recs)
                if (lo <= r.time_index && r.time_index <= hi) want.push_back(r);
            if (!testsupport::bit_equal(arch.query(key, lo, hi), want)) ++mismatches;
            ++queries;
        };
        const double end = recs.empty() ? 1.0 : recs.back().time_index;
        for (int q = 0; q < 20; ++q) check(testsupport::uniform(rng, -1.0, end + 1), testsupport::uniform(rng, -1.0, end + 1));
        if (!recs.empty()) {
            const auto pick = [&] { return recs[testsupport::uniform_int(rng, 0, n - 1)].time_index; };
            for (int q = 0; q < 10; ++q) {
                const double a = pick(), b = pick();
                check(std::min(a, b), std::max(a, b));  // both ends on stored times
                check(a, a);                            // single point (and duplicates)
                check(std::nextafter(a, -INFINITY), std::nextafter(a, INFINITY));
                check(std::nextafter(a, INFINITY), std::max(a, b));  // exclusive of a by one ulp
                boundary += 4;
            }
            check(recs.front().time_index, recs.back().time_index);
            check(-INFINITY, recs.front().time_index);
            check(recs.back().time_index, INFINITY);
            check(end + 1, end + 2);
            check(-2.0, -1.0);
            boundary += 5;
        }
    }
    return {mismatches == 0, fmt("200 files (%ld empty, up to 10^4 records), %ld queries incl. %ld boundary cases, "
                                 "mismatches=%ld",
                                 empty_files, queries, boundary, mismatches)};
}

// --- 8 -------------------------------------------------------------------

Outcome protocol() {
    Registry reg;
    for (int i = 0; i < 8; ++i) {
        ChannelDescriptor d;
        d.device_name = "DEV";
        d.data_name = "CH" + std::to_string(i);
        d.writable = i == 7;
        reg.register_channel(d);
    }
    LiveTable table(reg);
    net::Server server(table);
    server.start();
    Rng rng(8008);
    long get_mismatch = 0;
    {
        net::Client c("127.0.0.1", server.port());
        double t = 0.0;
        for (int i = 0; i < 10000; ++i) {
            const auto id = static_cast<ChannelId>(testsupport::uniform_int(rng, 0, 7));
            t += testsupport::uniform(rng, 1e-6, 1.0);
            const Sample v{t, testsupport::any_finite(rng), testsupport::any_finite(rng)};
            if (id == 7 && i % 2 == 0) c.put(table.name(id), v);
            else server.publish(id, v);
            if (!testsupport::bit_equal(c.get(table.name(id)).value, table.read(id))) ++get_mismatch;
        }
    }
    // subscription ordering with duplicate and out-of-order publishes mixed in
    long order_violations = 0, foreign = 0;
    std::size_t received = 0, accepted = 0, dropped = 0;
    {
        net::Client c("127.0.0.1", server.port());
        std::mutex m;
        std::vector<double> times;
        c.subscribe("DEV.CH0", {[&](const net::WireValue& v) {
                                    std::lock_guard lk(m);
                                    times.push_back(v.value.time_index);
                                },
                                {}});
        double last = table.read(0).time_index;
        std::vector<double> sent;
        for (int i = 0; i < 10000; ++i) {
            if (i % 64 == 0) std::this_thread::sleep_for(std::chrono::microseconds(200));
            double t = last + testsupport::uniform(rng, 1e-3, 1.0);
            const int kind = static_cast<int>(testsupport::uniform_int(rng, 0, 9));
            if (kind == 0) t = last;                 // duplicate
            if (kind == 1) t = last - 0.5;           // regression
            if (t > last) {
                ++accepted;
                last = t;
                sent.push_back(t);
            }
            server.publish(0, {t, 0.0, 0.0});
        }
        c.get("DEV.CH0");
        dropped = static_cast<std::size_t>(c.get(std::string(net::kStatsChannel)).value.raw);
        std::lock_guard lk(m);
        received = times.size();
        for (double t : times)
            if (!std::binary_search(sent.begin(), sent.end(), t)) ++foreign;
        for (std::size_t i = 1; i < times.size(); ++i)
            if (!(times[i] > times[i - 1])) ++order_violations;
    }
    server.stop();
    // frame codec over all opcodes
    long codec_fail = 0;
    const net::Opcode ops[] = {net::Opcode::Hello, net::Opcode::Get,         net::Opcode::Put,   net::Opcode::Subscribe,
                               net::Opcode::Event, net::Opcode::Unsubscribe, net::Opcode::Error, net::Opcode::Value};
    for (int i = 0; i < 8000; ++i) {
        net::Frame f{ops[i % 8], {}};
        f.payload.resize(static_cast<std::size_t>(testsupport::uniform_int(rng, 0, 512)));
        for (auto& b : f.payload) b = static_cast<std::uint8_t>(rng());
        net::FrameDecoder d;
        d.feed(net::encode_frame(f));
        const auto back = d.next();
        if (!back || !(*back == f) || d.buffered() != 0) ++codec_fail;
    }
    const bool ok = get_mismatch == 0 && order_violations == 0 && received + dropped == accepted && foreign == 0 && codec_fail == 0;
    return {ok, fmt("10^4 get/put updates: mismatches=%ld; subscription %zu delivered + %zu dropped of %zu "
                    "accepted, order violations=%ld, unknown=%ld; codec failures=%ld over 8 opcodes",
                    get_mismatch, received, dropped, accepted, order_violations, foreign, codec_fail)};
}

// --- 9 -------------------------------------------------------------------

Outcome calibration() {
    Rng rng(9009);
    long worst_points = 0, identity_bad = 0, clamp_points = 0;
    double worst = 0.0;
    for (int tcase = 0; tcase < 100; ++tcase) {
        std::vector<CalibrationTable::Breakpoint> pts;
        double r = testsupport::uniform(rng, -10.0, 10.0), p = testsupport::uniform(rng, -500.0, 500.0);
        for (auto i = testsupport::uniform_int(rng, 2, 30); i > 0; --i) {
            pts.push_back({r, p});
            r += testsupport::uniform(rng, 1e-3, 5.0);
            p += testsupport::uniform(rng, -100.0, 100.0);
        }
        const auto table = CalibrationTable::piecewise(pts);
        double scale = 1.0;
        for (const auto& b : pts) scale = std::max(scale, std::abs(b.physical));
        const double lo = pts.front().raw, hi = pts.back().raw, span = hi - lo;
        for (int i = 0; i < 1000; ++i) {
            const double x = testsupport::uniform(rng, lo - 0.25 * span, hi + 0.25 * span);
            double want;
            if (x <= lo) want = pts.front().physical, ++clamp_points;
            else if (x >= hi) want = pts.back().physical, ++clamp_points;
            else {
                want = NAN;
                for (std::size_t s = 0; s + 1 < pts.size(); ++s)
                    if (pts[s].raw <= x && x <= pts[s + 1].raw) {
                        want = pts[s].physical +
                               (pts[s + 1].physical - pts[s].physical) / (pts[s + 1].raw - pts[s].raw) * (x - pts[s].raw);
                        break;
                    }
            }
            const double err = std::abs(calibrate(table, x) - want) / scale;
            worst = std::max(worst, err);
            if (!(err <= 1e-12)) ++worst_points;
        }
    }
    for (int i = 0; i < 100000; ++i) {
        const double x = testsupport::any_finite(rng);
        if (!testsupport::bit_equal(calibrate(CalibrationTable::identity(), x), x)) ++identity_bad;
    }
    return {worst_points == 0 && identity_bad == 0,
            fmt("100 tables x 1000 points (%ld in clamp regions): max rel err %.3g, failures=%ld; identity "
                "bit-exact failures=%ld",
                clamp_points, worst, worst_points, identity_bad)};
}

// --- 10 ------------------------------------------------------------------

Outcome field_profiles() {
    const auto slow = simsrc::FieldRampProfile::slow_ramp();
    const auto fast = simsrc::FieldRampProfile::fast_ramp();
    const double b_slow = simsrc::field_at(slow, 5.0), b_fast = simsrc::field_at(fast, 0.05);
    bool flat = true;
    for (double s : {0.0, 1e-9, 0.5, 1.0, 100.0, 1e6}) {
        flat = flat && simsrc::field_at(slow, 5.0 + s) == 15.0;
        flat = flat && simsrc::field_at(fast, 0.05 + s) == 1.0;
    }
    const bool ok = b_slow == 15.0 && b_fast == 1.0 && flat;
    return {ok, fmt("SlowRamp(5.0) = %.17g T, FastRamp(0.05) = %.17g T, constant after ramp end: %s", b_slow, b_fast,
                    flat ? "yes" : "no")};
}

// --- 11 ------------------------------------------------------------------

Outcome determinism() {
    testsupport::TempDir a("det"), b("det");
    const auto r1 = testsupport::run_process({DAQD_BIN, GOLDEN_CONFIG, "--root", a.path().string()});
    const auto r2 = testsupport::run_process({DAQD_BIN, GOLDEN_CONFIG, "--root", b.path().string()});
    if (r1.exit_code != 0 || r2.exit_code != 0) return {false, "daqd failed: " + r1.err + r2.err};
    const auto h1 = testsupport::hash_tree(a.path()), h2 = testsupport::hash_tree(b.path());
    const auto files = testsupport::snapshot_tree(a.path()).size();
    return {h1 == h2, fmt("two daqd runs of the golden config: %zu files, tree hashes %016llx / %016llx", files,
                          static_cast<unsigned long long>(h1), static_cast<unsigned long long>(h2))};
}

// --- 12 ------------------------------------------------------------------

Outcome registry_scale() {
    Registry reg;
    acquire::AcquisitionConfig cfg;
    cfg.slow_period_s = 1.0;
    cfg.duration_s = 10.0;
    cfg.session_start_utc = "2026-10-18T00:00:00Z";
    for (int i = 0; i < 5000; ++i) {
        ChannelDescriptor d;
        d.device_name = "RACK" + std::to_string(i / 100);
        d.data_name = "PT" + std::to_string(i);
        d.kind = ChannelKind::Slow;
        d.units_raw = "V";
        d.units_cal = "bar";
        if (i % 2) d.calibration = CalibrationTable::piecewise({{0.0, 0.0}, {10.0, 20.0}});
        acquire::SlowChannelSpec s;
        s.id = reg.register_channel(d);
        s.source = i % 3 == 0 ? acquire::SlowSource::Pressure
                   : i % 3 == 1 ? acquire::SlowSource::FlowRate
                                : acquire::SlowSource::Constant;
        s.params = {1.0, 0.1, 60.0, 0.01 * i};
        s.constant = 0.5 * i;
        cfg.slow_channels.push_back(s);
    }
    long unresolved = 0;
    for (int i = 0; i < 5000; ++i) {
        const auto id = reg.find("RACK" + std::to_string(i / 100), "PT" + std::to_string(i));
        if (!id || *id != static_cast<ChannelId>(i)) ++unresolved;
    }
    testsupport::TempDir dir("scale");
    archive::Archive arch(dir.path());
    NullPublisher pub;
    const auto t0 = Clock::now();
    const auto h = acquire::run_session(cfg, reg, {}, {}, arch, pub);
    const double wall = seconds_since(t0);
    long short_files = 0;
    for (int i = 0; i < 5000; ++i) {
        const archive::ArchiveKey k{"2026-10-18", "RACK" + std::to_string(i / 100), "PT" + std::to_string(i)};
        if (arch.record_count(k) != 11) ++short_files;
    }
    const bool ok = reg.size() == 5000 && unresolved == 0 && h.status == acquire::SessionHandle::Status::Completed &&
                    h.total_gaps() == 0 && short_files == 0 && h.archived_records == 55000;
    return {ok, fmt("5000 channels registered, unresolved=%ld; 11 scans at 1 Hz: %lld records, gaps=%lld, short "
                    "files=%ld, wall %.2fs",
                    unresolved, static_cast<long long>(h.archived_records), static_cast<long long>(h.total_gaps()),
                    short_files, wall)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"fast-path contract", fast_path},
        {"archive ingest", archive_ingest},
        {"quench latency law", latency_law},
        {"no false positives", no_false_positive},
        {"energy conservation", energy},
        {"format round trips", round_trips},
        {"query correctness", query_correctness},
        {"protocol transparency", protocol},
        {"calibration", calibration},
        {"field profiles", field_profiles},
        {"determinism", determinism},
        {"registry scale", registry_scale},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        const auto t0 = Clock::now();
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (i + 1 < 10 ? " " : "") << i + 1 << ". "
                  << criteria[i].first << ": " << o.detail << fmt(" [%.1fs]", seconds_since(t0)) << std::endl;
    }
    std::cout << (failures == 0 ? "acceptance: all " + std::to_string(criteria.size()) + " criteria passed"
                                : "acceptance: " + std::to_string(failures) + " criteria failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
