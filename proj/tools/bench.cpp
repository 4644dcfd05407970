// bench: synthetic fast-path throughput run.
//
// Exit codes: 0 ok, 2 bad flags, 3 archive failure.

#include <filesystem>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "cryodaq/benchrun.hpp"
#include "cryodaq/error.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
    using namespace cryodaq;

    CLI::App app{"bench - fast-path throughput harness"};
    bench::BenchOptions o;
    std::string root;
    std::string overflow;
    bool serial = false;
    bool keep = false;
    app.add_option("--channels", o.channels, "number of fast channels")->check(CLI::Range(1, 4096));
    app.add_option("--rate", o.rate_hz, "fast sampling rate [Hz]")->check(CLI::PositiveNumber);
    app.add_option("--duration", o.duration_s, "simulated duration [s]")->check(CLI::NonNegativeNumber);
    app.add_option("--archive-root", root, "archive root (default: fresh temp dir, removed afterwards)");
    app.add_option("--seed", o.seed, "noise seed");
    app.add_option("--queue", o.queue_capacity, "archive queue capacity in batches")->check(CLI::PositiveNumber);
    app.add_option("--overflow", overflow, "gap or block")->check(CLI::IsMember({"gap", "block"}));
    app.add_flag("--serial", serial, "use the serial reference kernel");
    app.add_flag("--keep", keep, "keep a temp archive root");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    o.parallel = !serial;
    if (overflow == "gap") o.overflow = acquire::OverflowPolicy::Gap;
    if (overflow == "block") o.overflow = acquire::OverflowPolicy::Block;

    const bool temp_root = root.empty();
    if (temp_root) {
        std::random_device rd;
        o.archive_root = fs::temp_directory_path() / ("cryodaq-bench-" + std::to_string(rd()));
    } else {
        o.archive_root = root;
    }

    int rc = 0;
    try {
        const auto r = bench::run_bench(o);
        const auto& s = r.session;
        std::cout << "bench: channels=" << o.channels << " rate=" << o.rate_hz << " duration=" << o.duration_s
                  << " samples=" << s.fast_samples << " detector=" << s.detector_samples
                  << " archived=" << s.archived_records << " wall=" << s.total_wall_s << '\n';
        std::cout << r.summary_line() << '\n';
        if (s.status == acquire::SessionHandle::Status::Faulted) {
            std::cerr << "bench: archive error: " << s.error << '\n';
            rc = 3;
        }
    } catch (const Error& e) {
        std::cerr << "bench: " << e.what() << '\n';
        rc = e.code() == Errc::InvalidConfig ? 2 : 3;
    }
    if (temp_root && !keep) {
        std::error_code ec;
        fs::remove_all(o.archive_root, ec);
    } else if (temp_root) {
        std::cerr << "bench: archive kept at " << o.archive_root << '\n';
    }
    return rc;
}
