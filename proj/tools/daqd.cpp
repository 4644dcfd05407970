// daqd: loads the daemon config, serves live channels and runs one
// acquisition session into the archive.
//
// Exit codes: 0 ok, 2 config error, 3 archive error, 4 bind error.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>

#include "CLI11.hpp"
#include "cryodaq/acquire.hpp"
#include "cryodaq/archive.hpp"
#include "cryodaq/config.hpp"
#include "cryodaq/error.hpp"
#include "cryodaq/live_table.hpp"
#include "cryodaq/server.hpp"
#include "cryodaq/socket.hpp"

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop = true; }

void sleep_interruptible(double seconds) {
    const auto until = std::chrono::steady_clock::now() + std::chrono::duration<double>(seconds);
    while (!g_stop && std::chrono::steady_clock::now() < until)
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
}

}  // namespace

int main(int argc, char** argv) {
    using namespace cryodaq;

    CLI::App app{"daqd - acquisition daemon"};
    std::string config_path;
    std::string root_override;
    app.add_option("config", config_path, "daemon config file")->required();
    app.add_option("--root", root_override, "archive root (overrides [archive] root and CRYODAQ_ROOT)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    config::DaemonConfig cfg;
    config::Plant plant;
    try {
        cfg = config::load_daemon_config(config_path);
        plant = config::build_plant(cfg);
    } catch (const Error& e) {
        std::cerr << "daqd: config error: " << config_path << ": " << e.what() << '\n';
        return 2;
    }

    std::string root = root_override;
    if (root.empty()) root = cfg.archive_root;
    if (root.empty()) {
        if (const char* env = std::getenv("CRYODAQ_ROOT")) root = env;
    }
    if (root.empty()) {
        std::cerr << "daqd: config error: no archive root ([archive] root, --root or CRYODAQ_ROOT)\n";
        return 2;
    }

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);

    LiveTable table(plant.registry);
    for (const auto& [id, value] : plant.setpoints) table.write(id, value);

    std::unique_ptr<net::Server> server;
    NullPublisher null_publisher;
    Publisher* publisher = &null_publisher;
    if (!cfg.endpoint.empty()) {
        try {
            auto [host, port] = net::parse_endpoint(cfg.endpoint);
            server = std::make_unique<net::Server>(
                table, net::ServerOptions{host, port, cfg.client_queue_capacity, "daqd"});
            server->start();
        } catch (const Error& e) {
            if (e.code() == Errc::InvalidConfig) {
                std::cerr << "daqd: config error: " << e.what() << '\n';
                return 2;
            }
            std::cerr << "daqd: bind error: " << e.what() << '\n';
            return 4;
        }
        publisher = server.get();
        std::cerr << "daqd: listening on port " << server->port() << '\n';
        if (!cfg.port_file.empty()) {
            std::ofstream pf(cfg.port_file + ".tmp");
            pf << server->port() << '\n';
            pf.close();
            std::rename((cfg.port_file + ".tmp").c_str(), cfg.port_file.c_str());
        }
    }

    if (cfg.start_delay_s > 0.0) sleep_interruptible(cfg.start_delay_s);

    archive::Archive arch(root);
    acquire::SessionHandle handle;
    try {
        handle = acquire::run_session(plant.acquisition, plant.registry, plant.facility, plant.detector, arch,
                                      *publisher, &g_stop);
    } catch (const Error& e) {
        if (server) server->stop();
        if (e.code() == Errc::InvalidConfig) {
            std::cerr << "daqd: config error: " << e.what() << '\n';
            return 2;
        }
        std::cerr << "daqd: archive error: " << e.what() << '\n';
        return 3;
    }

    std::cerr << "daqd: session " << handle.session_id << ' ' << acquire::to_string(handle.status)
              << (handle.interrupted ? " (interrupted)" : "") << ": fast_samples=" << handle.fast_samples
              << " archived_records=" << handle.archived_records << " gaps=" << handle.total_gaps()
              << " triggers=" << handle.triggers.size() << '\n';
    for (const auto& t : handle.triggers) {
        quench::DumpModel dump = plant.dump;
        dump.initial_current_A = simsrc::current_at(plant.facility.current, t.trigger_time_s);
        std::cerr << "daqd: quench " << plant.registry.at(t.channel).full_name() << " at t=" << t.trigger_time_s
                  << " s, V_comp=" << t.compensated_volts_at_trigger << " V; dump I0=" << dump.initial_current_A
                  << " A tau=" << dump.tau() << " s, stored energy=" << quench::stored_energy(dump)
                  << " J, dissipated by 10 tau=" << quench::dissipated_energy(dump, 10 * dump.tau(), dump.tau() / 1000)
                  << " J\n";
    }

    if (server) {
        if (cfg.linger_s > 0.0) sleep_interruptible(cfg.linger_s);
        server->stop();
    }
    if (handle.status == acquire::SessionHandle::Status::Faulted) {
        std::cerr << "daqd: archive error: " << handle.error << '\n';
        return 3;
    }
    return 0;
}
