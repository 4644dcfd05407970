// xymon: live monitor. Subscribes to one channel and prints one line per
// event in the archive text format.
//
// Exit codes: 0 ok, 1 connect failure or unknown channel, 2 bad flags.

#include <condition_variable>
#include <fstream>
#include <iostream>
#include <mutex>

#include "CLI11.hpp"
#include "cryodaq/client.hpp"
#include "cryodaq/error.hpp"
#include "cryodaq/socket.hpp"
#include "cryodaq/textfmt.hpp"

int main(int argc, char** argv) {
    using namespace cryodaq;

    CLI::App app{"xymon - live channel monitor"};
    std::string endpoint;
    std::string channel;
    std::string out_path;
    long count = 0;
    double timeout_s = 5.0;
    app.add_option("--server", endpoint, "server host:port")->required();
    app.add_option("--channel", channel, "channel name DEVICE.DATA")->required();
    app.add_option("--out", out_path, "also append lines to this file");
    app.add_option("--count", count, "exit after N events (0 = until the server closes)")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--timeout", timeout_s, "request timeout in seconds")->check(CLI::PositiveNumber);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path, std::ios::binary | std::ios::app);
        if (!file) {
            std::cerr << "xymon: cannot open " << out_path << '\n';
            return 2;
        }
    }

    std::mutex m;
    std::condition_variable cv;
    long received = 0;
    bool ended = false;

    try {
        const auto [host, port] = net::parse_endpoint(endpoint);
        net::ClientOptions opts;
        opts.timeout = std::chrono::milliseconds(static_cast<long>(timeout_s * 1000));
        opts.name = "xymon";
        net::Client client(host, port, opts);

        net::SubscriptionSink sink;
        sink.on_event = [&](const net::WireValue& v) {
            const std::string line = textfmt::format_record(v.value);
            std::lock_guard lk(m);
            if (count > 0 && received >= count) return;
            std::cout << line << std::flush;
            if (file) file << line << std::flush;
            ++received;
            cv.notify_all();
        };
        sink.on_end = [&] {
            std::lock_guard lk(m);
            ended = true;
            cv.notify_all();
        };
        client.subscribe(channel, std::move(sink));

        std::unique_lock lk(m);
        cv.wait(lk, [&] { return ended || (count > 0 && received >= count); });
    } catch (const Error& e) {
        std::cerr << "xymon: " << to_string(e.code()) << ": " << e.what() << '\n';
        return e.code() == Errc::InvalidConfig ? 2 : 1;
    }
    return 0;
}
