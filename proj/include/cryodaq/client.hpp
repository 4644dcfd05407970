#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

#include "cryodaq/netproto.hpp"
#include "cryodaq/socket.hpp"

namespace cryodaq::net {

struct ClientOptions {
    std::chrono::milliseconds timeout{5000};
    std::string name = "client";
};

/// Receives monitor events for one channel. `on_end` is called exactly once
/// if the connection ends while the subscription is active.
struct SubscriptionSink {
    std::function<void(const WireValue&)> on_event;
    std::function<void()> on_end;
};

/// Blocking request/response client with a background reader that demuxes
/// pushed EVENT frames to subscription sinks. Sinks run on the reader thread.
///
/// Errors: NotFound and ReadOnly mirror the server's ERROR codes; Timeout
/// when no reply arrives in time; ConnectionError once the connection is
/// gone; ProtocolError for anything the server sends that does not parse.
class Client {
public:
    /// Connects and exchanges HELLO.
    Client(const std::string& host, std::uint16_t port, ClientOptions options = {});
    ~Client();
    Client(const Client&) = delete;
    Client& operator=(const Client&) = delete;

    WireValue get(std::string_view name);
    WireValue put(std::string_view name, const Sample& value);
    /// Returns the channel's current value as acknowledged by the server.
    WireValue subscribe(std::string_view name, SubscriptionSink sink);
    /// No events for this channel are delivered after this returns.
    void unsubscribe(std::string_view name);
    void close();

    bool connected() const;
    const std::string& server_name() const noexcept { return server_name_; }

private:
    Frame request(const Frame& frame);
    WireValue expect_value(const Frame& reply);
    void reader_loop();

    ClientOptions options_;
    Socket sock_;
    std::string server_name_;
    std::thread reader_;

    std::mutex request_mutex_;  // one request in flight

    mutable std::mutex m_;
    std::condition_variable cv_;
    std::optional<Frame> reply_;
    bool connected_ = true;
    std::string failure_;
    std::map<std::string, SubscriptionSink, std::less<>> sinks_;
};

}  // namespace cryodaq::net
