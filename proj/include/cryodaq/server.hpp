#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <thread>

#include "cryodaq/live_table.hpp"
#include "cryodaq/socket.hpp"

namespace cryodaq::net {

struct ServerOptions {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;  // 0 picks an ephemeral port
    /// Queued monitor events per client before the oldest is dropped.
    std::size_t client_queue_capacity = 4096;
    std::string name = "daqd";
};

/// Name of the per-connection statistics pseudo-channel. GET returns
/// (seconds since server start, drops on this connection, drops on all).
inline constexpr std::string_view kStatsChannel = "SERVER.DROPS";

/// Channel-access style server over the live table. Each connection gets a
/// reader thread (requests) and a writer thread draining a bounded outbound
/// queue. Monitor events for a stalled client are dropped oldest-first;
/// replies and trigger events are never dropped.
class Server final : public Publisher {
public:
    Server(LiveTable& table, ServerOptions options = {});
    ~Server() override;
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds and starts accepting. Throws Error(ConnectionError) when the
    /// endpoint cannot be bound.
    void start();
    void stop();

    std::uint16_t port() const noexcept { return port_; }

    /// Updates the live table and pushes EVENT frames to subscribers.
    void publish(ChannelId id, const Sample& value) override;

    std::uint64_t total_drops() const noexcept { return drops_.load(); }
    std::size_t connection_count() const;

private:
    struct Connection;

    void accept_loop();
    void reader_loop(const std::shared_ptr<Connection>& conn);
    void writer_loop(const std::shared_ptr<Connection>& conn);
    void handle(Connection& conn, std::uint8_t opcode, const std::vector<std::uint8_t>& payload);
    void reap(bool all);

    LiveTable& table_;
    ServerOptions options_;
    Socket listener_;
    std::uint16_t port_ = 0;
    std::atomic<bool> running_{false};
    std::thread acceptor_;
    mutable std::shared_mutex conns_mutex_;
    std::list<std::shared_ptr<Connection>> conns_;
    std::atomic<std::uint64_t> drops_{0};
    std::chrono::steady_clock::time_point started_;
};

}  // namespace cryodaq::net
