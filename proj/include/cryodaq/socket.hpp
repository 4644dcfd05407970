#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <utility>

namespace cryodaq::net {

/// Owning TCP socket descriptor.
class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) noexcept : fd_(fd) {}
    Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
    Socket& operator=(Socket&& o) noexcept {
        if (this != &o) {
            reset();
            fd_ = std::exchange(o.fd_, -1);
        }
        return *this;
    }
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;
    ~Socket() { reset(); }

    int fd() const noexcept { return fd_; }
    bool valid() const noexcept { return fd_ >= 0; }
    void reset() noexcept;
    /// Unblocks any thread waiting on this socket without releasing the fd.
    void shutdown() noexcept;

    /// Throws Error(ConnectionError) on failure.
    void send_all(std::span<const std::uint8_t> bytes) const;
    /// Returns 0 on orderly close. Throws Error(ConnectionError) on failure.
    std::size_t recv_some(std::span<std::uint8_t> buf) const;

    static Socket connect_to(const std::string& host, std::uint16_t port, std::chrono::milliseconds timeout);
    /// Throws Error(ConnectionError) when the address cannot be bound.
    static Socket listen_on(const std::string& host, std::uint16_t port, int backlog = 64);
    Socket accept() const;
    std::uint16_t local_port() const;

private:
    int fd_ = -1;
};

/// Splits "host:port". Throws Error(InvalidConfig) on malformed input.
std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& endpoint);

}  // namespace cryodaq::net
