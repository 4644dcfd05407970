#include "cryodaq/client.hpp"

#include <vector>

#include "cryodaq/error.hpp"

namespace cryodaq::net {

Client::Client(const std::string& host, std::uint16_t port, ClientOptions options)
    : options_(std::move(options)), sock_(Socket::connect_to(host, port, options_.timeout)) {
    reader_ = std::thread([this] { reader_loop(); });
    const Frame reply = request(make_hello_frame(options_.name));
    if (reply.opcode != Opcode::Hello) {
        close();
        throw Error(Errc::ProtocolError, "server did not answer HELLO");
    }
    server_name_ = decode_hello(reply.payload).peer;
}

Client::~Client() { close(); }

void Client::close() {
    sock_.shutdown();
    if (reader_.joinable()) reader_.join();
}

bool Client::connected() const {
    std::lock_guard lk(m_);
    return connected_;
}

void Client::reader_loop() {
    FrameDecoder decoder;
    std::vector<std::uint8_t> buf(16 * 1024);
    std::string failure = "connection closed by server";
    try {
        for (;;) {
            const std::size_t n = sock_.recv_some(buf);
            if (n == 0) break;
            decoder.feed(std::span(buf.data(), n));
            while (auto frame = decoder.next()) {
                if (frame->opcode == Opcode::Event) {
                    WireValue v = decode_value(frame->payload);
                    std::function<void(const WireValue&)> sink;
                    {
                        std::lock_guard lk(m_);
                        if (auto it = sinks_.find(v.name); it != sinks_.end()) sink = it->second.on_event;
                    }
                    if (sink) sink(v);
                    continue;
                }
                {
                    std::lock_guard lk(m_);
                    reply_ = std::move(*frame);
                }
                cv_.notify_all();
            }
        }
    } catch (const Error& e) {
        failure = e.what();
    }
    std::map<std::string, SubscriptionSink, std::less<>> ended;
    {
        std::lock_guard lk(m_);
        connected_ = false;
        failure_ = failure;
        ended.swap(sinks_);
    }
    cv_.notify_all();
    for (auto& [name, sink] : ended)
        if (sink.on_end) sink.on_end();
}

Frame Client::request(const Frame& frame) {
    std::lock_guard req(request_mutex_);
    {
        std::lock_guard lk(m_);
        if (!connected_) throw Error(Errc::ConnectionError, "not connected: " + failure_);
        reply_.reset();
    }
    sock_.send_all(encode_frame(frame));
    std::unique_lock lk(m_);
    if (!cv_.wait_for(lk, options_.timeout, [&] { return reply_.has_value() || !connected_; }))
        throw Error(Errc::Timeout, "no reply within " + std::to_string(options_.timeout.count()) + " ms");
    if (!reply_) throw Error(Errc::ConnectionError, "connection lost: " + failure_);
    Frame out = std::move(*reply_);
    reply_.reset();
    return out;
}

WireValue Client::expect_value(const Frame& reply) {
    if (reply.opcode == Opcode::Error) {
        const ErrorPayload e = decode_error(reply.payload);
        switch (e.code) {
        case ErrorCode::NotFound: throw Error(Errc::NotFound, e.message);
        case ErrorCode::ReadOnly: throw Error(Errc::ReadOnly, e.message);
        case ErrorCode::Malformed: break;
        }
        throw Error(Errc::ProtocolError, e.message);
    }
    if (reply.opcode != Opcode::Value) throw Error(Errc::ProtocolError, "unexpected reply opcode");
    return decode_value(reply.payload);
}

WireValue Client::get(std::string_view name) { return expect_value(request(make_name_frame(Opcode::Get, name))); }

WireValue Client::put(std::string_view name, const Sample& value) {
    return expect_value(request(make_value_frame(Opcode::Put, {std::string(name), value})));
}

WireValue Client::subscribe(std::string_view name, SubscriptionSink sink) {
    {
        std::lock_guard lk(m_);
        sinks_.insert_or_assign(std::string(name), std::move(sink));
    }
    try {
        return expect_value(request(make_name_frame(Opcode::Subscribe, name)));
    } catch (...) {
        std::lock_guard lk(m_);
        if (auto it = sinks_.find(name); it != sinks_.end()) sinks_.erase(it);
        throw;
    }
}

void Client::unsubscribe(std::string_view name) {
    expect_value(request(make_name_frame(Opcode::Unsubscribe, name)));
    std::lock_guard lk(m_);
    if (auto it = sinks_.find(name); it != sinks_.end()) sinks_.erase(it);
}

}  // namespace cryodaq::net
