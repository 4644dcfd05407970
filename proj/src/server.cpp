#include "cryodaq/server.hpp"

#include <condition_variable>
#include <deque>
#include <limits>
#include <unordered_map>

#include "cryodaq/error.hpp"
#include "cryodaq/netproto.hpp"

namespace cryodaq::net {

struct Server::Connection {
    enum class Kind { Reply, Event, Trigger };

    struct Outbound {
        Bytes bytes;
        Kind kind;
        ChannelId channel;
    };

    Socket sock;
    std::mutex m;
    std::condition_variable cv;
    std::deque<Outbound> out;
    std::size_t queued_events = 0;
    bool closing = false;  // flush what is queued, then close
    std::unordered_map<ChannelId, double> last_sent;  // subscriptions
    std::atomic<std::uint64_t> drops{0};
    std::thread reader;
    std::thread writer;
    std::atomic<int> finished{0};

    void enqueue(Bytes bytes, Kind kind, ChannelId channel = 0) {
        {
            std::lock_guard lk(m);
            out.push_back({std::move(bytes), kind, channel});
        }
        cv.notify_one();
    }

    void close_after_flush() {
        {
            std::lock_guard lk(m);
            closing = true;
        }
        cv.notify_one();
    }
};

Server::Server(LiveTable& table, ServerOptions options) : table_(table), options_(std::move(options)) {}

Server::~Server() { stop(); }

void Server::start() {
    listener_ = Socket::listen_on(options_.host, options_.port);
    port_ = listener_.local_port();
    started_ = std::chrono::steady_clock::now();
    running_ = true;
    acceptor_ = std::thread([this] { accept_loop(); });
}

void Server::stop() {
    if (!running_.exchange(false)) return;
    listener_.shutdown();
    if (acceptor_.joinable()) acceptor_.join();
    listener_.reset();
    {
        std::shared_lock lk(conns_mutex_);
        for (auto& c : conns_) {
            c->sock.shutdown();
            c->close_after_flush();
        }
    }
    reap(true);
}

std::size_t Server::connection_count() const {
    std::shared_lock lk(conns_mutex_);
    std::size_t n = 0;
    for (const auto& c : conns_)
        if (c->finished.load() < 2) ++n;
    return n;
}

void Server::reap(bool all) {
    std::list<std::shared_ptr<Connection>> done;
    {
        std::unique_lock lk(conns_mutex_);
        for (auto it = conns_.begin(); it != conns_.end();) {
            if (all || (*it)->finished.load() == 2) {
                done.push_back(*it);
                it = conns_.erase(it);
            } else {
                ++it;
            }
        }
    }
    for (auto& c : done) {
        if (c->reader.joinable()) c->reader.join();
        if (c->writer.joinable()) c->writer.join();
    }
}

void Server::accept_loop() {
    while (running_) {
        Socket s;
        try {
            s = listener_.accept();
        } catch (const Error&) {
            break;
        }
        if (!running_) break;
        reap(false);
        auto conn = std::make_shared<Connection>();
        conn->sock = std::move(s);
        {
            std::unique_lock lk(conns_mutex_);
            conns_.push_back(conn);
        }
        conn->writer = std::thread([this, conn] { writer_loop(conn); });
        conn->reader = std::thread([this, conn] { reader_loop(conn); });
    }
}

void Server::writer_loop(const std::shared_ptr<Connection>& conn) {
    for (;;) {
        Connection::Outbound item;
        {
            std::unique_lock lk(conn->m);
            conn->cv.wait(lk, [&] { return conn->closing || !conn->out.empty(); });
            if (conn->out.empty()) break;
            item = std::move(conn->out.front());
            conn->out.pop_front();
            if (item.kind == Connection::Kind::Event) --conn->queued_events;
        }
        try {
            conn->sock.send_all(item.bytes);
        } catch (const Error&) {
            std::lock_guard lk(conn->m);
            conn->closing = true;
            conn->out.clear();
            conn->queued_events = 0;
            break;
        }
    }
    conn->sock.shutdown();
    conn->finished.fetch_add(1);
}

void Server::reader_loop(const std::shared_ptr<Connection>& conn) {
    FrameDecoder decoder;
    std::vector<std::uint8_t> buf(16 * 1024);
    try {
        for (;;) {
            const std::size_t n = conn->sock.recv_some(buf);
            if (n == 0) break;
            decoder.feed(std::span(buf.data(), n));
            bool closed = false;
            while (auto frame = decoder.next()) {
                handle(*conn, static_cast<std::uint8_t>(frame->opcode), frame->payload);
                std::lock_guard lk(conn->m);
                if (conn->closing) {
                    closed = true;
                    break;
                }
            }
            if (closed) break;
        }
    } catch (const Error& e) {
        if (e.code() == Errc::ProtocolError)
            conn->enqueue(encode_frame(make_error_frame(ErrorCode::Malformed, e.what())), Connection::Kind::Reply);
    }
    conn->close_after_flush();
    conn->finished.fetch_add(1);
}

void Server::handle(Connection& conn, std::uint8_t opcode, const std::vector<std::uint8_t>& payload) {
    auto reply = [&](const Frame& f) { conn.enqueue(encode_frame(f), Connection::Kind::Reply); };
    auto value_reply = [&](ChannelId id) {
        reply(make_value_frame(Opcode::Value, {table_.name(id), table_.read(id)}));
    };
    auto not_found = [&](const std::string& name) {
        reply(make_error_frame(ErrorCode::NotFound, "channel '" + name + "' not found"));
    };

    switch (static_cast<Opcode>(opcode)) {
    case Opcode::Hello: {
        decode_hello(payload);
        reply(make_hello_frame(options_.name));
        return;
    }
    case Opcode::Get: {
        const std::string name = decode_name(payload);
        if (name == kStatsChannel) {
            const double elapsed =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
            reply(make_value_frame(Opcode::Value,
                                   {name, {elapsed, static_cast<double>(conn.drops.load()),
                                           static_cast<double>(drops_.load())}}));
            return;
        }
        if (auto id = table_.find(name)) value_reply(*id);
        else not_found(name);
        return;
    }
    case Opcode::Put: {
        const WireValue v = decode_value(payload);
        auto id = table_.find(v.name);
        if (!id) return not_found(v.name);
        if (!table_.writable(*id)) {
            reply(make_error_frame(ErrorCode::ReadOnly, "channel '" + v.name + "' is read-only"));
            return;
        }
        publish(*id, v.value);
        value_reply(*id);
        return;
    }
    case Opcode::Subscribe: {
        const std::string name = decode_name(payload);
        auto id = table_.find(name);
        if (!id) return not_found(name);
        {
            std::lock_guard lk(conn.m);
            conn.last_sent.try_emplace(*id, -std::numeric_limits<double>::infinity());
        }
        value_reply(*id);
        return;
    }
    case Opcode::Unsubscribe: {
        const std::string name = decode_name(payload);
        auto id = table_.find(name);
        if (!id) return not_found(name);
        {
            std::lock_guard lk(conn.m);
            conn.last_sent.erase(*id);
            std::erase_if(conn.out, [&](const Connection::Outbound& o) {
                const bool purge = o.kind == Connection::Kind::Event && o.channel == *id;
                if (purge) --conn.queued_events;
                return purge;
            });
        }
        value_reply(*id);
        return;
    }
    case Opcode::Event:
    case Opcode::Error:
    case Opcode::Value:
        break;
    }
    throw Error(Errc::ProtocolError, "opcode " + std::to_string(opcode) + " is not a request");
}

void Server::publish(ChannelId id, const Sample& value) {
    table_.write(id, value);
    const bool trigger = table_.is_trigger(id);
    std::optional<Bytes> frame;
    std::shared_lock lk(conns_mutex_);
    for (auto& c : conns_) {
        bool notify = false;
        {
            std::lock_guard clk(c->m);
            if (c->closing) continue;
            auto it = c->last_sent.find(id);
            if (it == c->last_sent.end() || !(value.time_index > it->second)) continue;
            it->second = value.time_index;
            if (!frame) frame = encode_frame(make_value_frame(Opcode::Event, {table_.name(id), value}));
            c->out.push_back({*frame, trigger ? Connection::Kind::Trigger : Connection::Kind::Event, id});
            if (!trigger && ++c->queued_events > options_.client_queue_capacity) {
                auto victim = std::find_if(c->out.begin(), c->out.end(), [](const Connection::Outbound& o) {
                    return o.kind == Connection::Kind::Event;
                });
                c->out.erase(victim);
                --c->queued_events;
                c->drops.fetch_add(1);
                drops_.fetch_add(1);
            }
            notify = true;
        }
        if (notify) c->cv.notify_one();
    }
}

}  // namespace cryodaq::net
