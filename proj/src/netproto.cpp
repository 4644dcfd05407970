#include "cryodaq/netproto.hpp"

#include <bit>
#include <cstring>
#include <limits>

#include "cryodaq/error.hpp"

namespace cryodaq::net {

namespace {

void put_u16(Bytes& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(Bytes& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_f64(Bytes& out, double d) {
    const auto v = std::bit_cast<std::uint64_t>(d);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_string(Bytes& out, std::string_view s) {
    if (s.size() > std::numeric_limits<std::uint16_t>::max())
        throw Error(Errc::ProtocolError, "string too long for wire encoding");
    put_u16(out, static_cast<std::uint16_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint16_t u16() {
        need(2);
        const auto v = static_cast<std::uint16_t>(data_[pos_] | (data_[pos_ + 1] << 8));
        pos_ += 2;
        return v;
    }

    double f64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
        pos_ += 8;
        return std::bit_cast<double>(v);
    }

    std::string string() {
        const std::size_t n = u16();
        need(n);
        std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
        pos_ += n;
        return s;
    }

    void finish() const {
        if (pos_ != data_.size()) throw Error(Errc::ProtocolError, "trailing bytes in payload");
    }

private:
    void need(std::size_t n) const {
        if (data_.size() - pos_ < n) throw Error(Errc::ProtocolError, "truncated payload");
    }

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

}  // namespace

bool is_known_opcode(std::uint8_t op) noexcept { return op >= 0x01 && op <= 0x08; }

void append_frame(Bytes& out, const Frame& frame) {
    const std::size_t length = frame.payload.size() + 1;
    if (length > kMaxFrameLength) throw Error(Errc::ProtocolError, "frame exceeds 64 KiB");
    out.reserve(out.size() + 4 + length);
    put_u32(out, static_cast<std::uint32_t>(length));
    out.push_back(static_cast<std::uint8_t>(frame.opcode));
    out.insert(out.end(), frame.payload.begin(), frame.payload.end());
}

Bytes encode_frame(const Frame& frame) {
    Bytes out;
    append_frame(out, frame);
    return out;
}

void FrameDecoder::feed(std::span<const std::uint8_t> bytes) {
    if (pos_ > 0 && pos_ == buf_.size()) {
        buf_.clear();
        pos_ = 0;
    }
    buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

std::optional<Frame> FrameDecoder::next() {
    const std::size_t avail = buf_.size() - pos_;
    if (avail < 4) return std::nullopt;
    std::uint32_t length = 0;
    for (int i = 0; i < 4; ++i) length |= static_cast<std::uint32_t>(buf_[pos_ + i]) << (8 * i);
    if (length == 0 || length > kMaxFrameLength)
        throw Error(Errc::ProtocolError, "frame length " + std::to_string(length) + " out of range");
    if (avail >= 5 && !is_known_opcode(buf_[pos_ + 4]))
        throw Error(Errc::ProtocolError, "unknown opcode " + std::to_string(buf_[pos_ + 4]));
    if (avail < 4 + static_cast<std::size_t>(length)) return std::nullopt;
    Frame f;
    f.opcode = static_cast<Opcode>(buf_[pos_ + 4]);
    f.payload.assign(buf_.begin() + static_cast<std::ptrdiff_t>(pos_ + 5),
                     buf_.begin() + static_cast<std::ptrdiff_t>(pos_ + 4 + length));
    pos_ += 4 + length;
    if (pos_ > 1 << 16 && pos_ * 2 > buf_.size()) {
        buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(pos_));
        pos_ = 0;
    }
    return f;
}

Bytes encode_name(std::string_view name) {
    Bytes out;
    put_string(out, name);
    return out;
}

Bytes encode_value(const WireValue& v) {
    Bytes out;
    out.reserve(2 + v.name.size() + 24);
    put_string(out, v.name);
    put_f64(out, v.value.time_index);
    put_f64(out, v.value.raw);
    put_f64(out, v.value.calibrated);
    return out;
}

Bytes encode_hello(const HelloPayload& h) {
    Bytes out;
    put_u16(out, h.version);
    put_string(out, h.peer);
    return out;
}

Bytes encode_error(const ErrorPayload& e) {
    Bytes out;
    put_u16(out, static_cast<std::uint16_t>(e.code));
    put_string(out, e.message);
    return out;
}

std::string decode_name(std::span<const std::uint8_t> payload) {
    Reader r(payload);
    auto s = r.string();
    r.finish();
    return s;
}

WireValue decode_value(std::span<const std::uint8_t> payload) {
    Reader r(payload);
    WireValue v;
    v.name = r.string();
    v.value.time_index = r.f64();
    v.value.raw = r.f64();
    v.value.calibrated = r.f64();
    r.finish();
    return v;
}

HelloPayload decode_hello(std::span<const std::uint8_t> payload) {
    Reader r(payload);
    HelloPayload h;
    h.version = r.u16();
    h.peer = r.string();
    r.finish();
    return h;
}

ErrorPayload decode_error(std::span<const std::uint8_t> payload) {
    Reader r(payload);
    ErrorPayload e;
    e.code = static_cast<ErrorCode>(r.u16());
    e.message = r.string();
    r.finish();
    return e;
}

Frame make_name_frame(Opcode op, std::string_view name) { return {op, encode_name(name)}; }
Frame make_value_frame(Opcode op, const WireValue& v) { return {op, encode_value(v)}; }
Frame make_error_frame(ErrorCode code, std::string_view message) {
    return {Opcode::Error, encode_error({code, std::string(message)})};
}
Frame make_hello_frame(std::string_view peer) { return {Opcode::Hello, encode_hello({kProtocolVersion, std::string(peer)})}; }

}  // namespace cryodaq::net
