#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cryodaq/registry.hpp"

// Wire grammar (all integers and doubles little-endian):
//
//   frame    := u32 length, u8 opcode, payload      length = 1 + |payload|
//   name     := u16 n, n bytes UTF-8 "DEVICE.DATA"
//   value    := name, f64 time_index, f64 raw, f64 calibrated
//
//   HELLO       0x01  u16 version, name(peer)     both directions
//   GET         0x02  name                        -> VALUE | ERROR
//   PUT         0x03  value                       -> VALUE (stored value) | ERROR
//   SUBSCRIBE   0x04  name                        -> VALUE (current) | ERROR
//   EVENT       0x05  value                       server push
//   UNSUBSCRIBE 0x06  name                        -> VALUE (current) | ERROR
//   ERROR       0x07  u16 code, name(message)
//   VALUE       0x08  value

namespace cryodaq::net {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::uint16_t kProtocolVersion = 1;
inline constexpr std::uint32_t kMaxFrameLength = 64 * 1024;

enum class Opcode : std::uint8_t {
    Hello = 0x01,
    Get = 0x02,
    Put = 0x03,
    Subscribe = 0x04,
    Event = 0x05,
    Unsubscribe = 0x06,
    Error = 0x07,
    Value = 0x08,
};

bool is_known_opcode(std::uint8_t op) noexcept;

enum class ErrorCode : std::uint16_t { NotFound = 1, ReadOnly = 2, Malformed = 3 };

struct Frame {
    Opcode opcode = Opcode::Hello;
    Bytes payload;
    bool operator==(const Frame&) const = default;
};

struct WireValue {
    std::string name;
    Sample value;
};

struct HelloPayload {
    std::uint16_t version = kProtocolVersion;
    std::string peer;
};

struct ErrorPayload {
    ErrorCode code = ErrorCode::Malformed;
    std::string message;
};

Bytes encode_frame(const Frame& frame);
void append_frame(Bytes& out, const Frame& frame);

/// Incremental decoder for a byte stream. Throws Error(ProtocolError) on a
/// length outside [1, kMaxFrameLength] or an unknown opcode.
class FrameDecoder {
public:
    void feed(std::span<const std::uint8_t> bytes);
    std::optional<Frame> next();
    std::size_t buffered() const noexcept { return buf_.size() - pos_; }

private:
    Bytes buf_;
    std::size_t pos_ = 0;
};

Bytes encode_name(std::string_view name);
Bytes encode_value(const WireValue& v);
Bytes encode_hello(const HelloPayload& h);
Bytes encode_error(const ErrorPayload& e);

/// Payload decoders; all throw Error(ProtocolError) unless the payload is
/// consumed exactly.
std::string decode_name(std::span<const std::uint8_t> payload);
WireValue decode_value(std::span<const std::uint8_t> payload);
HelloPayload decode_hello(std::span<const std::uint8_t> payload);
ErrorPayload decode_error(std::span<const std::uint8_t> payload);

Frame make_name_frame(Opcode op, std::string_view name);
Frame make_value_frame(Opcode op, const WireValue& v);
Frame make_error_frame(ErrorCode code, std::string_view message);
Frame make_hello_frame(std::string_view peer);

}  // namespace cryodaq::net
