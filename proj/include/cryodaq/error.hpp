#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cryodaq {

enum class Errc {
    DuplicateName,
    InvalidName,
    NotFound,
    InvalidConfig,
    IsolationBreach,
    TimeRegression,
    StorageFull,
    StorageError,
    KeyNotFound,
    ArchiveOverflow,
    ReadOnly,
    ProtocolError,
    ConnectionError,
    Timeout,
};

std::string_view to_string(Errc code) noexcept;

/// Base error for the whole library. `code()` carries the taxonomy; `what()`
/// carries the human readable diagnostic.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace cryodaq
