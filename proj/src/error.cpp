#include "cryodaq/error.hpp"

namespace cryodaq {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::DuplicateName: return "DuplicateName";
    case Errc::InvalidName: return "InvalidName";
    case Errc::NotFound: return "NotFound";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::IsolationBreach: return "IsolationBreach";
    case Errc::TimeRegression: return "TimeRegression";
    case Errc::StorageFull: return "StorageFull";
    case Errc::StorageError: return "StorageError";
    case Errc::KeyNotFound: return "KeyNotFound";
    case Errc::ArchiveOverflow: return "ArchiveOverflow";
    case Errc::ReadOnly: return "ReadOnly";
    case Errc::ProtocolError: return "ProtocolError";
    case Errc::ConnectionError: return "ConnectionError";
    case Errc::Timeout: return "Timeout";
    }
    return "Unknown";
}

}  // namespace cryodaq
