#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cryodaq/registry.hpp"
#include "cryodaq/simsrc.hpp"

// On-disk layout
//
//   <root>/<YYYY-MM-DD>/<DEVICE>/<DATA>.dat    24-byte records, no header
//   <root>/<YYYY-MM-DD>/<DEVICE>/<DATA>.meta   key=value sidecar
//
// Each record is three little-endian IEEE-754 doubles; record k lives at
// byte 24k. Time indices never decrease within a file.

namespace cryodaq::archive {

inline constexpr std::size_t kRecordBytes = 24;

using Record = Sample;

struct ArchiveKey {
    std::string date;  // YYYY-MM-DD, UTC
    std::string device_name;
    std::string data_name;

    std::string full_name() const { return device_name + "." + data_name; }
    auto operator<=>(const ArchiveKey&) const = default;
};

/// Throws Error(InvalidName) for a malformed date or name.
void validate(const ArchiveKey& key);
bool is_valid_date(std::string_view date) noexcept;

enum class FileKind { TimeSeries, SpectralAmplitude, SpectralPhase };

std::string_view to_string(FileKind kind) noexcept;
FileKind parse_file_kind(std::string_view text);

struct GapMarker {
    double t_first = 0.0;
    double t_last = 0.0;
    std::int64_t count = 0;
    bool operator==(const GapMarker&) const = default;
};

struct SidecarMeta {
    std::string device_name;
    std::string data_name;
    FileKind kind = FileKind::TimeSeries;
    std::string units_raw;
    std::string units_cal;
    std::string session_start_utc;
    std::optional<double> fast_rate_hz;
    std::optional<double> slow_period_s;
    std::vector<GapMarker> gaps;

    std::string render() const;
    static SidecarMeta parse(std::string_view text);
    bool operator==(const SidecarMeta&) const = default;
};

void encode_record(const Record& rec, std::span<std::byte, kRecordBytes> out) noexcept;
Record decode_record(std::span<const std::byte, kRecordBytes> in) noexcept;

enum class ExportFormat { Text, Binary };

struct TimeRange {
    double from = -std::numeric_limits<double>::infinity();
    double to = std::numeric_limits<double>::infinity();
};

/// File-backed archive. One writer per key at a time; any number of readers,
/// including readers that run while the writer appends. Readers only ever
/// consume whole 24-byte records.
class Archive {
public:
    explicit Archive(std::filesystem::path root);

    const std::filesystem::path& root() const noexcept { return root_; }
    std::filesystem::path data_path(const ArchiveKey& key) const;
    std::filesystem::path meta_path(const ArchiveKey& key) const;
    bool exists(const ArchiveKey& key) const;

    /// Appends a batch in one write. Creates the data file and its sidecar on
    /// first use; `meta` supplies the sidecar contents then (names are taken
    /// from the key). Throws TimeRegression without touching the file when
    /// the batch would break time ordering.
    std::size_t append(const ArchiveKey& key, std::span<const Record> records, const SidecarMeta& meta = {});

    SidecarMeta read_meta(const ArchiveKey& key) const;
    void write_meta(const ArchiveKey& key, const SidecarMeta& meta) const;
    void add_gaps(const ArchiveKey& key, std::span<const GapMarker> gaps) const;

    std::size_t record_count(const ArchiveKey& key) const;
    /// File length as seen between appends; always a multiple of 24.
    std::uint64_t committed_bytes(const ArchiveKey& key) const;

    /// Records with from <= time_index <= to, in file order.
    std::vector<Record> query(const ArchiveKey& key, double t_from, double t_to) const;
    std::vector<Record> read_all(const ArchiveKey& key) const;

    /// Records with time_index > after_time that are complete on disk.
    std::vector<Record> tail(const ArchiveKey& key, double after_time) const;

    std::string export_records(const ArchiveKey& key, TimeRange range, ExportFormat format) const;

    /// Writes amplitude triples to <DATA>_AMP and phase triples to <DATA>_PHS.
    std::pair<ArchiveKey, ArchiveKey> write_spectral(const ArchiveKey& key_base,
                                                     std::span<const simsrc::SpectralFrame> frames,
                                                     const SidecarMeta& meta = {});

    /// Keys under the root, sorted by (date, device, data). Empty filters
    /// match everything; `name_prefix` is matched against "DEVICE.DATA".
    std::vector<ArchiveKey> list_keys(std::string_view date_filter = {}, std::string_view name_prefix = {}) const;

private:
    std::filesystem::path root_;
};

std::string render_text(std::span<const Record> records);
std::string render_binary(std::span<const Record> records);

/// Parses a text export back into records. Throws Error(ProtocolError) on a
/// malformed line.
std::vector<Record> parse_text(std::string_view text);

}  // namespace cryodaq::archive
