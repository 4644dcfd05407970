#include "cryodaq/archive.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <bit>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cryodaq/error.hpp"
#include "cryodaq/textfmt.hpp"

namespace fs = std::filesystem;

namespace cryodaq::archive {

namespace {

class Fd {
public:
    explicit Fd(int fd) noexcept : fd_(fd) {}
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    ~Fd() {
        if (fd_ >= 0) ::close(fd_);
    }
    int get() const noexcept { return fd_; }
    explicit operator bool() const noexcept { return fd_ >= 0; }

private:
    int fd_;
};

[[noreturn]] void throw_io(const std::string& what, const fs::path& path, int err) {
    const Errc code = (err == ENOSPC || err == EDQUOT) ? Errc::StorageFull : Errc::StorageError;
    throw Error(code, what + " " + path.string() + ": " + std::strerror(err));
}

std::uint64_t to_le(std::uint64_t v) noexcept {
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        std::uint64_t r = 0;
        for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xFF) << (8 * (7 - i));
        return r;
    }
}

void store_double(double v, std::byte* out) noexcept {
    const std::uint64_t bits = to_le(std::bit_cast<std::uint64_t>(v));
    std::memcpy(out, &bits, 8);
}

double load_double(const std::byte* in) noexcept {
    std::uint64_t bits = 0;
    std::memcpy(&bits, in, 8);
    return std::bit_cast<double>(to_le(bits));
}

void pread_exact(int fd, void* buf, std::size_t len, off_t offset, const fs::path& path) {
    auto* p = static_cast<char*>(buf);
    while (len > 0) {
        const ssize_t n = ::pread(fd, p, len, offset);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw_io("read", path, errno);
        }
        if (n == 0) throw Error(Errc::StorageError, "unexpected end of file " + path.string());
        p += n;
        len -= static_cast<std::size_t>(n);
        offset += n;
    }
}

void lock(int fd, int op, const fs::path& path) {
    while (::flock(fd, op) != 0) {
        if (errno != EINTR) throw_io("lock", path, errno);
    }
}

/// Read-only view of one data file, sized to whole records at open time.
class RecordFile {
public:
    RecordFile(const fs::path& path, const ArchiveKey& key) : path_(path), fd_(::open(path.c_str(), O_RDONLY | O_CLOEXEC)) {
        if (!fd_) {
            if (errno == ENOENT) throw Error(Errc::KeyNotFound, "no archive data for " + key.date + "/" + key.full_name());
            throw_io("open", path, errno);
        }
        // The shared lock waits out an append in progress, so the size seen
        // here is a committed one.
        lock(fd_.get(), LOCK_SH, path);
        struct stat st {};
        const int rc = ::fstat(fd_.get(), &st);
        const int err = errno;
        ::flock(fd_.get(), LOCK_UN);
        if (rc != 0) throw_io("stat", path, err);
        bytes_ = static_cast<std::uint64_t>(st.st_size);
        count_ = static_cast<std::size_t>(bytes_ / kRecordBytes);
    }

    std::uint64_t bytes() const noexcept { return bytes_; }

    std::size_t size() const noexcept { return count_; }

    double time_at(std::size_t i) const {
        std::byte buf[8];
        pread_exact(fd_.get(), buf, 8, static_cast<off_t>(i * kRecordBytes), path_);
        return load_double(buf);
    }

    /// First index in [0, n) whose time satisfies !pred(time); pred must be
    /// monotone (true then false).
    template <class Pred>
    std::size_t partition_point(Pred pred) const {
        std::size_t lo = 0;
        std::size_t hi = count_;
        while (lo < hi) {
            const std::size_t mid = lo + (hi - lo) / 2;
            if (pred(time_at(mid)))
                lo = mid + 1;
            else
                hi = mid;
        }
        return lo;
    }

    std::string read_bytes(std::size_t first, std::size_t last) const {
        std::string bytes((last - first) * kRecordBytes, '\0');
        if (!bytes.empty()) pread_exact(fd_.get(), bytes.data(), bytes.size(), static_cast<off_t>(first * kRecordBytes), path_);
        return bytes;
    }

    std::vector<Record> read(std::size_t first, std::size_t last) const {
        const std::string bytes = read_bytes(first, last);
        std::vector<Record> out;
        out.reserve(last - first);
        const auto* p = reinterpret_cast<const std::byte*>(bytes.data());
        for (std::size_t i = first; i < last; ++i, p += kRecordBytes)
            out.push_back(decode_record(std::span<const std::byte, kRecordBytes>(p, kRecordBytes)));
        return out;
    }

    std::pair<std::size_t, std::size_t> inclusive_range(double from, double to) const {
        if (!(from <= to)) return {0, 0};
        const std::size_t first = partition_point([&](double t) { return t < from; });
        const std::size_t last = partition_point([&](double t) { return t <= to; });
        return {first, std::max(first, last)};
    }

private:
    fs::path path_;
    Fd fd_;
    std::uint64_t bytes_ = 0;
    std::size_t count_ = 0;
};

std::string format_double(double v) { return textfmt::format_value(v); }

double parse_double(std::string_view text, std::string_view what) {
    std::string buf(text);
    char* end = nullptr;
    const double v = std::strtod(buf.c_str(), &end);
    if (buf.empty() || end != buf.c_str() + buf.size())
        throw Error(Errc::StorageError, "sidecar: bad number for " + std::string(what) + ": '" + buf + "'");
    return v;
}

void write_file_atomically(const fs::path& path, std::string_view contents) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(Errc::StorageError, "cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) throw Error(Errc::StorageFull, "short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw Error(Errc::StorageError, "cannot rename " + tmp.string() + ": " + ec.message());
}

}  // namespace

// --- keys and sidecar ------------------------------------------------------

bool is_valid_date(std::string_view d) noexcept {
    if (d.size() != 10 || d[4] != '-' || d[7] != '-') return false;
    for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9})
        if (d[i] < '0' || d[i] > '9') return false;
    auto num = [&](std::size_t at, std::size_t n) {
        int v = 0;
        for (std::size_t i = at; i < at + n; ++i) v = v * 10 + (d[i] - '0');
        return v;
    };
    const std::chrono::year_month_day ymd{std::chrono::year{num(0, 4)},
                                          std::chrono::month{static_cast<unsigned>(num(5, 2))},
                                          std::chrono::day{static_cast<unsigned>(num(8, 2))}};
    return ymd.ok();
}

void validate(const ArchiveKey& key) {
    if (!is_valid_date(key.date)) throw Error(Errc::InvalidName, "archive date '" + key.date + "' is not YYYY-MM-DD");
    if (!is_valid_name(key.device_name) || !is_valid_name(key.data_name))
        throw Error(Errc::InvalidName, "invalid archive name '" + key.full_name() + "'");
}

std::string_view to_string(FileKind kind) noexcept {
    switch (kind) {
    case FileKind::TimeSeries: return "timeseries";
    case FileKind::SpectralAmplitude: return "spectral_amplitude";
    case FileKind::SpectralPhase: return "spectral_phase";
    }
    return "timeseries";
}

FileKind parse_file_kind(std::string_view text) {
    if (text == "timeseries") return FileKind::TimeSeries;
    if (text == "spectral_amplitude") return FileKind::SpectralAmplitude;
    if (text == "spectral_phase") return FileKind::SpectralPhase;
    throw Error(Errc::StorageError, "sidecar: unknown kind '" + std::string(text) + "'");
}

std::string SidecarMeta::render() const {
    std::ostringstream out;
    out << "device=" << device_name << '\n'
        << "data=" << data_name << '\n'
        << "kind=" << to_string(kind) << '\n'
        << "units_raw=" << units_raw << '\n'
        << "units_cal=" << units_cal << '\n'
        << "session_start_utc=" << session_start_utc << '\n';
    if (fast_rate_hz) out << "fast_rate_hz=" << format_double(*fast_rate_hz) << '\n';
    if (slow_period_s) out << "slow_period_s=" << format_double(*slow_period_s) << '\n';
    for (const auto& g : gaps)
        out << "gap=" << format_double(g.t_first) << ' ' << format_double(g.t_last) << ' ' << g.count << '\n';
    return out.str();
}

SidecarMeta SidecarMeta::parse(std::string_view text) {
    SidecarMeta meta;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error(Errc::StorageError, "sidecar: line without '=': " + line);
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "device") meta.device_name = value;
        else if (key == "data") meta.data_name = value;
        else if (key == "kind") meta.kind = parse_file_kind(value);
        else if (key == "units_raw") meta.units_raw = value;
        else if (key == "units_cal") meta.units_cal = value;
        else if (key == "session_start_utc") meta.session_start_utc = value;
        else if (key == "fast_rate_hz") meta.fast_rate_hz = parse_double(value, key);
        else if (key == "slow_period_s") meta.slow_period_s = parse_double(value, key);
        else if (key == "gap") {
            std::istringstream g(value);
            std::string a, b;
            GapMarker marker;
            if (!(g >> a >> b >> marker.count)) throw Error(Errc::StorageError, "sidecar: bad gap line: " + line);
            marker.t_first = parse_double(a, "gap");
            marker.t_last = parse_double(b, "gap");
            meta.gaps.push_back(marker);
        } else {
            throw Error(Errc::StorageError, "sidecar: unknown key '" + key + "'");
        }
    }
    return meta;
}

void encode_record(const Record& rec, std::span<std::byte, kRecordBytes> out) noexcept {
    store_double(rec.time_index, out.data());
    store_double(rec.raw, out.data() + 8);
    store_double(rec.calibrated, out.data() + 16);
}

Record decode_record(std::span<const std::byte, kRecordBytes> in) noexcept {
    return {load_double(in.data()), load_double(in.data() + 8), load_double(in.data() + 16)};
}

std::string render_binary(std::span<const Record> records) {
    std::string out(records.size() * kRecordBytes, '\0');
    auto* p = reinterpret_cast<std::byte*>(out.data());
    for (const auto& r : records) {
        encode_record(r, std::span<std::byte, kRecordBytes>(p, kRecordBytes));
        p += kRecordBytes;
    }
    return out;
}

std::string render_text(std::span<const Record> records) {
    std::string out;
    out.reserve(records.size() * 64);
    for (const auto& r : records) textfmt::append_record(out, r);
    return out;
}

std::vector<Record> parse_text(std::string_view text) {
    std::vector<Record> out;
    std::size_t pos = 0;
    std::size_t lineno = 0;
    while (pos < text.size()) {
        ++lineno;
        const auto nl = text.find('\n', pos);
        const auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        auto rec = textfmt::parse_record(line);
        if (!rec) throw Error(Errc::ProtocolError, "text export line " + std::to_string(lineno) + " is malformed");
        out.push_back(*rec);
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    return out;
}

// --- archive -----------------------------------------------------------------

Archive::Archive(fs::path root) : root_(std::move(root)) {}

fs::path Archive::data_path(const ArchiveKey& key) const {
    return root_ / key.date / key.device_name / (key.data_name + ".dat");
}

fs::path Archive::meta_path(const ArchiveKey& key) const {
    return root_ / key.date / key.device_name / (key.data_name + ".meta");
}

bool Archive::exists(const ArchiveKey& key) const { return fs::exists(data_path(key)); }

std::size_t Archive::append(const ArchiveKey& key, std::span<const Record> records, const SidecarMeta& meta) {
    validate(key);
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (std::isnan(records[i].time_index))
            throw Error(Errc::TimeRegression, "NaN time index in batch for " + key.full_name());
        if (i > 0 && records[i].time_index < records[i - 1].time_index)
            throw Error(Errc::TimeRegression, "time index decreases inside batch for " + key.full_name());
    }

    const fs::path path = data_path(key);
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(Errc::StorageError, "cannot create " + path.parent_path().string() + ": " + ec.message());

    if (!fs::exists(meta_path(key))) {
        SidecarMeta m = meta;
        m.device_name = key.device_name;
        m.data_name = key.data_name;
        write_file_atomically(meta_path(key), m.render());
    }

    Fd fd(::open(path.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644));
    if (!fd) throw_io("open", path, errno);
    // Held until close. The kernel grows the file size page by page during
    // a large write; readers that take the shared lock never see that.
    lock(fd.get(), LOCK_EX, path);
    struct stat st {};
    if (::fstat(fd.get(), &st) != 0) throw_io("stat", path, errno);
    const auto size = static_cast<off_t>(st.st_size);
    if (size % static_cast<off_t>(kRecordBytes) != 0)
        throw Error(Errc::StorageError, path.string() + " is not a whole number of records");
    if (records.empty()) return 0;
    if (size > 0) {
        std::byte last[8];
        pread_exact(fd.get(), last, 8, size - static_cast<off_t>(kRecordBytes), path);
        const double last_time = load_double(last);
        if (records.front().time_index < last_time) {
            throw Error(Errc::TimeRegression, "batch for " + key.full_name() + " starts at " +
                                                  format_double(records.front().time_index) +
                                                  " before last written " + format_double(last_time));
        }
    }

    const std::string bytes = render_binary(records);
    std::size_t written = 0;
    while (written < bytes.size()) {
        const ssize_t n = ::write(fd.get(), bytes.data() + written, bytes.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            const int err = errno;
            // Roll back the partial batch.
            [[maybe_unused]] const int rc = ::ftruncate(fd.get(), size);
            throw_io("write", path, err);
        }
        written += static_cast<std::size_t>(n);
    }
    return records.size();
}

SidecarMeta Archive::read_meta(const ArchiveKey& key) const {
    std::ifstream in(meta_path(key), std::ios::binary);
    if (!in) throw Error(Errc::KeyNotFound, "no sidecar for " + key.date + "/" + key.full_name());
    std::ostringstream buf;
    buf << in.rdbuf();
    return SidecarMeta::parse(buf.str());
}

void Archive::write_meta(const ArchiveKey& key, const SidecarMeta& meta) const {
    validate(key);
    std::error_code ec;
    fs::create_directories(meta_path(key).parent_path(), ec);
    write_file_atomically(meta_path(key), meta.render());
}

void Archive::add_gaps(const ArchiveKey& key, std::span<const GapMarker> gaps) const {
    if (gaps.empty()) return;
    SidecarMeta meta = read_meta(key);
    meta.gaps.insert(meta.gaps.end(), gaps.begin(), gaps.end());
    write_meta(key, meta);
}

std::size_t Archive::record_count(const ArchiveKey& key) const { return RecordFile(data_path(key), key).size(); }

std::uint64_t Archive::committed_bytes(const ArchiveKey& key) const { return RecordFile(data_path(key), key).bytes(); }

std::vector<Record> Archive::query(const ArchiveKey& key, double t_from, double t_to) const {
    RecordFile file(data_path(key), key);
    const auto [first, last] = file.inclusive_range(t_from, t_to);
    return file.read(first, last);
}

std::vector<Record> Archive::read_all(const ArchiveKey& key) const {
    RecordFile file(data_path(key), key);
    return file.read(0, file.size());
}

std::vector<Record> Archive::tail(const ArchiveKey& key, double after_time) const {
    RecordFile file(data_path(key), key);
    const std::size_t first = file.partition_point([&](double t) { return t <= after_time; });
    return file.read(first, file.size());
}

std::string Archive::export_records(const ArchiveKey& key, TimeRange range, ExportFormat format) const {
    RecordFile file(data_path(key), key);
    const auto [first, last] = file.inclusive_range(range.from, range.to);
    if (format == ExportFormat::Binary) return file.read_bytes(first, last);
    return render_text(file.read(first, last));
}

std::pair<ArchiveKey, ArchiveKey> Archive::write_spectral(const ArchiveKey& key_base,
                                                          std::span<const simsrc::SpectralFrame> frames,
                                                          const SidecarMeta& meta) {
    ArchiveKey amp_key = key_base;
    amp_key.data_name += "_AMP";
    ArchiveKey phs_key = key_base;
    phs_key.data_name += "_PHS";
    validate(amp_key);
    validate(phs_key);

    std::vector<Record> amp;
    std::vector<Record> phs;
    amp.reserve(frames.size());
    phs.reserve(frames.size());
    for (const auto& f : frames) {
        amp.push_back({f.time_index, f.frequency_hz, f.amplitude});
        phs.push_back({f.time_index, f.frequency_hz, f.phase_shift});
    }
    SidecarMeta amp_meta = meta;
    amp_meta.kind = FileKind::SpectralAmplitude;
    if (amp_meta.units_raw.empty()) amp_meta.units_raw = "Hz";
    SidecarMeta phs_meta = amp_meta;
    phs_meta.kind = FileKind::SpectralPhase;
    phs_meta.units_cal = "rad";
    append(amp_key, amp, amp_meta);
    append(phs_key, phs, phs_meta);
    return {amp_key, phs_key};
}

std::vector<ArchiveKey> Archive::list_keys(std::string_view date_filter, std::string_view name_prefix) const {
    std::vector<ArchiveKey> keys;
    std::error_code ec;
    if (!fs::is_directory(root_, ec)) return keys;
    for (const auto& date_dir : fs::directory_iterator(root_, ec)) {
        const std::string date = date_dir.path().filename().string();
        if (!date_dir.is_directory() || !is_valid_date(date)) continue;
        if (!date_filter.empty() && date != date_filter) continue;
        for (const auto& dev_dir : fs::directory_iterator(date_dir.path())) {
            if (!dev_dir.is_directory()) continue;
            const std::string device = dev_dir.path().filename().string();
            if (!is_valid_name(device)) continue;
            for (const auto& file : fs::directory_iterator(dev_dir.path())) {
                if (!file.is_regular_file() || file.path().extension() != ".dat") continue;
                const std::string data = file.path().stem().string();
                if (!is_valid_name(data)) continue;
                ArchiveKey key{date, device, data};
                if (!name_prefix.empty() && !key.full_name().starts_with(name_prefix)) continue;
                keys.push_back(std::move(key));
            }
        }
    }
    std::sort(keys.begin(), keys.end());
    return keys;
}

}  // namespace cryodaq::archive
