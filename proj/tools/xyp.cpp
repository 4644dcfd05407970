// xyp: archive query, export and plot tool.
//
//   xyp --date 2026-10-18 --device TS01 --data TEMP --format text
//   xyp ... --format svg --out temp.svg
//   xyp ... --follow 1.0            keep polling for new records
//   xyp --list [--date D] [--prefix P]
//
// Exit codes: 0 ok, 1 key not found, 2 bad flags, 3 archive error.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <thread>

#include "CLI11.hpp"
#include "cryodaq/archive.hpp"
#include "cryodaq/error.hpp"
#include "cryodaq/plot.hpp"

namespace {

using namespace cryodaq;

class Output {
public:
    explicit Output(const std::string& path) : path_(path) {
        if (!path_.empty()) {
            file_.open(path_, std::ios::binary | std::ios::trunc);
            if (!file_) throw Error(Errc::StorageError, "cannot write " + path_);
        }
    }
    void write(const std::string& bytes) {
        std::ostream& os = path_.empty() ? std::cout : file_;
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        os.flush();
    }
    void rewrite(const std::string& bytes) {
        if (path_.empty()) return write(bytes);
        file_.close();
        file_.open(path_, std::ios::binary | std::ios::trunc);
        write(bytes);
    }

private:
    std::string path_;
    std::ofstream file_;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"xyp - archive query, export and plot"};
    std::string root;
    std::string device;
    std::string data;
    std::string date;
    double t_from = -std::numeric_limits<double>::infinity();
    double t_to = std::numeric_limits<double>::infinity();
    std::string format = "text";
    std::string out_path;
    double follow = 0.0;
    long polls = 0;
    bool list = false;
    std::string prefix;

    app.add_option("--root", root, "archive root (default $CRYODAQ_ROOT)");
    app.add_option("--device", device, "device name");
    app.add_option("--data", data, "data name");
    app.add_option("--date", date, "recording date YYYY-MM-DD");
    app.add_option("--from", t_from, "first time index (inclusive)");
    app.add_option("--to", t_to, "last time index (inclusive)");
    app.add_option("--format", format, "text, binary or svg")->check(CLI::IsMember({"text", "binary", "svg"}));
    app.add_option("--out", out_path, "output file (default stdout)");
    app.add_option("--follow", follow, "poll for new records every N seconds")->check(CLI::PositiveNumber);
    app.add_option("--polls", polls, "stop following after N polls (0 = forever)")->check(CLI::NonNegativeNumber);
    app.add_flag("--list", list, "list archive keys instead of querying");
    app.add_option("--prefix", prefix, "with --list: DEVICE.DATA prefix filter");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (root.empty()) {
        if (const char* env = std::getenv("CRYODAQ_ROOT")) root = env;
    }
    if (root.empty()) {
        std::cerr << "xyp: no archive root (--root or CRYODAQ_ROOT)\n";
        return 2;
    }
    archive::Archive arch(root);

    if (list) {
        for (const auto& k : arch.list_keys(date, prefix)) std::cout << k.date << ' ' << k.full_name() << '\n';
        return 0;
    }
    if (device.empty() || data.empty() || date.empty()) {
        std::cerr << "xyp: --device, --data and --date are required\n";
        return 2;
    }
    if (!(t_from <= t_to)) {
        std::cerr << "xyp: --from must not exceed --to\n";
        return 2;
    }
    const archive::ArchiveKey key{date, device, data};
    try {
        archive::validate(key);
    } catch (const Error& e) {
        std::cerr << "xyp: " << e.what() << '\n';
        return 2;
    }

    try {
        Output out(out_path);
        const archive::TimeRange range{t_from, t_to};
        auto labels = [&] {
            plot::PlotLabels l;
            l.title = date + " " + key.full_name();
            l.y_label = data;
            try {
                const auto meta = arch.read_meta(key);
                if (!meta.units_cal.empty()) l.y_label += " [" + meta.units_cal + "]";
            } catch (const Error&) {
            }
            return l;
        };

        if (follow <= 0.0) {
            if (format == "svg") {
                const auto records = arch.query(key, t_from, t_to);
                out.write(plot::render_svg(records, labels()));
            } else {
                out.write(arch.export_records(
                    key, range, format == "binary" ? archive::ExportFormat::Binary : archive::ExportFormat::Text));
            }
            return 0;
        }

        // Follow mode: the key may not exist yet while a session starts up.
        std::vector<archive::Record> seen;
        std::size_t total = 0;
        double last = std::nextafter(t_from, -std::numeric_limits<double>::infinity());
        for (long poll = 1;; ++poll) {
            std::vector<archive::Record> fresh;
            if (arch.exists(key)) fresh = arch.tail(key, last);
            std::erase_if(fresh, [&](const archive::Record& r) { return r.time_index > t_to; });
            if (!fresh.empty()) {
                last = fresh.back().time_index;
                total += fresh.size();
                if (format == "svg") {
                    seen.insert(seen.end(), fresh.begin(), fresh.end());
                    out.rewrite(plot::render_svg(seen, labels()));
                } else if (format == "binary") {
                    out.write(archive::render_binary(fresh));
                } else {
                    out.write(archive::render_text(fresh));
                }
            }
            std::cerr << "xyp: poll=" << poll << " new=" << fresh.size() << " total=" << total << '\n';
            if (polls > 0 && poll >= polls) break;
            std::this_thread::sleep_for(std::chrono::duration<double>(follow));
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << "xyp: " << e.what() << '\n';
        return e.code() == Errc::KeyNotFound ? 1 : 3;
    }
}
