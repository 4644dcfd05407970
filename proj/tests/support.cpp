#include "support.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace fs = std::filesystem;

namespace testsupport {

TempDir::TempDir(const std::string& tag) {
    std::random_device rd;
    for (int attempt = 0; attempt < 100; ++attempt) {
        auto p = fs::temp_directory_path() / ("cryodaq-" + tag + "-" + std::to_string(rd()));
        if (fs::create_directory(p)) {
            path_ = p;
            return;
        }
    }
    throw std::runtime_error("cannot create temp dir");
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

double any_finite(Rng& rng) {
    for (;;) {
        const double d = std::bit_cast<double>(rng());
        if (std::isfinite(d)) return d;
    }
}

std::vector<cryodaq::Sample> random_records(Rng& rng, std::size_t n, double t0) {
    std::vector<cryodaq::Sample> out;
    out.reserve(n);
    double t = t0;
    for (std::size_t i = 0; i < n; ++i) {
        // occasional repeated time index: the archive only forbids going back
        if (i == 0 || uniform_int(rng, 0, 9) != 0) t += uniform(rng, 1e-6, 1.0);
        out.push_back({t, any_finite(rng), any_finite(rng)});
    }
    return out;
}

bool bit_equal(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

bool bit_equal(const cryodaq::Sample& a, const cryodaq::Sample& b) {
    return bit_equal(a.time_index, b.time_index) && bit_equal(a.raw, b.raw) && bit_equal(a.calibrated, b.calibrated);
}

bool bit_equal(const std::vector<cryodaq::Sample>& a, const std::vector<cryodaq::Sample>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!bit_equal(a[i], b[i])) return false;
    return true;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + p.string());
}

std::string hex(const std::string& bytes) {
    static const char* digits = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : bytes) {
        out += digits[c >> 4];
        out += digits[c & 15];
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> snapshot_tree(const fs::path& root) {
    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file()) continue;
        files.emplace_back(fs::relative(e.path(), root).generic_string(), read_file(e.path()));
    }
    std::sort(files.begin(), files.end());
    return files;
}

std::uint64_t hash_tree(const fs::path& root) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        h ^= 0xff;
        h *= 0x100000001b3ULL;
    };
    for (const auto& [name, content] : snapshot_tree(root)) {
        mix(name);
        mix(content);
    }
    return h;
}

namespace {

int spawn(const std::vector<std::string>& argv, const std::vector<std::string>& env, const fs::path& out,
          const fs::path& err) {
    const pid_t pid = ::fork();
    if (pid < 0) throw std::runtime_error("fork failed");
    if (pid == 0) {
        const int o = ::open(out.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
        const int e = ::open(err.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
        if (o < 0 || e < 0) ::_exit(127);
        ::dup2(o, 1);
        ::dup2(e, 2);
        for (const auto& kv : env) ::putenv(const_cast<char*>(kv.c_str()));
        std::vector<char*> args;
        for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
        args.push_back(nullptr);
        ::execv(args[0], args.data());
        ::_exit(127);
    }
    return pid;
}

int decode_status(int status) {
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    if (WIFSIGNALED(status)) return 128 + WTERMSIG(status);
    return -1;
}

}  // namespace

ProcResult run_process(const std::vector<std::string>& argv, const std::vector<std::string>& env) {
    Child child(argv, env);
    return child.wait();
}

Child::Child(const std::vector<std::string>& argv, const std::vector<std::string>& env) : io_("proc") {
    pid_ = spawn(argv, env, io_ / "out", io_ / "err");
}

Child::~Child() {
    if (!reaped_) {
        terminate();
        wait();
    }
}

ProcResult Child::wait() {
    if (!reaped_) {
        int status = 0;
        while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
        }
        status_ = status;
        reaped_ = true;
    }
    ProcResult r;
    r.exit_code = decode_status(status_);
    r.out = read_file(io_ / "out");
    r.err = read_file(io_ / "err");
    return r;
}

void Child::terminate() {
    if (!reaped_) ::kill(pid_, SIGTERM);
}

PolylineInfo inspect_svg(const std::string& svg) {
    PolylineInfo info;
    std::size_t pos = 0;
    while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
        if (info.polylines++ == 0) {
            const auto a = svg.find("points=\"", pos);
            const auto b = svg.find('"', a + 8);
            const std::string pts = svg.substr(a + 8, b - a - 8);
            std::istringstream in(pts);
            std::string tok;
            while (in >> tok) ++info.points;
        }
        pos += 9;
    }
    return info;
}

std::string wait_for_file(const fs::path& p, double timeout_s) {
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_s);
    while (std::chrono::steady_clock::now() < deadline) {
        std::error_code ec;
        if (fs::exists(p, ec) && fs::file_size(p, ec) > 0) return read_file(p);
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    throw std::runtime_error("timed out waiting for " + p.string());
}

}  // namespace testsupport
