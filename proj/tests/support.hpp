#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "cryodaq/registry.hpp"

namespace testsupport {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "t");
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

private:
    std::filesystem::path path_;
};

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi);
std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi);

/// Arbitrary finite double, drawn from random bit patterns (every exponent
/// range, subnormals and signed zeros included).
double any_finite(Rng& rng);

/// Strictly increasing time indices with finite random payload columns.
std::vector<cryodaq::Sample> random_records(Rng& rng, std::size_t n, double t0 = 0.0);

bool bit_equal(double a, double b);
bool bit_equal(const cryodaq::Sample& a, const cryodaq::Sample& b);
bool bit_equal(const std::vector<cryodaq::Sample>& a, const std::vector<cryodaq::Sample>& b);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& content);
std::string hex(const std::string& bytes);

/// Relative path -> contents for every regular file below root.
std::vector<std::pair<std::string, std::string>> snapshot_tree(const std::filesystem::path& root);
/// FNV-1a over sorted (path, contents) pairs.
std::uint64_t hash_tree(const std::filesystem::path& root);

struct ProcResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

/// Runs argv with stdout and stderr captured to files; waits for exit.
ProcResult run_process(const std::vector<std::string>& argv, const std::vector<std::string>& env = {});

/// Background child process with captured output.
class Child {
public:
    Child(const std::vector<std::string>& argv, const std::vector<std::string>& env = {});
    ~Child();
    Child(const Child&) = delete;
    Child& operator=(const Child&) = delete;
    ProcResult wait();
    void terminate();

private:
    int pid_ = -1;
    TempDir io_;
    bool reaped_ = false;
    int status_ = 0;
};

/// Number of <polyline elements and the point count of the first one.
struct PolylineInfo {
    int polylines = 0;
    int points = 0;
};
PolylineInfo inspect_svg(const std::string& svg);

/// Polls until the file exists and is non-empty, returning its contents.
std::string wait_for_file(const std::filesystem::path& p, double timeout_s);

}  // namespace testsupport
