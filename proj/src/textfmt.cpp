#include "cryodaq/textfmt.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

namespace cryodaq::textfmt {

std::string format_value(double v) {
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(n));
}

void append_record(std::string& out, const Sample& rec) {
    char buf[96];
    const int n = std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", rec.time_index, rec.raw, rec.calibrated);
    out.append(buf, static_cast<std::size_t>(n));
}

std::string format_record(const Sample& rec) {
    std::string s;
    append_record(s, rec);
    return s;
}

std::optional<Sample> parse_record(std::string_view line) {
    if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
    std::string buf(line);
    const char* p = buf.c_str();
    double vals[3];
    for (int i = 0; i < 3; ++i) {
        if (i > 0) {
            if (*p != ' ') return std::nullopt;
            ++p;
        }
        if (*p == ' ' || *p == '\0') return std::nullopt;
        char* end = nullptr;
        vals[i] = std::strtod(p, &end);
        if (end == p) return std::nullopt;
        p = end;
    }
    if (*p != '\0') return std::nullopt;
    return Sample{vals[0], vals[1], vals[2]};
}

}  // namespace cryodaq::textfmt
