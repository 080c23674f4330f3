#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tcs/sim/types.hpp"

namespace tcs::lab {

inline std::string fmt(double v) {
    if (!std::isfinite(v)) return "NA";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir);
}

// Plain CSV emitter with a fixed column order; all rows must match the header
// width, which keeps emitted files byte-stable across runs.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns)
        : out_(path, std::ios::trunc), width_(columns.size()) {
        if (!out_) throw std::runtime_error("cannot open " + path);
        write_row(columns);
    }

    void write_row(const std::vector<std::string>& cells) {
        if (cells.size() != width_) {
            throw std::invalid_argument("csv row width mismatch");
        }
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
    std::size_t width_;
};

// One newline-delimited JSON record per simulated day.
inline nlohmann::json day_record(const DayOutcome& out, double reward,
                                 std::uint64_t seed) {
    nlohmann::json j;
    j["seed"] = seed;
    j["day"] = out.day;
    j["toll_m"] = out.toll.amplitude;
    j["toll_mu"] = out.toll.center;
    j["toll_sigma"] = out.toll.width;
    j["price"] = out.price;
    j["net_revenue"] = out.net_revenue;
    j["aitt"] = out.aitt;
    j["car_aitt"] = out.car_aitt;
    j["pt_share"] = out.pt_share;
    j["welfare_per_capita"] = out.welfare_per_capita;
    j["reward"] = reward;
    j["overrun"] = out.overrun;
    j["flows"] = out.departure_flows;
    return j;
}

class NdjsonWriter {
public:
    explicit NdjsonWriter(const std::string& path) : out_(path, std::ios::trunc) {
        if (!out_) throw std::runtime_error("cannot open " + path);
    }

    void write(const nlohmann::json& j) { out_ << j.dump() << '\n'; }

private:
    std::ofstream out_;
};

}  // namespace tcs::lab
