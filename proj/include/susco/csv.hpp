#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "susco/constellation.hpp"
#include "susco/errors.hpp"

namespace susco {

// Shortest representation that round-trips the double exactly, so identical
// runs serialize to identical bytes.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidConfig("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidConfig("cannot write file: " + path);
    out << content;
    if (!out) throw InvalidConfig("short write: " + path);
}

// Catalog columns: dish_id,lat_deg,lon_deg,bandwidth_mbps,failure_rate,kind.
inline std::vector<Dish> parse_dish_catalog(const std::string& text) {
    std::vector<Dish> dishes;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.rfind("dish_id", 0) == 0) continue;  // column header
        auto cols = split(t, ',');
        if (cols.size() != 6)
            throw InvalidConfig("dish catalog line " + std::to_string(line_no) +
                                ": expected 6 columns");
        try {
            Dish d;
            d.id = DishId(std::stol(trim(cols[0])));
            d.location.lat_deg = std::stod(trim(cols[1]));
            d.location.lon_deg = std::stod(trim(cols[2]));
            d.bandwidth_mbps = std::stod(trim(cols[3]));
            d.failure_rate = std::stod(trim(cols[4]));
            std::string kind = trim(cols[5]);
            if (kind == "ground_station" || kind == "gs")
                d.kind = DishKind::ground_station;
            else if (kind == "base_station" || kind == "bs")
                d.kind = DishKind::base_station;
            else
                throw InvalidConfig("dish catalog line " + std::to_string(line_no) +
                                    ": unknown kind '" + kind + "'");
            dishes.push_back(d);
        } catch (const InvalidConfig&) {
            throw;
        } catch (const std::exception&) {
            throw InvalidConfig("dish catalog line " + std::to_string(line_no) +
                                ": malformed number");
        }
    }
    for (std::size_t i = 0; i < dishes.size(); ++i)
        for (std::size_t j = i + 1; j < dishes.size(); ++j)
            if (dishes[i].id == dishes[j].id)
                throw InvalidConfig("dish catalog: duplicate dish id " +
                                    std::to_string(dishes[i].id));
    return dishes;
}

inline std::vector<Dish> load_dish_catalog(const std::string& path) {
    return parse_dish_catalog(read_text_file(path));
}

}  // namespace susco
