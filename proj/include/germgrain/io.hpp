#pragma once

// Point pattern CSV IO and a tiny row-oriented CSV writer. Doubles are
// printed with %.17g so that read-back reproduces the exact bit pattern.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"

namespace germgrain {

inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') { out.push_back(cur); cur.clear(); }
        else if (c != '\r') cur.push_back(c);
    }
    out.push_back(cur);
    return out;
}

/// Pattern file format: comment sidecars carrying the window and margin,
/// a header row naming the axes, then one point per row.
///
///   # window x_lo y_lo x_hi y_hi
///   # margin 0.5
///   x,y
///   0.25,0.75
inline void write_pattern_csv(std::ostream& os, const PointPattern& pat) {
    os << "# window";
    for (double v : pat.window.lower) os << ' ' << format_double(v);
    for (double v : pat.window.upper) os << ' ' << format_double(v);
    os << '\n';
    os << "# margin " << format_double(pat.margin_used) << '\n';
    static const char* axes[3] = {"x", "y", "z"};
    for (int k = 0; k < pat.dim; ++k) os << (k ? "," : "") << (k < 3 ? axes[k] : ("c" + std::to_string(k)).c_str());
    os << '\n';
    for (std::size_t i = 0; i < pat.size(); ++i) {
        auto p = pat.point(i);
        for (int k = 0; k < pat.dim; ++k) os << (k ? "," : "") << format_double(p[static_cast<std::size_t>(k)]);
        os << '\n';
    }
}

inline void write_pattern_csv(const std::string& path, const PointPattern& pat) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    write_pattern_csv(f, pat);
}

inline double parse_double(const std::string& s) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw std::runtime_error("bad number in csv: '" + s + "'");
    return v;
}

inline PointPattern read_pattern_csv(std::istream& is) {
    std::string line;
    Point lo, hi;
    double margin = 0.0;
    bool have_window = false, have_header = false;
    PointPattern pat;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ss(line.substr(1));
            std::string tag;
            ss >> tag;
            if (tag == "window") {
                std::vector<double> vals;
                double v;
                while (ss >> v) vals.push_back(v);
                if (vals.empty() || vals.size() % 2 != 0) throw std::runtime_error("bad window sidecar");
                std::size_t d = vals.size() / 2;
                lo.assign(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(d));
                hi.assign(vals.begin() + static_cast<std::ptrdiff_t>(d), vals.end());
                have_window = true;
            } else if (tag == "margin") {
                ss >> margin;
            }
            continue;
        }
        if (!have_header) {
            have_header = true;  // axis names; count gives the dimension
            if (!have_window) throw std::runtime_error("pattern csv: missing window sidecar");
            pat = PointPattern(Window(lo, hi), margin);
            if (static_cast<std::size_t>(pat.dim) != split_csv_line(line).size())
                throw std::runtime_error("pattern csv: header width != window dimension");
            continue;
        }
        auto cells = split_csv_line(line);
        if (static_cast<int>(cells.size()) != pat.dim) throw std::runtime_error("pattern csv: bad row width");
        Point p(cells.size());
        for (std::size_t k = 0; k < cells.size(); ++k) p[k] = parse_double(cells[k]);
        pat.push_back(p);
    }
    if (!have_header) throw std::runtime_error("pattern csv: empty file");
    return pat;
}

inline PointPattern read_pattern_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open for read: " + path);
    return read_pattern_csv(f);
}

/// Row-oriented CSV writer: fixed header, cells formatted on append.
struct CsvWriter {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    explicit CsvWriter(std::vector<std::string> cols) : header(std::move(cols)) {}

    struct Row {
        CsvWriter* w;
        std::vector<std::string> cells;
        Row& add(double v) { cells.push_back(format_double(v)); return *this; }
        Row& add(const std::string& v) { cells.push_back(v); return *this; }
        Row& add(std::int64_t v) { cells.push_back(std::to_string(v)); return *this; }
        Row& add(std::uint64_t v) { cells.push_back(std::to_string(v)); return *this; }
        Row& add(int v) { cells.push_back(std::to_string(v)); return *this; }
        void commit() {
            if (cells.size() != w->header.size()) throw std::logic_error("csv row width mismatch");
            w->rows.push_back(std::move(cells));
        }
    };
    Row row() { return Row{this, {}}; }

    void write(std::ostream& os) const {
        for (std::size_t k = 0; k < header.size(); ++k) os << (k ? "," : "") << header[k];
        os << '\n';
        for (const auto& r : rows) {
            for (std::size_t k = 0; k < r.size(); ++k) os << (k ? "," : "") << r[k];
            os << '\n';
        }
    }
    void write(const std::string& path) const {
        std::ofstream f(path);
        if (!f) throw std::runtime_error("cannot open for write: " + path);
        write(f);
    }
    std::string str() const {
        std::ostringstream ss;
        write(ss);
        return ss.str();
    }
};

}  // namespace germgrain
