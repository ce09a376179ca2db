#include "gasket/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace gasket::io {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::vector<std::pair<Vertex, double>> sorted_entries(
    const std::unordered_map<Vertex, double, VertexHash>& values) {
    std::vector<std::pair<Vertex, double>> entries(values.begin(), values.end());
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return entries;
}

std::string value_map_json(const std::unordered_map<Vertex, double, VertexHash>& values,
                           double total) {
    std::ostringstream os;
    os << "{\"masses\": [";
    bool first = true;
    for (const auto& [v, m] : sorted_entries(values)) {
        if (!first) os << ", ";
        first = false;
        os << "[" << v.x << ", " << v.y << ", " << format_double(m) << "]";
    }
    os << "], \"total\": " << format_double(total) << "}\n";
    return os.str();
}

std::string sand_state_json(const sandpile::SandState& state) {
    return value_map_json(state.masses(), state.total());
}

std::string odometer_json(const sandpile::Odometer& odometer) {
    double total = 0.0;
    for (const auto& [v, u] : odometer.values()) total += u;
    return value_map_json(odometer.values(), total);
}

std::string value_map_csv(const std::unordered_map<Vertex, double, VertexHash>& values) {
    std::ostringstream os;
    os << "x,y,value\n";
    for (const auto& [v, m] : sorted_entries(values))
        os << v.x << "," << v.y << "," << format_double(m) << "\n";
    return os.str();
}

std::string potential_table_json(const potential::PotentialTable& table, int k) {
    std::ostringstream os;
    os << "{\"k\": " << k << ", \"values\": [";
    bool first = true;
    for (Vertex v : table.domain) {
        if (!first) os << ", ";
        first = false;
        os << "[" << v.x << ", " << v.y << ", \"" << to_string(table.at(v)) << "\"]";
    }
    os << "]}\n";
    return os.str();
}

std::string ball_table_csv(std::int64_t n_max) {
    BallStatsTable table(n_max);
    std::ostringstream os;
    os << "n,ball_size,boundary_size,b_n\n";
    for (std::int64_t n = 1; n <= n_max; ++n) {
        const auto& s = table.at(n);
        os << n << "," << s.size << "," << s.boundary_size << "," << s.b2 / 2
           << (s.b2 % 2 == 0 ? ".0" : ".5") << "\n";
    }
    return os.str();
}

std::string stabilize_report_json(const sandpile::StabilizeReport& report, double initial_mass) {
    std::ostringstream os;
    os << "{\"initial_mass\": " << format_double(initial_mass)
       << ", \"iterations\": " << report.iterations
       << ", \"residual\": " << format_double(report.residual)
       << ", \"converged\": " << (report.converged ? "true" : "false")
       << ", \"total_mass\": " << format_double(report.total_mass)
       << ", \"mass_error\": " << format_double(report.mass_error) << ", \"cluster\": [";
    bool first = true;
    for (Vertex v : report.cluster) {
        if (!first) os << ", ";
        first = false;
        os << "[" << v.x << ", " << v.y << "]";
    }
    os << "]}\n";
    return os.str();
}

ValueMap read_value_map(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(std::string("parse error: ") + e.what());
    }
    ValueMap out;
    try {
        if (!doc.contains("masses")) throw std::runtime_error("missing \"masses\" array");
        for (const auto& row : doc.at("masses")) {
            if (!row.is_array() || row.size() != 3)
                throw std::runtime_error("each entry must be [x, y, value]");
            out.entries.push_back(
                {Vertex{row.at(0).get<std::int64_t>(), row.at(1).get<std::int64_t>()},
                 row.at(2).get<double>()});
        }
        out.total = doc.value("total", 0.0);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("parse error: ") + e.what());
    }
    std::sort(out.entries.begin(), out.entries.end());
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << content;
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

}  // namespace gasket::io
