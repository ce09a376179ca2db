// Deterministic file formats: sorted keys, fixed float formatting with 17
// significant digits, so identical inputs produce identical bytes.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gasket/potential.hpp"
#include "gasket/sandpile.hpp"

namespace gasket::io {

std::string format_double(double x);  // %.17g

// Vertex/value pairs sorted by vertex.
std::vector<std::pair<Vertex, double>> sorted_entries(
    const std::unordered_map<Vertex, double, VertexHash>& values);

// {"masses": [[x, y, value], ...], "total": M}
std::string value_map_json(const std::unordered_map<Vertex, double, VertexHash>& values,
                           double total);
std::string sand_state_json(const sandpile::SandState& state);
std::string odometer_json(const sandpile::Odometer& odometer);

// x,y,value rows.
std::string value_map_csv(const std::unordered_map<Vertex, double, VertexHash>& values);

// {"k": k, "values": [[x, y, "integer"], ...]}
std::string potential_table_json(const potential::PotentialTable& table, int k);

// CSV of n, |B_n|, |dB_n|, b_n for 1 <= n <= n_max.
std::string ball_table_csv(std::int64_t n_max);

// Stabilization report as JSON.
std::string stabilize_report_json(const sandpile::StabilizeReport& report, double initial_mass);

struct ValueMap {
    std::vector<std::pair<Vertex, double>> entries;
    double total = 0.0;
};

// Parses the value_map_json schema; throws std::runtime_error with the
// parser's position on malformed input.
ValueMap read_value_map(const std::string& text);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace gasket::io
