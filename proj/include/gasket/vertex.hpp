// Lattice vertex of the doubly-infinite Sierpinski gasket graph.
//
// Vertices are addressed by integer coordinates (x, y). The positive branch
// lives in the quadrant x >= 0, y >= 0, the negative branch is its mirror
// image through the origin; the origin belongs to both. The graph distance
// to the origin is |x| + |y|.
#pragma once

#include <compare>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <string>

namespace gasket {

struct Vertex {
    std::int64_t x = 0;
    std::int64_t y = 0;

    friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

inline std::int64_t radius(Vertex v) { return std::llabs(v.x) + std::llabs(v.y); }

inline Vertex operator+(Vertex a, Vertex b) { return {a.x + b.x, a.y + b.y}; }
inline Vertex operator-(Vertex a, Vertex b) { return {a.x - b.x, a.y - b.y}; }
inline Vertex operator-(Vertex a) { return {-a.x, -a.y}; }

inline std::string to_string(Vertex v) {
    return "(" + std::to_string(v.x) + "," + std::to_string(v.y) + ")";
}

struct VertexHash {
    std::size_t operator()(Vertex v) const {
        // splitmix64 over the packed coordinates
        std::uint64_t z = static_cast<std::uint64_t>(v.x) * 0x9e3779b97f4a7c15ULL +
                          static_cast<std::uint64_t>(v.y);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return static_cast<std::size_t>(z ^ (z >> 31));
    }
};

}  // namespace gasket
