#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "gaugelab/geometry.hpp"

namespace gaugelab {

/// Triangulated closed oriented surface. Faces are oriented by the outward
/// normal (sphere) or the (x, y) orientation (torus). Edges are stored with
/// increasing vertex indices.
struct SimplicialComplex {
    Manifold surface = Manifold::sphere();
    std::vector<Vec> vertices;
    std::vector<std::array<int, 3>> faces;
    std::vector<std::array<int, 2>> edges;
    /// Per face: edge index and sign for the oriented edges (v0v1, v1v2, v2v0).
    std::vector<std::array<int, 3>> face_edges;
    std::vector<std::array<int, 3>> face_edge_signs;
    /// Per face: corner positions in a common lift (torus faces may straddle
    /// the fundamental domain).
    std::vector<std::array<Vec, 3>> face_corners;
    int level = 0;

    int euler_characteristic() const {
        return static_cast<int>(vertices.size()) - static_cast<int>(edges.size()) + static_cast<int>(faces.size());
    }
    /// Edge vector from edges[e][0] to edges[e][1] in a consistent lift.
    Vec edge_vector(int e) const;
};

/// Icosahedron subdivided `level` times, projected to the unit sphere.
void icosphere_raw(int level, std::vector<Vec>& vertices, std::vector<std::array<int, 3>>& faces);

/// Sphere: icosphere scaled to the sphere radius. Torus: a periodic
/// (3 * 2^level)^2 grid split into triangles. Throws UnsupportedGeometry
/// for the other models.
SimplicialComplex triangulate(const Manifold& m, int level);

/// Builds edges and incidences from vertices + faces.
SimplicialComplex make_complex(const Manifold& m, std::vector<Vec> vertices,
                               std::vector<std::array<int, 3>> faces,
                               std::vector<std::array<Vec, 3>> corners = {});

/// Throws InvalidComplex unless every edge has exactly two incident faces
/// with opposite orientation.
void validate_complex(const SimplicialComplex& k);

/// OFF text format: "OFF", counts line, vertex rows, "3 a b c" face rows.
void write_off(std::ostream& os, const SimplicialComplex& k);
SimplicialComplex read_off(std::istream& is, const Manifold& m);

}  // namespace gaugelab
