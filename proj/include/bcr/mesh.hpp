#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace bcr {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// Conforming triangulation of the unit disk built from concentric vertex
// rings. Triangles are indexed counterclockwise; boundary vertices lie
// exactly on the unit circle (up to one rounding of cos/sin) and keep the
// angle they were constructed with.
struct DiskMesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<int> boundary_vertices;   // ascending angle order
    std::vector<double> boundary_thetas;  // angle of each boundary vertex
    double h = 0.0;                       // requested spacing

    std::size_t vertex_count() const { return vertices.size(); }
    std::size_t triangle_count() const { return triangles.size(); }
    bool is_boundary(int v) const;
};

// Build a disk mesh with target edge length h: ring k of K = ceil(1/h) sits
// at radius k/K and carries ceil(2 pi k) vertices, so boundary spacing never
// exceeds h. Alternating rings are staggered by half a step to keep the
// triangles well shaped. Throws if the vertex count would exceed the cap.
DiskMesh build_disk_mesh(double h, std::size_t max_vertices = 4'000'000);

// Plain-text round trip (counts header, then vertices, triangles, boundary).
void save_mesh(std::ostream& os, const DiskMesh& mesh);
void save_mesh(const std::string& path, const DiskMesh& mesh);
DiskMesh load_mesh(std::istream& is);
DiskMesh load_mesh(const std::string& path);

}  // namespace bcr
