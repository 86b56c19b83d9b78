#include <cmath>
#include <map>
#include <sstream>

#include "bcr/mesh.hpp"
#include "doctest.h"

using namespace bcr;

namespace {

double twice_area(const DiskMesh& m, const std::array<int, 3>& t) {
    const Vec2 a = m.vertices[t[0]], b = m.vertices[t[1]], c = m.vertices[t[2]];
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

}  // namespace

TEST_CASE("vertex counts and basic shape") {
    const DiskMesh coarse = build_disk_mesh(0.5);
    CHECK(coarse.triangle_count() >= 12);
    const DiskMesh m = build_disk_mesh(0.05);
    CHECK(m.boundary_vertices.size() == 126);
    CHECK(m.h == 0.05);
    // boundary vertices sit on the unit circle, everything else strictly inside
    for (std::size_t v = 0; v < m.vertices.size(); ++v) {
        const double r = std::hypot(m.vertices[v].x, m.vertices[v].y);
        if (m.is_boundary(static_cast<int>(v)))
            CHECK(r == doctest::Approx(1.0).epsilon(1e-14));
        else
            CHECK(r < 1.0 - 0.5 * m.h);
    }
    // boundary angles are strictly increasing in [0, 2 pi)
    for (std::size_t i = 0; i + 1 < m.boundary_thetas.size(); ++i)
        CHECK(m.boundary_thetas[i] < m.boundary_thetas[i + 1]);
    CHECK(m.boundary_thetas.front() >= 0.0);
    CHECK(m.boundary_thetas.back() < 2.0 * M_PI);
}

TEST_CASE("all triangles positively oriented, area sums to the disk") {
    for (double h : {0.5, 0.2, 0.1, 0.05}) {
        const DiskMesh m = build_disk_mesh(h);
        double area = 0.0;
        double max_edge = 0.0;
        for (const auto& t : m.triangles) {
            const double a2 = twice_area(m, t);
            CHECK(a2 > 0.0);
            area += 0.5 * a2;
            for (int e = 0; e < 3; ++e) {
                const Vec2 p = m.vertices[t[e]];
                const Vec2 q = m.vertices[t[(e + 1) % 3]];
                max_edge = std::max(max_edge, std::hypot(p.x - q.x, p.y - q.y));
            }
        }
        CHECK(std::fabs(area - M_PI) < 2.0 * h);
        CHECK(max_edge <= 1.5 * h);
    }
}

TEST_CASE("mesh is conforming: interior edges shared twice, boundary once") {
    const DiskMesh m = build_disk_mesh(0.1);
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& t : m.triangles) {
        for (int e = 0; e < 3; ++e) {
            int a = t[e], b = t[(e + 1) % 3];
            if (a > b) std::swap(a, b);
            ++edge_count[{a, b}];
        }
    }
    std::size_t boundary_edges = 0;
    for (const auto& [edge, count] : edge_count) {
        CHECK(count <= 2);
        CHECK(count >= 1);
        if (count == 1) {
            ++boundary_edges;
            CHECK(m.is_boundary(edge.first));
            CHECK(m.is_boundary(edge.second));
        }
    }
    CHECK(boundary_edges == m.boundary_vertices.size());
    // Euler characteristic of a disk: V - E + F = 1
    const long long V = static_cast<long long>(m.vertices.size());
    const long long E = static_cast<long long>(edge_count.size());
    const long long F = static_cast<long long>(m.triangles.size());
    CHECK(V - E + F == 1);
}

TEST_CASE("save / load round trip") {
    const DiskMesh m = build_disk_mesh(0.3);
    std::stringstream ss;
    save_mesh(ss, m);
    const DiskMesh r = load_mesh(ss);
    CHECK(r.h == m.h);
    REQUIRE(r.vertices.size() == m.vertices.size());
    REQUIRE(r.triangles.size() == m.triangles.size());
    REQUIRE(r.boundary_vertices.size() == m.boundary_vertices.size());
    for (std::size_t i = 0; i < m.vertices.size(); ++i) {
        CHECK(r.vertices[i].x == m.vertices[i].x);
        CHECK(r.vertices[i].y == m.vertices[i].y);
    }
    CHECK(r.triangles == m.triangles);
    CHECK(r.boundary_vertices == m.boundary_vertices);
    for (std::size_t i = 0; i < m.boundary_thetas.size(); ++i)
        CHECK(r.boundary_thetas[i] == m.boundary_thetas[i]);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(build_disk_mesh(0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_disk_mesh(1.5), std::invalid_argument);
    CHECK_THROWS_AS(build_disk_mesh(-0.1), std::invalid_argument);
    // vertex budget: h = 1e-4 needs ~3e8 vertices, over any sane cap
    CHECK_THROWS_AS(build_disk_mesh(1e-4, 1000000), std::invalid_argument);
    std::stringstream ss("not a mesh");
    CHECK_THROWS(load_mesh(ss));
}
