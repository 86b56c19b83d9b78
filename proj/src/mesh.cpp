#include "bcr/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace bcr {

bool DiskMesh::is_boundary(int v) const {
    return std::binary_search(boundary_vertices.begin(), boundary_vertices.end(), v);
}

namespace {

// Stitch two concentric vertex rings with a strip of CCW triangles. The walk
// keeps one position per ring and always advances across the shorter of the
// two possible diagonals, which keeps the strip aligned and its edges short.
void stitch_rings(std::vector<std::array<int, 3>>& tris,
                  const std::vector<Vec2>& verts, const std::vector<int>& inner,
                  const std::vector<double>& inner_theta, const std::vector<int>& outer,
                  const std::vector<double>& outer_theta) {
    const std::size_t ni = inner.size();
    const std::size_t no = outer.size();

    // Rotate the outer walk so it starts at the vertex angularly closest to
    // inner[0]; that keeps the seam free of slivers.
    std::size_t j0 = 0;
    double best = 1e30;
    for (std::size_t k = 0; k < no; ++k) {
        const double d =
            std::fabs(std::remainder(outer_theta[k] - inner_theta[0], 2.0 * M_PI));
        if (d < best) {
            best = d;
            j0 = k;
        }
    }

    auto vin = [&](std::size_t i) { return verts[inner[i % ni]]; };
    auto vout = [&](std::size_t j) { return verts[outer[(j0 + j) % no]]; };
    auto dist2 = [](Vec2 a, Vec2 b) {
        const double dx = a.x - b.x, dy = a.y - b.y;
        return dx * dx + dy * dy;
    };

    std::size_t i = 0, j = 0;
    while (i < ni || j < no) {
        const double di = i < ni ? dist2(vin(i + 1), vout(j)) : 1e300;
        const double dj = j < no ? dist2(vin(i), vout(j + 1)) : 1e300;
        if (di <= dj) {
            // apex on the outer ring; outer lies right of the inner edge, so
            // the CCW order is inner, outer, next inner
            tris.push_back({inner[i % ni], outer[(j0 + j) % no], inner[(i + 1) % ni]});
            ++i;
        } else {
            tris.push_back({inner[i % ni], outer[(j0 + j) % no], outer[(j0 + j + 1) % no]});
            ++j;
        }
    }
}

}  // namespace

DiskMesh build_disk_mesh(double h, std::size_t max_vertices) {
    if (!(h > 0.0) || !(h < 1.0) || !std::isfinite(h))
        throw std::invalid_argument("build_disk_mesh: h must lie in (0, 1)");

    DiskMesh mesh;
    mesh.h = h;
    const int rings = static_cast<int>(std::ceil(1.0 / h));
    const double projected =
        M_PI * static_cast<double>(rings) * (rings + 1.0) + 1.0 + rings;
    if (projected > static_cast<double>(max_vertices))
        throw std::invalid_argument(
            "build_disk_mesh: h would exceed the vertex budget");

    mesh.vertices.push_back({0.0, 0.0});
    std::vector<int> prev_ring;        // just the center
    std::vector<double> prev_theta;

    for (int k = 1; k <= rings; ++k) {
        const double r = static_cast<double>(k) / rings;
        const int count = static_cast<int>(std::ceil(2.0 * M_PI * k));
        const double offset = (k % 2 == 0) ? 0.5 : 0.0;  // stagger alternate rings
        std::vector<int> ring(count);
        std::vector<double> theta(count);
        for (int i = 0; i < count; ++i) {
            const double t = 2.0 * M_PI * (i + offset) / count;
            ring[i] = static_cast<int>(mesh.vertices.size());
            theta[i] = t;
            mesh.vertices.push_back({r * std::cos(t), r * std::sin(t)});
        }
        if (k == 1) {
            for (int i = 0; i < count; ++i)
                mesh.triangles.push_back({0, ring[i], ring[(i + 1) % count]});
        } else {
            stitch_rings(mesh.triangles, mesh.vertices, prev_ring, prev_theta, ring,
                         theta);
        }
        if (k == rings) {
            mesh.boundary_vertices = ring;
            mesh.boundary_thetas = theta;
        }
        prev_ring = std::move(ring);
        prev_theta = std::move(theta);
    }
    return mesh;
}

void save_mesh(std::ostream& os, const DiskMesh& mesh) {
    os << "diskmesh 1\n";
    os << mesh.h << ' ' << mesh.vertices.size() << ' ' << mesh.triangles.size() << ' '
       << mesh.boundary_vertices.size() << '\n';
    os.precision(17);
    for (const Vec2& v : mesh.vertices) os << v.x << ' ' << v.y << '\n';
    for (const auto& t : mesh.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    for (std::size_t i = 0; i < mesh.boundary_vertices.size(); ++i)
        os << mesh.boundary_vertices[i] << ' ' << mesh.boundary_thetas[i] << '\n';
}

void save_mesh(const std::string& path, const DiskMesh& mesh) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open mesh file for writing: " + path);
    save_mesh(os, mesh);
    if (!os.good()) throw std::runtime_error("failed writing mesh file: " + path);
}

DiskMesh load_mesh(std::istream& is) {
    std::string magic;
    int version = 0;
    is >> magic >> version;
    if (magic != "diskmesh" || version != 1)
        throw std::runtime_error("not a disk mesh file");
    DiskMesh mesh;
    std::size_t nv = 0, nt = 0, nb = 0;
    is >> mesh.h >> nv >> nt >> nb;
    if (!is) throw std::runtime_error("malformed mesh header");
    mesh.vertices.resize(nv);
    for (auto& v : mesh.vertices) is >> v.x >> v.y;
    mesh.triangles.resize(nt);
    for (auto& t : mesh.triangles) is >> t[0] >> t[1] >> t[2];
    mesh.boundary_vertices.resize(nb);
    mesh.boundary_thetas.resize(nb);
    for (std::size_t i = 0; i < nb; ++i)
        is >> mesh.boundary_vertices[i] >> mesh.boundary_thetas[i];
    if (!is) throw std::runtime_error("malformed mesh body");
    return mesh;
}

DiskMesh load_mesh(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open mesh file: " + path);
    return load_mesh(is);
}

}  // namespace bcr
