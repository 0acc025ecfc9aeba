#include "etuq/error.hpp"
#include "etuq/fit.hpp"

#include <string>

namespace etuq {

CartesianGrid::CartesianGrid(std::array<std::size_t, 3> nodes, std::array<double, 3> spacing)
    : nodes_(nodes), spacing_(spacing) {
    for (int d = 0; d < 3; ++d) {
        if (nodes_[d] < 2) throw DomainError("CartesianGrid: need at least 2 nodes per axis");
        if (!(spacing_[d] > 0.0)) throw DomainError("CartesianGrid: spacing must be positive");
    }
    const auto [nx, ny, nz] = nodes_;
    if (nx * ny * nz > 5'000'000) throw CapacityError("CartesianGrid: too many nodes");

    edges_.reserve((nx - 1) * ny * nz + nx * (ny - 1) * nz + nx * ny * (nz - 1));
    for (std::size_t iz = 0; iz < nz; ++iz)
        for (std::size_t iy = 0; iy < ny; ++iy)
            for (std::size_t ix = 0; ix < nx; ++ix) {
                const std::size_t n = node(ix, iy, iz);
                if (ix + 1 < nx) edges_.push_back({n, node(ix + 1, iy, iz), Axis::x, spacing_[0]});
                if (iy + 1 < ny) edges_.push_back({n, node(ix, iy + 1, iz), Axis::y, spacing_[1]});
                if (iz + 1 < nz) edges_.push_back({n, node(ix, iy, iz + 1), Axis::z, spacing_[2]});
            }

    // Each boundary face of a cell hands a quarter of its area to each corner.
    boundary_area_.assign(node_count(), 0.0);
    const double axy = spacing_[0] * spacing_[1];
    const double axz = spacing_[0] * spacing_[2];
    const double ayz = spacing_[1] * spacing_[2];
    for (std::size_t iz = 0; iz < nz; ++iz)
        for (std::size_t iy = 0; iy < ny; ++iy)
            for (std::size_t ix = 0; ix < nx; ++ix) {
                const std::size_t n = node(ix, iy, iz);
                const double fx = (iy == 0 || iy == ny - 1 ? 0.5 : 1.0) * (iz == 0 || iz == nz - 1 ? 0.5 : 1.0);
                const double fy = (ix == 0 || ix == nx - 1 ? 0.5 : 1.0) * (iz == 0 || iz == nz - 1 ? 0.5 : 1.0);
                const double fz = (ix == 0 || ix == nx - 1 ? 0.5 : 1.0) * (iy == 0 || iy == ny - 1 ? 0.5 : 1.0);
                double a = 0.0;
                if (ix == 0 || ix == nx - 1) a += fx * ayz;
                if (iy == 0 || iy == ny - 1) a += fy * axz;
                if (iz == 0 || iz == nz - 1) a += fz * axy;
                boundary_area_[n] = a;
            }
}

std::size_t CartesianGrid::cell_count() const noexcept {
    return (nodes_[0] - 1) * (nodes_[1] - 1) * (nodes_[2] - 1);
}

std::size_t CartesianGrid::node(std::size_t ix, std::size_t iy, std::size_t iz) const {
    if (ix >= nodes_[0] || iy >= nodes_[1] || iz >= nodes_[2])
        throw DomainError("CartesianGrid: node index out of range");
    return ix + nodes_[0] * (iy + nodes_[1] * iz);
}

std::array<std::size_t, 3> CartesianGrid::node_coordinates(std::size_t id) const {
    if (id >= node_count()) throw DomainError("CartesianGrid: node id out of range");
    return {id % nodes_[0], (id / nodes_[0]) % nodes_[1], id / (nodes_[0] * nodes_[1])};
}

std::size_t CartesianGrid::cell(std::size_t ix, std::size_t iy, std::size_t iz) const {
    if (ix + 1 >= nodes_[0] || iy + 1 >= nodes_[1] || iz + 1 >= nodes_[2])
        throw DomainError("CartesianGrid: cell index out of range");
    return ix + (nodes_[0] - 1) * (iy + (nodes_[1] - 1) * iz);
}

Eigen::SparseMatrix<double> CartesianGrid::incidence() const {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(2 * edges_.size());
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        t.emplace_back(static_cast<int>(e), static_cast<int>(edges_[e].a), -1.0);
        t.emplace_back(static_cast<int>(e), static_cast<int>(edges_[e].b), 1.0);
    }
    Eigen::SparseMatrix<double> g(static_cast<Eigen::Index>(edges_.size()), static_cast<Eigen::Index>(node_count()));
    g.setFromTriplets(t.begin(), t.end());
    return g;
}

std::vector<CartesianGrid::FacetShare> CartesianGrid::facet_shares(std::size_t edge) const {
    if (edge >= edges_.size()) throw DomainError("CartesianGrid: edge index out of range");
    const Edge& e = edges_[edge];
    const auto c = node_coordinates(e.a);
    const int ax = static_cast<int>(e.axis);
    const int p = (ax + 1) % 3;
    const int q = (ax + 2) % 3;
    const double quarter = 0.25 * spacing_[p] * spacing_[q];

    std::vector<FacetShare> out;
    for (int dp = -1; dp <= 0; ++dp)
        for (int dq = -1; dq <= 0; ++dq) {
            std::array<long, 3> cc{static_cast<long>(c[0]), static_cast<long>(c[1]), static_cast<long>(c[2])};
            cc[p] += dp;
            cc[q] += dq;
            if (cc[p] < 0 || cc[q] < 0) continue;
            if (cc[p] + 1 >= static_cast<long>(nodes_[p]) || cc[q] + 1 >= static_cast<long>(nodes_[q])) continue;
            out.push_back({cell(static_cast<std::size_t>(cc[0]), static_cast<std::size_t>(cc[1]),
                                static_cast<std::size_t>(cc[2])),
                           quarter});
        }
    return out;
}

std::vector<std::size_t> CartesianGrid::node_cells(std::size_t id) const {
    const auto c = node_coordinates(id);
    std::vector<std::size_t> out;
    for (int dz = -1; dz <= 0; ++dz)
        for (int dy = -1; dy <= 0; ++dy)
            for (int dx = -1; dx <= 0; ++dx) {
                const long x = static_cast<long>(c[0]) + dx;
                const long y = static_cast<long>(c[1]) + dy;
                const long z = static_cast<long>(c[2]) + dz;
                if (x < 0 || y < 0 || z < 0) continue;
                if (x + 1 >= static_cast<long>(nodes_[0]) || y + 1 >= static_cast<long>(nodes_[1]) ||
                    z + 1 >= static_cast<long>(nodes_[2]))
                    continue;
                out.push_back(cell(static_cast<std::size_t>(x), static_cast<std::size_t>(y), static_cast<std::size_t>(z)));
            }
    return out;
}

double CartesianGrid::surface_area() const noexcept {
    const double lx = spacing_[0] * static_cast<double>(nodes_[0] - 1);
    const double ly = spacing_[1] * static_cast<double>(nodes_[1] - 1);
    const double lz = spacing_[2] * static_cast<double>(nodes_[2] - 1);
    return 2.0 * (lx * ly + lx * lz + ly * lz);
}

} // namespace etuq
