#pragma once

#include "etuq/quadrature.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace etuq {

/// Growth rule mapping a per-dimension index j to a polynomial degree p(j).
/// smolyak: p(0) = 0, p(j) = 2^j on nested Clenshaw-Curtis nodes.
/// total_degree: p(j) = j on Gauss-Legendre nodes.
enum class Growth { smolyak, total_degree };

using MultiIndex = std::vector<int>;

/// Polynomial degree p(j) of the 1D rule attached to index j.
int growth_degree(Growth growth, int j);

/// 1D reference rule with p(j) + 1 points for the given growth.
Rule1D growth_rule(Growth growth, int j);

struct MultiIndexSet {
    int dim = 0;
    int level = 0;
    Growth growth = Growth::smolyak;
    /// All j with |j| <= level, graded by |j| then reverse-lexicographic.
    std::vector<MultiIndex> indices;
    /// Smolyak combination coefficient per index; zero outside the band
    /// level - dim + 1 <= |j| <= level.
    std::vector<long long> coefficients;

    /// Positions (into `indices`) of the indices with nonzero coefficient.
    [[nodiscard]] std::vector<std::size_t> band() const;
};

inline constexpr std::size_t kMaxMultiIndexCount = 10'000'000;

/// (-1)^(level - |j|) * C(dim - 1, level - |j|) on the band, else 0.
long long smolyak_coefficient(int dim, int level, int norm);

MultiIndexSet build_multi_index_set(int dim, int level, Growth growth);

/// One tensor grid of the combination: the multi-index, its coefficient and
/// the ids of its points in the deduplicated sparse grid (first dimension
/// fastest).
struct TensorComponent {
    MultiIndex index;
    long long coefficient = 0;
    std::vector<std::size_t> point_ids;
};

struct SparseGrid {
    int dim = 0;
    int level = 0;
    Growth growth = Growth::smolyak;
    std::vector<Interval> intervals;
    /// Row-major points: point p occupies [p*dim, (p+1)*dim).
    std::vector<double> points;
    std::vector<double> weights;
    /// For each point, the components (indices into `components`) containing it.
    std::vector<std::vector<std::size_t>> provenance;
    std::vector<TensorComponent> components;

    [[nodiscard]] std::size_t size() const noexcept { return weights.size(); }
    [[nodiscard]] std::span<const double> point(std::size_t p) const
    {
        return {points.data() + p * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
    }
};

inline constexpr std::size_t kMaxSparseGridPoints = 5'000'000;

/// Union of the band tensor grids with combined signed weights. Points are
/// deduplicated on reference coordinates rounded to 1e-12.
SparseGrid build_sparse_grid(int dim, int level, Growth growth, std::span<const Interval> intervals);

struct QuadratureMoments {
    double mean = 0.0;           ///< sum w_i v_i
    double second_moment = 0.0;  ///< sum w_i v_i^2
};

QuadratureMoments sparse_quadrature(const SparseGrid& grid, std::span<const double> values);

/// Smolyak interpolant A_{level,dim} built from values at the grid points.
class SmolyakInterpolant {
public:
    SmolyakInterpolant(const SparseGrid& grid, std::span<const double> values);

    /// Throws DomainError for y outside the product of intervals.
    [[nodiscard]] double operator()(std::span<const double> y) const;

private:
    struct Component {
        long long coefficient;
        std::vector<std::vector<double>> nodes;  // mapped nodes per dimension
        std::vector<double> values;              // tensor values, first dim fastest
    };
    int dim_;
    std::vector<Interval> intervals_;
    std::vector<Component> components_;
};

/// CSV export: one row per point, dim coordinates then the weight.
void write_grid_csv(std::ostream& out, const SparseGrid& grid);

} // namespace etuq
