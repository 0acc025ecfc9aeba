#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace etuq {

enum class RuleKind { clenshaw_curtis, gauss_legendre };

/// A one-dimensional rule on the reference interval [-1, 1].
///
/// Weights are probabilistic: they integrate against the uniform density
/// 1/2 on [-1, 1], so they sum to one.
struct Rule1D {
    RuleKind kind = RuleKind::gauss_legendre;
    /// Level for Clenshaw-Curtis, point count for Gauss-Legendre.
    int order = 0;
    std::vector<double> nodes;
    std::vector<double> weights;

    [[nodiscard]] std::size_t size() const noexcept { return nodes.size(); }
};

/// Closed interval [lower, upper] with lower < upper.
struct Interval {
    double lower = 0.0;
    double upper = 1.0;

    [[nodiscard]] double width() const noexcept { return upper - lower; }
    [[nodiscard]] double midpoint() const noexcept { return 0.5 * (lower + upper); }
    [[nodiscard]] bool contains(double y) const noexcept { return y >= lower && y <= upper; }
};

struct MappedRule1D {
    Rule1D rule;
    Interval interval;
    std::vector<double> nodes;  ///< rule.nodes mapped affinely into interval

    [[nodiscard]] std::size_t size() const noexcept { return nodes.size(); }
    [[nodiscard]] const std::vector<double>& weights() const noexcept { return rule.weights; }
};

inline constexpr int kMaxClenshawCurtisLevel = 16;
inline constexpr int kMaxGaussLegendrePoints = 64;

/// Nested Clenshaw-Curtis rule with 2^level + 1 points (one point at level 0).
/// Throws CapacityError for level > 16 and DomainError for negative levels.
Rule1D clenshaw_curtis(int level);

/// n-point Gauss-Legendre rule, 1 <= n <= 64.
Rule1D gauss_legendre(int n);

/// Number of points of the nested CC rule at `level`.
std::size_t clenshaw_curtis_size(int level);

/// Affine map of the reference rule onto [a, b]; throws DomainError if a >= b.
MappedRule1D map_rule(const Rule1D& rule, double a, double b);
MappedRule1D map_rule(const Rule1D& rule, const Interval& interval);

/// Reference coordinate in [-1, 1] -> interval coordinate.
double to_interval(double reference, const Interval& interval) noexcept;

/// Lagrange cardinal polynomial l_i(y) over `nodes`.
/// Throws DomainError on duplicate nodes or out-of-range i.
double lagrange_basis(std::span<const double> nodes, std::size_t i, double y);

/// All cardinal polynomials at y at once; nodes must be pairwise distinct
/// (unchecked, used on validated rules).
void lagrange_basis_all(std::span<const double> nodes, double y, std::span<double> out);

} // namespace etuq
