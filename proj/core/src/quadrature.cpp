#include "etuq/quadrature.hpp"

#include "etuq/error.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <algorithm>

namespace etuq {

namespace {

constexpr double kPi = std::numbers::pi;

// Force exact antisymmetry of nodes and symmetry of weights about zero.
void symmetrize(Rule1D& rule)
{
    const std::size_t m = rule.nodes.size();
    for (std::size_t k = 0; k < m / 2; ++k) {
        const std::size_t mirror = m - 1 - k;
        const double x = 0.5 * (rule.nodes[mirror] - rule.nodes[k]);
        rule.nodes[k] = -x;
        rule.nodes[mirror] = x;
        const double w = 0.5 * (rule.weights[k] + rule.weights[mirror]);
        rule.weights[k] = w;
        rule.weights[mirror] = w;
    }
    if (m % 2 == 1) {
        rule.nodes[m / 2] = 0.0;
    }
}

} // namespace

std::size_t clenshaw_curtis_size(int level)
{
    if (level < 0) {
        throw DomainError("clenshaw_curtis: negative level");
    }
    if (level > kMaxClenshawCurtisLevel) {
        throw CapacityError("clenshaw_curtis: level " + std::to_string(level) + " exceeds cap " +
                            std::to_string(kMaxClenshawCurtisLevel));
    }
    return level == 0 ? 1 : (std::size_t{1} << level) + 1;
}

Rule1D clenshaw_curtis(int level)
{
    const std::size_t m = clenshaw_curtis_size(level);
    Rule1D rule;
    rule.kind = RuleKind::clenshaw_curtis;
    rule.order = level;
    if (m == 1) {
        rule.nodes = {0.0};
        rule.weights = {1.0};
        return rule;
    }

    const std::size_t n = m - 1;  // even
    rule.nodes.resize(m);
    rule.weights.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        // Extrema of T_n. The argument k/n is the same rational at every level
        // that contains the node, so nested nodes are bitwise identical.
        const double theta = kPi * (static_cast<double>(k) / static_cast<double>(n));
        double sum = 0.0;
        for (std::size_t j = 1; j <= n / 2; ++j) {
            const double b = (2 * j == n) ? 1.0 : 2.0;
            const double jj = static_cast<double>(j);
            sum += b / (4.0 * jj * jj - 1.0) * std::cos(2.0 * jj * theta);
        }
        const double c = (k == 0 || k == n) ? 1.0 : 2.0;
        // ascending order: reference node cos(theta) decreases with k
        rule.nodes[n - k] = std::cos(theta);
        rule.weights[n - k] = 0.5 * c / static_cast<double>(n) * (1.0 - sum);
    }
    symmetrize(rule);
    return rule;
}

Rule1D gauss_legendre(int n)
{
    if (n < 1) {
        throw DomainError("gauss_legendre: point count must be positive");
    }
    if (n > kMaxGaussLegendrePoints) {
        throw CapacityError("gauss_legendre: " + std::to_string(n) + " points exceeds cap " +
                            std::to_string(kMaxGaussLegendrePoints));
    }
    Rule1D rule;
    rule.kind = RuleKind::gauss_legendre;
    rule.order = n;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));

    const double dn = static_cast<double>(n);
    // P_n(x) and P_n'(x) by the three-term recurrence
    const auto legendre = [n, dn](double x) {
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double derivative = dn * (x * p1 - p0) / (x * x - 1.0);
        return std::pair{p1, derivative};
    };

    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (static_cast<double>(i) + 0.75) / (dn + 0.5));
        bool converged = false;
        for (int iter = 0; iter < 100 && !converged; ++iter) {
            const auto [p, dp] = legendre(x);
            const double dx = p / dp;
            x -= dx;
            converged = std::abs(dx) <= 1e-14;
        }
        if (converged) {
            const auto [p, dp] = legendre(x);
            x -= p / dp;  // polish
        }
        if (!converged) {
            throw NumericalError("gauss_legendre: Newton iteration did not converge for n=" +
                                 std::to_string(n));
        }
        const double dp = legendre(x).second;
        const double w = 1.0 / ((1.0 - x * x) * dp * dp);

        const auto hi = static_cast<std::size_t>(n - 1 - i);
        const auto lo = static_cast<std::size_t>(i);
        rule.nodes[hi] = x;
        rule.nodes[lo] = -x;
        rule.weights[hi] = w;
        rule.weights[lo] = w;
    }
    symmetrize(rule);
    return rule;
}

double to_interval(double reference, const Interval& interval) noexcept
{
    if (reference == -1.0) {
        return interval.lower;
    }
    if (reference == 1.0) {
        return interval.upper;
    }
    return interval.lower + interval.width() * 0.5 * (reference + 1.0);
}

MappedRule1D map_rule(const Rule1D& rule, const Interval& interval)
{
    if (!(interval.lower < interval.upper)) {
        throw DomainError("map_rule: interval requires a < b");
    }
    MappedRule1D mapped;
    mapped.rule = rule;
    mapped.interval = interval;
    mapped.nodes.reserve(rule.nodes.size());
    for (double y : rule.nodes) {
        mapped.nodes.push_back(to_interval(y, interval));
    }
    return mapped;
}

MappedRule1D map_rule(const Rule1D& rule, double a, double b)
{
    return map_rule(rule, Interval{a, b});
}

namespace {

void require_distinct(std::span<const double> nodes)
{
    for (std::size_t a = 0; a < nodes.size(); ++a) {
        for (std::size_t b = a + 1; b < nodes.size(); ++b) {
            if (nodes[a] == nodes[b]) {
                throw DomainError("lagrange_basis: duplicate nodes");
            }
        }
    }
}

} // namespace

double lagrange_basis(std::span<const double> nodes, std::size_t i, double y)
{
    if (i >= nodes.size()) {
        throw DomainError("lagrange_basis: index out of range");
    }
    require_distinct(nodes);
    double value = 1.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        if (k == i) {
            continue;
        }
        const double denom = nodes[i] - nodes[k];
        if (denom == 0.0) {
            throw DomainError("lagrange_basis: duplicate nodes");
        }
        value *= (y - nodes[k]) / denom;
    }
    return value;
}

void lagrange_basis_all(std::span<const double> nodes, double y, std::span<double> out)
{
    // hot path for the interpolant; nodes come from a rule and are distinct
    const std::size_t m = nodes.size();
    for (std::size_t i = 0; i < m; ++i) {
        double value = 1.0;
        for (std::size_t k = 0; k < m; ++k) {
            if (k != i) {
                value *= (y - nodes[k]) / (nodes[i] - nodes[k]);
            }
        }
        out[i] = value;
    }
}

} // namespace etuq
