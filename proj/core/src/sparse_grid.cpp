#include "etuq/sparse_grid.hpp"

#include "etuq/error.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <string>

namespace etuq {

namespace {

long long binomial(int n, int k)
{
    if (k < 0 || k > n) {
        return 0;
    }
    long long result = 1;
    for (int i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i;
    }
    return result;
}

// |{j in N^dim : |j| <= level}| = C(level + dim, dim), saturating at cap + 1
std::size_t multi_index_count(int dim, int level, std::size_t cap)
{
    double count = 1.0;
    for (int i = 1; i <= dim; ++i) {
        count = count * (level + i) / i;
        if (count > static_cast<double>(cap)) {
            return cap + 1;
        }
    }
    return static_cast<std::size_t>(std::llround(count));
}

void enumerate(MultiIndex& current, int position, int remaining, std::vector<MultiIndex>& out)
{
    if (position == static_cast<int>(current.size())) {
        out.push_back(current);
        return;
    }
    for (int j = 0; j <= remaining; ++j) {
        current[static_cast<std::size_t>(position)] = j;
        enumerate(current, position + 1, remaining - j, out);
    }
    current[static_cast<std::size_t>(position)] = 0;
}

int norm1(const MultiIndex& j)
{
    return std::accumulate(j.begin(), j.end(), 0);
}

} // namespace

int growth_degree(Growth growth, int j)
{
    if (j < 0) {
        throw DomainError("growth_degree: negative index");
    }
    if (growth == Growth::total_degree) {
        return j;
    }
    if (j == 0) {
        return 0;
    }
    if (j > kMaxClenshawCurtisLevel) {
        throw CapacityError("growth_degree: index exceeds Clenshaw-Curtis cap");
    }
    return 1 << j;
}

Rule1D growth_rule(Growth growth, int j)
{
    return growth == Growth::smolyak ? clenshaw_curtis(j) : gauss_legendre(j + 1);
}

std::vector<std::size_t> MultiIndexSet::band() const
{
    std::vector<std::size_t> positions;
    for (std::size_t k = 0; k < indices.size(); ++k) {
        if (coefficients[k] != 0) {
            positions.push_back(k);
        }
    }
    return positions;
}

long long smolyak_coefficient(int dim, int level, int norm)
{
    const int gap = level - norm;
    if (gap < 0 || gap > dim - 1) {
        return 0;
    }
    const long long magnitude = binomial(dim - 1, gap);
    return (gap % 2 == 0) ? magnitude : -magnitude;
}

MultiIndexSet build_multi_index_set(int dim, int level, Growth growth)
{
    if (dim < 1) {
        throw DomainError("build_multi_index_set: dimension must be >= 1");
    }
    if (level < 0) {
        throw DomainError("build_multi_index_set: level must be >= 0");
    }
    if (multi_index_count(dim, level, kMaxMultiIndexCount) > kMaxMultiIndexCount) {
        throw CapacityError("build_multi_index_set: more than 1e7 multi-indices");
    }

    MultiIndexSet set;
    set.dim = dim;
    set.level = level;
    set.growth = growth;
    for (int norm = 0; norm <= level; ++norm) {
        // all j with |j| == norm
        std::vector<MultiIndex> shell;
        MultiIndex current(static_cast<std::size_t>(dim), 0);
        enumerate(current, 0, norm, shell);
        for (auto& j : shell) {
            if (norm1(j) != norm) {
                continue;
            }
            set.coefficients.push_back(smolyak_coefficient(dim, level, norm));
            set.indices.push_back(std::move(j));
        }
    }
    return set;
}

SparseGrid build_sparse_grid(int dim, int level, Growth growth, std::span<const Interval> intervals)
{
    if (intervals.size() != static_cast<std::size_t>(dim)) {
        throw DomainError("build_sparse_grid: need one interval per dimension");
    }
    for (const auto& interval : intervals) {
        if (!(interval.lower < interval.upper)) {
            throw DomainError("build_sparse_grid: interval requires a < b");
        }
    }
    const MultiIndexSet set = build_multi_index_set(dim, level, growth);

    // reference rules per 1D index
    std::vector<Rule1D> rules;
    for (int j = 0; j <= level; ++j) {
        rules.push_back(growth_rule(growth, j));
    }

    SparseGrid grid;
    grid.dim = dim;
    grid.level = level;
    grid.growth = growth;
    grid.intervals.assign(intervals.begin(), intervals.end());

    std::map<std::vector<long long>, std::size_t> lookup;
    std::vector<long long> key(static_cast<std::size_t>(dim));
    std::vector<std::size_t> local(static_cast<std::size_t>(dim));
    const auto udim = static_cast<std::size_t>(dim);
    std::size_t tensor_points = 0;

    for (std::size_t position : set.band()) {
        const MultiIndex& j = set.indices[position];
        TensorComponent component;
        component.index = j;
        component.coefficient = set.coefficients[position];

        std::size_t cardinality = 1;
        for (int jn : j) {
            cardinality *= rules[static_cast<std::size_t>(jn)].size();
        }
        tensor_points += cardinality;
        if (tensor_points > 4 * kMaxSparseGridPoints) {
            throw CapacityError("build_sparse_grid: tensor-grid storage cap exceeded");
        }
        component.point_ids.reserve(cardinality);
        std::fill(local.begin(), local.end(), 0);
        const std::size_t component_id = grid.components.size();

        for (std::size_t t = 0; t < cardinality; ++t) {
            double weight = static_cast<double>(component.coefficient);
            for (std::size_t n = 0; n < udim; ++n) {
                const Rule1D& rule = rules[static_cast<std::size_t>(j[n])];
                key[n] = std::llround(rule.nodes[local[n]] * 1e12);
                weight *= rule.weights[local[n]];
            }
            auto [it, inserted] = lookup.try_emplace(key, grid.size());
            if (inserted) {
                if (grid.size() >= kMaxSparseGridPoints) {
                    throw CapacityError("build_sparse_grid: more than " +
                                        std::to_string(kMaxSparseGridPoints) + " points");
                }
                for (std::size_t n = 0; n < udim; ++n) {
                    const Rule1D& rule = rules[static_cast<std::size_t>(j[n])];
                    grid.points.push_back(to_interval(rule.nodes[local[n]], grid.intervals[n]));
                }
                grid.weights.push_back(0.0);
                grid.provenance.emplace_back();
            }
            grid.weights[it->second] += weight;
            grid.provenance[it->second].push_back(component_id);
            component.point_ids.push_back(it->second);

            // advance the odometer, first dimension fastest
            for (std::size_t n = 0; n < udim; ++n) {
                if (++local[n] < rules[static_cast<std::size_t>(j[n])].size()) {
                    break;
                }
                local[n] = 0;
            }
        }
        grid.components.push_back(std::move(component));
    }
    return grid;
}

QuadratureMoments sparse_quadrature(const SparseGrid& grid, std::span<const double> values)
{
    if (values.size() != grid.size()) {
        throw DomainError("sparse_quadrature: " + std::to_string(values.size()) + " values for " +
                          std::to_string(grid.size()) + " points");
    }
    QuadratureMoments moments;
    for (std::size_t i = 0; i < values.size(); ++i) {
        moments.mean += grid.weights[i] * values[i];
        moments.second_moment += grid.weights[i] * values[i] * values[i];
    }
    return moments;
}

SmolyakInterpolant::SmolyakInterpolant(const SparseGrid& grid, std::span<const double> values)
    : dim_(grid.dim), intervals_(grid.intervals)
{
    if (values.size() != grid.size()) {
        throw DomainError("SmolyakInterpolant: value count does not match grid");
    }
    for (const auto& tc : grid.components) {
        Component component;
        component.coefficient = tc.coefficient;
        for (int n = 0; n < dim_; ++n) {
            const Rule1D rule = growth_rule(grid.growth, tc.index[static_cast<std::size_t>(n)]);
            component.nodes.push_back(map_rule(rule, intervals_[static_cast<std::size_t>(n)]).nodes);
        }
        component.values.reserve(tc.point_ids.size());
        for (std::size_t id : tc.point_ids) {
            component.values.push_back(values[id]);
        }
        components_.push_back(std::move(component));
    }
}

double SmolyakInterpolant::operator()(std::span<const double> y) const
{
    if (y.size() != static_cast<std::size_t>(dim_)) {
        throw DomainError("SmolyakInterpolant: wrong point dimension");
    }
    for (std::size_t n = 0; n < y.size(); ++n) {
        if (!intervals_[n].contains(y[n])) {
            throw DomainError("SmolyakInterpolant: point outside the interpolation box");
        }
    }
    const auto udim = static_cast<std::size_t>(dim_);
    std::vector<std::vector<double>> basis(udim);
    std::vector<std::size_t> local(udim);
    double total = 0.0;
    for (const auto& component : components_) {
        for (std::size_t n = 0; n < udim; ++n) {
            basis[n].resize(component.nodes[n].size());
            lagrange_basis_all(component.nodes[n], y[n], basis[n]);
        }
        std::fill(local.begin(), local.end(), 0);
        double sum = 0.0;
        for (double value : component.values) {
            double product = value;
            for (std::size_t n = 0; n < udim; ++n) {
                product *= basis[n][local[n]];
            }
            sum += product;
            for (std::size_t n = 0; n < udim; ++n) {
                if (++local[n] < basis[n].size()) {
                    break;
                }
                local[n] = 0;
            }
        }
        total += static_cast<double>(component.coefficient) * sum;
    }
    return total;
}

void write_grid_csv(std::ostream& out, const SparseGrid& grid)
{
    const auto old_precision = out.precision(17);
    for (int n = 0; n < grid.dim; ++n) {
        out << "y" << (n + 1) << ',';
    }
    out << "weight\n";
    for (std::size_t p = 0; p < grid.size(); ++p) {
        for (double coordinate : grid.point(p)) {
            out << coordinate << ',';
        }
        out << grid.weights[p] << '\n';
    }
    out.precision(old_precision);
}

} // namespace etuq
