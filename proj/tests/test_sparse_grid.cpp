#include "etuq/error.hpp"
#include "etuq/sparse_grid.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

using namespace etuq;
using etuq::testing::uniform_monomial_moment;

namespace {

// Points new to CC level j: 1, 2, then 2^(j-1).
std::size_t cc_increment(int j) { return j == 0 ? 1 : j == 1 ? 2 : std::size_t{1} << (j - 1); }

// Sum over |j| <= level of prod_n increment(j_n), i.e. the size of the union of
// nested grids, counted by recursion over the dimensions.
std::size_t nested_cc_count(int dim, int level) {
    if (dim == 0) return 1;
    std::size_t total = 0;
    for (int j = 0; j <= level; ++j) total += cc_increment(j) * nested_cc_count(dim - 1, level - j);
    return total;
}

std::vector<Interval> boxes(int dim, Interval iv = {-1.0, 1.0}) { return std::vector<Interval>(dim, iv); }

long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace

TEST(MultiIndexSet, TwoDimLevelTwoCoefficients) {
    const MultiIndexSet s = build_multi_index_set(2, 2, Growth::smolyak);
    ASSERT_EQ(s.indices.size(), 6u);
    for (std::size_t k = 0; k < s.indices.size(); ++k) {
        const int norm = s.indices[k][0] + s.indices[k][1];
        EXPECT_EQ(s.coefficients[k], norm == 2 ? 1 : norm == 1 ? -1 : 0);
    }
}

TEST(MultiIndexSet, OneDimensionKeepsOnlyTopIndex) {
    for (int level = 0; level <= 5; ++level) {
        const MultiIndexSet s = build_multi_index_set(1, level, Growth::smolyak);
        for (std::size_t k = 0; k < s.indices.size(); ++k)
            EXPECT_EQ(s.coefficients[k], s.indices[k][0] == level ? 1 : 0);
    }
}

TEST(MultiIndexSet, TwelveDimLevelOneBand) {
    const MultiIndexSet s = build_multi_index_set(12, 1, Growth::smolyak);
    ASSERT_EQ(s.indices.size(), 13u);
    const auto band = s.band();
    ASSERT_EQ(band.size(), 13u);
    for (std::size_t k = 0; k < s.indices.size(); ++k) {
        const int norm = std::accumulate(s.indices[k].begin(), s.indices[k].end(), 0);
        EXPECT_EQ(s.coefficients[k], norm == 0 ? -11 : 1);
    }
}

TEST(MultiIndexSet, CoefficientFormula) {
    for (int dim = 1; dim <= 6; ++dim)
        for (int level = 0; level <= 5; ++level)
            for (int norm = 0; norm <= level; ++norm) {
                const int gap = level - norm;
                const long long expect = gap <= dim - 1 ? (gap % 2 ? -1 : 1) * binomial(dim - 1, gap) : 0;
                EXPECT_EQ(smolyak_coefficient(dim, level, norm), expect);
            }
}

TEST(MultiIndexSet, CoefficientsSumToOne) {
    // the combination reproduces constants
    for (int dim = 1; dim <= 5; ++dim)
        for (int level = 0; level <= 4; ++level) {
            const MultiIndexSet s = build_multi_index_set(dim, level, Growth::smolyak);
            EXPECT_EQ(std::accumulate(s.coefficients.begin(), s.coefficients.end(), 0LL), 1);
        }
}

TEST(MultiIndexSet, CapacityCap) {
    EXPECT_THROW(build_multi_index_set(40, 12, Growth::smolyak), CapacityError);
    EXPECT_THROW(build_multi_index_set(0, 1, Growth::smolyak), DomainError);
    EXPECT_THROW(build_multi_index_set(2, -1, Growth::smolyak), DomainError);
}

TEST(SparseGrid, TwelveDimCounts) {
    const auto iv = boxes(12, {0.122, 0.218});
    EXPECT_EQ(build_sparse_grid(12, 1, Growth::smolyak, iv).size(), 25u);
    EXPECT_EQ(build_sparse_grid(12, 2, Growth::smolyak, iv).size(), 313u);
    EXPECT_EQ(build_sparse_grid(12, 3, Growth::smolyak, iv).size(), 2649u);
    EXPECT_EQ(nested_cc_count(12, 1), 25u);
    EXPECT_EQ(nested_cc_count(12, 2), 313u);
    EXPECT_EQ(nested_cc_count(12, 3), 2649u);
}

TEST(SparseGrid, CountsMatchNestedOracle) {
    for (int dim = 1; dim <= 6; ++dim)
        for (int level = 0; level <= 4; ++level)
            EXPECT_EQ(build_sparse_grid(dim, level, Growth::smolyak, boxes(dim)).size(), nested_cc_count(dim, level))
                << dim << " " << level;
}

TEST(SparseGrid, LevelOneHas2NPlus1Points) {
    for (int dim = 1; dim <= 20; ++dim)
        EXPECT_EQ(build_sparse_grid(dim, 1, Growth::smolyak, boxes(dim)).size(), static_cast<std::size_t>(2 * dim + 1));
}

TEST(SparseGrid, TwoDimUnionBruteForce) {
    // union of the band tensor grids, built directly from the 1D rules
    for (int level = 0; level <= 4; ++level) {
        std::set<std::pair<long long, long long>> expect;
        for (int j1 = 0; j1 <= level; ++j1)
            for (int j2 = 0; j1 + j2 <= level; ++j2) {
                const Rule1D a = clenshaw_curtis(j1), b = clenshaw_curtis(j2);
                for (double x : a.nodes)
                    for (double y : b.nodes) expect.emplace(std::llround(x * 1e12), std::llround(y * 1e12));
            }
        const SparseGrid g = build_sparse_grid(2, level, Growth::smolyak, boxes(2));
        std::set<std::pair<long long, long long>> got;
        for (std::size_t p = 0; p < g.size(); ++p)
            got.emplace(std::llround(g.point(p)[0] * 1e12), std::llround(g.point(p)[1] * 1e12));
        EXPECT_EQ(got.size(), g.size()) << "duplicates at level " << level;
        EXPECT_EQ(got, expect) << "level " << level;
    }
    EXPECT_EQ(build_sparse_grid(2, 2, Growth::smolyak, boxes(2)).size(), 13u);
}

TEST(SparseGrid, OneDimReducesToRule) {
    const SparseGrid g = build_sparse_grid(1, 2, Growth::smolyak, boxes(1));
    const Rule1D r = clenshaw_curtis(2);
    ASSERT_EQ(g.size(), r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        bool found = false;
        for (std::size_t p = 0; p < g.size(); ++p)
            if (g.point(p)[0] == r.nodes[i]) {
                EXPECT_NEAR(g.weights[p], r.weights[i], 1e-15);
                found = true;
            }
        EXPECT_TRUE(found);
    }
}

TEST(SparseGrid, WeightsSumToOne) {
    for (int dim = 1; dim <= 8; ++dim)
        for (int level = 0; level <= 3; ++level) {
            const SparseGrid g = build_sparse_grid(dim, level, Growth::smolyak, boxes(dim, {0.122, 0.218}));
            EXPECT_NEAR(std::accumulate(g.weights.begin(), g.weights.end(), 0.0), 1.0, 1e-12);
            for (std::size_t p = 0; p < g.size(); ++p)
                for (double y : g.point(p)) {
                    EXPECT_GE(y, 0.122);
                    EXPECT_LE(y, 0.218);
                }
        }
}

TEST(SparseGrid, ProvenanceAndComponents) {
    const SparseGrid g = build_sparse_grid(3, 2, Growth::smolyak, boxes(3));
    ASSERT_EQ(g.provenance.size(), g.size());
    std::vector<std::size_t> seen(g.size(), 0);
    for (std::size_t c = 0; c < g.components.size(); ++c) {
        const auto& comp = g.components[c];
        EXPECT_NE(comp.coefficient, 0);
        std::size_t card = 1;
        for (int j : comp.index) card *= clenshaw_curtis_size(j);
        EXPECT_EQ(comp.point_ids.size(), card);
        for (auto id : comp.point_ids) {
            ++seen[id];
            const auto& prov = g.provenance[id];
            EXPECT_NE(std::find(prov.begin(), prov.end(), c), prov.end());
        }
    }
    for (std::size_t p = 0; p < g.size(); ++p) EXPECT_EQ(seen[p], g.provenance[p].size());
}

TEST(SparseGrid, MatchesAnalyticMomentsOfRandomPolynomials) {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (int dim = 2; dim <= 3; ++dim)
        for (int level = 0; level <= 3; ++level) {
            const SparseGrid g = build_sparse_grid(dim, level, Growth::smolyak, boxes(dim));
            for (int trial = 0; trial < 20; ++trial) {
                // random polynomial of total degree <= level as a sum of monomials
                std::vector<std::pair<double, std::vector<int>>> terms;
                std::vector<int> e(dim, 0);
                std::function<void(int, int)> rec = [&](int d, int left) {
                    if (d == dim) {
                        terms.emplace_back(coef(gen), e);
                        return;
                    }
                    for (int k = 0; k <= left; ++k) {
                        e[d] = k;
                        rec(d + 1, left - k);
                    }
                };
                rec(0, level);
                double exact = 0.0;
                for (const auto& [c, ex] : terms) {
                    double m = c;
                    for (int k : ex) m *= uniform_monomial_moment(k);
                    exact += m;
                }
                std::vector<double> v(g.size());
                for (std::size_t p = 0; p < g.size(); ++p) {
                    double s = 0.0;
                    for (const auto& [c, ex] : terms) {
                        double m = c;
                        for (int d = 0; d < dim; ++d) m *= std::pow(g.point(p)[d], ex[d]);
                        s += m;
                    }
                    v[p] = s;
                }
                EXPECT_NEAR(sparse_quadrature(g, v).mean, exact, 1e-10) << dim << " " << level;
            }
        }
}

TEST(SparseGrid, MatchesFullTensorOnLowDegree) {
    for (int dim = 2; dim <= 3; ++dim)
        for (int level = 1; level <= 3; ++level) {
            const SparseGrid g = build_sparse_grid(dim, level, Growth::smolyak, boxes(dim, {0.122, 0.218}));
            const MappedRule1D m = map_rule(clenshaw_curtis(level), 0.122, 0.218);
            std::vector<std::vector<double>> nodes(dim, m.nodes), weights(dim, m.weights());
            auto f = [](std::span<const double> y) {
                double s = 1.0;
                for (std::size_t d = 0; d < y.size(); ++d) s += (d + 1.0) * y[d] * (d == 0 ? y[0] : 1.0);
                return s;
            };
            std::vector<double> v(g.size());
            for (std::size_t p = 0; p < g.size(); ++p) v[p] = f(g.point(p));
            const double full = etuq::testing::tensor_quadrature(nodes, weights, f);
            EXPECT_NEAR(sparse_quadrature(g, v).mean, full, 1e-11);
        }
}

TEST(SparseQuadrature, HandCheckedExamples) {
    const auto iv = boxes(12, {0.122, 0.218});
    const SparseGrid g1 = build_sparse_grid(12, 1, Growth::smolyak, iv);
    std::vector<double> v(g1.size());
    for (std::size_t p = 0; p < g1.size(); ++p) v[p] = g1.point(p)[0];
    EXPECT_NEAR(sparse_quadrature(g1, v).mean, 0.170, 1e-14);

    std::fill(v.begin(), v.end(), 3.5);
    const auto c = sparse_quadrature(g1, v);
    EXPECT_NEAR(c.mean, 3.5, 1e-12);
    EXPECT_NEAR(c.second_moment, 12.25, 1e-11);

    const SparseGrid g2 = build_sparse_grid(12, 2, Growth::smolyak, iv);
    v.resize(g2.size());
    for (std::size_t p = 0; p < g2.size(); ++p) v[p] = g2.point(p)[0] * g2.point(p)[1];
    EXPECT_NEAR(sparse_quadrature(g2, v).mean, 0.170 * 0.170, 1e-13);

    v.pop_back();
    EXPECT_THROW(sparse_quadrature(g2, v), DomainError);
}

TEST(SparseGrid, TotalDegreeGrowthUsesGaussLegendre) {
    EXPECT_EQ(growth_degree(Growth::total_degree, 3), 3);
    EXPECT_EQ(growth_degree(Growth::smolyak, 0), 0);
    EXPECT_EQ(growth_degree(Growth::smolyak, 3), 8);
    const Rule1D r = growth_rule(Growth::total_degree, 2);
    EXPECT_EQ(r.kind, RuleKind::gauss_legendre);
    EXPECT_EQ(r.size(), 3u);
    const SparseGrid g = build_sparse_grid(3, 2, Growth::total_degree, boxes(3));
    EXPECT_NEAR(std::accumulate(g.weights.begin(), g.weights.end(), 0.0), 1.0, 1e-12);
    std::vector<double> v(g.size());
    for (std::size_t p = 0; p < g.size(); ++p) v[p] = g.point(p)[0] * g.point(p)[0] + g.point(p)[1] * g.point(p)[2];
    EXPECT_NEAR(sparse_quadrature(g, v).mean, 1.0 / 3.0, 1e-12);
}

TEST(Interpolant, ReproducesConstantsAndLinears) {
    const auto iv = boxes(12, {0.122, 0.218});
    const SparseGrid g = build_sparse_grid(12, 1, Growth::smolyak, iv);
    std::vector<double> c(g.size(), 4.25), lin(g.size());
    for (std::size_t p = 0; p < g.size(); ++p) {
        const auto y = g.point(p);
        lin[p] = std::accumulate(y.begin(), y.end(), 0.0);
    }
    const SmolyakInterpolant ic(g, c), il(g, lin);
    std::mt19937 gen(3);
    std::uniform_real_distribution<double> u(0.122, 0.218);
    for (int t = 0; t < 10; ++t) {
        std::vector<double> y(12);
        for (auto& v : y) v = u(gen);
        EXPECT_NEAR(ic(y), 4.25, 1e-12);
        EXPECT_NEAR(il(y), std::accumulate(y.begin(), y.end(), 0.0), 1e-12);
    }
    std::vector<double> outside(12, 0.17);
    outside[4] = 0.3;
    EXPECT_THROW((void)il(outside), DomainError);
}

TEST(Interpolant, InterpolatesAtGridPoints) {
    const SparseGrid g = build_sparse_grid(3, 3, Growth::smolyak, boxes(3));
    std::vector<double> v(g.size());
    auto f = [](std::span<const double> y) { return std::exp(0.7 * y[0]) * std::sin(1.0 + y[1]) + y[2] * y[2] * y[2] * y[0]; };
    for (std::size_t p = 0; p < g.size(); ++p) v[p] = f(g.point(p));
    const SmolyakInterpolant it(g, v);
    for (std::size_t p = 0; p < g.size(); ++p) EXPECT_NEAR(it(g.point(p)), v[p], 1e-10);
}

TEST(Interpolant, IntegralMatchesSparseQuadrature) {
    for (int level = 0; level <= 2; ++level) {
        const SparseGrid g = build_sparse_grid(2, level, Growth::smolyak, boxes(2, {0.122, 0.218}));
        std::vector<double> v(g.size());
        for (std::size_t p = 0; p < g.size(); ++p) v[p] = std::exp(3.0 * g.point(p)[0]) / (1.0 + g.point(p)[1]);
        const SmolyakInterpolant it(g, v);
        // the interpolant has degree <= 4 per dimension, so GL(8) integrates it exactly
        const MappedRule1D m = map_rule(gauss_legendre(8), 0.122, 0.218);
        std::vector<std::vector<double>> nodes(2, m.nodes), weights(2, m.weights());
        const double ref = etuq::testing::tensor_quadrature(nodes, weights, [&](std::span<const double> y) { return it(y); });
        EXPECT_NEAR(sparse_quadrature(g, v).mean, ref, 1e-10) << level;
    }
}

TEST(SparseGrid, CsvExport) {
    const SparseGrid g = build_sparse_grid(2, 1, Growth::smolyak, boxes(2));
    std::ostringstream out;
    write_grid_csv(out, g);
    std::istringstream in(out.str());
    std::string line;
    std::size_t rows = 0;
    double wsum = 0.0;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            if (line.find_first_not_of("0123456789.,-+eE") != std::string::npos) continue;
        }
        ++rows;
        const auto comma = line.rfind(',');
        wsum += std::stod(line.substr(comma + 1));
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 2);
    }
    EXPECT_EQ(rows, g.size());
    EXPECT_NEAR(wsum, 1.0, 1e-12);
}

TEST(SparseGrid, RejectsBadIntervals) {
    std::vector<Interval> bad(2, {1.0, 1.0});
    EXPECT_THROW(build_sparse_grid(2, 1, Growth::smolyak, bad), DomainError);
    EXPECT_THROW(build_sparse_grid(3, 1, Growth::smolyak, boxes(2)), DomainError);
}
