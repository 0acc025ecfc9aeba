#include "etuq/error.hpp"
#include "etuq/quadrature.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace etuq;
using etuq::testing::uniform_monomial_moment;

namespace {

double integrate_monomial(const Rule1D& rule, int k) {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * std::pow(rule.nodes[i], k);
    return s;
}

double weight_sum(const Rule1D& r) { return std::accumulate(r.weights.begin(), r.weights.end(), 0.0); }

} // namespace

TEST(GaussLegendre, ExactThroughDegree2nMinus1) {
    for (int n = 1; n <= 10; ++n) {
        const Rule1D r = gauss_legendre(n);
        ASSERT_EQ(r.size(), static_cast<std::size_t>(n));
        for (int k = 0; k <= 2 * n - 1; ++k)
            EXPECT_NEAR(integrate_monomial(r, k), uniform_monomial_moment(k), 1e-12) << "n=" << n << " k=" << k;
        // degree 2n is not integrated exactly
        EXPECT_GT(std::abs(integrate_monomial(r, 2 * n) - uniform_monomial_moment(2 * n)), 1e-6) << "n=" << n;
    }
}

TEST(GaussLegendre, KnownSmallRules) {
    Rule1D r = gauss_legendre(2);
    std::vector<double> x = r.nodes;
    std::sort(x.begin(), x.end());
    EXPECT_NEAR(x[0], -1.0 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(x[1], 1.0 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(r.weights[0], 0.5, 1e-15);

    r = gauss_legendre(3);
    for (std::size_t i = 0; i < 3; ++i) {
        if (std::abs(r.nodes[i]) < 1e-15) {
            EXPECT_NEAR(r.weights[i], 4.0 / 9.0, 1e-15);
        } else {
            EXPECT_NEAR(std::abs(r.nodes[i]), std::sqrt(0.6), 1e-15);
            EXPECT_NEAR(r.weights[i], 5.0 / 18.0, 1e-15);
        }
    }
}

TEST(GaussLegendre, WeightsPositiveAndNormalized) {
    for (int n = 1; n <= 64; ++n) {
        const Rule1D r = gauss_legendre(n);
        EXPECT_NEAR(weight_sum(r), 1.0, 1e-13) << n;
        for (double w : r.weights) EXPECT_GT(w, 0.0);
        for (double x : r.nodes) {
            EXPECT_GT(x, -1.0);
            EXPECT_LT(x, 1.0);
        }
    }
}

TEST(GaussLegendre, RejectsBadSizes) {
    EXPECT_THROW(gauss_legendre(0), DomainError);
    EXPECT_THROW(gauss_legendre(65), CapacityError);
}

TEST(ClenshawCurtis, ExactThroughDegree2PowLevel) {
    for (int level = 0; level <= 4; ++level) {
        const Rule1D r = clenshaw_curtis(level);
        const int p = level == 0 ? 1 : (1 << level) + 1;  // odd-degree symmetry adds one
        for (int k = 0; k <= p; ++k)
            EXPECT_NEAR(integrate_monomial(r, k), uniform_monomial_moment(k), 1e-12) << "level=" << level << " k=" << k;
    }
}

TEST(ClenshawCurtis, SizesAndSimpson) {
    EXPECT_EQ(clenshaw_curtis_size(0), 1u);
    for (int l = 1; l <= 10; ++l) EXPECT_EQ(clenshaw_curtis_size(l), (1u << l) + 1);
    const Rule1D r = clenshaw_curtis(1);
    ASSERT_EQ(r.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i)
        EXPECT_NEAR(r.weights[i], std::abs(r.nodes[i]) < 0.5 ? 2.0 / 3.0 : 1.0 / 6.0, 1e-15);
    const Rule1D r0 = clenshaw_curtis(0);
    ASSERT_EQ(r0.size(), 1u);
    EXPECT_EQ(r0.nodes[0], 0.0);
    EXPECT_EQ(r0.weights[0], 1.0);
}

TEST(ClenshawCurtis, WeightsNormalizedAndPositive) {
    for (int l = 0; l <= 12; ++l) {
        const Rule1D r = clenshaw_curtis(l);
        EXPECT_NEAR(weight_sum(r), 1.0, 1e-13) << l;
        for (double w : r.weights) EXPECT_GT(w, 0.0);
    }
}

TEST(ClenshawCurtis, NestedBitwise) {
    for (int l = 0; l < 10; ++l) {
        const Rule1D coarse = clenshaw_curtis(l);
        const Rule1D fine = clenshaw_curtis(l + 1);
        for (double x : coarse.nodes)
            EXPECT_NE(std::find(fine.nodes.begin(), fine.nodes.end(), x), fine.nodes.end()) << "level " << l;
    }
}

TEST(ClenshawCurtis, SymmetricNodes) {
    for (int l = 1; l <= 8; ++l) {
        const Rule1D r = clenshaw_curtis(l);
        for (double x : r.nodes) EXPECT_NE(std::find(r.nodes.begin(), r.nodes.end(), -x), r.nodes.end());
    }
}

TEST(ClenshawCurtis, RejectsBadLevels) {
    EXPECT_THROW(clenshaw_curtis(-1), DomainError);
    EXPECT_THROW(clenshaw_curtis(17), CapacityError);
}

TEST(MapRule, EndpointsAndMoments) {
    const Interval iv{0.122, 0.218};
    const MappedRule1D m = map_rule(clenshaw_curtis(2), iv);
    EXPECT_EQ(*std::min_element(m.nodes.begin(), m.nodes.end()), 0.122);
    EXPECT_EQ(*std::max_element(m.nodes.begin(), m.nodes.end()), 0.218);
    for (int k = 0; k <= 5; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i) s += m.weights()[i] * std::pow(m.nodes[i], k);
        EXPECT_NEAR(s, uniform_monomial_moment(k, iv.lower, iv.upper), 1e-14) << k;
    }
    EXPECT_THROW(map_rule(gauss_legendre(3), 1.0, 1.0), DomainError);
    EXPECT_THROW(map_rule(gauss_legendre(3), 2.0, 1.0), DomainError);
    EXPECT_EQ(to_interval(-1.0, iv), 0.122);
    EXPECT_EQ(to_interval(1.0, iv), 0.218);
}

TEST(Lagrange, CardinalPropertyAndPartitionOfUnity) {
    const Rule1D r = gauss_legendre(5);
    for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = 0; j < r.size(); ++j)
            EXPECT_NEAR(lagrange_basis(r.nodes, i, r.nodes[j]), i == j ? 1.0 : 0.0, 1e-14);
    std::vector<double> out(r.size());
    for (double y : {-0.9, -0.3, 0.05, 0.77}) {
        lagrange_basis_all(r.nodes, y, out);
        EXPECT_NEAR(std::accumulate(out.begin(), out.end(), 0.0), 1.0, 1e-13);
        for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(out[i], lagrange_basis(r.nodes, i, y), 1e-14);
    }
}

TEST(Lagrange, ReproducesPolynomials) {
    const Rule1D r = clenshaw_curtis(2);  // 5 nodes, degree 4
    auto f = [](double x) { return 1.0 - 2.0 * x + 0.5 * x * x * x - x * x * x * x; };
    for (double y : {-1.0, -0.41, 0.0, 0.3, 0.99}) {
        double s = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) s += f(r.nodes[i]) * lagrange_basis(r.nodes, i, y);
        EXPECT_NEAR(s, f(y), 1e-13);
    }
}

TEST(Lagrange, RejectsBadInput) {
    const std::vector<double> dup{0.0, 0.5, 0.5};
    EXPECT_THROW(lagrange_basis(dup, 0, 0.1), DomainError);
    const std::vector<double> ok{0.0, 0.5};
    EXPECT_THROW(lagrange_basis(ok, 2, 0.1), DomainError);
}
