#include "etuq/error.hpp"
#include "etuq/quadrature.hpp"
#include "etuq/tensor.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <Eigen/SVD>

#include <cmath>
#include <random>

using namespace etuq;

namespace {

TTTensor random_tt(const std::vector<std::size_t>& dims, const std::vector<Eigen::Index>& ranks, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<TTCore> cores;
    for (std::size_t n = 0; n < dims.size(); ++n) {
        TTCore c(ranks[n], dims[n], ranks[n + 1]);
        for (auto& s : c.slices)
            for (Eigen::Index k = 0; k < s.size(); ++k) s.data()[k] = u(gen);
        cores.push_back(std::move(c));
    }
    return TTTensor(std::move(cores));
}

DenseTensor dense_from(const std::vector<std::size_t>& dims, const std::function<double(std::span<const std::size_t>)>& f) {
    DenseTensor d(dims);
    std::vector<std::size_t> idx(dims.size());
    for (std::size_t k = 0; k < d.size(); ++k) {
        d.multi_index(k, idx);
        d.values()[k] = f(idx);
    }
    return d;
}

// Naive element-by-element matrix product chain, independent of tt_eval.
double chain(const TTTensor& tt, std::span<const std::size_t> idx) {
    std::vector<double> row{1.0};
    for (std::size_t n = 0; n < tt.order(); ++n) {
        const auto& g = tt.core(n).slices[idx[n]];
        std::vector<double> next(g.cols(), 0.0);
        for (Eigen::Index b = 0; b < g.cols(); ++b)
            for (Eigen::Index a = 0; a < g.rows(); ++a) next[b] += row[a] * g(a, b);
        row = next;
    }
    return row[0];
}

} // namespace

TEST(DenseTensor, IndexRoundTrip) {
    DenseTensor d({3, 4, 5});
    std::vector<std::size_t> idx(3);
    for (std::size_t k = 0; k < d.size(); ++k) {
        d.multi_index(k, idx);
        EXPECT_EQ(d.linear_index(idx), k);
    }
    const std::vector<std::size_t> i{2, 1, 0};
    EXPECT_EQ(d.linear_index(i), 2u + 3u * 1u);
    const std::vector<std::size_t> bad{3, 0, 0};
    EXPECT_THROW((void)d.linear_index(bad), DomainError);
    EXPECT_THROW(DenseTensor(std::vector<std::size_t>(17, 2)), CapacityError);
    EXPECT_THROW(DenseTensor({10000, 10000}), CapacityError);
}

TEST(TTTensor, RejectsBrokenChains) {
    std::vector<TTCore> cores{TTCore(1, 2, 2), TTCore(3, 2, 1)};
    EXPECT_THROW(TTTensor{cores}, DomainError);
    std::vector<TTCore> open{TTCore(2, 2, 1)};
    EXPECT_THROW(TTTensor{open}, DomainError);
}

TEST(TTTensor, OnesAndRankOne) {
    std::vector<std::vector<double>> ones{{1, 1}, {1, 1, 1}, {1}};
    const TTTensor t = rank_one_weights(ones);
    const DenseTensor d = tt_full(t);
    for (double v : d.values()) EXPECT_EQ(v, 1.0);

    std::vector<std::vector<double>> u{{1, 2}, {3, -1, 0.5}, {2, 4}};
    const TTTensor r = rank_one_weights(u);
    EXPECT_EQ(r.storage(), 7u);
    EXPECT_EQ(r.max_rank(), 1);
    std::vector<std::size_t> idx(3);
    const DenseTensor dr = tt_full(r);
    for (std::size_t k = 0; k < dr.size(); ++k) {
        dr.multi_index(k, idx);
        EXPECT_DOUBLE_EQ(dr.values()[k], u[0][idx[0]] * u[1][idx[1]] * u[2][idx[2]]);
    }

    const std::vector<std::vector<double>> scalar{{1.0}};
    EXPECT_EQ(tt_eval(rank_one_weights(scalar), std::vector<std::size_t>{0}), 1.0);
}

TEST(TTTensor, CcLevelOneWeightsMiddleEntry) {
    const Rule1D r = clenshaw_curtis(1);
    std::vector<std::vector<double>> w(12, r.weights);
    const TTTensor t = rank_one_weights(w);
    std::size_t mid = 0;
    for (std::size_t i = 0; i < r.size(); ++i)
        if (r.nodes[i] == 0.0) mid = i;
    const std::vector<std::size_t> idx(12, mid);
    EXPECT_NEAR(tt_eval(t, idx), std::pow(2.0 / 3.0, 12), 1e-16);
    EXPECT_EQ(t.storage(), 36u);
}

TEST(TTTensor, EvalMatchesChainAndFull) {
    const std::vector<std::size_t> dims{3, 4, 2};
    const TTTensor t = random_tt(dims, {1, 2, 3, 1}, 11);
    const DenseTensor d = tt_full(t);
    std::mt19937 gen(5);
    std::vector<std::size_t> idx(3);
    for (int k = 0; k < 10; ++k) {
        for (std::size_t n = 0; n < 3; ++n) idx[n] = std::uniform_int_distribution<std::size_t>(0, dims[n] - 1)(gen);
        EXPECT_NEAR(tt_eval(t, idx), chain(t, idx), 1e-13);
        EXPECT_NEAR(d(idx), chain(t, idx), 1e-13);
    }
    const std::vector<std::size_t> bad{3, 0, 0};
    EXPECT_THROW(tt_eval(t, bad), DomainError);
    EXPECT_EQ(t.storage(), 3u * 2 + 2u * 4 * 3 + 3u * 2);
    EXPECT_EQ(t.ranks(), (std::vector<Eigen::Index>{1, 2, 3, 1}));
}

TEST(TTTensor, SingleCoreIsVector) {
    TTCore c(1, 4, 1);
    for (std::size_t i = 0; i < 4; ++i) c(0, i, 0) = 0.5 * i - 1.0;
    const DenseTensor d = tt_full(TTTensor({c}));
    ASSERT_EQ(d.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(d.values()[i], 0.5 * i - 1.0);
}

TEST(Unfold, DefinitionAndRank) {
    const std::vector<std::size_t> dims{3, 4, 5};
    std::mt19937 gen(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    DenseTensor a(dims);
    for (auto& v : a.values()) v = u(gen);
    const Eigen::MatrixXd m1 = unfold(a, 1);
    ASSERT_EQ(m1.rows(), 3);
    ASSERT_EQ(m1.cols(), 20);
    for (int t = 0; t < 5; ++t) {
        const std::size_t i = gen() % 3, j = gen() % 4, k = gen() % 5;
        const std::vector<std::size_t> idx{i, j, k};
        EXPECT_EQ(m1(i, j + 4 * k), a(idx));
        EXPECT_EQ(unfold(a, 2)(i + 3 * j, k), a(idx));
    }
    EXPECT_THROW(unfold(a, 0), DomainError);
    EXPECT_THROW(unfold(a, 3), DomainError);

    // rank-one tensor: every unfolding has rank 1
    const std::vector<std::vector<double>> vec{{1, 2, 3}, {1, -1, 2, 0.5}, {2, 1, 1, 1, 3}};
    const DenseTensor r = tt_full(rank_one_weights(vec));
    for (std::size_t n = 1; n <= 2; ++n) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(unfold(r, n));
        svd.setThreshold(1e-12);
        EXPECT_EQ(svd.rank(), 1);
    }

    DenseTensor two({3, 4});
    for (auto& v : two.values()) v = u(gen);
    const Eigen::MatrixXd m = unfold(two, 1);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(m(i, j), two(std::vector<std::size_t>{i, j}));
}

TEST(TtSvd, ExactRoundTripAndRanks) {
    const auto s = etuq::testing::SeparableSum::random(2, 4, 5, 3);
    const std::vector<std::size_t> dims(4, 5);
    const DenseTensor d = dense_from(dims, s);
    const TTTensor t = tt_svd(d, 1e-13);
    EXPECT_LE(t.max_rank(), 2);
    const DenseTensor back = tt_full(t);
    for (std::size_t k = 0; k < d.size(); ++k) EXPECT_NEAR(back.values()[k], d.values()[k], 1e-12);

    std::mt19937 gen(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    DenseTensor g({3, 2, 4, 2});
    for (auto& v : g.values()) v = u(gen);
    const DenseTensor gb = tt_full(tt_svd(g));
    for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(gb.values()[k], g.values()[k], 1e-12);
}

TEST(TtDot, MatchesDense) {
    const std::vector<std::size_t> dims{3, 3, 3};
    const TTTensor a = random_tt(dims, {1, 2, 3, 1}, 21);
    const TTTensor b = random_tt(dims, {1, 3, 2, 1}, 22);
    const DenseTensor da = tt_full(a), db = tt_full(b);
    double ref = 0.0;
    for (std::size_t k = 0; k < da.size(); ++k) ref += da.values()[k] * db.values()[k];
    EXPECT_NEAR(tt_dot(a, b), ref, 1e-12);

    const std::vector<std::vector<double>> u{{1, 2}, {0.5, -1}}, v{{3, -1}, {2, 2}};
    EXPECT_NEAR(tt_dot(rank_one_weights(u), rank_one_weights(v)), (3 - 2) * (1 - 2), 1e-15);

    const Rule1D r = gauss_legendre(3);
    std::vector<std::vector<double>> w(5, r.weights);
    double sq = 0.0;
    for (double x : r.weights) sq += x * x;
    const TTTensor wt = rank_one_weights(w);
    EXPECT_NEAR(tt_dot(wt, wt), std::pow(sq, 5), 1e-15);

    const TTTensor c = random_tt({3, 3}, {1, 2, 1}, 1);
    EXPECT_THROW(tt_dot(a, c), DomainError);
}

TEST(TtDot, EqualsFullGridQuadrature) {
    // contraction with the rank-one weights is the full tensor rule
    for (std::size_t dim = 2; dim <= 4; ++dim) {
        const MappedRule1D m = map_rule(gauss_legendre(3), 0.122, 0.218);
        auto f = [](std::span<const double> y) {
            double s = 0.0, p = 1.0;
            for (double x : y) {
                s += x;
                p *= 1.0 + x;
            }
            return std::exp(s) + p;
        };
        std::vector<std::vector<double>> nodes(dim, m.nodes), weights(dim, m.weights());
        const double full = etuq::testing::tensor_quadrature(nodes, weights, f);
        const std::vector<std::size_t> dims(dim, 3);
        const DenseTensor q = dense_from(dims, [&](std::span<const std::size_t> i) {
            std::vector<double> y(dim);
            for (std::size_t d = 0; d < dim; ++d) y[d] = m.nodes[i[d]];
            return f(y);
        });
        EXPECT_NEAR(tt_dot(tt_svd(q), rank_one_weights(weights)), full, 1e-11);
    }
}

TEST(TtHadamard, MatchesDense) {
    const std::vector<std::size_t> dims{3, 2, 4};
    const TTTensor a = random_tt(dims, {1, 2, 2, 1}, 31);
    const TTTensor b = random_tt(dims, {1, 3, 2, 1}, 32);
    const TTTensor h = tt_hadamard(a, b);
    EXPECT_EQ(h.ranks(), (std::vector<Eigen::Index>{1, 6, 4, 1}));
    const DenseTensor dh = tt_full(h), da = tt_full(a), db = tt_full(b);
    for (std::size_t k = 0; k < dh.size(); ++k) EXPECT_NEAR(dh.values()[k], da.values()[k] * db.values()[k], 1e-12);

    std::vector<std::vector<double>> ones{{1, 1, 1}, {1, 1}, {1, 1, 1, 1}};
    const DenseTensor same = tt_full(tt_hadamard(a, rank_one_weights(ones)));
    for (std::size_t k = 0; k < same.size(); ++k) EXPECT_NEAR(same.values()[k], da.values()[k], 1e-15);

    const std::vector<std::vector<double>> u{{1, 2}, {3, 4}}, v{{-1, 0.5}, {2, 2}};
    const TTTensor uv = tt_hadamard(rank_one_weights(u), rank_one_weights(v));
    EXPECT_EQ(uv.max_rank(), 1);
    EXPECT_EQ(tt_eval(uv, std::vector<std::size_t>{1, 0}), 2 * 0.5 * 3 * 2);

    EXPECT_THROW(tt_hadamard(a, random_tt({3, 2}, {1, 2, 1}, 1)), DomainError);
    const TTTensor big = random_tt({2, 2}, {1, 65, 1}, 2);
    EXPECT_THROW(tt_hadamard(big, big), CapacityError);
}
