#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace etuq {

inline constexpr std::size_t kMaxDenseEntries = 10'000'000;
inline constexpr std::size_t kMaxDenseOrder = 16;
inline constexpr Eigen::Index kMaxHadamardRank = 4096;

/// Full N-way array, first mode fastest. Intended for oracles and tests.
class DenseTensor {
public:
    DenseTensor() = default;
    /// Throws CapacityError beyond 16 modes or 1e7 entries.
    explicit DenseTensor(std::vector<std::size_t> dims, double fill = 0.0);

    [[nodiscard]] const std::vector<std::size_t>& dims() const noexcept { return dims_; }
    [[nodiscard]] std::size_t order() const noexcept { return dims_.size(); }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::span<double> values() noexcept { return values_; }

    [[nodiscard]] std::size_t linear_index(std::span<const std::size_t> index) const;
    /// Inverse of linear_index.
    void multi_index(std::size_t linear, std::span<std::size_t> index) const;

    [[nodiscard]] double operator()(std::span<const std::size_t> index) const
    {
        return values_[linear_index(index)];
    }
    [[nodiscard]] double& operator()(std::span<const std::size_t> index)
    {
        return values_[linear_index(index)];
    }

private:
    std::vector<std::size_t> dims_;
    std::vector<double> values_;
};

/// Order-3 core G(a, i, b) of shape rank_left x modes x rank_right, stored
/// as one rank_left x rank_right matrix per mode index.
struct TTCore {
    std::vector<Eigen::MatrixXd> slices;

    TTCore() = default;
    TTCore(Eigen::Index rank_left, std::size_t modes, Eigen::Index rank_right);

    [[nodiscard]] std::size_t modes() const noexcept { return slices.size(); }
    [[nodiscard]] Eigen::Index rank_left() const noexcept { return slices.empty() ? 0 : slices.front().rows(); }
    [[nodiscard]] Eigen::Index rank_right() const noexcept { return slices.empty() ? 0 : slices.front().cols(); }
    [[nodiscard]] double operator()(Eigen::Index a, std::size_t i, Eigen::Index b) const { return slices[i](a, b); }
    double& operator()(Eigen::Index a, std::size_t i, Eigen::Index b) { return slices[i](a, b); }
};

/// Tensor train: A(i_1..i_N) = G_1(i_1) G_2(i_2) ... G_N(i_N), R_0 = R_N = 1.
class TTTensor {
public:
    TTTensor() = default;
    /// Validates that boundary ranks are one and adjacent ranks chain.
    explicit TTTensor(std::vector<TTCore> cores);

    [[nodiscard]] std::size_t order() const noexcept { return cores_.size(); }
    [[nodiscard]] const std::vector<TTCore>& cores() const noexcept { return cores_; }
    [[nodiscard]] const TTCore& core(std::size_t n) const { return cores_.at(n); }
    [[nodiscard]] std::vector<std::size_t> dims() const;
    /// R_0, ..., R_N.
    [[nodiscard]] std::vector<Eigen::Index> ranks() const;
    [[nodiscard]] Eigen::Index max_rank() const;
    /// Number of stored core entries, sum of R_{n-1} I_n R_n.
    [[nodiscard]] std::size_t storage() const;

private:
    std::vector<TTCore> cores_;
};

double tt_eval(const TTTensor& tt, std::span<const std::size_t> index);

/// Dense expansion; throws CapacityError beyond 1e7 entries.
DenseTensor tt_full(const TTTensor& tt);

/// n-th unfolding, 1 <= n <= N-1: rows i_1..i_n, columns i_{n+1}..i_N, both
/// linearized with the first index fastest.
Eigen::MatrixXd unfold(const DenseTensor& tensor, std::size_t n);

/// Sequential truncated-SVD decomposition of a dense tensor; with
/// relative_tolerance = 0 only exact zero singular values are dropped.
TTTensor tt_svd(const DenseTensor& tensor, double relative_tolerance = 0.0);

/// Rank-one TT from one vector per mode: entries prod_n w_n(i_n).
TTTensor rank_one_weights(std::span<const std::vector<double>> weights);

/// Sum over all indices of a(i) * b(i) by core-by-core contraction.
double tt_dot(const TTTensor& a, const TTTensor& b);

/// Elementwise product; interface ranks multiply.
TTTensor tt_hadamard(const TTTensor& a, const TTTensor& b);

} // namespace etuq
