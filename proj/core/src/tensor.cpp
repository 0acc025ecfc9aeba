#include "etuq/tensor.hpp"

#include "etuq/error.hpp"
#include "etuq/lowrank.hpp"

#include <algorithm>
#include <string>

namespace etuq {

DenseTensor::DenseTensor(std::vector<std::size_t> dims, double fill) : dims_(std::move(dims))
{
    if (dims_.empty() || dims_.size() > kMaxDenseOrder) {
        throw CapacityError("DenseTensor: order must be in 1..16");
    }
    std::size_t count = 1;
    for (std::size_t d : dims_) {
        if (d == 0) {
            throw DomainError("DenseTensor: zero-sized mode");
        }
        if (count > kMaxDenseEntries / d) {
            throw CapacityError("DenseTensor: more than 1e7 entries");
        }
        count *= d;
    }
    values_.assign(count, fill);
}

std::size_t DenseTensor::linear_index(std::span<const std::size_t> index) const
{
    if (index.size() != dims_.size()) {
        throw DomainError("DenseTensor: index has wrong order");
    }
    std::size_t linear = 0;
    std::size_t stride = 1;
    for (std::size_t n = 0; n < dims_.size(); ++n) {
        if (index[n] >= dims_[n]) {
            throw DomainError("DenseTensor: index out of range");
        }
        linear += index[n] * stride;
        stride *= dims_[n];
    }
    return linear;
}

void DenseTensor::multi_index(std::size_t linear, std::span<std::size_t> index) const
{
    for (std::size_t n = 0; n < dims_.size(); ++n) {
        index[n] = linear % dims_[n];
        linear /= dims_[n];
    }
}

TTCore::TTCore(Eigen::Index rank_left, std::size_t modes, Eigen::Index rank_right)
    : slices(modes, Eigen::MatrixXd::Zero(rank_left, rank_right))
{
}

TTTensor::TTTensor(std::vector<TTCore> cores) : cores_(std::move(cores))
{
    if (cores_.empty()) {
        throw DomainError("TTTensor: no cores");
    }
    for (std::size_t n = 0; n < cores_.size(); ++n) {
        const TTCore& core = cores_[n];
        if (core.modes() == 0) {
            throw DomainError("TTTensor: core " + std::to_string(n) + " has no mode entries");
        }
        for (const auto& slice : core.slices) {
            if (slice.rows() != core.rank_left() || slice.cols() != core.rank_right()) {
                throw DomainError("TTTensor: ragged slices in core " + std::to_string(n));
            }
        }
        if (n > 0 && cores_[n - 1].rank_right() != core.rank_left()) {
            throw DomainError("TTTensor: rank mismatch between cores " + std::to_string(n - 1) +
                              " and " + std::to_string(n));
        }
    }
    if (cores_.front().rank_left() != 1 || cores_.back().rank_right() != 1) {
        throw DomainError("TTTensor: boundary ranks must be 1");
    }
}

std::vector<std::size_t> TTTensor::dims() const
{
    std::vector<std::size_t> dims;
    dims.reserve(cores_.size());
    for (const auto& core : cores_) {
        dims.push_back(core.modes());
    }
    return dims;
}

std::vector<Eigen::Index> TTTensor::ranks() const
{
    std::vector<Eigen::Index> ranks;
    ranks.reserve(cores_.size() + 1);
    ranks.push_back(1);
    for (const auto& core : cores_) {
        ranks.push_back(core.rank_right());
    }
    return ranks;
}

Eigen::Index TTTensor::max_rank() const
{
    const auto r = ranks();
    return *std::max_element(r.begin(), r.end());
}

std::size_t TTTensor::storage() const
{
    std::size_t total = 0;
    for (const auto& core : cores_) {
        total += static_cast<std::size_t>(core.rank_left() * core.rank_right()) * core.modes();
    }
    return total;
}

double tt_eval(const TTTensor& tt, std::span<const std::size_t> index)
{
    if (index.size() != tt.order()) {
        throw DomainError("tt_eval: index has wrong order");
    }
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Ones(1);
    for (std::size_t n = 0; n < tt.order(); ++n) {
        const TTCore& core = tt.core(n);
        if (index[n] >= core.modes()) {
            throw DomainError("tt_eval: index out of range in mode " + std::to_string(n));
        }
        row = row * core.slices[index[n]];
    }
    return row(0);
}

DenseTensor tt_full(const TTTensor& tt)
{
    DenseTensor dense(tt.dims());
    const auto& dims = dense.dims();
    // Left-to-right expansion: partial(:, prefix) holds G_1..G_n products.
    Eigen::MatrixXd partial = Eigen::MatrixXd::Ones(1, 1);  // rank x prefix-count
    for (std::size_t n = 0; n < tt.order(); ++n) {
        const TTCore& core = tt.core(n);
        const Eigen::Index prefixes = partial.cols();
        Eigen::MatrixXd next(core.rank_right(), prefixes * static_cast<Eigen::Index>(dims[n]));
        for (std::size_t i = 0; i < dims[n]; ++i) {
            next.middleCols(static_cast<Eigen::Index>(i) * prefixes, prefixes) =
                core.slices[i].transpose() * partial;
        }
        partial = std::move(next);
    }
    auto values = dense.values();
    for (Eigen::Index k = 0; k < partial.cols(); ++k) {
        values[static_cast<std::size_t>(k)] = partial(0, k);
    }
    return dense;
}

Eigen::MatrixXd unfold(const DenseTensor& tensor, std::size_t n)
{
    if (n < 1 || n >= tensor.order()) {
        throw DomainError("unfold: mode split must satisfy 1 <= n <= N-1");
    }
    Eigen::Index rows = 1;
    for (std::size_t k = 0; k < n; ++k) {
        rows *= static_cast<Eigen::Index>(tensor.dims()[k]);
    }
    const Eigen::Index cols = static_cast<Eigen::Index>(tensor.size()) / rows;
    return Eigen::Map<const Eigen::MatrixXd>(tensor.values().data(), rows, cols);
}

TTTensor tt_svd(const DenseTensor& tensor, double relative_tolerance)
{
    const auto& dims = tensor.dims();
    const std::size_t order = dims.size();
    std::vector<TTCore> cores;
    Eigen::MatrixXd remainder =
        Eigen::Map<const Eigen::MatrixXd>(tensor.values().data(), 1, static_cast<Eigen::Index>(tensor.size()));
    Eigen::Index rank = 1;
    for (std::size_t n = 0; n + 1 < order; ++n) {
        const auto modes = static_cast<Eigen::Index>(dims[n]);
        // rows (a, i_n) with a fastest
        const Eigen::Index rows = rank * modes;
        Eigen::MatrixXd matrix = Eigen::Map<const Eigen::MatrixXd>(remainder.data(), rows, remainder.size() / rows);
        TruncatedSvd svd = truncated_svd(matrix, relative_tolerance, std::min(matrix.rows(), matrix.cols()));
        const Eigen::Index next_rank = std::max<Eigen::Index>(svd.rank, 1);
        if (svd.rank == 0) {
            svd.u = Eigen::MatrixXd::Zero(rows, 1);
            svd.u(0, 0) = 1.0;
            svd.singular_values = Eigen::VectorXd::Zero(1);
            svd.v = Eigen::MatrixXd::Zero(matrix.cols(), 1);
        }
        TTCore core(rank, dims[n], next_rank);
        for (Eigen::Index i = 0; i < modes; ++i) {
            for (Eigen::Index a = 0; a < rank; ++a) {
                core.slices[static_cast<std::size_t>(i)].row(a) = svd.u.row(a + rank * i);
            }
        }
        cores.push_back(std::move(core));
        remainder = svd.singular_values.asDiagonal() * svd.v.transpose();
        rank = next_rank;
    }
    TTCore last(rank, dims.back(), 1);
    for (std::size_t i = 0; i < dims.back(); ++i) {
        last.slices[i] = remainder.col(static_cast<Eigen::Index>(i));
    }
    cores.push_back(std::move(last));
    return TTTensor(std::move(cores));
}

TTTensor rank_one_weights(std::span<const std::vector<double>> weights)
{
    if (weights.empty()) {
        throw DomainError("rank_one_weights: need at least one mode");
    }
    std::vector<TTCore> cores;
    cores.reserve(weights.size());
    for (const auto& w : weights) {
        if (w.empty()) {
            throw DomainError("rank_one_weights: empty weight vector");
        }
        TTCore core(1, w.size(), 1);
        for (std::size_t i = 0; i < w.size(); ++i) {
            core.slices[i](0, 0) = w[i];
        }
        cores.push_back(std::move(core));
    }
    return TTTensor(std::move(cores));
}

double tt_dot(const TTTensor& a, const TTTensor& b)
{
    if (a.dims() != b.dims()) {
        throw DomainError("tt_dot: dimension mismatch");
    }
    // frame(p, q) accumulates sum over prefixes of A-prefix(p) * B-prefix(q)
    Eigen::MatrixXd frame = Eigen::MatrixXd::Ones(1, 1);
    for (std::size_t n = 0; n < a.order(); ++n) {
        const TTCore& ca = a.core(n);
        const TTCore& cb = b.core(n);
        Eigen::MatrixXd next = Eigen::MatrixXd::Zero(ca.rank_right(), cb.rank_right());
        for (std::size_t i = 0; i < ca.modes(); ++i) {
            next.noalias() += ca.slices[i].transpose() * frame * cb.slices[i];
        }
        frame = std::move(next);
    }
    return frame(0, 0);
}

TTTensor tt_hadamard(const TTTensor& a, const TTTensor& b)
{
    if (a.dims() != b.dims()) {
        throw DomainError("tt_hadamard: dimension mismatch");
    }
    std::vector<TTCore> cores;
    cores.reserve(a.order());
    for (std::size_t n = 0; n < a.order(); ++n) {
        const TTCore& ca = a.core(n);
        const TTCore& cb = b.core(n);
        const Eigen::Index rl = ca.rank_left() * cb.rank_left();
        const Eigen::Index rr = ca.rank_right() * cb.rank_right();
        if (rl > kMaxHadamardRank || rr > kMaxHadamardRank) {
            throw CapacityError("tt_hadamard: product rank exceeds 4096");
        }
        TTCore core(rl, ca.modes(), rr);
        for (std::size_t i = 0; i < ca.modes(); ++i) {
            const auto& sa = ca.slices[i];
            const auto& sb = cb.slices[i];
            auto& out = core.slices[i];
            for (Eigen::Index p = 0; p < sa.rows(); ++p) {
                for (Eigen::Index q = 0; q < sa.cols(); ++q) {
                    out.block(p * sb.rows(), q * sb.cols(), sb.rows(), sb.cols()) = sa(p, q) * sb;
                }
            }
        }
        cores.push_back(std::move(core));
    }
    return TTTensor(std::move(cores));
}

} // namespace etuq
