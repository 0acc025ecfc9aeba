#include "etuq/lowrank.hpp"

#include "etuq/error.hpp"
#include "etuq/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace etuq {

namespace {

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& rows)
{
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        out.row(static_cast<Eigen::Index>(k)) = m.row(rows[k]);
    }
    return out;
}

// m * m(rows, :)^{-1}
Eigen::MatrixXd interpolation_matrix(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& rows)
{
    const Eigen::MatrixXd square = select_rows(m, rows);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(square.transpose());
    if (lu.rank() < square.rows()) {
        throw NumericalError("maxvol: selected submatrix is singular");
    }
    return lu.solve(m.transpose()).transpose();
}

// Largest |b(i, j)|; ties resolved toward the lowest row-major position.
std::pair<Eigen::Index, Eigen::Index> argmax_abs(const Eigen::MatrixXd& b)
{
    Eigen::Index bi = 0;
    Eigen::Index bj = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
        for (Eigen::Index j = 0; j < b.cols(); ++j) {
            const double v = std::abs(b(i, j));
            if (v > best) {
                best = v;
                bi = i;
                bj = j;
            }
        }
    }
    return {bi, bj};
}

} // namespace

double dominance_bound(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& rows)
{
    return interpolation_matrix(m, rows).cwiseAbs().maxCoeff();
}

std::vector<Eigen::Index> maxvol(const Eigen::MatrixXd& m, double tol, int max_swaps)
{
    const Eigen::Index n_rows = m.rows();
    const Eigen::Index rank = m.cols();
    if (n_rows < rank) {
        throw DomainError("maxvol: matrix must have at least as many rows as columns");
    }
    if (rank == 0) {
        return {};
    }
    if (!m.allFinite()) {
        throw NumericalError("maxvol: non-finite entries");
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (lu.rank() < rank) {
        throw NumericalError("maxvol: matrix is rank deficient (numerical rank " + std::to_string(lu.rank()) +
                             " < " + std::to_string(rank) + ")");
    }
    const Eigen::VectorXd ids =
        lu.permutationP() * Eigen::VectorXd::LinSpaced(n_rows, 0.0, static_cast<double>(n_rows - 1));
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(rank));
    for (Eigen::Index k = 0; k < rank; ++k) {
        rows[static_cast<std::size_t>(k)] = static_cast<Eigen::Index>(std::llround(ids(k)));
    }

    const double bound = 1.0 + tol;
    Eigen::MatrixXd b = interpolation_matrix(m, rows);
    for (int swaps = 0; swaps <= max_swaps; ++swaps) {
        auto [i, j] = argmax_abs(b);
        if (std::abs(b(i, j)) <= bound) {
            // the rank-one updates drift; confirm on a fresh product
            b = interpolation_matrix(m, rows);
            std::tie(i, j) = argmax_abs(b);
            if (std::abs(b(i, j)) <= bound) {
                return rows;
            }
        }
        rows[static_cast<std::size_t>(j)] = i;
        const double pivot = b(i, j);
        Eigen::RowVectorXd row = b.row(i);
        row(j) -= 1.0;
        const Eigen::VectorXd col = b.col(j);
        b.noalias() -= col * (row / pivot);
    }
    throw NumericalError("maxvol: no quasi-dominant submatrix after " + std::to_string(max_swaps) + " swaps");
}

TruncatedSvd truncated_svd(const Eigen::MatrixXd& m, double tol, Eigen::Index max_rank)
{
    if (!m.allFinite()) {
        throw NumericalError("truncated_svd: non-finite entries");
    }
    TruncatedSvd result;
    if (m.size() == 0) {
        return result;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    const double total = s.norm();
    Eigen::Index rank = 0;
    if (total > 0.0) {
        // tail(r) = || s(r:) ||
        const double threshold = tol * total;
        double tail_squared = 0.0;
        rank = s.size();
        for (Eigen::Index r = s.size(); r > 0; --r) {
            tail_squared += s(r - 1) * s(r - 1);
            if (std::sqrt(tail_squared) > threshold) {
                break;
            }
            rank = r - 1;
        }
        // a zero tolerance still drops exact zeros only
        while (rank > 0 && s(rank - 1) == 0.0) {
            --rank;
        }
    }
    rank = std::min(rank, std::max<Eigen::Index>(max_rank, 0));
    result.rank = rank;
    result.u = svd.matrixU().leftCols(rank);
    result.singular_values = s.head(rank);
    result.v = svd.matrixV().leftCols(rank);
    return result;
}

MatrixCross matrix_cross(FunctionOracle& oracle, Eigen::Index rank, std::uint64_t seed)
{
    if (oracle.order() != 2) {
        throw DomainError("matrix_cross: oracle must have two modes");
    }
    const auto n_rows = static_cast<Eigen::Index>(oracle.dims()[0]);
    const auto n_cols = static_cast<Eigen::Index>(oracle.dims()[1]);
    if (rank < 1 || rank > std::min(n_rows, n_cols)) {
        throw DomainError("matrix_cross: rank must be in 1..min(I1, I2)");
    }

    const auto fetch_columns = [&](const std::vector<Eigen::Index>& cols) {
        std::vector<std::size_t> idx;
        idx.reserve(static_cast<std::size_t>(n_rows) * cols.size() * 2);
        for (Eigen::Index c : cols) {
            for (Eigen::Index r = 0; r < n_rows; ++r) {
                idx.push_back(static_cast<std::size_t>(r));
                idx.push_back(static_cast<std::size_t>(c));
            }
        }
        Eigen::MatrixXd block(n_rows, static_cast<Eigen::Index>(cols.size()));
        oracle.evaluate(idx, std::span<double>(block.data(), static_cast<std::size_t>(block.size())));
        return block;
    };
    const auto fetch_rows = [&](const std::vector<Eigen::Index>& rows) {
        std::vector<std::size_t> idx;
        idx.reserve(static_cast<std::size_t>(n_cols) * rows.size() * 2);
        for (Eigen::Index c = 0; c < n_cols; ++c) {
            for (Eigen::Index r : rows) {
                idx.push_back(static_cast<std::size_t>(r));
                idx.push_back(static_cast<std::size_t>(c));
            }
        }
        Eigen::MatrixXd block(static_cast<Eigen::Index>(rows.size()), n_cols);
        oracle.evaluate(idx, std::span<double>(block.data(), static_cast<std::size_t>(block.size())));
        return block;
    };
    const auto orthonormal_maxvol = [](const Eigen::MatrixXd& block) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(block);
        const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(block.rows(), block.cols());
        return maxvol(q);
    };

    // seeded distinct starting columns
    std::vector<Eigen::Index> all_cols(static_cast<std::size_t>(n_cols));
    std::iota(all_cols.begin(), all_cols.end(), Eigen::Index{0});
    SeededRng rng(seed);
    for (Eigen::Index k = 0; k < rank; ++k) {
        const auto pick = k + static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n_cols - k)));
        std::swap(all_cols[static_cast<std::size_t>(k)], all_cols[static_cast<std::size_t>(pick)]);
    }
    std::vector<Eigen::Index> cols(all_cols.begin(), all_cols.begin() + rank);

    MatrixCross cross;
    cross.rows = orthonormal_maxvol(fetch_columns(cols));
    cross.row_block = fetch_rows(cross.rows);
    cross.cols = orthonormal_maxvol(cross.row_block.transpose());
    cross.column_block = fetch_columns(cross.cols);

    Eigen::MatrixXd core(rank, rank);
    for (Eigen::Index s = 0; s < rank; ++s) {
        core.row(s) = cross.column_block.row(cross.rows[static_cast<std::size_t>(s)]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(core.transpose());
    if (lu.rank() < rank) {
        throw NumericalError("matrix_cross: cross submatrix is singular; reduce the rank");
    }
    cross.left_factor = lu.solve(cross.column_block.transpose()).transpose();
    return cross;
}

} // namespace etuq
