#pragma once

#include "etuq/oracle.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace etuq {

/// Rows of a tall matrix spanning a quasi-maximal-volume square submatrix.
///
/// Seeds with the pivot rows of a full-pivoting LU factorization, then swaps
/// rows until every entry of m * m(rows, :)^{-1} is at most 1 + tol in
/// modulus. The bound is re-verified on a fresh product before returning.
/// Throws NumericalError if m is not of full column rank.
std::vector<Eigen::Index> maxvol(const Eigen::MatrixXd& m, double tol = 1e-2, int max_swaps = 500);

/// Largest modulus of m * m(rows, :)^{-1}.
double dominance_bound(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& rows);

struct TruncatedSvd {
    Eigen::MatrixXd u;
    Eigen::VectorXd singular_values;
    Eigen::MatrixXd v;
    Eigen::Index rank = 0;

    [[nodiscard]] Eigen::MatrixXd reconstruct() const
    {
        return u * singular_values.asDiagonal() * v.transpose();
    }
};

/// Smallest rank whose discarded singular-value tail has l2 norm at most
/// tol * ||s||_2, capped at max_rank. A zero matrix gives rank 0.
TruncatedSvd truncated_svd(const Eigen::MatrixXd& m, double tol, Eigen::Index max_rank);

/// Skeleton approximation A(:, cols) A(rows, cols)^{-1} A(rows, :).
struct MatrixCross {
    std::vector<Eigen::Index> rows;
    std::vector<Eigen::Index> cols;
    Eigen::MatrixXd column_block;  ///< A(:, cols)
    Eigen::MatrixXd row_block;     ///< A(rows, :)
    Eigen::MatrixXd left_factor;   ///< A(:, cols) A(rows, cols)^{-1}

    [[nodiscard]] double operator()(Eigen::Index i, Eigen::Index j) const
    {
        return left_factor.row(i).dot(row_block.col(j));
    }
    [[nodiscard]] Eigen::MatrixXd full() const { return left_factor * row_block; }
};

/// Rank-`rank` cross of a two-mode oracle: seeded random columns, maxvol
/// rows, then maxvol columns on the selected rows. Touches at most
/// (I1 + I2) R - R^2 entries for the final cross plus I1 R - R^2 entries of
/// pivot search. Throws NumericalError when the cross submatrix is singular.
MatrixCross matrix_cross(FunctionOracle& oracle, Eigen::Index rank, std::uint64_t seed = 1);

} // namespace etuq
