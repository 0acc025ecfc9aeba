#pragma once

#include "etuq/oracle.hpp"
#include "etuq/tensor.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace etuq {

/// Nested interpolation sets of a TT-cross. left[n] holds the row
/// multi-indices (prefixes i_1..i_{n+1}) and right[n] the column
/// multi-indices (suffixes i_{n+2}..i_N) of interface n = 0..N-2.
struct CrossIndexSets {
    std::vector<std::vector<std::vector<std::size_t>>> left;
    std::vector<std::vector<std::vector<std::size_t>>> right;

    [[nodiscard]] std::vector<std::size_t> ranks() const;
    /// Checks nesting, set sizes, index ranges; throws DomainError.
    void validate(const std::vector<std::size_t>& dims) const;
};

/// Fixed-rank TT-cross with maxvol pivoting. One sweep is a left-to-right
/// pass updating the row sets followed by a right-to-left pass updating the
/// column sets; the returned train is the interpolant of the last pass.
/// `ranks` holds R_0..R_N with R_0 = R_N = 1; interior ranks are clamped to
/// what the mode sizes admit.
TTTensor tt_cross_fixed_rank(FunctionOracle& oracle, std::vector<std::size_t> ranks, int sweeps,
                             std::uint64_t seed = 1, CrossIndexSets* sets_out = nullptr);

struct GreedyCrossOptions {
    int sweeps = 10;
    double tolerance = 1e-10;        ///< relative to the largest |entry| seen
    std::size_t rank_cap = 64;
    std::uint64_t seed = 1;
    int initial_candidates = 16;     ///< random probes for a nonzero first pivot
};

struct SweepRecord {
    int sweep = 0;
    std::size_t calls = 0;          ///< cumulative distinct oracle evaluations
    std::size_t max_rank = 0;
    std::size_t pivots_added = 0;
    double max_residual = 0.0;      ///< largest supercore residual seen, relative
};

struct GreedyCrossDiagnostics {
    std::uint64_t seed = 0;
    bool converged = false;
    std::vector<SweepRecord> sweeps;
    std::vector<std::size_t> first_pivot;
    double scale = 0.0;             ///< largest |entry| evaluated
};

struct GreedyCrossResult {
    TTTensor tt;
    GreedyCrossDiagnostics diagnostics;
    CrossIndexSets sets;
};

/// Rank-revealing greedy TT-cross. At interface n the two-mode supercore
/// A(I_{<n}, i_n, i_{n+1}, I_{>n+1}) is evaluated, its residual against the
/// current interpolant is scanned for the largest entry, and that entry is
/// added as a pivot when it exceeds tolerance * scale and the truncated SVD
/// of the supercore reveals a rank above the current one. Each interface
/// gains at most one pivot per sweep, so ranks are at most sweeps + 1.
/// Returns early with converged = true after a sweep that adds no pivot.
GreedyCrossResult greedy_tt_cross(FunctionOracle& oracle, const GreedyCrossOptions& options);

/// Diagnostics as a JSON document.
std::string diagnostics_json(const GreedyCrossDiagnostics& diagnostics);

} // namespace etuq
