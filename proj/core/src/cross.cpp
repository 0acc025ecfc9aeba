#include "etuq/cross.hpp"

#include "etuq/error.hpp"
#include "etuq/lowrank.hpp"
#include "etuq/random.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace etuq {

namespace {

using Tuple = std::vector<std::size_t>;
using TupleSet = std::vector<Tuple>;

const TupleSet kEmptySet{Tuple{}};

// Evaluates A(prefix, i, suffix) for every prefix in `left`, mode index i
// and suffix in `right`; row = a + |left| * i, column = b.
Eigen::MatrixXd fiber(FunctionOracle& oracle, const TupleSet& left, std::size_t mode, const TupleSet& right)
{
    const std::size_t modes = oracle.dims()[mode];
    const auto rows = static_cast<Eigen::Index>(left.size() * modes);
    const auto cols = static_cast<Eigen::Index>(right.size());
    std::vector<std::size_t> idx;
    idx.reserve(static_cast<std::size_t>(rows * cols) * oracle.order());
    for (const Tuple& suffix : right) {
        for (std::size_t i = 0; i < modes; ++i) {
            for (const Tuple& prefix : left) {
                idx.insert(idx.end(), prefix.begin(), prefix.end());
                idx.push_back(i);
                idx.insert(idx.end(), suffix.begin(), suffix.end());
            }
        }
    }
    Eigen::MatrixXd out(rows, cols);
    oracle.evaluate(idx, std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
    return out;
}

// Two-mode supercore: rows (a, i_k) -> a + |left| i_k, columns
// (i_{k+1}, b) -> i_{k+1} + I_{k+1} b.
Eigen::MatrixXd supercore(FunctionOracle& oracle, const TupleSet& left, std::size_t k, const TupleSet& right)
{
    const std::size_t m0 = oracle.dims()[k];
    const std::size_t m1 = oracle.dims()[k + 1];
    const auto rows = static_cast<Eigen::Index>(left.size() * m0);
    const auto cols = static_cast<Eigen::Index>(m1 * right.size());
    std::vector<std::size_t> idx;
    idx.reserve(static_cast<std::size_t>(rows * cols) * oracle.order());
    for (const Tuple& suffix : right) {
        for (std::size_t j = 0; j < m1; ++j) {
            for (std::size_t i = 0; i < m0; ++i) {
                for (const Tuple& prefix : left) {
                    idx.insert(idx.end(), prefix.begin(), prefix.end());
                    idx.push_back(i);
                    idx.push_back(j);
                    idx.insert(idx.end(), suffix.begin(), suffix.end());
                }
            }
        }
    }
    Eigen::MatrixXd out(rows, cols);
    oracle.evaluate(idx, std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
    return out;
}

std::size_t position_of(const TupleSet& set, const Tuple& tuple)
{
    const auto it = std::find(set.begin(), set.end(), tuple);
    if (it == set.end()) {
        throw DomainError("cross: index set is not nested");
    }
    return static_cast<std::size_t>(it - set.begin());
}

Tuple head(const Tuple& t, std::size_t n) { return Tuple(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(n)); }
Tuple tail(const Tuple& t, std::size_t n) { return Tuple(t.begin() + static_cast<std::ptrdiff_t>(n), t.end()); }

// Row position of each prefix of `next` inside fiber(left, mode, .).
std::vector<Eigen::Index> row_positions(const TupleSet& left, const TupleSet& next)
{
    std::vector<Eigen::Index> rows;
    rows.reserve(next.size());
    for (const Tuple& t : next) {
        const std::size_t a = position_of(left, head(t, t.size() - 1));
        rows.push_back(static_cast<Eigen::Index>(a + left.size() * t.back()));
    }
    return rows;
}

// Column position of each suffix of `next` inside supercore columns
// (i_{k+1} + modes * b) with b indexing `right`.
std::vector<Eigen::Index> column_positions(const TupleSet& right, std::size_t modes, const TupleSet& next)
{
    std::vector<Eigen::Index> cols;
    cols.reserve(next.size());
    for (const Tuple& t : next) {
        const std::size_t b = position_of(right, tail(t, 1));
        cols.push_back(static_cast<Eigen::Index>(t.front() + modes * b));
    }
    return cols;
}

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& m)
{
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
}

// q * q(rows, :)^{-1}
Eigen::MatrixXd interpolate_rows(const Eigen::MatrixXd& q, const std::vector<Eigen::Index>& rows)
{
    Eigen::MatrixXd square(static_cast<Eigen::Index>(rows.size()), q.cols());
    for (std::size_t s = 0; s < rows.size(); ++s) {
        square.row(static_cast<Eigen::Index>(s)) = q.row(rows[s]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(square.transpose());
    if (lu.rank() < square.rows()) {
        throw NumericalError("tt-cross: singular cross submatrix; change the TT-ranks");
    }
    return lu.solve(q.transpose()).transpose();
}

// The raw cross submatrix c(rows, :) must be invertible, otherwise the
// requested rank exceeds what the data supports.
void require_regular_cross(const Eigen::MatrixXd& c, const std::vector<Eigen::Index>& rows)
{
    Eigen::MatrixXd square(static_cast<Eigen::Index>(rows.size()), c.cols());
    for (std::size_t s = 0; s < rows.size(); ++s) {
        square.row(static_cast<Eigen::Index>(s)) = c.row(rows[s]);
    }
    if (square.cwiseAbs().maxCoeff() == 0.0 || Eigen::FullPivLU<Eigen::MatrixXd>(square).rank() < square.rows()) {
        throw NumericalError("tt-cross: singular cross submatrix; change the TT-ranks");
    }
}

// Core with rows (a, i) of `matrix` (row a + rank_left * i) and columns b.
TTCore core_from_rows(const Eigen::MatrixXd& matrix, Eigen::Index rank_left, std::size_t modes)
{
    TTCore core(rank_left, modes, matrix.cols());
    for (std::size_t i = 0; i < modes; ++i) {
        for (Eigen::Index a = 0; a < rank_left; ++a) {
            core.slices[i].row(a) = matrix.row(a + rank_left * static_cast<Eigen::Index>(i));
        }
    }
    return core;
}

const TupleSet& left_of(const CrossIndexSets& sets, std::size_t k)
{
    return k == 0 ? kEmptySet : sets.left[k - 1];
}

const TupleSet& right_of(const CrossIndexSets& sets, std::size_t k, std::size_t order)
{
    return k + 1 == order ? kEmptySet : sets.right[k];
}

// Left-interpolating train: core k = C_k C_k(I_k, :)^{-1}, last core = C_{N-1}.
TTTensor assemble_left(FunctionOracle& oracle, const CrossIndexSets& sets)
{
    const std::size_t order = oracle.order();
    std::vector<TTCore> cores;
    cores.reserve(order);
    for (std::size_t k = 0; k < order; ++k) {
        const TupleSet& left = left_of(sets, k);
        const Eigen::MatrixXd c = fiber(oracle, left, k, right_of(sets, k, order));
        const auto rank_left = static_cast<Eigen::Index>(left.size());
        if (k + 1 == order) {
            cores.push_back(core_from_rows(c, rank_left, oracle.dims()[k]));
            break;
        }
        const auto rows = row_positions(left, sets.left[k]);
        cores.push_back(core_from_rows(interpolate_rows(orthonormal_basis(c), rows), rank_left, oracle.dims()[k]));
    }
    return TTTensor(std::move(cores));
}

void require_cross_order(const FunctionOracle& oracle)
{
    if (oracle.order() < 2) {
        throw DomainError("tt-cross: oracle needs at least two modes");
    }
}

} // namespace

std::vector<std::size_t> CrossIndexSets::ranks() const
{
    std::vector<std::size_t> r{1};
    for (const auto& set : left) {
        r.push_back(set.size());
    }
    r.push_back(1);
    return r;
}

void CrossIndexSets::validate(const std::vector<std::size_t>& dims) const
{
    const std::size_t order = dims.size();
    if (left.size() + 1 != order || right.size() + 1 != order) {
        throw DomainError("CrossIndexSets: need one left and one right set per interface");
    }
    for (std::size_t k = 0; k + 1 < order; ++k) {
        if (left[k].size() != right[k].size() || left[k].empty()) {
            throw DomainError("CrossIndexSets: left/right set sizes differ at interface " + std::to_string(k));
        }
        for (const Tuple& t : left[k]) {
            if (t.size() != k + 1) {
                throw DomainError("CrossIndexSets: prefix of wrong length");
            }
            for (std::size_t n = 0; n <= k; ++n) {
                if (t[n] >= dims[n]) {
                    throw DomainError("CrossIndexSets: prefix index out of range");
                }
            }
            if (k > 0) {
                position_of(left[k - 1], head(t, k));
            }
        }
        for (const Tuple& t : right[k]) {
            if (t.size() != order - k - 1) {
                throw DomainError("CrossIndexSets: suffix of wrong length");
            }
            for (std::size_t n = 0; n < t.size(); ++n) {
                if (t[n] >= dims[k + 1 + n]) {
                    throw DomainError("CrossIndexSets: suffix index out of range");
                }
            }
            if (k + 2 < order) {
                position_of(right[k + 1], tail(t, 1));
            }
        }
    }
}

TTTensor tt_cross_fixed_rank(FunctionOracle& oracle, std::vector<std::size_t> ranks, int sweeps,
                             std::uint64_t seed, CrossIndexSets* sets_out)
{
    require_cross_order(oracle);
    const std::size_t order = oracle.order();
    const auto& dims = oracle.dims();
    if (ranks.size() != order + 1 || ranks.front() != 1 || ranks.back() != 1) {
        throw DomainError("tt_cross_fixed_rank: ranks must be R_0..R_N with R_0 = R_N = 1");
    }
    if (sweeps < 1) {
        throw DomainError("tt_cross_fixed_rank: need at least one sweep");
    }
    for (std::size_t k = 1; k < order; ++k) {
        if (ranks[k] == 0) {
            throw DomainError("tt_cross_fixed_rank: interior ranks must be positive");
        }
        ranks[k] = std::min(ranks[k], ranks[k - 1] * dims[k - 1]);
    }
    for (std::size_t k = order - 1; k >= 1; --k) {
        ranks[k] = std::min(ranks[k], dims[k] * ranks[k + 1]);
    }

    CrossIndexSets sets;
    sets.left.resize(order - 1);
    sets.right.resize(order - 1);

    // nested random column sets, built from the right
    SeededRng rng(seed);
    for (std::size_t k = order - 1; k-- > 0;) {
        const TupleSet& inner = right_of(sets, k + 1, order);
        const std::size_t candidates = dims[k + 1] * inner.size();
        std::vector<std::size_t> pool(candidates);
        for (std::size_t c = 0; c < candidates; ++c) {
            pool[c] = c;
        }
        for (std::size_t s = 0; s < ranks[k + 1]; ++s) {
            std::swap(pool[s], pool[s + rng.index(candidates - s)]);
            Tuple t{pool[s] % dims[k + 1]};
            const Tuple& rest = inner[pool[s] / dims[k + 1]];
            t.insert(t.end(), rest.begin(), rest.end());
            sets.right[k].push_back(std::move(t));
        }
    }

    std::vector<TTCore> cores(order);
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        // left-to-right: row sets from maxvol on orthonormalized fibers
        for (std::size_t k = 0; k + 1 < order; ++k) {
            const TupleSet& left = left_of(sets, k);
            const Eigen::MatrixXd c = fiber(oracle, left, k, right_of(sets, k, order));
            const auto rows = maxvol(orthonormal_basis(c));
            require_regular_cross(c, rows);
            TupleSet next;
            for (Eigen::Index row : rows) {
                const auto r = static_cast<std::size_t>(row);
                Tuple t = left[r % left.size()];
                t.push_back(r / left.size());
                next.push_back(std::move(t));
            }
            sets.left[k] = std::move(next);
        }
        // right-to-left: column sets, and the right-interpolating cores
        for (std::size_t k = order - 1; k >= 1; --k) {
            const TupleSet& left = sets.left[k - 1];
            const TupleSet& right = right_of(sets, k, order);
            const std::size_t modes = dims[k];
            const Eigen::MatrixXd c = fiber(oracle, left, k, right);
            // transpose to rows (i, b) -> i + modes * b
            Eigen::MatrixXd ct(static_cast<Eigen::Index>(modes * right.size()), static_cast<Eigen::Index>(left.size()));
            for (std::size_t b = 0; b < right.size(); ++b) {
                for (std::size_t i = 0; i < modes; ++i) {
                    for (std::size_t a = 0; a < left.size(); ++a) {
                        ct(static_cast<Eigen::Index>(i + modes * b), static_cast<Eigen::Index>(a)) =
                            c(static_cast<Eigen::Index>(a + left.size() * i), static_cast<Eigen::Index>(b));
                    }
                }
            }
            const Eigen::MatrixXd q = orthonormal_basis(ct);
            const auto rows = maxvol(q);
            require_regular_cross(ct, rows);
            TupleSet next;
            for (Eigen::Index row : rows) {
                const auto r = static_cast<std::size_t>(row);
                Tuple t{r % modes};
                const Tuple& rest = right[r / modes];
                t.insert(t.end(), rest.begin(), rest.end());
                next.push_back(std::move(t));
            }
            sets.right[k - 1] = std::move(next);

            const Eigen::MatrixXd m = interpolate_rows(q, rows);  // (i, b) x a
            TTCore core(static_cast<Eigen::Index>(left.size()), modes, static_cast<Eigen::Index>(right.size()));
            for (std::size_t b = 0; b < right.size(); ++b) {
                for (std::size_t i = 0; i < modes; ++i) {
                    for (std::size_t a = 0; a < left.size(); ++a) {
                        core.slices[i](static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                            m(static_cast<Eigen::Index>(i + modes * b), static_cast<Eigen::Index>(a));
                    }
                }
            }
            cores[k] = std::move(core);
        }
        const Eigen::MatrixXd first = fiber(oracle, kEmptySet, 0, sets.right[0]);
        cores[0] = core_from_rows(first, 1, dims[0]);
    }
    if (sets_out != nullptr) {
        *sets_out = sets;
    }
    return TTTensor(std::move(cores));
}

GreedyCrossResult greedy_tt_cross(FunctionOracle& oracle, const GreedyCrossOptions& options)
{
    require_cross_order(oracle);
    if (options.sweeps < 1) {
        throw DomainError("greedy_tt_cross: sweep budget must be >= 1");
    }
    if (options.rank_cap < 1) {
        throw DomainError("greedy_tt_cross: rank cap must be >= 1");
    }
    const std::size_t order = oracle.order();
    const auto& dims = oracle.dims();

    GreedyCrossResult result;
    result.diagnostics.seed = options.seed;

    // first pivot: largest |value| among seeded random probes
    SeededRng rng(options.seed);
    const int probes = std::max(options.initial_candidates, 1);
    std::vector<std::size_t> probe_idx;
    for (int p = 0; p < probes; ++p) {
        for (std::size_t n = 0; n < order; ++n) {
            probe_idx.push_back(rng.index(dims[n]));
        }
    }
    std::vector<double> probe_values(static_cast<std::size_t>(probes));
    oracle.evaluate(probe_idx, probe_values);
    std::size_t best = 0;
    for (std::size_t p = 1; p < probe_values.size(); ++p) {
        if (std::abs(probe_values[p]) > std::abs(probe_values[best])) {
            best = p;
        }
    }
    double scale = std::abs(probe_values[best]);
    const Tuple pivot(probe_idx.begin() + static_cast<std::ptrdiff_t>(best * order),
                      probe_idx.begin() + static_cast<std::ptrdiff_t>((best + 1) * order));
    result.diagnostics.first_pivot = pivot;

    CrossIndexSets& sets = result.sets;
    sets.left.resize(order - 1);
    sets.right.resize(order - 1);
    for (std::size_t k = 0; k + 1 < order; ++k) {
        sets.left[k] = {head(pivot, k + 1)};
        sets.right[k] = {tail(pivot, k + 1)};
    }

    if (scale == 0.0) {
        throw NumericalError("greedy_tt_cross: every initial probe is zero; raise initial_candidates");
    }

    const auto visit = [&](std::size_t k, SweepRecord& record, std::vector<bool>& grown) {
        const TupleSet& left = left_of(sets, k);
        const TupleSet& right = right_of(sets, k + 1, order);
        const Eigen::MatrixXd w = supercore(oracle, left, k, right);
        scale = std::max(scale, w.cwiseAbs().maxCoeff());

        const auto rows = row_positions(left, sets.left[k]);
        const auto cols = column_positions(right, dims[k + 1], sets.right[k]);
        Eigen::MatrixXd residual = w;
        Eigen::MatrixXd cross(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
        Eigen::MatrixXd col_block(w.rows(), static_cast<Eigen::Index>(cols.size()));
        Eigen::MatrixXd row_block(static_cast<Eigen::Index>(rows.size()), w.cols());
        for (std::size_t t = 0; t < cols.size(); ++t) {
            col_block.col(static_cast<Eigen::Index>(t)) = w.col(cols[t]);
        }
        for (std::size_t s = 0; s < rows.size(); ++s) {
            row_block.row(static_cast<Eigen::Index>(s)) = w.row(rows[s]);
            for (std::size_t t = 0; t < cols.size(); ++t) {
                cross(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) = w(rows[s], cols[t]);
            }
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(cross);
        if (lu.rank() == cross.rows()) {
            residual.noalias() -= col_block * lu.solve(row_block);
        }

        // quasi-maximal residual entry, lowest column-major position on ties
        Eigen::Index bi = 0;
        Eigen::Index bj = 0;
        double largest = -1.0;
        for (Eigen::Index j = 0; j < residual.cols(); ++j) {
            for (Eigen::Index i = 0; i < residual.rows(); ++i) {
                const double v = std::abs(residual(i, j));
                if (v > largest) {
                    largest = v;
                    bi = i;
                    bj = j;
                }
            }
        }
        const double relative = scale > 0.0 ? largest / scale : 0.0;
        record.max_residual = std::max(record.max_residual, relative);

        const std::size_t current = sets.left[k].size();
        if (largest <= options.tolerance * scale || current >= options.rank_cap) {
            return;
        }
        // decimation of the supercore reveals the rank it supports
        const TruncatedSvd svd = truncated_svd(w, options.tolerance, static_cast<Eigen::Index>(options.rank_cap));
        if (static_cast<std::size_t>(svd.rank) <= current) {
            return;
        }

        const auto r = static_cast<std::size_t>(bi);
        const auto c = static_cast<std::size_t>(bj);
        Tuple prefix = left[r % left.size()];
        prefix.push_back(r / left.size());
        Tuple suffix{c % dims[k + 1]};
        const Tuple& rest = right[c / dims[k + 1]];
        suffix.insert(suffix.end(), rest.begin(), rest.end());
        sets.left[k].push_back(std::move(prefix));
        sets.right[k].push_back(std::move(suffix));
        grown[k] = true;
        ++record.pivots_added;
    };

    const auto max_rank = [&] {
        std::size_t m = 1;
        for (const auto& s : sets.left) {
            m = std::max(m, s.size());
        }
        return m;
    };

    for (int sweep = 1; sweep <= options.sweeps; ++sweep) {
        SweepRecord record;
        record.sweep = sweep;
        std::vector<bool> grown(order - 1, false);
        for (std::size_t k = 0; k + 1 < order; ++k) {
            visit(k, record, grown);
        }
        for (std::size_t k = order - 1; k-- > 0;) {
            if (!grown[k]) {
                visit(k, record, grown);
            }
        }
        record.max_rank = max_rank();
        record.calls = oracle.calls();
        result.diagnostics.sweeps.push_back(record);
        if (record.pivots_added == 0) {
            result.diagnostics.converged = record.max_residual <= options.tolerance;
            break;
        }
    }

    result.tt = assemble_left(oracle, sets);
    result.diagnostics.sweeps.back().calls = oracle.calls();
    result.diagnostics.scale = scale;
    return result;
}

std::string diagnostics_json(const GreedyCrossDiagnostics& diagnostics)
{
    nlohmann::json doc;
    doc["seed"] = diagnostics.seed;
    doc["converged"] = diagnostics.converged;
    doc["scale"] = diagnostics.scale;
    doc["first_pivot"] = diagnostics.first_pivot;
    auto& sweeps = doc["sweeps"] = nlohmann::json::array();
    for (const auto& r : diagnostics.sweeps) {
        sweeps.push_back({{"sweep", r.sweep},
                          {"calls", r.calls},
                          {"max_rank", r.max_rank},
                          {"pivots_added", r.pivots_added},
                          {"max_residual", r.max_residual}});
    }
    return doc.dump(2);
}

} // namespace etuq
