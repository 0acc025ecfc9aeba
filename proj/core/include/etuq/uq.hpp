#pragma once

#include "etuq/cross.hpp"
#include "etuq/fit.hpp"
#include "etuq/quadrature.hpp"
#include "etuq/sparse_grid.hpp"

#include <cstdint>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace etuq {

/// Independent uniform inputs on a box.
struct RandomVector {
    std::vector<Interval> supports;

    static RandomVector uniform(std::size_t dim, Interval support);
    [[nodiscard]] std::size_t dim() const noexcept { return supports.size(); }
    /// Joint density, zero outside the box.
    [[nodiscard]] double density(std::span<const double> y) const;
    /// Throws DomainError on empty or degenerate supports.
    void validate() const;
};

/// Caching front end to an expensive scalar model of the random inputs.
/// Points are cached either by their exact bit pattern or by an integer
/// key under a tag (quadrature multi-indices). Each distinct point is solved
/// once, also under concurrent requests.
class QoIOracle {
public:
    /// Must be safe to call concurrently.
    using Model = std::function<double(std::span<const double>)>;

    QoIOracle(std::size_t dim, Model model, int threads = 1);
    QoIOracle(const QoIOracle&) = delete;
    QoIOracle& operator=(const QoIOracle&) = delete;

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] int threads() const noexcept { return threads_; }
    void set_threads(int threads) noexcept { threads_ = threads < 1 ? 1 : threads; }

    /// Row-major batch keyed by the exact values of each point.
    void evaluate(std::span<const double> points, std::span<double> out);
    double evaluate_keyed(std::string_view tag, std::span<const std::int64_t> key, std::span<const double> y);
    /// Row-major batch; keys hold `key_size` entries per point.
    void evaluate_keyed(std::string_view tag, std::span<const std::int64_t> keys, std::size_t key_size,
                        std::span<const double> points, std::span<double> out);

    /// Distinct underlying model solves so far.
    [[nodiscard]] std::size_t solves() const;

private:
    void run_batch(std::vector<std::string> keys, std::span<const double> points, std::span<double> out);

    std::size_t dim_;
    Model model_;
    int threads_;
    mutable std::mutex mutex_;
    std::unordered_map<std::string, std::shared_future<double>> cache_;
};

/// T_max of a full transient as a thread-safe model; solver instances are
/// pooled so concurrent calls never share a workspace.
QoIOracle::Model make_transient_qoi(std::shared_ptr<const ETModel> model);

struct MomentEstimate {
    std::string method;
    int level = -1;
    int sweeps = -1;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    double mean = 0.0;
    double std = 0.0;
    double second_moment = 0.0;
    std::size_t solver_calls = 0;
    bool clamped = false;  ///< negative variance from roundoff was set to zero
    std::size_t max_rank = 0;
    bool converged = false;
};

/// Fills std from mean and second moment, clamping negative variance.
void set_moments(MomentEstimate& est, double mean, double second_moment);
/// Same, from a variance computed without cancellation.
void set_central_moments(MomentEstimate& est, double mean, double variance);

/// Plain Monte Carlo with mt19937_64 draws in sample-major order; std is the
/// unbiased sample standard deviation. A run with n samples uses the first
/// n points of any longer run with the same seed.
MomentEstimate mc_estimate(QoIOracle& oracle, const RandomVector& rv, std::size_t samples, std::uint64_t seed);

MomentEstimate sg_estimate(QoIOracle& oracle, const RandomVector& rv, int level, Growth growth = Growth::smolyak);

struct TTEstimateOptions {
    int level = 1;  ///< level + 1 Gauss-Legendre nodes per dimension
    int sweeps = 10;
    double tolerance = 1e-10;
    std::size_t rank_cap = 64;
    std::uint64_t seed = 1;
};

/// Greedy TT-cross of the QoI on the Gauss-Legendre tensor grid, then
/// E[Q] = <Q_TT, W_TT> and E[Q^2] = <Q_TT * Q_TT, W_TT>.
MomentEstimate tt_estimate(QoIOracle& oracle, const RandomVector& rv, const TTEstimateOptions& options,
                           GreedyCrossDiagnostics* diagnostics = nullptr);

struct RelativeErrors {
    double mean_pct = 0.0;
    double std_pct = 0.0;
};

/// Throws DomainError when the reference mean or std is zero.
RelativeErrors relative_errors(const MomentEstimate& estimate, const MomentEstimate& reference);

std::string estimate_json(const MomentEstimate& estimate);

} // namespace etuq
