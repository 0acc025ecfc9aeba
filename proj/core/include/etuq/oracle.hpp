#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <future>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

namespace etuq {

/// Memoizing wrapper around a function of an N-dimensional multi-index.
///
/// Every distinct multi-index is evaluated exactly once, also when several
/// threads request it concurrently; calls() counts distinct evaluations.
class FunctionOracle {
public:
    using Evaluator = std::function<double(std::span<const std::size_t>)>;

    /// Throws CapacityError if the index space does not fit in 64 bits.
    FunctionOracle(std::vector<std::size_t> dims, Evaluator evaluator, int threads = 1);

    FunctionOracle(const FunctionOracle&) = delete;
    FunctionOracle& operator=(const FunctionOracle&) = delete;

    [[nodiscard]] const std::vector<std::size_t>& dims() const noexcept { return dims_; }
    [[nodiscard]] std::size_t order() const noexcept { return dims_.size(); }
    [[nodiscard]] int threads() const noexcept { return threads_; }
    void set_threads(int threads) noexcept { threads_ = threads < 1 ? 1 : threads; }

    /// Cached evaluation; throws DomainError for out-of-range indices.
    double operator()(std::span<const std::size_t> index);

    /// Evaluates a batch (row-major, order() entries per index). Uncached
    /// keys are computed concurrently on up to threads() workers; results are
    /// written in input order.
    void evaluate(std::span<const std::size_t> indices, std::span<double> out);

    /// Distinct underlying evaluations so far.
    [[nodiscard]] std::size_t calls() const;
    [[nodiscard]] std::uint64_t key(std::span<const std::size_t> index) const;

private:
    std::vector<std::size_t> dims_;
    Evaluator evaluator_;
    int threads_;
    mutable std::mutex mutex_;
    std::unordered_map<std::uint64_t, std::shared_future<double>> cache_;
    std::size_t calls_ = 0;
};

} // namespace etuq
