#include "etuq/oracle.hpp"

#include "etuq/error.hpp"
#include "etuq/parallel.hpp"

#include <limits>
#include <string>

namespace etuq {

FunctionOracle::FunctionOracle(std::vector<std::size_t> dims, Evaluator evaluator, int threads)
    : dims_(std::move(dims)), evaluator_(std::move(evaluator)), threads_(threads < 1 ? 1 : threads)
{
    if (dims_.empty()) {
        throw DomainError("FunctionOracle: no modes");
    }
    std::uint64_t total = 1;
    for (std::size_t d : dims_) {
        if (d == 0) {
            throw DomainError("FunctionOracle: zero-sized mode");
        }
        if (total > std::numeric_limits<std::uint64_t>::max() / d) {
            throw CapacityError("FunctionOracle: index space exceeds 64-bit keys");
        }
        total *= d;
    }
}

std::uint64_t FunctionOracle::key(std::span<const std::size_t> index) const
{
    if (index.size() != dims_.size()) {
        throw DomainError("FunctionOracle: index has wrong order");
    }
    std::uint64_t linear = 0;
    std::uint64_t stride = 1;
    for (std::size_t n = 0; n < dims_.size(); ++n) {
        if (index[n] >= dims_[n]) {
            throw DomainError("FunctionOracle: index " + std::to_string(index[n]) + " out of range in mode " +
                              std::to_string(n));
        }
        linear += index[n] * stride;
        stride *= dims_[n];
    }
    return linear;
}

double FunctionOracle::operator()(std::span<const std::size_t> index)
{
    double value = 0.0;
    evaluate(index, std::span<double>(&value, 1));
    return value;
}

void FunctionOracle::evaluate(std::span<const std::size_t> indices, std::span<double> out)
{
    const std::size_t order = dims_.size();
    if (indices.size() != out.size() * order) {
        throw DomainError("FunctionOracle::evaluate: batch shape mismatch");
    }
    struct Pending {
        std::size_t position;
        std::promise<double> promise;
    };
    std::vector<std::shared_future<double>> futures(out.size());
    std::vector<Pending> pending;
    {
        std::lock_guard lock(mutex_);
        for (std::size_t k = 0; k < out.size(); ++k) {
            const std::uint64_t id = key(indices.subspan(k * order, order));
            auto it = cache_.find(id);
            if (it == cache_.end()) {
                Pending p{k, {}};
                it = cache_.emplace(id, p.promise.get_future().share()).first;
                pending.push_back(std::move(p));
                ++calls_;
            }
            futures[k] = it->second;
        }
    }
    parallel_for(pending.size(), threads_, [&](std::size_t t) {
        Pending& p = pending[t];
        try {
            p.promise.set_value(evaluator_(indices.subspan(p.position * order, order)));
        } catch (...) {
            p.promise.set_exception(std::current_exception());
        }
    });
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = futures[k].get();
    }
}

std::size_t FunctionOracle::calls() const
{
    std::lock_guard lock(mutex_);
    return calls_;
}

} // namespace etuq
