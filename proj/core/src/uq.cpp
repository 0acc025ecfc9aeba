#include "etuq/uq.hpp"

#include "etuq/error.hpp"
#include "etuq/parallel.hpp"
#include "etuq/random.hpp"
#include "etuq/tensor.hpp"

#include "json.hpp"

#include <cmath>
#include <cstring>

namespace etuq {

RandomVector RandomVector::uniform(std::size_t dim, Interval support) {
    RandomVector rv{std::vector<Interval>(dim, support)};
    rv.validate();
    return rv;
}

double RandomVector::density(std::span<const double> y) const {
    if (y.size() != supports.size()) throw DomainError("RandomVector: dimension mismatch");
    double p = 1.0;
    for (std::size_t n = 0; n < y.size(); ++n) {
        if (!supports[n].contains(y[n])) return 0.0;
        p /= supports[n].width();
    }
    return p;
}

void RandomVector::validate() const {
    if (supports.empty()) throw DomainError("RandomVector: no components");
    for (const auto& s : supports)
        if (!(s.lower < s.upper) || !std::isfinite(s.lower) || !std::isfinite(s.upper))
            throw DomainError("RandomVector: invalid support");
}

QoIOracle::QoIOracle(std::size_t dim, Model model, int threads)
    : dim_(dim), model_(std::move(model)), threads_(threads < 1 ? 1 : threads) {
    if (dim_ == 0) throw DomainError("QoIOracle: dimension must be positive");
    if (!model_) throw DomainError("QoIOracle: empty model");
}

namespace {

std::string bit_key(std::span<const double> y) {
    std::string key(1, 'x');
    key.append(reinterpret_cast<const char*>(y.data()), y.size_bytes());
    return key;
}

std::string tagged_key(std::string_view tag, std::span<const std::int64_t> key) {
    std::string k(1, 'k');
    k.append(tag);
    k.push_back('\0');
    k.append(reinterpret_cast<const char*>(key.data()), key.size_bytes());
    return k;
}

} // namespace

void QoIOracle::run_batch(std::vector<std::string> keys, std::span<const double> points, std::span<double> out) {
    const std::size_t count = keys.size();
    std::vector<std::shared_future<double>> futures(count);
    std::vector<std::promise<double>> promises;
    std::vector<std::size_t> owned;
    {
        std::lock_guard lock(mutex_);
        for (std::size_t i = 0; i < count; ++i) {
            auto it = cache_.find(keys[i]);
            if (it == cache_.end()) {
                promises.emplace_back();
                auto f = promises.back().get_future().share();
                cache_.emplace(std::move(keys[i]), f);
                futures[i] = f;
                owned.push_back(i);
            } else {
                futures[i] = it->second;
            }
        }
    }
    parallel_for(owned.size(), threads_, [&](std::size_t k) {
        const std::size_t i = owned[k];
        try {
            promises[k].set_value(model_(points.subspan(i * dim_, dim_)));
        } catch (...) {
            promises[k].set_exception(std::current_exception());
        }
    });
    for (std::size_t i = 0; i < count; ++i) out[i] = futures[i].get();
}

void QoIOracle::evaluate(std::span<const double> points, std::span<double> out) {
    if (points.size() != out.size() * dim_) throw DomainError("QoIOracle: batch size mismatch");
    std::vector<std::string> keys;
    keys.reserve(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) keys.push_back(bit_key(points.subspan(i * dim_, dim_)));
    run_batch(std::move(keys), points, out);
}

double QoIOracle::evaluate_keyed(std::string_view tag, std::span<const std::int64_t> key, std::span<const double> y) {
    if (y.size() != dim_) throw DomainError("QoIOracle: point dimension mismatch");
    double v = 0.0;
    run_batch({tagged_key(tag, key)}, y, std::span<double>(&v, 1));
    return v;
}

void QoIOracle::evaluate_keyed(std::string_view tag, std::span<const std::int64_t> keys, std::size_t key_size,
                               std::span<const double> points, std::span<double> out) {
    if (points.size() != out.size() * dim_ || keys.size() != out.size() * key_size)
        throw DomainError("QoIOracle: batch size mismatch");
    std::vector<std::string> k;
    k.reserve(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) k.push_back(tagged_key(tag, keys.subspan(i * key_size, key_size)));
    run_batch(std::move(k), points, out);
}

std::size_t QoIOracle::solves() const {
    std::lock_guard lock(mutex_);
    return cache_.size();
}

namespace {

class SolverPool {
public:
    explicit SolverPool(std::shared_ptr<const ETModel> model) : model_(std::move(model)) {}

    double operator()(std::span<const double> delta) {
        std::unique_ptr<ElectroThermalSolver> solver;
        {
            std::lock_guard lock(mutex_);
            if (!idle_.empty()) {
                solver = std::move(idle_.back());
                idle_.pop_back();
            }
        }
        if (!solver) solver = std::make_unique<ElectroThermalSolver>(model_);
        const double t = solver->run_transient(delta).t_max;
        std::lock_guard lock(mutex_);
        idle_.push_back(std::move(solver));
        return t;
    }

private:
    std::shared_ptr<const ETModel> model_;
    std::mutex mutex_;
    std::vector<std::unique_ptr<ElectroThermalSolver>> idle_;
};

} // namespace

QoIOracle::Model make_transient_qoi(std::shared_ptr<const ETModel> model) {
    if (!model) throw ConfigError("make_transient_qoi: null model");
    auto pool = std::make_shared<SolverPool>(std::move(model));
    return [pool](std::span<const double> delta) { return (*pool)(delta); };
}

void set_central_moments(MomentEstimate& est, double mean, double variance) {
    est.mean = mean;
    est.second_moment = variance + mean * mean;
    est.clamped = variance < 0.0;
    est.std = variance > 0.0 ? std::sqrt(variance) : 0.0;
}

void set_moments(MomentEstimate& est, double mean, double second_moment) {
    set_central_moments(est, mean, second_moment - mean * mean);
    est.second_moment = second_moment;
}

MomentEstimate mc_estimate(QoIOracle& oracle, const RandomVector& rv, std::size_t samples, std::uint64_t seed) {
    rv.validate();
    if (samples < 2) throw DomainError("mc_estimate: need at least 2 samples");
    if (rv.dim() != oracle.dim()) throw DomainError("mc_estimate: dimension mismatch");
    const std::size_t n = rv.dim();
    std::vector<double> points(samples * n);
    SeededRng rng(seed);
    for (std::size_t s = 0; s < samples; ++s)
        for (std::size_t d = 0; d < n; ++d) points[s * n + d] = rng.uniform(rv.supports[d].lower, rv.supports[d].upper);
    std::vector<double> q(samples);
    oracle.evaluate(points, q);

    double sum = 0.0;
    double sum2 = 0.0;
    for (double v : q) {
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / static_cast<double>(samples);
    double ss = 0.0;
    for (double v : q) ss += (v - mean) * (v - mean);

    MomentEstimate est;
    est.method = "mc";
    est.samples = samples;
    est.seed = seed;
    est.mean = mean;
    est.second_moment = sum2 / static_cast<double>(samples);
    est.std = std::sqrt(ss / static_cast<double>(samples - 1));
    est.solver_calls = samples;
    return est;
}

MomentEstimate sg_estimate(QoIOracle& oracle, const RandomVector& rv, int level, Growth growth) {
    rv.validate();
    if (level < 0) throw DomainError("sg_estimate: level must be >= 0");
    if (rv.dim() != oracle.dim()) throw DomainError("sg_estimate: dimension mismatch");
    const int n = static_cast<int>(rv.dim());
    const SparseGrid grid = build_sparse_grid(n, level, growth, rv.supports);

    // Integer keys: reference coordinates in [-1, 1] on a 1e-12 lattice.
    std::vector<std::int64_t> keys(grid.points.size());
    for (std::size_t p = 0; p < grid.size(); ++p)
        for (int d = 0; d < n; ++d) {
            const auto& iv = rv.supports[static_cast<std::size_t>(d)];
            const double ref = 2.0 * (grid.points[p * static_cast<std::size_t>(n) + static_cast<std::size_t>(d)] - iv.lower) /
                                   iv.width() - 1.0;
            keys[p * static_cast<std::size_t>(n) + static_cast<std::size_t>(d)] = std::llround(ref * 1e12);
        }
    std::vector<double> values(grid.size());
    const std::string tag = growth == Growth::smolyak ? "sg-cc" : "sg-gl";
    oracle.evaluate_keyed(tag, keys, static_cast<std::size_t>(n), grid.points, values);
    // Shift by one sample before squaring; E[Q^2] - E[Q]^2 loses most digits
    // when std << mean, worse with the signed Smolyak weights.
    const double shift = values.front();
    for (double& v : values) v -= shift;
    const QuadratureMoments m = sparse_quadrature(grid, values);

    MomentEstimate est;
    est.method = "sg";
    est.level = level;
    est.solver_calls = grid.size();
    set_central_moments(est, shift + m.mean, m.second_moment - m.mean * m.mean);
    return est;
}

MomentEstimate tt_estimate(QoIOracle& oracle, const RandomVector& rv, const TTEstimateOptions& options,
                           GreedyCrossDiagnostics* diagnostics) {
    rv.validate();
    if (options.level < 1) throw DomainError("tt_estimate: level must be >= 1");
    if (rv.dim() != oracle.dim()) throw DomainError("tt_estimate: dimension mismatch");
    const std::size_t n = rv.dim();
    const Rule1D rule = gauss_legendre(options.level + 1);
    std::vector<std::vector<double>> nodes(n);
    std::vector<std::vector<double>> weights(n);
    for (std::size_t d = 0; d < n; ++d) {
        const MappedRule1D mapped = map_rule(rule, rv.supports[d]);
        nodes[d] = mapped.nodes;
        weights[d] = mapped.rule.weights;
    }
    const std::string tag = "tt-gl" + std::to_string(rule.size());
    FunctionOracle grid_oracle(std::vector<std::size_t>(n, rule.size()),
                               [&](std::span<const std::size_t> index) {
                                   std::vector<double> y(n);
                                   std::vector<std::int64_t> key(n);
                                   for (std::size_t d = 0; d < n; ++d) {
                                       y[d] = nodes[d][index[d]];
                                       key[d] = static_cast<std::int64_t>(index[d]);
                                   }
                                   return oracle.evaluate_keyed(tag, key, y);
                               },
                               oracle.threads());

    GreedyCrossOptions cross;
    cross.sweeps = options.sweeps;
    cross.tolerance = options.tolerance;
    cross.rank_cap = options.rank_cap;
    cross.seed = options.seed;
    GreedyCrossResult res = greedy_tt_cross(grid_oracle, cross);

    const TTTensor w = rank_one_weights(weights);
    MomentEstimate est;
    est.method = "tt";
    est.level = options.level;
    est.sweeps = options.sweeps;
    est.seed = options.seed;
    est.solver_calls = grid_oracle.calls();
    est.max_rank = res.tt.max_rank();
    est.converged = res.diagnostics.converged;
    set_moments(est, tt_dot(res.tt, w), tt_dot(tt_hadamard(res.tt, res.tt), w));
    if (diagnostics) *diagnostics = std::move(res.diagnostics);
    return est;
}

RelativeErrors relative_errors(const MomentEstimate& estimate, const MomentEstimate& reference) {
    if (reference.mean == 0.0) throw DomainError("relative_errors: reference mean is zero");
    if (reference.std == 0.0) throw DomainError("relative_errors: reference std is zero");
    return {std::abs(estimate.mean - reference.mean) / std::abs(reference.mean) * 100.0,
            std::abs(estimate.std - reference.std) / reference.std * 100.0};
}

std::string estimate_json(const MomentEstimate& e) {
    nlohmann::json j;
    j["method"] = e.method;
    j["level"] = e.level;
    j["sweeps"] = e.sweeps;
    j["samples"] = e.samples;
    j["seed"] = e.seed;
    j["mean_K"] = e.mean;
    j["std_K"] = e.std;
    j["second_moment_K2"] = e.second_moment;
    j["solver_calls"] = e.solver_calls;
    j["variance_clamped"] = e.clamped;
    if (e.method == "tt") {
        j["max_rank"] = e.max_rank;
        j["converged"] = e.converged;
    }
    return j.dump(2);
}

} // namespace etuq
