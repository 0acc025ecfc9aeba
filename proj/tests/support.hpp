#pragma once

// Independent reference computations shared by the tests.

#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace etuq::testing {

// E[x^k] for x uniform on [-1, 1].
inline double uniform_monomial_moment(int k) { return k % 2 ? 0.0 : 1.0 / (k + 1); }

// E[x^k] for x uniform on [a, b].
inline double uniform_monomial_moment(int k, double a, double b) {
    return (std::pow(b, k + 1) - std::pow(a, k + 1)) / ((k + 1) * (b - a));
}

// Sum over the full tensor grid of prod_n w_n(i_n) f(x(i)), by odometer.
inline double tensor_quadrature(const std::vector<std::vector<double>>& nodes,
                                const std::vector<std::vector<double>>& weights,
                                const std::function<double(std::span<const double>)>& f) {
    const std::size_t n = nodes.size();
    std::vector<std::size_t> idx(n, 0);
    std::vector<double> y(n);
    double sum = 0.0;
    while (true) {
        double w = 1.0;
        for (std::size_t d = 0; d < n; ++d) {
            y[d] = nodes[d][idx[d]];
            w *= weights[d][idx[d]];
        }
        sum += w * f(y);
        std::size_t d = 0;
        while (d < n && ++idx[d] == nodes[d].size()) idx[d++] = 0;
        if (d == n) break;
    }
    return sum;
}

// Sum of `terms` separable products prod_n g_{t,n}(i_n) on an I^N grid.
struct SeparableSum {
    std::vector<std::vector<std::vector<double>>> factors;  // [term][mode][i]

    static SeparableSum random(std::size_t terms, std::size_t order, std::size_t modes, unsigned seed) {
        std::mt19937 gen(seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        SeparableSum s;
        s.factors.assign(terms, std::vector<std::vector<double>>(order, std::vector<double>(modes)));
        for (auto& t : s.factors)
            for (auto& m : t)
                for (auto& v : m) v = u(gen);
        return s;
    }

    double operator()(std::span<const std::size_t> i) const {
        double sum = 0.0;
        for (const auto& t : factors) {
            double p = 1.0;
            for (std::size_t n = 0; n < t.size(); ++n) p *= t[n][i[n]];
            sum += p;
        }
        return sum;
    }
};

} // namespace etuq::testing
