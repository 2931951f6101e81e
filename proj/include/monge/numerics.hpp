// Copyright 2026 The monge-kit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "monge/error.hpp"

namespace monge {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
    double r = std::remainder(a, kTwoPi);
    if (r <= -kPi) r += kTwoPi;
    return r;
}

/// Parameter grid shared by every sampled field. Closed grids are periodic:
/// extended index i + k*N refers to sample i shifted by k periods.
class SampleGrid {
public:
    SampleGrid() = default;

    SampleGrid(std::vector<double> params, bool closed, double period)
        : params_(std::move(params)), closed_(closed), period_(closed ? period : 0.0) {
        if (params_.empty()) throw InvalidInput("empty parameter grid");
        for (std::size_t i = 1; i < params_.size(); ++i) {
            if (!(params_[i] > params_[i - 1]))
                throw InvalidInput("parameters must be strictly increasing (index " +
                                   std::to_string(i) + ")");
        }
        if (closed_) {
            if (!(period_ > params_.back() - params_.front()))
                throw InvalidInput("period must exceed the parameter span of a closed grid");
        }
    }

    /// Uniform grid: closed grids exclude the endpoint, open grids include it.
    static SampleGrid uniform(double t0, double span, std::size_t n, bool closed) {
        std::vector<double> p(n);
        const double h = closed ? span / static_cast<double>(n)
                                : span / static_cast<double>(std::max<std::size_t>(n, 2) - 1);
        for (std::size_t i = 0; i < n; ++i) p[i] = t0 + h * static_cast<double>(i);
        return SampleGrid(std::move(p), closed, span);
    }

    std::size_t size() const { return params_.size(); }
    bool closed() const { return closed_; }
    double period() const { return period_; }
    const std::vector<double>& params() const { return params_; }
    double front() const { return params_.front(); }
    double back() const { return params_.back(); }

    /// Number of whole periods contained in extended index i (floor division).
    long period_shift(long i) const {
        const long n = static_cast<long>(size());
        return i >= 0 ? i / n : -((-i + n - 1) / n);
    }

    std::size_t wrap(long i) const {
        const long n = static_cast<long>(size());
        long r = i % n;
        if (r < 0) r += n;
        return static_cast<std::size_t>(r);
    }

    double param(long i) const {
        if (!closed_) return params_[static_cast<std::size_t>(i)];
        return params_[wrap(i)] + static_cast<double>(period_shift(i)) * period_;
    }

    /// Largest (extended) index j with param(j) <= t. Open grids clamp to
    /// [0, N-2] so that [param(j), param(j+1)] is always a valid interval.
    long locate(double t) const {
        const long n = static_cast<long>(size());
        long shift = 0;
        if (closed_) {
            const double k = std::floor((t - params_.front()) / period_);
            shift = static_cast<long>(k);
            t -= k * period_;
        }
        auto it = std::upper_bound(params_.begin(), params_.end(), t);
        long j = static_cast<long>(it - params_.begin()) - 1;
        if (!closed_) j = std::clamp(j, 0L, std::max(0L, n - 2));
        if (closed_ && j < 0) {
            j += n;
            shift -= 1;
        }
        return j + shift * n;
    }

    /// `width` consecutive extended indices around the interval starting at
    /// j; open grids shift the window to stay inside [0, N-1].
    std::vector<long> window(long j, std::size_t width, long left) const {
        const long n = static_cast<long>(size());
        const long w = static_cast<long>(std::min<std::size_t>(width, closed_ ? width : size()));
        long start = j - left;
        if (!closed_) start = std::clamp(start, 0L, n - w);
        std::vector<long> idx(static_cast<std::size_t>(w));
        for (long k = 0; k < w; ++k) idx[static_cast<std::size_t>(k)] = start + k;
        return idx;
    }

    bool is_uniform(double rel_tol = 1e-12) const {
        if (size() < 2) return true;
        const double h = (params_.back() - params_.front()) / static_cast<double>(size() - 1);
        for (std::size_t i = 1; i < size(); ++i)
            if (std::abs(params_[i] - params_[i - 1] - h) > rel_tol * std::abs(h)) return false;
        if (closed_ && std::abs(period_ - h * static_cast<double>(size())) > rel_tol * period_)
            return false;
        return true;
    }

private:
    std::vector<double> params_;
    bool closed_ = false;
    double period_ = 0.0;
};

/// Finite-difference / interpolation weights (Fornberg's recursion) for
/// derivative orders 0..max_order at x0 on arbitrary nodes.
/// Returns weights[k][j].
inline std::vector<std::vector<double>> fornberg_weights(double x0, const std::vector<double>& z,
                                                         int max_order) {
    const std::size_t n = z.size();
    std::vector<std::vector<double>> c(static_cast<std::size_t>(max_order) + 1,
                                       std::vector<double>(n, 0.0));
    double c1 = 1.0;
    double c4 = z[0] - x0;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const int mn = std::min(static_cast<int>(i), max_order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = z[i] - x0;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = z[i] - z[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c;
}

/// A linear functional on grid samples: value = sum_k weights[k] * f(index[k]).
struct Stencil {
    std::vector<long> index;
    std::vector<std::vector<double>> weights;  // [order][k]
};

inline constexpr std::size_t kDerivativeStencil = 9;
inline constexpr std::size_t kInterpolationStencil = 8;

/// Derivative stencil (orders 0..max_order) centred on sample i.
inline Stencil derivative_stencil(const SampleGrid& g, long i, int max_order,
                                  std::size_t width = kDerivativeStencil) {
    std::size_t w = width;
    if (g.closed()) {
        w = std::min(w, g.size());
        if (w % 2 == 0) --w;
    }
    Stencil s;
    s.index = g.window(i, w, static_cast<long>(w / 2));
    std::vector<double> z(s.index.size());
    for (std::size_t k = 0; k < z.size(); ++k) z[k] = g.param(s.index[k]);
    s.weights = fornberg_weights(g.param(i), z, max_order);
    return s;
}

/// Interpolation stencil (orders 0..max_order) at an arbitrary parameter.
inline Stencil interpolation_stencil(const SampleGrid& g, double t, int max_order,
                                     std::size_t width = kInterpolationStencil) {
    const long j = g.locate(t);
    Stencil s;
    s.index = g.window(j, width, static_cast<long>(width / 2) - 1);
    std::vector<double> z(s.index.size());
    for (std::size_t k = 0; k < z.size(); ++k) z[k] = g.param(s.index[k]);
    s.weights = fornberg_weights(t, z, max_order);
    return s;
}

/// Applies stencil order `k` to values addressed by extended index.
template <class Value, class Fetch>
Value apply_stencil(const Stencil& s, int order, Fetch&& fetch) {
    Value acc = s.weights[static_cast<std::size_t>(order)][0] * fetch(s.index[0]);
    for (std::size_t k = 1; k < s.index.size(); ++k)
        acc += s.weights[static_cast<std::size_t>(order)][k] * fetch(s.index[k]);
    return acc;
}

/// Eight-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre8 {
    static constexpr std::array<double, 8> nodes{
        -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
        0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
    static constexpr std::array<double, 8> weights{
        0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
        0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

    template <class F>
    static auto integrate(F&& f, double a, double b) {
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        using R = std::decay_t<decltype(f(a))>;
        R acc = weights[0] * f(mid + half * nodes[0]);
        for (std::size_t k = 1; k < 8; ++k) acc += weights[k] * f(mid + half * nodes[k]);
        return R(half * acc);
    }
};

/// Weights of the local cubic rule for the integral over [param(j), param(j+1)].
/// On a uniform periodic grid these weights sum exactly to the trapezoid rule.
inline Stencil interval_stencil(const SampleGrid& g, long j) {
    Stencil s;
    s.index = g.window(j, 4, 1);
    std::vector<double> z(s.index.size());
    for (std::size_t k = 0; k < z.size(); ++k) z[k] = g.param(s.index[k]);
    const double a = g.param(j);
    const double b = g.param(j + 1);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    const double gp = half / std::sqrt(3.0);
    std::vector<double> w(z.size(), 0.0);
    for (double x : {mid - gp, mid + gp}) {
        auto l = fornberg_weights(x, z, 0);
        for (std::size_t k = 0; k < z.size(); ++k) w[k] += half * l[0][k];
    }
    s.weights = {std::move(w)};
    return s;
}

/// Number of integration intervals of a grid (closed grids wrap).
inline std::size_t interval_count(const SampleGrid& g) {
    return g.closed() ? g.size() : g.size() - 1;
}

/// Running integral at every sample (and, for closed grids, at the end of
/// the period as the extra last entry).
template <class Value, class Fetch>
std::vector<Value> cumulative_integral(const SampleGrid& g, Fetch&& fetch, const Value& zero) {
    const std::size_t m = interval_count(g);
    std::vector<Value> out(m + 1, zero);
    for (std::size_t j = 0; j < m; ++j) {
        const Stencil s = interval_stencil(g, static_cast<long>(j));
        out[j + 1] = out[j] + apply_stencil<Value>(s, 0, fetch);
    }
    return out;
}

/// Quadrature weights over the whole grid: periodic trapezoid for closed
/// grids, composite Simpson for uniform open grids with an odd sample count,
/// the local cubic rule otherwise.
inline std::vector<double> quadrature_weights(const SampleGrid& g) {
    const std::size_t n = g.size();
    std::vector<double> w(n, 0.0);
    if (g.closed()) {
        for (std::size_t i = 0; i < n; ++i) {
            const long li = static_cast<long>(i);
            w[i] = 0.5 * (g.param(li + 1) - g.param(li - 1));
        }
        return w;
    }
    if (n == 1) return w;
    if (n == 2) {
        w[0] = w[1] = 0.5 * (g.back() - g.front());
        return w;
    }
    if (n % 2 == 1 && g.is_uniform()) {
        const double h = (g.back() - g.front()) / static_cast<double>(n - 1);
        for (std::size_t i = 0; i < n; ++i)
            w[i] = (i == 0 || i == n - 1) ? h / 3.0 : (i % 2 == 1 ? 4.0 * h / 3.0 : 2.0 * h / 3.0);
        return w;
    }
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const Stencil s = interval_stencil(g, static_cast<long>(j));
        for (std::size_t k = 0; k < s.index.size(); ++k)
            w[static_cast<std::size_t>(s.index[k])] += s.weights[0][k];
    }
    return w;
}

/// Worker count for grid-parallel sections; MONGE_KIT_THREADS caps it.
inline unsigned worker_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MONGE_KIT_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

/// Runs body(i) for i in [0, n), partitioned into contiguous row blocks.
template <class Body>
void parallel_rows(std::size_t n, Body&& body) {
    const unsigned workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(n, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace monge
