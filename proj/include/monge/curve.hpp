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

#include <Eigen/Geometry>

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "monge/jet.hpp"
#include "monge/numerics.hpp"

namespace monge {

/// First three derivatives of a space curve with respect to its parameter.
struct CurveDerivatives {
    Vec3 d1 = Vec3::Zero();
    Vec3 d2 = Vec3::Zero();
    Vec3 d3 = Vec3::Zero();
};

/// Exact derivative oracle attached to a sampled curve.
using DerivativeFn = std::function<CurveDerivatives(double)>;

/// Position and first three derivatives of an analytic curve.
using CurveJetFn = std::function<std::array<Vec3, 4>(double)>;

/// Wraps a generic lambda `f(Jet) -> std::array<Jet, 3>` into a CurveJetFn.
template <class F>
CurveJetFn make_analytic(F f) {
    return [f](double t) {
        const std::array<Jet, 3> xyz = f(Jet::variable(t));
        std::array<Vec3, 4> out;
        for (int k = 0; k < 4; ++k)
            out[static_cast<std::size_t>(k)] =
                Vec3(xyz[0].derivative(k), xyz[1].derivative(k), xyz[2].derivative(k));
        return out;
    };
}

/// A space curve stored as samples on a parameter grid. Closed curves are
/// periodic and do not repeat their first sample at the end.
class SampledCurve3 {
public:
    SampledCurve3() = default;

    SampledCurve3(std::vector<Vec3> samples, std::vector<double> params, bool closed,
                  double period = 0.0, DerivativeFn derivatives = {})
        : samples_(std::move(samples)),
          grid_(std::move(params), closed, period),
          derivatives_(std::move(derivatives)) {
        validate();
    }

    SampledCurve3(std::vector<Vec3> samples, SampleGrid grid, DerivativeFn derivatives = {})
        : samples_(std::move(samples)), grid_(std::move(grid)), derivatives_(std::move(derivatives)) {
        validate();
    }

    /// Samples an analytic curve on a uniform grid and keeps its exact derivatives.
    static SampledCurve3 from_analytic(const CurveJetFn& f, double t0, double span, std::size_t n,
                                       bool closed) {
        SampleGrid g = SampleGrid::uniform(t0, span, n, closed);
        std::vector<Vec3> pts(n);
        for (std::size_t i = 0; i < n; ++i) pts[i] = f(g.params()[i])[0];
        DerivativeFn d = [f](double t) {
            const auto j = f(t);
            return CurveDerivatives{j[1], j[2], j[3]};
        };
        return SampledCurve3(std::move(pts), std::move(g), std::move(d));
    }

    std::size_t size() const { return samples_.size(); }
    bool closed() const { return grid_.closed(); }
    double period() const { return grid_.period(); }
    const SampleGrid& grid() const { return grid_; }
    const std::vector<double>& params() const { return grid_.params(); }
    const std::vector<Vec3>& samples() const { return samples_; }
    bool has_exact_derivatives() const { return static_cast<bool>(derivatives_); }
    const DerivativeFn& derivative_fn() const { return derivatives_; }

    /// Sample by extended index (closed curves wrap).
    const Vec3& sample(long i) const { return samples_[grid_.wrap(i)]; }

    /// Derivatives at sample i: exact when available, otherwise 9-point
    /// finite differences on the parameter grid.
    CurveDerivatives derivatives(std::size_t i) const {
        if (derivatives_) return derivatives_(grid_.params()[i]);
        const Stencil s = derivative_stencil(grid_, static_cast<long>(i), 3);
        auto fetch = [this](long k) -> Vec3 { return sample(k); };
        return {apply_stencil<Vec3>(s, 1, fetch), apply_stencil<Vec3>(s, 2, fetch),
                apply_stencil<Vec3>(s, 3, fetch)};
    }

    std::vector<CurveDerivatives> all_derivatives() const {
        std::vector<CurveDerivatives> out(size());
        for (std::size_t i = 0; i < size(); ++i) out[i] = derivatives(i);
        return out;
    }

    /// Derivatives at an arbitrary parameter.
    CurveDerivatives derivatives_at(double t) const {
        if (derivatives_) return derivatives_(t);
        const Stencil s = interpolation_stencil(grid_, t, 3, kDerivativeStencil);
        auto fetch = [this](long k) -> Vec3 { return sample(k); };
        return {apply_stencil<Vec3>(s, 1, fetch), apply_stencil<Vec3>(s, 2, fetch),
                apply_stencil<Vec3>(s, 3, fetch)};
    }

    /// Position at an arbitrary parameter: integrates the exact derivative
    /// from the nearest sample, or interpolates the samples.
    Vec3 position_at(double t) const {
        if (!closed() && (t < grid_.front() - 1e-12 || t > grid_.back() + 1e-12))
            throw OutOfDomain("parameter outside the curve's range");
        if (derivatives_) {
            const long j = grid_.locate(t);
            const double a = grid_.param(j);
            return sample(j) + GaussLegendre8::integrate(
                                   [this](double x) -> Vec3 { return derivatives_(x).d1; }, a, t);
        }
        const Stencil s = interpolation_stencil(grid_, t, 0);
        return apply_stencil<Vec3>(s, 0, [this](long k) -> Vec3 { return sample(k); });
    }

    /// Bounding-box diagonal; the natural length scale for tolerances.
    double diameter() const {
        Vec3 lo = samples_.front();
        Vec3 hi = samples_.front();
        for (const auto& p : samples_) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        return (hi - lo).norm();
    }

    /// Total length, by quadrature of the speed.
    double length() const {
        const auto w = quadrature_weights(grid_);
        double sum = 0.0;
        for (std::size_t i = 0; i < size(); ++i) sum += w[i] * derivatives(i).d1.norm();
        return sum;
    }

private:
    void validate() const {
        if (samples_.size() != grid_.size())
            throw InvalidInput("samples and params differ in length");
        if (grid_.closed() && samples_.size() < 8)
            throw InvalidInput("closed curves need at least 8 samples");
        if (!grid_.closed() && samples_.size() < 2)
            throw InvalidInput("open curves need at least 2 samples");
        const double scale = std::max(diameter(), 1e-300);
        const std::size_t m = grid_.closed() ? samples_.size() : samples_.size() - 1;
        for (std::size_t i = 0; i < m; ++i) {
            if ((sample(static_cast<long>(i) + 1) - samples_[i]).norm() <= 1e-14 * scale)
                throw DegenerateCurve("repeated consecutive samples at index " + std::to_string(i));
        }
    }

    std::vector<Vec3> samples_;
    SampleGrid grid_;
    DerivativeFn derivatives_;
};

/// A planar curve: the profile (generatrix) of a Monge surface.
class PlaneCurve {
public:
    PlaneCurve() = default;

    PlaneCurve(std::vector<Vec2> samples, std::vector<double> params, bool closed,
               double period = 0.0, std::optional<int> symmetry_order = std::nullopt)
        : samples_(std::move(samples)),
          grid_(std::move(params), closed, period),
          symmetry_order_(symmetry_order) {
        validate();
    }

    PlaneCurve(std::vector<Vec2> samples, SampleGrid grid,
               std::optional<int> symmetry_order = std::nullopt)
        : samples_(std::move(samples)), grid_(std::move(grid)), symmetry_order_(symmetry_order) {
        validate();
    }

    std::size_t size() const { return samples_.size(); }
    bool closed() const { return grid_.closed(); }
    double period() const { return grid_.period(); }
    const SampleGrid& grid() const { return grid_; }
    const std::vector<double>& params() const { return grid_.params(); }
    const std::vector<Vec2>& samples() const { return samples_; }
    std::optional<int> symmetry_order() const { return symmetry_order_; }
    const Vec2& sample(long i) const { return samples_[grid_.wrap(i)]; }

    PlaneCurve with_symmetry_order(std::optional<int> n) const {
        PlaneCurve c = *this;
        c.symmetry_order_ = n;
        return c;
    }

    /// Position (order 0) or derivative (order 1..3) at parameter u.
    Vec2 evaluate(double u, int order = 0) const {
        if (!closed() && (u < grid_.front() - 1e-9 || u > grid_.back() + 1e-9))
            throw OutOfDomain("profile parameter outside its range");
        const std::size_t width = order == 0 ? kInterpolationStencil : kDerivativeStencil;
        const Stencil s = interpolation_stencil(grid_, u, order, width);
        return apply_stencil<Vec2>(s, order, [this](long k) -> Vec2 { return sample(k); });
    }

    Vec2 derivative(std::size_t i, int order) const {
        const Stencil s = derivative_stencil(grid_, static_cast<long>(i), order);
        return apply_stencil<Vec2>(s, order, [this](long k) -> Vec2 { return sample(k); });
    }

    double diameter() const {
        Vec2 lo = samples_.front();
        Vec2 hi = samples_.front();
        for (const auto& p : samples_) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        return (hi - lo).norm();
    }

    double length() const {
        const auto w = quadrature_weights(grid_);
        double sum = 0.0;
        for (std::size_t i = 0; i < size(); ++i) sum += w[i] * derivative(i, 1).norm();
        return sum;
    }

private:
    void validate() const {
        if (samples_.size() != grid_.size())
            throw InvalidInput("samples and params differ in length");
        if (grid_.closed() && samples_.size() < 8)
            throw InvalidInput("closed curves need at least 8 samples");
        if (!grid_.closed() && samples_.size() < 2)
            throw InvalidInput("open curves need at least 2 samples");
        if (symmetry_order_ && *symmetry_order_ < 1)
            throw InvalidInput("symmetry order must be positive");
        const double scale = std::max(diameter(), 1e-300);
        const std::size_t m = grid_.closed() ? samples_.size() : samples_.size() - 1;
        for (std::size_t i = 0; i < m; ++i) {
            if ((sample(static_cast<long>(i) + 1) - samples_[i]).norm() <= 1e-14 * scale)
                throw DegenerateCurve("repeated consecutive samples at index " + std::to_string(i));
        }
    }

    std::vector<Vec2> samples_;
    SampleGrid grid_;
    std::optional<int> symmetry_order_;
};

namespace detail {

/// Arc length from the first sample to every sample (closed grids append
/// the full length as entry N).
inline std::vector<double> cumulative_length(const SampledCurve3& c) {
    const SampleGrid& g = c.grid();
    if (c.has_exact_derivatives()) {
        const auto& d = c.derivative_fn();
        const std::size_t m = interval_count(g);
        std::vector<double> s(m + 1, 0.0);
        for (std::size_t j = 0; j < m; ++j) {
            const long lj = static_cast<long>(j);
            s[j + 1] = s[j] + GaussLegendre8::integrate(
                                  [&d](double t) { return d(t).d1.norm(); }, g.param(lj),
                                  g.param(lj + 1));
        }
        return s;
    }
    std::vector<double> speed(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) speed[i] = c.derivatives(i).d1.norm();
    return cumulative_integral<double>(
        g, [&](long k) { return speed[g.wrap(k)]; }, 0.0);
}

inline std::vector<double> cumulative_length(const PlaneCurve& c) {
    const SampleGrid& g = c.grid();
    std::vector<double> speed(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) speed[i] = c.derivative(i, 1).norm();
    return cumulative_integral<double>(
        g, [&](long k) { return speed[g.wrap(k)]; }, 0.0);
}

/// Inverse of the cumulative arc-length table: parameter t with s(t) = s.
class ArcLengthInverse {
public:
    ArcLengthInverse(const SampleGrid& g, std::vector<double> cum)
        : grid_(g), cum_(std::move(cum)), total_(cum_.back()) {}

    double total() const { return total_; }

    double s_at(long i) const {
        if (!grid_.closed()) return cum_[static_cast<std::size_t>(i)];
        return cum_[grid_.wrap(i)] + static_cast<double>(grid_.period_shift(i)) * total_;
    }

    /// Initial estimate by local Lagrange interpolation of t as a function of s.
    double param_guess(double s) const {
        const long n = static_cast<long>(grid_.size());
        long shift = 0;
        double sr = s;
        if (grid_.closed()) {
            const double k = std::floor(s / total_);
            shift = static_cast<long>(k);
            sr -= k * total_;
        }
        auto it = std::upper_bound(cum_.begin(), cum_.begin() + n, sr);
        long j = static_cast<long>(it - cum_.begin()) - 1;
        if (!grid_.closed()) j = std::clamp(j, 0L, std::max(0L, n - 2));
        j += shift * n;
        const auto idx = grid_.window(j, kInterpolationStencil,
                                      static_cast<long>(kInterpolationStencil / 2) - 1);
        std::vector<double> z(idx.size());
        for (std::size_t k = 0; k < idx.size(); ++k) z[k] = s_at(idx[k]);
        const auto w = fornberg_weights(s, z, 0);
        double t = 0.0;
        for (std::size_t k = 0; k < idx.size(); ++k) t += w[0][k] * grid_.param(idx[k]);
        return t;
    }

    long interval_of(double s) const {
        const double t = param_guess(s);
        return grid_.locate(t);
    }

private:
    SampleGrid grid_;
    std::vector<double> cum_;
    double total_;
};

}  // namespace detail

/// Resamples a space curve uniformly in arc length. The result is
/// parameterized by arc length; exact derivatives are carried through the
/// chain rule when the input has them.
inline SampledCurve3 reparameterize_arclength(const SampledCurve3& curve, std::size_t n_out) {
    if (n_out < 2) throw InvalidInput("n_out must be at least 2");
    const auto cum = detail::cumulative_length(curve);
    const double total = cum.back();
    if (!(total > 1e-12 * std::max(1.0, curve.diameter())) || total < 1e-300)
        throw DegenerateCurve("total length below tolerance");

    auto src = std::make_shared<const SampledCurve3>(curve);
    auto inv = std::make_shared<const detail::ArcLengthInverse>(curve.grid(), cum);
    const bool exact = curve.has_exact_derivatives();

    // Parameter for arc length s, polished by Newton steps on the exact speed.
    auto param_of = [src, inv, exact](double s) {
        double t = inv->param_guess(s);
        if (!exact) return t;
        const auto& d = src->derivative_fn();
        for (int it = 0; it < 4; ++it) {
            const long j = src->grid().locate(t);
            const double tj = src->grid().param(j);
            const double sj = inv->s_at(j);
            const double partial =
                GaussLegendre8::integrate([&d](double x) { return d(x).d1.norm(); }, tj, t);
            const double f = sj + partial - s;
            const double speed = d(t).d1.norm();
            const double step = f / speed;
            t -= step;
            if (std::abs(step) < 1e-15 * (1.0 + std::abs(t))) break;
        }
        return t;
    };

    const bool closed = curve.closed();
    SampleGrid grid = SampleGrid::uniform(0.0, total, n_out, closed);
    std::vector<Vec3> pts(n_out);
    for (std::size_t k = 0; k < n_out; ++k) {
        const double s = grid.params()[k];
        double t = param_of(s);
        if (!closed) t = std::clamp(t, curve.grid().front(), curve.grid().back());
        pts[k] = curve.position_at(t);
    }
    if (!closed) {
        pts.front() = curve.samples().front();
        pts.back() = curve.samples().back();
    }

    DerivativeFn d;
    if (exact) {
        d = [src, param_of](double s) {
            const double t = param_of(s);
            const CurveDerivatives r = src->derivative_fn()(t);
            const double v = r.d1.norm();
            const Vec3 u = r.d1 / v;
            const double vt = u.dot(r.d2);
            const Vec3 ut = (r.d2 - vt * u) / v;
            const Vec3 utt = (r.d3 - (ut.dot(r.d2) + u.dot(r.d3)) * u - vt * ut) / v -
                             (r.d2 - vt * u) * vt / (v * v);
            CurveDerivatives out;
            out.d1 = u;
            out.d2 = ut / v;
            out.d3 = (utt / v - ut * vt / (v * v)) / v;
            return out;
        };
    }
    return SampledCurve3(std::move(pts), std::move(grid), std::move(d));
}

/// Resamples a plane curve uniformly in arc length.
inline PlaneCurve reparameterize_arclength(const PlaneCurve& curve, std::size_t n_out) {
    if (n_out < 2) throw InvalidInput("n_out must be at least 2");
    const auto cum = detail::cumulative_length(curve);
    const double total = cum.back();
    if (!(total > 1e-12 * std::max(1.0, curve.diameter())))
        throw DegenerateCurve("total length below tolerance");
    const detail::ArcLengthInverse inv(curve.grid(), cum);
    const bool closed = curve.closed();
    SampleGrid grid = SampleGrid::uniform(0.0, total, n_out, closed);
    std::vector<Vec2> pts(n_out);
    for (std::size_t k = 0; k < n_out; ++k) {
        double t = inv.param_guess(grid.params()[k]);
        if (!closed) t = std::clamp(t, curve.grid().front(), curve.grid().back());
        pts[k] = curve.evaluate(t);
    }
    if (!closed) {
        pts.front() = curve.samples().front();
        pts.back() = curve.samples().back();
    }
    return PlaneCurve(std::move(pts), std::move(grid), curve.symmetry_order());
}

/// Frenet apparatus along a curve. The normal is n = b x t and the torsion
/// follows b' = tau n (derivatives in arc length).
struct FrenetData {
    std::vector<Vec3> tangent;
    std::vector<Vec3> normal;
    std::vector<Vec3> binormal;
    std::vector<double> curvature;
    std::vector<double> torsion;
    std::vector<double> speed;
    bool binormal_periodic = true;
};

/// Relative curvature threshold (curvature times diameter) below which a
/// sample counts as an inflection point.
inline constexpr double kInflectionTolerance = 1e-8;

inline FrenetData frenet_data(const SampledCurve3& curve,
                              double inflection_tol = kInflectionTolerance) {
    const std::size_t n = curve.size();
    const double diam = std::max(curve.diameter(), 1e-300);
    FrenetData f;
    f.tangent.resize(n);
    f.normal.resize(n);
    f.binormal.resize(n);
    f.curvature.resize(n);
    f.torsion.resize(n);
    f.speed.resize(n);
    double sign = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const CurveDerivatives d = curve.derivatives(i);
        const double speed = d.d1.norm();
        if (speed <= 1e-14 * diam) throw DegenerateTangent("zero speed at sample " + std::to_string(i));
        const Vec3 cross = d.d1.cross(d.d2);
        const double cn = cross.norm();
        const double kappa = cn / (speed * speed * speed);
        if (kappa * diam < inflection_tol) throw InflectionPoint(i);
        const Vec3 t = d.d1 / speed;
        Vec3 b = cross / cn;
        if (i > 0 && b.dot(f.binormal[i - 1]) * sign < 0.0) sign = -sign;
        b *= sign;
        f.tangent[i] = t;
        f.binormal[i] = b;
        f.normal[i] = b.cross(t);
        f.curvature[i] = sign * kappa;
        f.torsion[i] = -d.d1.dot(d.d2.cross(d.d3)) / (cn * cn);
        f.speed[i] = speed;
    }
    if (curve.closed()) f.binormal_periodic = f.binormal.back().dot(f.binormal.front()) > 0.0;
    return f;
}

namespace detail {
inline FrenetData closed_frenet(const SampledCurve3& curve) {
    if (!curve.closed()) throw OpenCurve("total torsion needs a closed curve");
    FrenetData f = frenet_data(curve);
    if (!f.binormal_periodic)
        throw NonPeriodicBinormal("propagated binormal returns negated after one period");
    return f;
}
}  // namespace detail

/// Total torsion: the integral of tau over one period.
inline double total_torsion(const SampledCurve3& curve) {
    const FrenetData f = detail::closed_frenet(curve);
    const auto w = quadrature_weights(curve.grid());
    double sum = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i) sum += w[i] * f.torsion[i] * f.speed[i];
    return sum;
}

/// Length of the binormal indicatrix: the integral of |tau| over one period.
/// Without sign changes this is the trapezoid sum of |tau| ds. Otherwise
/// every interval is integrated by Gauss-Legendre on tau(t)|r'(t)|, split at
/// the zeros of tau.
inline double binormal_trace_length(const SampledCurve3& curve) {
    const FrenetData f = detail::closed_frenet(curve);
    const SampleGrid& g = curve.grid();
    const std::size_t n = curve.size();
    std::vector<double> v(n);
    bool changes_sign = false;
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = f.torsion[i] * f.speed[i];
        if (i > 0 && v[i] * v[i - 1] < 0.0) changes_sign = true;
    }
    if (v.front() * v.back() < 0.0) changes_sign = true;
    const auto w = quadrature_weights(g);
    if (!changes_sign) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += w[i] * std::abs(v[i]);
        return sum;
    }
    auto density = [&curve](double t) {
        const CurveDerivatives d = curve.derivatives_at(t);
        const Vec3 c = d.d1.cross(d.d2);
        return -d.d1.dot(d.d2.cross(d.d3)) / c.squaredNorm() * d.d1.norm();
    };
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const long li = static_cast<long>(i);
        double a = g.param(li);
        const double b = g.param(li + 1);
        const double fb = v[g.wrap(li + 1)];
        if (v[i] * fb < 0.0) {
            double lo = a;
            double hi = b;
            double flo = v[i];
            for (int it = 0; it < 60 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = density(mid);
                if (fm * flo > 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            const double root = 0.5 * (lo + hi);
            sum += std::abs(GaussLegendre8::integrate(density, a, root));
            a = root;
        }
        sum += std::abs(GaussLegendre8::integrate(density, a, b));
    }
    return sum;
}

}  // namespace monge
