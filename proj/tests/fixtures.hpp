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

// Reference surfaces shared by the unit tests and the acceptance runner.

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "monge_kit.hpp"

namespace monge::fixtures {

inline CurveJetFn scaled(CurveJetFn f, double s) {
    return [f, s](double t) {
        auto a = f(t);
        for (auto& x : a) x *= s;
        return a;
    };
}

inline double max_curvature(const SampledCurve3& c) {
    double k = 0.0;
    for (double x : frenet_data(c).curvature) k = std::max(k, x);
    return k;
}

/// Torus of revolution: circle spine of radius R in the xy-plane, circle
/// profile of radius r about the origin.
inline MongeSurface torus(double R = 2.0, double r = 0.5, std::size_t n_spine = 512, std::size_t n_profile = 256) {
    const auto spine = SampledCurve3::from_analytic(families::circle(R), 0.0, kTwoPi, n_spine, true);
    return MongeSurface(from_spine(spine), families::circle_profile(r, Vec2::Zero(), n_profile));
}

/// Off-centre ellipse profile swept along a closed spine with its rotation
/// minimizing frame, sized well inside the curvature radius.
inline MongeSurface ellipse_over(const SampledCurve3& spine) {
    const double k = max_curvature(spine);
    return MongeSurface(from_spine(spine, std::nullopt, 4096),
                        families::ellipse_profile(0.3 / k, 0.2 / k, Vec2(0.1 / k, -0.05 / k)));
}

inline MongeSurface knot_surface() {
    return ellipse_over(SampledCurve3::from_analytic(families::torus_knot(2, 3, 1.0, 0.3), 0.0, kTwoPi, 1024, true));
}

/// Spine: a random closed curve on the sphere of radius 2.
inline MongeSurface random_surface(std::uint64_t seed) {
    return ellipse_over(
        SampledCurve3::from_analytic(scaled(families::random_sphere_curve(seed), 2.0), 0.0, kTwoPi, 1024, true));
}

/// Frames of the family with kappa1 = -1, kappa2 = 0, lambda(v) = v in
/// closed form (q2 = t x q1 keeps the frame right-handed).
struct ExampleOne {
    static Vec3 q1(double v) { return {std::cos(v), std::sin(v), 0.0}; }
    static Vec3 t(double v) { return {-std::sin(v), std::cos(v), 0.0}; }
    static Vec3 q2(double v) { return t(v).cross(q1(v)); }
    static Vec3 p(double v) { return {v * std::cos(v) - std::sin(v), v * std::sin(v) + std::cos(v), 0.0}; }
};

inline PlaneFamily example_one_family(double v0 = -2.0, double v1 = 2.0, std::size_t n = 2001) {
    const FamilyCoefficients c{[](double) { return -1.0; }, [](double) { return 0.0; }, [](double v) { return v; }};
    return from_coefficients(c, SampleGrid::uniform(v0, v1 - v0, n, false), ExampleOne::t(v0), ExampleOne::q1(v0),
                             ExampleOne::p(v0));
}

/// The three line profiles through the origin, each of half-length h.
/// With q2 = t x q1 the line written y = -x in a left-handed plane frame
/// is y = x here.
inline std::vector<std::pair<std::string, PlaneCurve>> example_one_profiles(double h = 2.0, std::size_t n = 81) {
    const double d = h / std::sqrt(2.0);
    return {{"diagonal", families::segment_profile(Vec2(-d, -d), Vec2(d, d), n)},
            {"x-axis", families::segment_profile(Vec2(-h, 0.0), Vec2(h, 0.0), n)},
            {"y-axis", families::segment_profile(Vec2(0.0, -h), Vec2(0.0, h), n)}};
}

/// Sweep of a helix with its Frenet frame: not an orthogonal family, so
/// the meridians are not geodesics.
inline MongeSurface frenet_helix_surface() {
    const double a = 1.0, c = 0.5;
    const std::size_t n = 1024;
    const SampleGrid g = SampleGrid::uniform(0.0, 2.0 * kTwoPi, n, false);
    std::vector<Vec3> p(n), t(n), q1(n), q2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = g.params()[i];
        p[i] = Vec3(a * std::cos(s), a * std::sin(s), c * s);
        t[i] = Vec3(-a * std::sin(s), a * std::cos(s), c).normalized();
        q1[i] = Vec3(-std::cos(s), -std::sin(s), 0.0);
        q2[i] = t[i].cross(q1[i]);
    }
    return MongeSurface(from_fields(g, p, t, q1, q2), families::circle_profile(0.3, Vec2(0.2, 0.0)));
}

/// Spine synthesized from the epicycle binormal family with total torsion
/// T, plus its normal-plane family resampled to 4096 points.
struct SynthSpine {
    SynthesisResult result;
    double max_curvature = 0.0;
    PlaneFamily family;
    /// Profile size that keeps the surface regular.
    double profile_scale() const { return 0.4 / max_curvature; }
};

inline const SynthSpine& synth_spine(double T) {
    static std::map<double, SynthSpine> cache;
    auto it = cache.find(T);
    if (it != cache.end()) return it->second;
    SpineSynthesisProblem p;
    p.family = epicycle_family();
    SynthSpine s;
    s.result = synthesize(p, T);
    s.max_curvature = max_curvature(s.result.spine);
    s.family = from_spine(s.result.spine, std::nullopt, 4096);
    return cache.emplace(T, std::move(s)).first->second;
}

/// Largest error of the first fundamental form from fourth-order central
/// differences of evaluate, against (1, 0, margin^2), on an n x n grid.
inline double fd_metric_error(const MongeSurface& s, std::size_t n) {
    const auto us = s.u_grid(n);
    const auto vs = s.v_grid(n);
    const double hu = s.u_span() / static_cast<double>(n);
    const double hv = s.v_span() / static_cast<double>(n);
    double err = 0.0;
    for (double v : vs) {
        for (double u : us) {
            const Vec3 xu = (-s.evaluate(u + 2 * hu, v) + 8 * s.evaluate(u + hu, v) - 8 * s.evaluate(u - hu, v) +
                             s.evaluate(u - 2 * hu, v)) /
                            (12 * hu);
            const Vec3 xv = (-s.evaluate(u, v + 2 * hv) + 8 * s.evaluate(u, v + hv) - 8 * s.evaluate(u, v - hv) +
                             s.evaluate(u, v - 2 * hv)) /
                            (12 * hv);
            const double m = s.margin(u, v);
            err = std::max({err, std::abs(xu.squaredNorm() - 1.0), std::abs(xu.dot(xv)),
                            std::abs(xv.squaredNorm() - m * m)});
        }
    }
    return err;
}

/// Least-squares slope of log(error) against log(1 / n).
inline double fitted_order(const std::vector<std::size_t>& ns, const std::vector<double>& errs) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double k = static_cast<double>(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const double x = -std::log(static_cast<double>(ns[i]));
        const double y = std::log(errs[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

/// Smallest singular value of the central-difference Jacobian [x_u x_v].
inline double jacobian_smin(const MongeSurface& s, double u, double v, double h = 1e-7) {
    auto clamp_u = [&](double x) { return s.u_periodic() ? x : std::clamp(x, s.u_front(), s.u_front() + s.u_span()); };
    auto clamp_v = [&](double x) { return s.v_periodic() ? x : std::clamp(x, s.v_front(), s.v_front() + s.v_span()); };
    const double u0 = clamp_u(u - h), u1 = clamp_u(u + h);
    const double v0 = clamp_v(v - h), v1 = clamp_v(v + h);
    Eigen::Matrix<double, 3, 2> J;
    J.col(0) = (s.evaluate(u1, v) - s.evaluate(u0, v)) / (u1 - u0);
    J.col(1) = (s.evaluate(u, v1) - s.evaluate(u, v0)) / (v1 - v0);
    return Eigen::JacobiSVD<Eigen::Matrix<double, 3, 2>>(J).singularValues()[1];
}

}  // namespace monge::fixtures
