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

#include <random>

#include "monge/curve.hpp"

// Built-in analytic curve families. Space curves carry exact derivatives;
// plane profiles are returned parameterized by arc length.
namespace monge::families {

inline CurveJetFn circle(double radius) {
    return make_analytic([radius](const Jet& t) -> std::array<Jet, 3> {
        return {radius * cos(t), radius * sin(t), Jet(0.0)};
    });
}

/// (a cos t, a sin t, c t).
inline CurveJetFn helix(double a, double c) {
    return make_analytic([a, c](const Jet& t) -> std::array<Jet, 3> {
        return {a * cos(t), a * sin(t), c * t};
    });
}

/// (p, q) torus knot on the torus with radii (R, r), period 2 pi.
inline CurveJetFn torus_knot(int p, int q, double R, double r) {
    return make_analytic([p, q, R, r](const Jet& t) -> std::array<Jet, 3> {
        const Jet rho = R + r * cos(static_cast<double>(q) * t);
        return {rho * cos(static_cast<double>(p) * t), rho * sin(static_cast<double>(p) * t),
                r * sin(static_cast<double>(q) * t)};
    });
}

/// Viviani's figure-8 on the unit sphere, period 4 pi.
inline CurveJetFn viviani() {
    return make_analytic([](const Jet& t) -> std::array<Jet, 3> {
        return {0.5 * (1.0 + cos(t)), 0.5 * sin(t), sin(0.5 * t)};
    });
}

/// Random closed curve on the unit sphere: a circle of random orientation
/// and height plus a random trigonometric perturbation with `harmonics`
/// terms, normalized. Period 2 pi.
inline CurveJetFn random_sphere_curve(std::uint64_t seed, int harmonics = 3, double amplitude = 0.25) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> height(-0.6, 0.6);
    Eigen::Vector4d qv(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
    const Eigen::Matrix3d rot = Eigen::Quaterniond(qv.normalized()).toRotationMatrix();
    const double h = height(rng);
    std::vector<Vec3> a(static_cast<std::size_t>(harmonics) + 1, Vec3::Zero());
    std::vector<Vec3> b(static_cast<std::size_t>(harmonics) + 1, Vec3::Zero());
    for (int k = 1; k <= harmonics; ++k) {
        const double scale = amplitude / k;
        for (int c = 0; c < 3; ++c) {
            a[static_cast<std::size_t>(k)][c] = scale * gauss(rng);
            b[static_cast<std::size_t>(k)][c] = scale * gauss(rng);
        }
    }
    return make_analytic([a, b, harmonics, rot, h](const Jet& t) -> std::array<Jet, 3> {
        std::array<Jet, 3> w{cos(t), sin(t), Jet(h)};
        for (int k = 1; k <= harmonics; ++k) {
            const Jet ck = cos(static_cast<double>(k) * t);
            const Jet sk = sin(static_cast<double>(k) * t);
            for (std::size_t c = 0; c < 3; ++c)
                w[c] += a[static_cast<std::size_t>(k)][static_cast<long>(c)] * ck +
                        b[static_cast<std::size_t>(k)][static_cast<long>(c)] * sk;
        }
        std::array<Jet, 3> out;
        for (std::size_t r = 0; r < 3; ++r)
            out[r] = rot(static_cast<long>(r), 0) * w[0] + rot(static_cast<long>(r), 1) * w[1] +
                     rot(static_cast<long>(r), 2) * w[2];
        const Jet norm = sqrt(out[0] * out[0] + out[1] * out[1] + out[2] * out[2]);
        return {out[0] / norm, out[1] / norm, out[2] / norm};
    });
}

/// Great circle in the xy-plane: the binormal that admits no closed spine.
inline CurveJetFn great_circle() { return circle(1.0); }

namespace detail {
template <class Planar>
CurveJetFn gnomonic(double scale, Planar planar) {
    return make_analytic([scale, planar](const Jet& t) -> std::array<Jet, 3> {
        const std::array<Jet, 2> c = planar(t);
        const Jet x = scale * c[0];
        const Jet y = scale * c[1];
        const Jet norm = sqrt(x * x + y * y + 1.0);
        return {x / norm, y / norm, Jet(1.0) / norm};
    });
}
}  // namespace detail

/// Central projection onto the sphere of the planar figure-8
/// (sin t, sin t cos t) scaled by `scale`. Its tangent great circles cover
/// the sphere, so it is the binormal image of closed curves.
inline CurveJetFn gnomonic_figure8(double scale) {
    return detail::gnomonic(scale, [](const Jet& t) -> std::array<Jet, 2> {
        return {sin(t), sin(t) * cos(t)};
    });
}

/// Central projection of the epicycle e^{it} + a e^{i(1-m)t}; m-fold
/// rotationally symmetric about the z-axis.
inline CurveJetFn gnomonic_epicycle(double scale, double a, int m) {
    const double w = 1.0 - static_cast<double>(m);
    return detail::gnomonic(scale, [a, w](const Jet& t) -> std::array<Jet, 2> {
        return {cos(t) + a * cos(w * t), sin(t) + a * sin(w * t)};
    });
}

/// Latitude-oscillating curve with polar angle phi0 + amp sin(m t).
inline CurveJetFn latitude_oscillation(double phi0, double amp, int m) {
    return make_analytic([phi0, amp, m](const Jet& t) -> std::array<Jet, 3> {
        const Jet phi = phi0 + amp * sin(static_cast<double>(m) * t);
        return {sin(phi) * cos(t), sin(phi) * sin(t), cos(phi)};
    });
}

/// Samples a planar analytic curve f(Jet) -> {x, y} on `n` points uniform
/// in arc length (Newton on the exact speed), starting at parameter t0.
template <class Planar>
PlaneCurve plane_curve(Planar planar, double t0, double span, std::size_t n, bool closed,
                       std::optional<int> symmetry_order = std::nullopt) {
    const CurveJetFn f = make_analytic([planar](const Jet& t) -> std::array<Jet, 3> {
        const std::array<Jet, 2> c = planar(t);
        return {c[0], c[1], Jet(0.0)};
    });
    const std::size_t dense = std::max<std::size_t>(n, 256);
    const SampledCurve3 raw = SampledCurve3::from_analytic(f, t0, span, dense, closed);
    const SampledCurve3 unit = reparameterize_arclength(raw, n);
    std::vector<Vec2> pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = unit.samples()[i].head<2>();
    return PlaneCurve(std::move(pts), unit.grid(), symmetry_order);
}

/// Circle of the given radius and centre, traversed counter-clockwise from
/// angle `phase`.
inline PlaneCurve circle_profile(double radius, Vec2 center = Vec2::Zero(), std::size_t n = 256,
                                 double phase = 0.0) {
    const double cx = center.x();
    const double cy = center.y();
    return plane_curve(
        [radius, cx, cy](const Jet& t) -> std::array<Jet, 2> {
            return {cx + radius * cos(t), cy + radius * sin(t)};
        },
        phase, kTwoPi, n, true);
}

inline PlaneCurve ellipse_profile(double a, double b, Vec2 center = Vec2::Zero(),
                                  std::size_t n = 256) {
    const double cx = center.x();
    const double cy = center.y();
    return plane_curve(
        [a, b, cx, cy](const Jet& t) -> std::array<Jet, 2> {
            return {cx + a * cos(t), cy + b * sin(t)};
        },
        0.0, kTwoPi, n, true);
}

/// Polar rose r = radius (1 + amp cos(order theta)) about the origin, with
/// rotational symmetry of the given order. `n` should be a multiple of it.
inline PlaneCurve rose_profile(double radius, double amp, int order, std::size_t n = 256) {
    const double m = static_cast<double>(order);
    return plane_curve(
        [radius, amp, m](const Jet& t) -> std::array<Jet, 2> {
            const Jet r = radius * (1.0 + amp * cos(m * t));
            return {r * cos(t), r * sin(t)};
        },
        0.0, kTwoPi, n, true, order);
}

/// Figure-8 (a sin t, a sin t cos t) through the origin; rotation by pi
/// maps it onto itself with reversed orientation. Starts at the origin.
inline PlaneCurve figure8_profile(double a, std::size_t n = 256) {
    return plane_curve(
        [a](const Jet& t) -> std::array<Jet, 2> { return {a * sin(t), a * sin(t) * cos(t)}; },
        0.0, kTwoPi, n, true, 2);
}

/// Straight segment from p0 to p1 (open profile).
inline PlaneCurve segment_profile(Vec2 p0, Vec2 p1, std::size_t n = 65) {
    std::vector<Vec2> pts(n);
    const double len = (p1 - p0).norm();
    for (std::size_t i = 0; i < n; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(n - 1);
        pts[i] = p0 + s * (p1 - p0);
    }
    return PlaneCurve(std::move(pts), SampleGrid::uniform(0.0, len, n, false));
}

}  // namespace monge::families
