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

#include <cmath>
#include <cstdlib>
#include <optional>
#include <vector>

#include "monge/curve.hpp"

namespace monge {

/// Adapted orthonormal frame (t, q1, q2) along a curve. For a closed curve
/// `holonomy_angle` is the rotation about t(0) that carries q1, transported
/// once around the loop, back onto the initial q1.
struct MovingFrame {
    SampledCurve3 curve;
    std::vector<Vec3> t;
    std::vector<Vec3> q1;
    std::vector<Vec3> q2;
    std::optional<double> holonomy_angle;
    /// q1 after transport through the closing step (closed curves only).
    std::optional<Vec3> q1_transported;
};

/// Some unit vector orthogonal to `t`.
inline Vec3 any_normal(const Vec3& t) {
    Vec3 axis = Vec3::UnitX();
    if (std::abs(t.y()) < std::abs(t.dot(axis))) axis = Vec3::UnitY();
    if (std::abs(t.z()) < std::abs(t.dot(axis))) axis = Vec3::UnitZ();
    return (axis - axis.dot(t) * t).normalized();
}

namespace detail {

inline std::vector<Vec3> unit_tangents(const SampledCurve3& curve) {
    const double diam = std::max(curve.diameter(), 1e-300);
    std::vector<Vec3> t(curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const Vec3 d1 = curve.derivatives(i).d1;
        const double speed = d1.norm();
        if (speed <= 1e-14 * diam)
            throw DegenerateTangent("zero tangent at sample " + std::to_string(i));
        t[i] = d1 / speed;
    }
    return t;
}

// One double-reflection step: reflect through the bisector plane of the
// chord, then through the plane that maps the reflected tangent onto t1.
inline Vec3 double_reflection(const Vec3& x0, const Vec3& x1, const Vec3& t0, const Vec3& t1,
                              const Vec3& r0) {
    const Vec3 v1 = x1 - x0;
    const double c1 = v1.squaredNorm();
    const Vec3 rl = r0 - (2.0 / c1) * v1.dot(r0) * v1;
    const Vec3 tl = t0 - (2.0 / c1) * v1.dot(t0) * v1;
    const Vec3 v2 = t1 - tl;
    const double c2 = v2.squaredNorm();
    Vec3 r1 = c2 > 0.0 ? Vec3(rl - (2.0 / c2) * v2.dot(rl) * v2) : rl;
    // Remove round-off drift out of the normal plane.
    r1 -= r1.dot(t1) * t1;
    return r1.normalized();
}

}  // namespace detail

/// Rotation minimizing frame by the double reflection method. `q1_initial`
/// is projected onto the normal plane at the first sample.
inline MovingFrame rotation_minimizing_frame(const SampledCurve3& curve, const Vec3& q1_initial) {
    MovingFrame f;
    f.curve = curve;
    f.t = detail::unit_tangents(curve);
    const std::size_t n = curve.size();
    f.q1.resize(n);
    f.q2.resize(n);
    Vec3 q = q1_initial - q1_initial.dot(f.t[0]) * f.t[0];
    if (q.norm() < 1e-8) throw InvalidInput("initial q1 is parallel to the tangent");
    f.q1[0] = q.normalized();
    for (std::size_t i = 0; i + 1 < n; ++i)
        f.q1[i + 1] = detail::double_reflection(curve.samples()[i], curve.samples()[i + 1], f.t[i],
                                                f.t[i + 1], f.q1[i]);
    for (std::size_t i = 0; i < n; ++i) f.q2[i] = f.t[i].cross(f.q1[i]);
    if (curve.closed()) {
        const Vec3 end = detail::double_reflection(curve.samples()[n - 1], curve.samples()[0],
                                                   f.t[n - 1], f.t[0], f.q1[n - 1]);
        f.q1_transported = end;
        const Vec3& start = f.q1[0];
        f.holonomy_angle = std::atan2(f.t[0].dot(end.cross(start)), end.dot(start));
    }
    return f;
}

inline MovingFrame rotation_minimizing_frame(const SampledCurve3& curve) {
    const Vec3 t0 = curve.derivatives(0).d1.normalized();
    return rotation_minimizing_frame(curve, any_normal(t0));
}

/// Holonomy angle in (-pi, pi].
inline double frame_holonomy(const MovingFrame& frame) {
    if (!frame.curve.closed() || !frame.holonomy_angle)
        throw OpenCurve("holonomy is defined for closed curves only");
    return wrap_angle(*frame.holonomy_angle);
}

/// Rational k/n approximating a real number.
struct Rational {
    long k = 0;
    long n = 1;
    double error = 0.0;
};

/// Smallest-denominator rational k/n (n <= max_den) with |x - k/n| < tol,
/// found among the continued-fraction convergents of x.
inline std::optional<Rational> recognize_rational(double x, long max_den = 24, double tol = 1e-6) {
    long h_prev = 1, h_prev2 = 0;  // numerators
    long k_prev = 0, k_prev2 = 1;  // denominators
    double r = x;
    for (int it = 0; it < 64; ++it) {
        const double a_real = std::floor(r);
        if (std::abs(a_real) > 1e12) break;
        const long a = static_cast<long>(a_real);
        const long h = a * h_prev + h_prev2;
        const long k = a * k_prev + k_prev2;
        if (k > max_den) break;
        const double err = std::abs(x - static_cast<double>(h) / static_cast<double>(k));
        if (err < tol) return Rational{h, k, err};
        h_prev2 = h_prev;
        h_prev = h;
        k_prev2 = k_prev;
        k_prev = k;
        const double frac = r - a_real;
        if (frac < 1e-15) break;
        r = 1.0 / frac;
    }
    return std::nullopt;
}

/// Outcome of the Monge-cylinder test for a closed spine.
struct CylinderReport {
    bool is_cylinder = false;
    double total_torsion = 0.0;
    double trace_length = 0.0;
    double holonomy = 0.0;
    /// T / 2pi as k/n when recognisable with n <= 24.
    std::optional<Rational> torsion_ratio;
};

inline CylinderReport is_monge_cylinder_spine(const SampledCurve3& curve, double tol = 1e-6) {
    if (!curve.closed()) throw OpenCurve("Monge cylinder test needs a closed spine");
    CylinderReport r;
    r.total_torsion = total_torsion(curve);
    r.trace_length = binormal_trace_length(curve);
    r.holonomy = frame_holonomy(rotation_minimizing_frame(curve));
    r.is_cylinder = std::abs(r.holonomy) < tol;
    r.torsion_ratio = recognize_rational(r.total_torsion / kTwoPi, 24, tol);
    return r;
}

}  // namespace monge
