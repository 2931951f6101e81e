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

#include <Eigen/SVD>

#include <functional>
#include <memory>

#include "monge/frames.hpp"

namespace monge {

/// Frame, base point and connection coefficients at one parameter.
struct FamilySample {
    Vec3 p = Vec3::Zero();
    Vec3 t = Vec3::UnitZ();
    Vec3 q1 = Vec3::UnitX();
    Vec3 q2 = Vec3::UnitY();
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double lambda = 0.0;
};

/// Orthogonal family of planes through p(v) with unit normal t(v) and
/// in-plane basis (q1, q2). The coefficients satisfy
///   t' = kappa1 q1 + kappa2 q2,   q_i' = -kappa_i t,   p' = lambda t.
/// A closed family has period P in p and t, while the basis comes back
/// rotated: (q1, q2)(v + P) is (q1, q2)(v) rotated about t by `monodromy`.
class PlaneFamily {
public:
    PlaneFamily() = default;

    PlaneFamily(SampleGrid grid, std::vector<Vec3> p, std::vector<Vec3> t, std::vector<Vec3> q1,
                std::vector<Vec3> q2, std::vector<double> kappa1, std::vector<double> kappa2,
                std::vector<double> lambda, double monodromy = 0.0)
        : grid_(std::move(grid)),
          p_(std::move(p)),
          t_(std::move(t)),
          q1_(std::move(q1)),
          q2_(std::move(q2)),
          kappa1_(std::move(kappa1)),
          kappa2_(std::move(kappa2)),
          lambda_(std::move(lambda)),
          monodromy_(grid_.closed() ? wrap_angle(monodromy) : 0.0) {
        const std::size_t n = grid_.size();
        if (p_.size() != n || t_.size() != n || q1_.size() != n || q2_.size() != n ||
            kappa1_.size() != n || kappa2_.size() != n || lambda_.size() != n)
            throw InvalidInput("plane family fields differ in length");
        if (grid_.closed() && n < 8) throw InvalidInput("closed families need at least 8 samples");
        for (std::size_t i = 0; i < n; ++i) {
            Eigen::Matrix3d G;
            G << q1_[i], q2_[i], t_[i];
            if ((G.transpose() * G - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-6 ||
                G.determinant() < 0.0)
                throw InvalidInput("(q1, q2, t) is not orthonormal right-handed at sample " +
                                   std::to_string(i));
        }
    }

    std::size_t size() const { return grid_.size(); }
    bool closed() const { return grid_.closed(); }
    double period() const { return grid_.period(); }
    double monodromy() const { return monodromy_; }
    const SampleGrid& grid() const { return grid_; }
    const std::vector<double>& params() const { return grid_.params(); }
    const std::vector<Vec3>& p() const { return p_; }
    const std::vector<Vec3>& t() const { return t_; }
    const std::vector<Vec3>& q1() const { return q1_; }
    const std::vector<Vec3>& q2() const { return q2_; }
    const std::vector<double>& kappa1() const { return kappa1_; }
    const std::vector<double>& kappa2() const { return kappa2_; }
    const std::vector<double>& lambda() const { return lambda_; }

    /// Sample by extended index; the basis and (kappa1, kappa2) pick up the
    /// monodromy rotation once per period.
    FamilySample sample(long k) const {
        const std::size_t i = grid_.wrap(k);
        FamilySample s{p_[i], t_[i], q1_[i], q2_[i], kappa1_[i], kappa2_[i], lambda_[i]};
        const long m = closed() ? grid_.period_shift(k) : 0;
        if (m != 0 && monodromy_ != 0.0) {
            const double a = static_cast<double>(m) * monodromy_;
            const double c = std::cos(a);
            const double sn = std::sin(a);
            s.q1 = c * q1_[i] + sn * q2_[i];
            s.q2 = -sn * q1_[i] + c * q2_[i];
            s.kappa1 = c * kappa1_[i] + sn * kappa2_[i];
            s.kappa2 = -sn * kappa1_[i] + c * kappa2_[i];
        }
        return s;
    }

    /// Interpolated family data at parameter v (8-point Lagrange on the
    /// extended samples, frame re-orthonormalized).
    FamilySample at(double v) const {
        if (!closed() && (v < grid_.front() - 1e-9 || v > grid_.back() + 1e-9))
            throw OutOfDomain("family parameter outside its range");
        const Stencil s = interpolation_stencil(grid_, v, 0);
        FamilySample out;
        out.p.setZero();
        Vec3 t = Vec3::Zero();
        Vec3 q1 = Vec3::Zero();
        for (std::size_t k = 0; k < s.index.size(); ++k) {
            const FamilySample e = sample(s.index[k]);
            const double w = s.weights[0][k];
            out.p += w * e.p;
            t += w * e.t;
            q1 += w * e.q1;
            out.kappa1 += w * e.kappa1;
            out.kappa2 += w * e.kappa2;
            out.lambda += w * e.lambda;
        }
        out.t = t.normalized();
        out.q1 = (q1 - q1.dot(out.t) * out.t).normalized();
        out.q2 = out.t.cross(out.q1);
        return out;
    }

    /// Derivative (order 1) of a vector field addressed through `sample`.
    template <class Field>
    Vec3 field_derivative(std::size_t i, Field field) const {
        const Stencil s = derivative_stencil(grid_, static_cast<long>(i), 1);
        return apply_stencil<Vec3>(s, 1, [&](long k) -> Vec3 { return field(sample(k)); });
    }

private:
    SampleGrid grid_;
    std::vector<Vec3> p_, t_, q1_, q2_;
    std::vector<double> kappa1_, kappa2_, lambda_;
    double monodromy_ = 0.0;
};

/// Family of normal planes of a spine, with a rotation minimizing basis.
/// The spine is resampled by arc length (n_out samples, default: same
/// count), so lambda is 1.
inline PlaneFamily from_spine(const SampledCurve3& curve, std::optional<Vec3> q1_initial = std::nullopt,
                              std::size_t n_out = 0) {
    const SampledCurve3 unit = reparameterize_arclength(curve, n_out == 0 ? curve.size() : n_out);
    const MovingFrame f = q1_initial ? rotation_minimizing_frame(unit, *q1_initial)
                                     : rotation_minimizing_frame(unit);
    const std::size_t n = unit.size();
    std::vector<double> k1(n), k2(n), lam(n);
    for (std::size_t i = 0; i < n; ++i) {
        const CurveDerivatives d = unit.derivatives(i);
        const double speed = d.d1.norm();
        // Curvature vector of the unit-speed curve, t' = r''.
        const Vec3 tp = (d.d2 - d.d2.dot(f.t[i]) * f.t[i]) / (speed * speed);
        k1[i] = tp.dot(f.q1[i]);
        k2[i] = tp.dot(f.q2[i]);
        lam[i] = speed;
    }
    const double monodromy = unit.closed() ? -frame_holonomy(f) : 0.0;
    return PlaneFamily(unit.grid(), unit.samples(), f.t, f.q1, f.q2, std::move(k1), std::move(k2),
                       std::move(lam), monodromy);
}

/// Coefficients of an orthogonal family as functions of the parameter.
struct FamilyCoefficients {
    std::function<double(double)> kappa1;
    std::function<double(double)> kappa2;
    std::function<double(double)> lambda;
};

namespace detail {

struct FrameState {
    Eigen::Matrix3d F;  // columns q1, q2, t
    Vec3 p;
};

inline FrameState frame_rate(const FrameState& s, double k1, double k2, double lam) {
    Eigen::Matrix3d w = Eigen::Matrix3d::Zero();
    // dF/dv = F * w with F = [q1 q2 t]
    w(2, 0) = -k1;
    w(2, 1) = -k2;
    w(0, 2) = k1;
    w(1, 2) = k2;
    return {s.F * w, lam * s.F.col(2)};
}

inline Eigen::Matrix3d polar_rotation(const Eigen::Matrix3d& M) {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace detail

/// Integrates the frame equations from the initial frame and point across
/// `grid` with the classical fourth-order scheme, projecting the frame back
/// onto the rotation group after every step. For a closed grid the
/// coefficients are taken periodic, the integration runs over one full
/// period and the family must close (p and t periodic); the residual
/// rotation of (q1, q2) becomes the monodromy.
inline PlaneFamily from_coefficients(const FamilyCoefficients& c, const SampleGrid& grid,
                                     const Vec3& initial_t, const Vec3& initial_q1,
                                     const Vec3& initial_point, double closure_tol = 1e-6) {
    const Vec3 t0 = initial_t.normalized();
    Vec3 q10 = initial_q1 - initial_q1.dot(t0) * t0;
    if (q10.norm() < 1e-8) throw InvalidInput("initial q1 parallel to the plane normal");
    q10.normalize();
    detail::FrameState s;
    s.F.col(0) = q10;
    s.F.col(1) = t0.cross(q10);
    s.F.col(2) = t0;
    s.p = initial_point;

    const std::size_t n = grid.size();
    const std::size_t steps = grid.closed() ? n : n - 1;
    std::vector<Vec3> p(n), t(n), q1(n), q2(n);
    std::vector<double> k1(n), k2(n), lam(n);
    auto record = [&](std::size_t i, double v) {
        p[i] = s.p;
        q1[i] = s.F.col(0);
        q2[i] = s.F.col(1);
        t[i] = s.F.col(2);
        k1[i] = c.kappa1(v);
        k2[i] = c.kappa2(v);
        lam[i] = c.lambda(v);
    };
    auto coeffs_at = [&](double v) {
        return std::array<double, 3>{c.kappa1(v), c.kappa2(v), c.lambda(v)};
    };
    record(0, grid.param(0));
    for (std::size_t j = 0; j < steps; ++j) {
        const double a = grid.param(static_cast<long>(j));
        const double b = grid.param(static_cast<long>(j) + 1);
        const double h = b - a;
        const auto ca = coeffs_at(a);
        const auto cm = coeffs_at(a + 0.5 * h);
        const auto cb = coeffs_at(b);
        const double rate = std::max({std::hypot(ca[0], ca[1]), std::hypot(cm[0], cm[1]),
                                      std::hypot(cb[0], cb[1])});
        if (!(rate * h < 0.5))
            throw NonConvergence("frame integration step too large at step " + std::to_string(j));
        auto add = [](const detail::FrameState& x, const detail::FrameState& d, double f) {
            return detail::FrameState{x.F + f * d.F, x.p + f * d.p};
        };
        const auto r1 = detail::frame_rate(s, ca[0], ca[1], ca[2]);
        const auto r2 = detail::frame_rate(add(s, r1, 0.5 * h), cm[0], cm[1], cm[2]);
        const auto r3 = detail::frame_rate(add(s, r2, 0.5 * h), cm[0], cm[1], cm[2]);
        const auto r4 = detail::frame_rate(add(s, r3, h), cb[0], cb[1], cb[2]);
        s.F += (h / 6.0) * (r1.F + 2.0 * r2.F + 2.0 * r3.F + r4.F);
        s.p += (h / 6.0) * (r1.p + 2.0 * r2.p + 2.0 * r3.p + r4.p);
        s.F = detail::polar_rotation(s.F);
        if (j + 1 < n) record(j + 1, b);
    }
    double monodromy = 0.0;
    if (grid.closed()) {
        double extent = 0.0;
        for (const auto& x : p) extent = std::max(extent, (x - p[0]).norm());
        if ((s.p - p[0]).norm() > closure_tol * std::max(1.0, extent) ||
            (s.F.col(2) - t[0]).norm() > closure_tol)
            throw OpenCurve("coefficient family does not close over one period");
        const Vec3 end = s.F.col(0);
        monodromy = std::atan2(t[0].dot(q1[0].cross(end)), q1[0].dot(end));
    }
    return PlaneFamily(grid, std::move(p), std::move(t), std::move(q1), std::move(q2), std::move(k1),
                       std::move(k2), std::move(lam), monodromy);
}

/// Coefficients sampled on the grid, interpolated with 8-point Lagrange
/// between samples (periodically for closed grids).
inline FamilyCoefficients coefficients_from_samples(const SampleGrid& grid, std::vector<double> kappa1,
                                                    std::vector<double> kappa2,
                                                    std::vector<double> lambda) {
    const std::size_t n = grid.size();
    if (kappa1.size() != n || kappa2.size() != n || lambda.size() != n)
        throw InvalidInput("coefficient arrays differ from the grid size");
    auto make = [grid](std::vector<double> values) {
        return [grid, values = std::move(values)](double v) {
            const Stencil s = interpolation_stencil(grid, v, 0);
            return apply_stencil<double>(s, 0, [&](long k) { return values[grid.wrap(k)]; });
        };
    };
    return {make(std::move(kappa1)), make(std::move(kappa2)), make(std::move(lambda))};
}

/// Interpolated coefficients of an existing family. Across the period
/// boundary they follow the monodromy rotation.
inline FamilyCoefficients coefficients_of(const PlaneFamily& f) {
    auto family = std::make_shared<const PlaneFamily>(f);
    auto make = [family](double FamilySample::*field) {
        return [family, field](double v) { return family->at(v).*field; };
    };
    return {make(&FamilySample::kappa1), make(&FamilySample::kappa2), make(&FamilySample::lambda)};
}

/// Family from explicit frame fields; coefficients by finite differences.
/// For closed grids `monodromy` states how (q1, q2) return after a period.
inline PlaneFamily from_fields(const SampleGrid& grid, std::vector<Vec3> p, std::vector<Vec3> t,
                               std::vector<Vec3> q1, std::vector<Vec3> q2, double monodromy = 0.0) {
    const std::size_t n = grid.size();
    std::vector<double> zeros(n, 0.0);
    PlaneFamily raw(grid, std::move(p), std::move(t), std::move(q1), std::move(q2), zeros, zeros, zeros,
                    monodromy);
    std::vector<double> k1(n), k2(n), lam(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 dt = raw.field_derivative(i, [](const FamilySample& s) { return s.t; });
        const Vec3 dp = raw.field_derivative(i, [](const FamilySample& s) { return s.p; });
        k1[i] = dt.dot(raw.q1()[i]);
        k2[i] = dt.dot(raw.q2()[i]);
        lam[i] = dp.dot(raw.t()[i]);
    }
    return PlaneFamily(grid, raw.p(), raw.t(), raw.q1(), raw.q2(), std::move(k1), std::move(k2),
                       std::move(lam), monodromy);
}

/// Largest in-plane component of p', q1', q2' (finite differences),
/// relative to the family's coefficient scale. Zero for an exact
/// orthogonal family.
inline double orthogonality_defect(const PlaneFamily& f) {
    double scale = 1e-300;
    for (std::size_t i = 0; i < f.size(); ++i)
        scale = std::max({scale, std::abs(f.kappa1()[i]), std::abs(f.kappa2()[i]), std::abs(f.lambda()[i])});
    double defect = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const Vec3 dp = f.field_derivative(i, [](const FamilySample& s) { return s.p; });
        const Vec3 dq1 = f.field_derivative(i, [](const FamilySample& s) { return s.q1; });
        const Vec3 dq2 = f.field_derivative(i, [](const FamilySample& s) { return s.q2; });
        defect = std::max({defect, std::abs(dp.dot(f.q1()[i])), std::abs(dp.dot(f.q2()[i])),
                           std::abs(dq1.dot(f.q2()[i])), std::abs(dq2.dot(f.q1()[i]))});
    }
    return defect / scale;
}

struct RegularityReport {
    bool regular = true;
    std::optional<std::size_t> first_violation;
};

/// Default relative threshold on (kappa1, kappa2, lambda).
inline constexpr double kRegularityTolerance = 1e-9;

/// A family is regular when (kappa1, kappa2, lambda) never vanishes. Besides
/// near-zero samples, an interval counts as a violation when the segment
/// joining its end coefficient vectors passes within tolerance of zero.
inline RegularityReport is_regular_family(const PlaneFamily& f, double rel_tol = kRegularityTolerance) {
    const std::size_t n = f.size();
    double scale = 0.0;
    std::vector<Vec3> c(n);
    for (std::size_t i = 0; i < n; ++i) {
        c[i] = Vec3(f.kappa1()[i], f.kappa2()[i], f.lambda()[i]);
        scale = std::max(scale, c[i].cwiseAbs().maxCoeff());
    }
    const double tol = rel_tol * (scale > 0.0 ? scale : 1.0);
    const std::size_t m = interval_count(f.grid());
    for (std::size_t i = 0; i < n; ++i) {
        if (c[i].cwiseAbs().maxCoeff() <= tol) return {false, i};
        if (i >= m) continue;
        const FamilySample nb = f.sample(static_cast<long>(i) + 1);
        const Vec3 a = c[i];
        const Vec3 b(nb.kappa1, nb.kappa2, nb.lambda);
        const Vec3 d = b - a;
        const double s = std::clamp(-a.dot(d) / std::max(d.squaredNorm(), 1e-300), 0.0, 1.0);
        if ((a + s * d).cwiseAbs().maxCoeff() <= tol) return {false, s < 0.5 ? i : i + 1 < n ? i + 1 : 0};
    }
    return {true, std::nullopt};
}

/// The instantaneous axis of rotation in plane coordinates:
/// a x + b y = c with a^2 + b^2 = 1 and c >= 0 when it is a line.
struct AxisLine {
    enum class Kind { Line, Empty, Everything };
    Kind kind = Kind::Line;
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

inline AxisLine axis_from_coefficients(double k1, double k2, double lam, double tol = 1e-12) {
    const double norm = std::hypot(k1, k2);
    if (norm <= tol) {
        if (std::abs(lam) > tol) return {AxisLine::Kind::Empty, 0.0, 0.0, 0.0};
        return {AxisLine::Kind::Everything, 0.0, 0.0, 0.0};
    }
    const double sign = lam < 0.0 ? -1.0 : 1.0;
    return {AxisLine::Kind::Line, sign * k1 / norm, sign * k2 / norm, sign * lam / norm};
}

inline AxisLine instantaneous_axis(const PlaneFamily& f, double v, double tol = 1e-12) {
    const FamilySample s = f.at(v);
    return axis_from_coefficients(s.kappa1, s.kappa2, s.lambda, tol);
}

}  // namespace monge
