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

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "monge/mesh.hpp"
#include "monge/plane_family.hpp"

namespace monge {

/// Position and derivatives of the family at an arbitrary parameter.
struct FamilyJet {
    FamilySample s;
    Vec3 dp = Vec3::Zero(), ddp = Vec3::Zero();
    Vec3 dq1 = Vec3::Zero(), ddq1 = Vec3::Zero();
    Vec3 dq2 = Vec3::Zero(), ddq2 = Vec3::Zero();
};

inline FamilyJet family_jet(const PlaneFamily& f, double v) {
    FamilyJet j;
    j.s = f.at(v);
    const Stencil st = interpolation_stencil(f.grid(), v, 2, kDerivativeStencil);
    for (std::size_t k = 0; k < st.index.size(); ++k) {
        const FamilySample e = f.sample(st.index[k]);
        const double w1 = st.weights[1][k];
        const double w2 = st.weights[2][k];
        j.dp += w1 * e.p;
        j.ddp += w2 * e.p;
        j.dq1 += w1 * e.q1;
        j.ddq1 += w2 * e.q1;
        j.dq2 += w1 * e.q2;
        j.ddq2 += w2 * e.q2;
    }
    return j;
}

struct SurfaceJet {
    Vec3 x, xu, xv, xuu, xuv, xvv;
    /// lambda - kappa1 x - kappa2 y; the surface is regular iff nonzero.
    double margin = 0.0;
};

/// x(u, v) = p(v) + x(u) q1(v) + y(u) q2(v) for an arc-length profile.
class MongeSurface {
public:
    MongeSurface() = default;

    MongeSurface(PlaneFamily family, PlaneCurve profile, double speed_tol = 1e-6)
        : family_(std::move(family)), profile_(std::move(profile)) {
        for (std::size_t i = 0; i < profile_.size(); ++i) {
            const double sp = profile_.derivative(i, 1).norm();
            if (std::abs(sp - 1.0) > speed_tol)
                throw InvalidInput("profile is not unit speed at sample " + std::to_string(i) + " (|gamma'| = " +
                                   std::to_string(sp) + ")");
        }
        double rad = 0.0;
        for (const Vec2& q : profile_.samples()) rad = std::max(rad, q.norm());
        double lam = 0.0;
        double kap = 0.0;
        for (std::size_t i = 0; i < family_.size(); ++i) {
            lam = std::max(lam, std::abs(family_.lambda()[i]));
            kap = std::max(kap, std::hypot(family_.kappa1()[i], family_.kappa2()[i]));
        }
        margin_scale_ = std::max(lam + kap * rad, 1e-300);
    }

    const PlaneFamily& family() const { return family_; }
    const PlaneCurve& profile() const { return profile_; }
    bool u_periodic() const { return profile_.closed(); }
    bool v_periodic() const { return family_.closed(); }
    double u_front() const { return profile_.grid().front(); }
    double u_span() const { return profile_.closed() ? profile_.period() : profile_.grid().back() - u_front(); }
    double v_front() const { return family_.grid().front(); }
    double v_span() const { return family_.closed() ? family_.period() : family_.grid().back() - v_front(); }
    /// Size of lambda + |kappa| |gamma|; regularity tolerances scale with it.
    double margin_scale() const { return margin_scale_; }

    Vec3 evaluate(double u, double v) const {
        const Vec2 g = profile_.evaluate(u, 0);
        const FamilySample s = family_.at(v);
        return s.p + g.x() * s.q1 + g.y() * s.q2;
    }

    double margin(double u, double v) const {
        const Vec2 g = profile_.evaluate(u, 0);
        const FamilySample s = family_.at(v);
        return s.lambda - s.kappa1 * g.x() - s.kappa2 * g.y();
    }

    SurfaceJet jet(double u, double v) const {
        const Vec2 g = profile_.evaluate(u, 0);
        const Vec2 g1 = profile_.evaluate(u, 1);
        const Vec2 g2 = profile_.evaluate(u, 2);
        const FamilyJet f = family_jet(family_, v);
        SurfaceJet j;
        j.x = f.s.p + g.x() * f.s.q1 + g.y() * f.s.q2;
        j.xu = g1.x() * f.s.q1 + g1.y() * f.s.q2;
        j.xuu = g2.x() * f.s.q1 + g2.y() * f.s.q2;
        j.xv = f.dp + g.x() * f.dq1 + g.y() * f.dq2;
        j.xvv = f.ddp + g.x() * f.ddq1 + g.y() * f.ddq2;
        j.xuv = g1.x() * f.dq1 + g1.y() * f.dq2;
        j.margin = f.s.lambda - f.s.kappa1 * g.x() - f.s.kappa2 * g.y();
        return j;
    }

    /// Diagnostic grid: uniform without the end point on periodic axes,
    /// end points included otherwise.
    std::vector<double> u_grid(std::size_t n) const { return axis(u_front(), u_span(), n, u_periodic()); }
    std::vector<double> v_grid(std::size_t n) const { return axis(v_front(), v_span(), n, v_periodic()); }

private:
    static std::vector<double> axis(double a, double span, std::size_t n, bool periodic) {
        if (n < 2) throw InvalidInput("grid needs at least 2 points per axis");
        std::vector<double> g(n);
        const double h = span / static_cast<double>(periodic ? n : n - 1);
        for (std::size_t i = 0; i < n; ++i) g[i] = a + h * static_cast<double>(i);
        if (!periodic) g.back() = a + span;
        return g;
    }

    PlaneFamily family_;
    PlaneCurve profile_;
    double margin_scale_ = 1.0;
};

/// Scalar field sampled on a (v, u) grid: rows are v, columns are u.
using GridField = Eigen::MatrixXd;

struct MarginReport {
    std::vector<double> u, v;
    GridField margin;
    double min = 0.0;
    double max = 0.0;
    bool regular = true;
    /// Points where the margin vanishes: grid points within tolerance and
    /// linearly interpolated sign changes along either axis.
    std::vector<Vec2> zero_set;
};

inline MarginReport regularity_margin(const MongeSurface& s, std::size_t nu, std::size_t nv,
                                      double rel_tol = kRegularityTolerance) {
    MarginReport r;
    r.u = s.u_grid(nu);
    r.v = s.v_grid(nv);
    r.margin.resize(static_cast<long>(nv), static_cast<long>(nu));
    parallel_rows(nv, [&](std::size_t j) {
        const FamilySample f = s.family().at(r.v[j]);
        for (std::size_t i = 0; i < nu; ++i) {
            const Vec2 g = s.profile().evaluate(r.u[i], 0);
            r.margin(static_cast<long>(j), static_cast<long>(i)) = f.lambda - f.kappa1 * g.x() - f.kappa2 * g.y();
        }
    });
    r.min = r.margin.minCoeff();
    r.max = r.margin.maxCoeff();
    const double tol = rel_tol * s.margin_scale();
    auto m = [&](std::size_t j, std::size_t i) { return r.margin(static_cast<long>(j), static_cast<long>(i)); };
    for (std::size_t j = 0; j < nv; ++j) {
        for (std::size_t i = 0; i < nu; ++i) {
            const double a = m(j, i);
            if (std::abs(a) <= tol) {
                r.zero_set.emplace_back(r.u[i], r.v[j]);
                continue;
            }
            if (i + 1 < nu || s.u_periodic()) {
                const std::size_t i2 = (i + 1) % nu;
                const double b = m(j, i2);
                if (std::abs(b) > tol && (a < 0.0) != (b < 0.0)) {
                    const double u2 = i + 1 < nu ? r.u[i2] : r.u[i] + (s.u_span() / static_cast<double>(nu));
                    r.zero_set.emplace_back(r.u[i] + (u2 - r.u[i]) * a / (a - b), r.v[j]);
                }
            }
            if (j + 1 < nv) {
                const double b = m(j + 1, i);
                if (std::abs(b) > tol && (a < 0.0) != (b < 0.0))
                    r.zero_set.emplace_back(r.u[i], r.v[j] + (r.v[j + 1] - r.v[j]) * a / (a - b));
            }
        }
    }
    r.regular = r.zero_set.empty() && (r.min > tol || r.max < -tol);
    return r;
}

struct SurfaceDiagnostics {
    std::vector<double> u, v;
    GridField margin;
    GridField E, F, G;
    GridField L, M, N;
    /// x kappa1 - y kappa2, in the form printed alongside the metric.
    GridField alpha;
    /// kappa1 x + kappa2 y, the form in the regularity condition; with
    /// lambda = 1 the metric is G = (1 - alpha_operative)^2.
    GridField alpha_operative;
    GridField gauss_curvature;
};

/// First and second fundamental forms from the surface jet (profile and
/// family derivatives by high-order stencils). Throws SingularPoint where the
/// margin vanishes on the grid.
inline SurfaceDiagnostics fundamental_forms(const MongeSurface& s, std::size_t nu, std::size_t nv,
                                            double rel_tol = kRegularityTolerance) {
    SurfaceDiagnostics d;
    d.u = s.u_grid(nu);
    d.v = s.v_grid(nv);
    const long rows = static_cast<long>(nv);
    const long cols = static_cast<long>(nu);
    for (GridField* f : {&d.margin, &d.E, &d.F, &d.G, &d.L, &d.M, &d.N, &d.alpha, &d.alpha_operative,
                         &d.gauss_curvature})
        f->resize(rows, cols);
    const double tol = rel_tol * s.margin_scale();
    std::vector<std::optional<Vec2>> singular(nv);
    parallel_rows(nv, [&](std::size_t j) {
        const long r = static_cast<long>(j);
        const FamilySample f = s.family().at(d.v[j]);
        for (std::size_t i = 0; i < nu; ++i) {
            const long c = static_cast<long>(i);
            const SurfaceJet jt = s.jet(d.u[i], d.v[j]);
            const Vec2 g = s.profile().evaluate(d.u[i], 0);
            d.margin(r, c) = jt.margin;
            d.alpha(r, c) = g.x() * f.kappa1 - g.y() * f.kappa2;
            d.alpha_operative(r, c) = f.kappa1 * g.x() + f.kappa2 * g.y();
            if (std::abs(jt.margin) <= tol) {
                if (!singular[j]) singular[j] = Vec2(d.u[i], d.v[j]);
                continue;
            }
            const Vec3 n = jt.xu.cross(jt.xv).normalized();
            const double E = jt.xu.squaredNorm();
            const double F = jt.xu.dot(jt.xv);
            const double G = jt.xv.squaredNorm();
            const double L = jt.xuu.dot(n);
            const double M = jt.xuv.dot(n);
            const double N = jt.xvv.dot(n);
            d.E(r, c) = E;
            d.F(r, c) = F;
            d.G(r, c) = G;
            d.L(r, c) = L;
            d.M(r, c) = M;
            d.N(r, c) = N;
            d.gauss_curvature(r, c) = (L * N - M * M) / (E * G - F * F);
        }
    });
    for (const auto& p : singular)
        if (p) throw SingularPoint(p->x(), p->y());
    return d;
}

struct PgfReport {
    /// Largest distance of a meridian sample from its best-fit plane, over
    /// the meridian's diameter.
    double planarity_residual = 0.0;
    /// Largest tangential component of x_uu over the meridian's largest
    /// |x_uu| (zero for geodesic meridians).
    double geodesic_residual = 0.0;
    /// Largest component of the unit surface normal across the meridian plane.
    double normal_residual = 0.0;
    bool pgf = false;
};

/// Checks that the meridians u -> x(u, v_j) are planar geodesics. All three
/// residuals are dimensionless.
inline PgfReport check_pgf(const MongeSurface& s, std::size_t nu, std::size_t nv, double tol = 1e-5,
                           double rel_tol = kRegularityTolerance) {
    const auto us = s.u_grid(nu);
    const auto vs = s.v_grid(nv);
    std::vector<std::array<double, 3>> per(nv);
    std::vector<std::optional<Vec2>> singular(nv);
    const double mtol = rel_tol * s.margin_scale();
    parallel_rows(nv, [&](std::size_t j) {
        std::vector<SurfaceJet> jets(nu);
        Vec3 c = Vec3::Zero();
        double curv = 0.0;
        for (std::size_t i = 0; i < nu; ++i) {
            jets[i] = s.jet(us[i], vs[j]);
            if (std::abs(jets[i].margin) <= mtol && !singular[j]) singular[j] = Vec2(us[i], vs[j]);
            c += jets[i].x;
            curv = std::max(curv, jets[i].xuu.norm());
        }
        c /= static_cast<double>(nu);
        Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
        Vec3 lo = jets[0].x, hi = jets[0].x;
        for (const auto& jt : jets) {
            cov += (jt.x - c) * (jt.x - c).transpose();
            lo = lo.cwiseMin(jt.x);
            hi = hi.cwiseMax(jt.x);
        }
        const double diam = std::max((hi - lo).norm(), 1e-300);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
        const Vec3 normal = es.eigenvectors().col(0);
        // A straight meridian lies in a pencil of planes, one of which
        // contains the surface normal.
        const bool collinear = es.eigenvalues()[1] <= 1e-14 * es.eigenvalues()[2];
        curv = std::max(curv, 1.0 / diam);
        double plan = 0.0, geo = 0.0, nrm = 0.0;
        for (const auto& jt : jets) {
            plan = std::max(plan, std::abs((jt.x - c).dot(normal)) / diam);
            const Vec3 n = jt.xu.cross(jt.xv).normalized();
            geo = std::max(geo, (jt.xuu - jt.xuu.dot(n) * n).norm() / curv);
            if (!collinear) nrm = std::max(nrm, std::abs(n.dot(normal)));
        }
        per[j] = {collinear ? 0.0 : plan, geo, nrm};
    });
    for (const auto& p : singular)
        if (p) throw SingularPoint(p->x(), p->y());
    PgfReport r;
    for (const auto& p : per) {
        r.planarity_residual = std::max(r.planarity_residual, p[0]);
        r.geodesic_residual = std::max(r.geodesic_residual, p[1]);
        r.normal_residual = std::max(r.normal_residual, p[2]);
    }
    r.pgf = r.planarity_residual < tol && r.geodesic_residual < tol && r.normal_residual < tol;
    return r;
}

enum class ClosureKind {
    open,
    cylinder,
    monge_torus,
    covered_torus,
    moebius_strip,
    klein_bottle,
    tubular_torus,
    non_closing
};

inline const char* to_string(ClosureKind k) {
    switch (k) {
        case ClosureKind::open: return "open";
        case ClosureKind::cylinder: return "cylinder";
        case ClosureKind::monge_torus: return "monge_torus";
        case ClosureKind::covered_torus: return "covered_torus";
        case ClosureKind::moebius_strip: return "moebius_strip";
        case ClosureKind::klein_bottle: return "klein_bottle";
        case ClosureKind::tubular_torus: return "tubular_torus";
        case ClosureKind::non_closing: return "non_closing";
    }
    return "non_closing";
}

inline ClosureKind closure_kind_from_string(const std::string& s) {
    for (ClosureKind k : {ClosureKind::open, ClosureKind::cylinder, ClosureKind::monge_torus,
                          ClosureKind::covered_torus, ClosureKind::moebius_strip, ClosureKind::klein_bottle,
                          ClosureKind::tubular_torus, ClosureKind::non_closing})
        if (s == to_string(k)) return k;
    throw InvalidInput("unknown closure kind '" + s + "'");
}

/// Profile reparameterization matching the frame rotation over one period:
/// R(psi) gamma(u) = gamma(u + offset) (shift) or gamma(offset - u) (reversal).
struct ProfileMap {
    enum class Kind { shift, reversal };
    Kind kind = Kind::shift;
    double offset = 0.0;
    double residual = 0.0;

    double operator()(double u) const { return kind == Kind::shift ? u + offset : offset - u; }
};

namespace detail {

inline Vec2 rotate(double a, const Vec2& p) {
    const double c = std::cos(a);
    const double s = std::sin(a);
    return {c * p.x() - s * p.y(), s * p.x() + c * p.y()};
}

// Parameter near u0 closest to q (Newton on (gamma - q) . gamma').
inline double nearest_parameter(const PlaneCurve& c, const Vec2& q, double u0) {
    double u = u0;
    const double h = c.length() / static_cast<double>(c.size());
    for (int it = 0; it < 30; ++it) {
        const Vec2 g = c.evaluate(u, 0);
        const Vec2 g1 = c.evaluate(u, 1);
        const Vec2 g2 = c.evaluate(u, 2);
        const double f = (g - q).dot(g1);
        const double df = g1.squaredNorm() + (g - q).dot(g2);
        if (!(df > 0.0)) break;
        double du = -f / df;
        du = std::clamp(du, -h, h);
        if (!c.closed()) du = std::clamp(u + du, c.grid().front(), c.grid().back()) - u;
        u += du;
        if (std::abs(du) < 1e-15 * (1.0 + std::abs(u))) break;
    }
    return u;
}

inline double map_residual(const PlaneCurve& c, double angle, const ProfileMap& m) {
    double res = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double u = c.params()[i];
        const double w = m(u);
        if (!c.closed() && (w < c.grid().front() - 1e-9 || w > c.grid().back() + 1e-9))
            return std::numeric_limits<double>::infinity();
        res = std::max(res, (c.evaluate(w, 0) - rotate(angle, c.samples()[i])).norm());
    }
    return res;
}

}  // namespace detail

/// Finds a shift or reversal of the profile parameter that realizes the
/// rotation by `angle`; shifts are preferred. Closed profiles may use either,
/// open ones only the identity or a reversal of the whole arc.
inline std::optional<ProfileMap> find_profile_map(const PlaneCurve& c, double angle, double tol) {
    const double scale = std::max(c.diameter(), 1e-300);
    const double u0 = c.params()[0];
    const Vec2 q = detail::rotate(angle, c.samples()[0]);
    double spacing = 0.0;
    const std::size_t segs = c.closed() ? c.size() : c.size() - 1;
    for (std::size_t i = 0; i < segs; ++i)
        spacing = std::max(spacing, (c.sample(static_cast<long>(i) + 1) - c.samples()[i]).norm());
    std::vector<double> candidates;
    for (std::size_t i = 0; i < c.size(); ++i)
        if ((c.samples()[i] - q).norm() <= 2.0 * spacing)
            candidates.push_back(detail::nearest_parameter(c, q, c.params()[i]));
    std::optional<ProfileMap> best;
    for (ProfileMap::Kind kind : {ProfileMap::Kind::shift, ProfileMap::Kind::reversal}) {
        for (double w : candidates) {
            if ((c.evaluate(w, 0) - q).norm() > 1e3 * tol * scale) continue;
            ProfileMap m;
            m.kind = kind;
            m.offset = kind == ProfileMap::Kind::shift ? w - u0 : w + u0;
            if (kind == ProfileMap::Kind::shift && c.closed())
                m.offset -= c.period() * std::floor(m.offset / c.period() + 0.5);
            m.residual = detail::map_residual(c, angle, m);
            if (m.residual <= tol * std::max(1.0, scale) && (!best || m.residual < best->residual)) best = m;
        }
        if (best) return best;
    }
    return best;
}

/// Largest n <= max_order for which rotation by 2 pi / n maps the closed
/// profile onto itself by a parameter shift.
inline std::optional<int> detect_symmetry_order(const PlaneCurve& c, double tol = 1e-8, int max_order = 24) {
    if (!c.closed()) return std::nullopt;
    for (int n = max_order; n >= 2; --n) {
        const auto m = find_profile_map(c, kTwoPi / n, tol);
        if (m && m->kind == ProfileMap::Kind::shift) return n;
    }
    return std::nullopt;
}

struct ClosureReport {
    ClosureKind kind = ClosureKind::non_closing;
    /// Total torsion of the spine p when its Frenet frame exists.
    std::optional<double> total_torsion;
    /// Frame holonomy theta (= -monodromy), in (-pi, pi].
    double holonomy = 0.0;
    /// theta / 2 pi as k/n when recognizable with n <= 24.
    std::optional<Rational> holonomy_ratio;
    std::optional<int> profile_symmetry_order;
    std::optional<int> covering_degree;
    /// Identification (u, v + P) ~ (map(u), v) used to glue the v-seam.
    std::optional<ProfileMap> seam;
    /// Parallels return to their start after finitely many turns.
    bool parallels_close = false;
    std::string note;
};

/// Decides how the surface closes up after one period of the family: the
/// frame comes back rotated by psi = -theta, which the profile absorbs when
/// some shift or reversal of u realizes that rotation.
inline ClosureReport classify_closure(const MongeSurface& s, double tol = 1e-6) {
    ClosureReport r;
    const PlaneFamily& f = s.family();
    const PlaneCurve& c = s.profile();
    if (!f.closed()) {
        r.kind = ClosureKind::open;
        r.note = "family is not periodic";
        return r;
    }
    try {
        r.total_torsion = total_torsion(SampledCurve3(f.p(), f.grid()));
    } catch (const GeometryError&) {
        r.total_torsion.reset();
    }
    const double psi = f.monodromy();
    r.holonomy = wrap_angle(-psi);
    r.holonomy_ratio = recognize_rational(r.holonomy / kTwoPi, 24, tol / kTwoPi);
    r.profile_symmetry_order = c.symmetry_order();
    if (!r.profile_symmetry_order) r.profile_symmetry_order = detect_symmetry_order(c);

    const bool trivial = std::abs(psi) <= tol;
    if (trivial) {
        ProfileMap id;
        id.residual = 0.0;
        r.seam = id;
        r.parallels_close = true;
        r.kind = c.closed() ? ClosureKind::monge_torus : ClosureKind::cylinder;
        if (c.closed()) r.covering_degree = 1;
        return r;
    }
    const auto map = find_profile_map(c, psi, tol);
    if (!map) {
        r.kind = ClosureKind::non_closing;
        r.note = "no shift or reversal of the profile realizes the frame rotation";
        return r;
    }
    r.seam = map;
    if (map->kind == ProfileMap::Kind::reversal) {
        if (std::abs(std::abs(psi) - kPi) <= tol) {
            r.kind = c.closed() ? ClosureKind::klein_bottle : ClosureKind::moebius_strip;
            r.parallels_close = true;
            r.covering_degree = 2;
        } else {
            r.kind = ClosureKind::non_closing;
            r.note = "orientation-reversing identification away from theta = pi";
        }
        return r;
    }
    if (!c.closed()) {
        r.kind = ClosureKind::non_closing;
        r.note = "open profile cannot absorb a nontrivial rotation";
        return r;
    }
    if (r.holonomy_ratio) {
        r.kind = ClosureKind::covered_torus;
        r.covering_degree = static_cast<int>(r.holonomy_ratio->n);
        r.parallels_close = true;
        return r;
    }
    r.kind = ClosureKind::tubular_torus;
    r.parallels_close = false;
    r.note = "image closes but parallels do not (theta / 2 pi is not k/n with n <= 24)";
    return r;
}

struct MeshOptions {
    /// Largest allowed distance between glued seam vertices, scaled by
    /// max(1, surface diameter).
    double seam_tolerance = 1e-8;
    bool allow_singular = false;
    double regularity_tolerance = kRegularityTolerance;
};

/// nu x nv quad mesh with the v-seam glued according to `closure`. Shift
/// seams whose offset is not a whole number of u-steps are absorbed by a
/// linear shear of the u-grid along v.
inline QuadMesh make_mesh(const MongeSurface& s, std::size_t nu, std::size_t nv, const ClosureReport& closure,
                          const MeshOptions& opt = {}) {
    if (nu < 2 || nv < 2) throw InvalidInput("mesh needs at least 2 x 2 vertices");
    QuadMesh m;
    m.nu = nu;
    m.nv = nv;
    const bool uper = s.u_periodic();
    const bool glue_v = s.v_periodic() && closure.seam && closure.kind != ClosureKind::non_closing &&
                        closure.kind != ClosureKind::open;
    const double hu = s.u_span() / static_cast<double>(uper ? nu : nu - 1);
    const double hv = s.v_span() / static_cast<double>(glue_v ? nv : nv - 1);
    double u0 = s.u_front();
    double shear = 0.0;  // u offset accumulated over one v-period
    long index_shift = 0;
    bool reversal = false;
    long reversal_sum = 0;  // seam partner of column i is reversal_sum - i
    if (glue_v) {
        const ProfileMap& pm = *closure.seam;
        if (pm.kind == ProfileMap::Kind::shift) {
            if (uper) {
                index_shift = std::lround(pm.offset / hu);
                shear = pm.offset - static_cast<double>(index_shift) * hu;
            } else if (std::abs(pm.offset) > 1e-12 * s.u_span()) {
                throw SeamMismatch("open profile with a nonzero seam shift");
            }
        } else {
            reversal = true;
            if (uper) {
                u0 = 0.5 * pm.offset;  // the map fixes u0, so columns pair up as i <-> -i
                reversal_sum = 0;
            } else {
                reversal_sum = static_cast<long>(nu) - 1;
                if (std::abs(pm.offset - (2.0 * s.u_front() + s.u_span())) > 1e-9 * std::max(1.0, s.u_span()))
                    throw SeamMismatch("reversal does not map the open profile onto itself");
            }
        }
    }
    auto u_at = [&](std::size_t i, std::size_t j) {
        return u0 + hu * static_cast<double>(i) - shear * static_cast<double>(j) / static_cast<double>(nv);
    };
    auto v_at = [&](std::size_t j) { return s.v_front() + hv * static_cast<double>(j); };
    m.vertices.resize(nu * nv);
    const double mtol = opt.regularity_tolerance * s.margin_scale();
    std::vector<std::vector<std::size_t>> sing(nv);
    parallel_rows(nv, [&](std::size_t j) {
        for (std::size_t i = 0; i < nu; ++i) {
            double u = u_at(i, j);
            if (!uper) u = std::clamp(u, s.u_front(), s.u_front() + s.u_span());
            m.vertices[j * nu + i] = s.evaluate(u, v_at(j));
            if (std::abs(s.margin(u, v_at(j))) <= mtol) sing[j].push_back(j * nu + i);
        }
    });
    for (const auto& row : sing) m.singular_vertices.insert(m.singular_vertices.end(), row.begin(), row.end());
    if (!m.singular_vertices.empty() && !opt.allow_singular) {
        const std::size_t k = m.singular_vertices.front();
        throw SingularPoint(u_at(k % nu, k / nu), v_at(k / nu));
    }
    auto wrap_u = [&](long i) -> std::size_t {
        const long n = static_cast<long>(nu);
        return static_cast<std::size_t>(((i % n) + n) % n);
    };
    // Seam partner in row 0 of column i continued past the last row.
    auto partner = [&](std::size_t i) -> std::size_t {
        if (reversal) return uper ? wrap_u(reversal_sum - static_cast<long>(i))
                                  : static_cast<std::size_t>(reversal_sum - static_cast<long>(i));
        return uper ? wrap_u(static_cast<long>(i) + index_shift) : i;
    };
    const std::size_t ucells = uper ? nu : nu - 1;
    const std::size_t vcells = glue_v ? nv : nv - 1;
    for (std::size_t j = 0; j < vcells; ++j) {
        for (std::size_t i = 0; i < ucells; ++i) {
            const std::size_t i1 = uper ? (i + 1) % nu : i + 1;
            std::size_t a = j * nu + i, b = j * nu + i1, c, d;
            if (j + 1 < nv) {
                c = (j + 1) * nu + i1;
                d = (j + 1) * nu + i;
            } else {
                c = partner(i1);
                d = partner(i);
            }
            m.quads.push_back({a, b, c, d});
        }
    }
    if (glue_v) {
        // The row that would follow the last one, evaluated past the period.
        const double vend = s.v_front() + s.v_span();
        double res = 0.0;
        for (std::size_t i = 0; i < nu; ++i) {
            double u = u_at(i, nv);
            if (!uper) u = std::clamp(u, s.u_front(), s.u_front() + s.u_span());
            res = std::max(res, (s.evaluate(u, vend) - m.vertices[partner(i)]).norm());
        }
        m.seam_residual = res;
        double diam = 0.0;
        Vec3 lo = m.vertices.front(), hi = m.vertices.front();
        for (const Vec3& p : m.vertices) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        diam = (hi - lo).norm();
        if (res > opt.seam_tolerance * std::max(1.0, diam))
            throw SeamMismatch("glued seam vertices differ by " + std::to_string(res) + " (closure " +
                               to_string(closure.kind) + ")");
        std::ostringstream id;
        id.precision(17);
        id << "v-seam: row " << nv << " -> row 0, ";
        if (reversal) id << "column i -> " << reversal_sum << " - i (orientation reversing)";
        else id << "column i -> i + " << index_shift;
        if (shear != 0.0) id << ", u-grid sheared by " << shear << " per period";
        m.identification = id.str();
    } else {
        m.identification = "v-seam: not glued";
    }
    if (uper) m.identification = "u-seam: column " + std::to_string(nu) + " -> column 0; " + m.identification;
    return m;
}

}  // namespace monge
