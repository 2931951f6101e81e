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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "monge/frames.hpp"
#include "monge/spine_synth.hpp"

using namespace monge;

namespace {

BinormalCurve epicycle(double scale, double a = 0.5, std::size_t n = 1024) {
    return BinormalCurve::from_analytic(families::gnomonic_epicycle(scale, a, 4), kTwoPi, n);
}

// Independent evaluation of the closing integrand and the energy weight from
// the analytic jet of b, on a dense periodic trapezoid grid.
struct AnalyticBinormal {
    CurveJetFn f;
    std::size_t n = 8192;

    Vec3 area(const std::function<double(double)>& weight) const {
        Vec3 acc = Vec3::Zero();
        for (std::size_t j = 0; j < n; ++j) {
            const double t = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
            const auto d = f(t);
            acc += weight(t) * d[0].cross(d[1]);
        }
        return acc * (kTwoPi / static_cast<double>(n));
    }
    double weighted_speed(const std::function<double(double)>& weight) const {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double t = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
            acc += weight(t) * f(t)[1].norm();
        }
        return acc * kTwoPi / static_cast<double>(n);
    }
    double energy(const std::function<double(double)>& sigma) const {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double t = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
            const auto d = f(t);
            const double det = d[0].dot(d[1].cross(d[2]));
            acc += det * det / std::pow(d[1].norm(), 5) / sigma(t);
        }
        return acc * kTwoPi / static_cast<double>(n);
    }
};

// Integral of curvature squared against arc length on a closed or open curve,
// from its Frenet data (trapezoid / Simpson-free: plain trapezoid suffices at
// spectral grids for closed curves).
double curvature_energy(const SampledCurve3& c) {
    const FrenetData fd = frenet_data(c);
    const auto w = quadrature_weights(c.grid());
    double e = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) e += w[i] * fd.curvature[i] * fd.curvature[i] * fd.speed[i];
    return e;
}

double sup_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) d = std::max(d, (a[i] - b[i]).norm());
    return d;
}

// Scale at which the a = 0.8 epicycle has zero area vector, so constant sigma
// closes the spine.
double constant_sigma_scale() {
    auto z = [](double s) {
        return closing_vectors(epicycle(s, 0.8, 1024), PeriodicBasis::trig(1, kTwoPi))[0].z();
    };
    double lo = 1.0;
    double hi = 4.0;
    double flo = z(lo);
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = z(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

SynthesisResult synthesize_target(double target, double length = 1.0,
                                  PeriodicBasis basis = PeriodicBasis::trig(11, kTwoPi)) {
    SpineSynthesisProblem p;
    p.family = epicycle_family();
    p.binormal = epicycle(0.3);
    p.basis = std::move(basis);
    p.length_target = length;
    return synthesize(p, target);
}

}  // namespace

TEST(BinormalCurve, RejectsOffSphereOpenAndCusped) {
    std::vector<Vec3> pts;
    for (int i = 0; i < 64; ++i) {
        const double t = kTwoPi * i / 64.0;
        pts.emplace_back(std::cos(t), std::sin(t), 0.01);
    }
    std::vector<double> params;
    for (int i = 0; i < 64; ++i) params.push_back(kTwoPi * i / 64.0);
    EXPECT_THROW(BinormalCurve(SampledCurve3(pts, params, true, kTwoPi)), InvalidInput);
    for (auto& p : pts) p.normalize();
    EXPECT_THROW(BinormalCurve(SampledCurve3(pts, params, false)), OpenCurve);
    // Astroid-like spherical curve with four cusps.
    auto cusped = make_analytic([](const Jet& t) -> std::array<Jet, 3> {
        const Jet x = 0.5 * cos(t) * cos(t) * cos(t);
        const Jet y = 0.5 * sin(t) * sin(t) * sin(t);
        const Jet r = sqrt(x * x + y * y + 1.0);
        return {x / r, y / r, Jet(1.0) / r};
    });
    EXPECT_THROW(BinormalCurve::from_analytic(cusped, kTwoPi, 256), DegenerateTangent);
}

TEST(BinormalCurve, TraceLengthOfGreatCircle) {
    const auto b = BinormalCurve::from_analytic(families::great_circle(), kTwoPi, 128);
    EXPECT_NEAR(b.trace_length(), kTwoPi, 1e-12);
}

TEST(ClosingVectors, GreatCircleHasConstantDirection) {
    const auto b = BinormalCurve::from_analytic(families::great_circle(), kTwoPi, 256);
    const auto a = closing_vectors(b, PeriodicBasis::trig(7, kTwoPi));
    EXPECT_NEAR((a[0] - Vec3(0, 0, kTwoPi)).norm(), 0.0, 1e-12);
    for (std::size_t i = 1; i < a.size(); ++i) EXPECT_LT(a[i].norm(), 1e-12) << i;
}

TEST(ClosingVectors, MatchDenseAnalyticQuadrature) {
    const double s = 0.3;
    const auto b = epicycle(s, 0.5, 512);
    const auto basis = PeriodicBasis::trig(11, kTwoPi);
    const auto a = closing_vectors(b, basis);
    AnalyticBinormal oracle{families::gnomonic_epicycle(s, 0.5, 4)};
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const Vec3 ref = oracle.area([&](double t) { return basis.value(i, t); });
        EXPECT_LT((a[i] - ref).norm(), 1e-10) << i;
    }
}

TEST(ClosingVectors, StableUnderGridRefinement) {
    const auto basis = PeriodicBasis::trig(11, kTwoPi);
    const auto coarse = closing_vectors(epicycle(0.3, 0.5, 512), basis);
    const auto fine = closing_vectors(epicycle(0.3, 0.5, 1024), basis);
    for (std::size_t i = 0; i < basis.size(); ++i) EXPECT_LT((coarse[i] - fine[i]).norm(), 1e-8) << i;
    const auto bs = PeriodicBasis::bspline(12, 3, kTwoPi);
    const auto c2 = closing_vectors(epicycle(0.3, 0.5, 2048), bs);
    const auto f2 = closing_vectors(epicycle(0.3, 0.5, 4096), bs);
    for (std::size_t i = 0; i < bs.size(); ++i) EXPECT_LT((c2[i] - f2[i]).norm(), 1e-8) << i;
}

TEST(ClosingVectors, SweepingCurveAdmitsPositiveSolutionWithFiveTerms) {
    SpineSynthesisProblem p;
    p.binormal = epicycle(0.3);
    p.basis = PeriodicBasis::trig_harmonics({1, 4}, kTwoPi);
    const auto r = synthesize(p);
    EXPECT_GT(*std::min_element(r.sigma.begin(), r.sigma.end()), 0.0);
    EXPECT_TRUE(r.spine.closed());
    EXPECT_NEAR(fenchel_coverage(p.binormal), 1.0, 1e-12);
}

TEST(Fenchel, SmallCircleDoesNotSweepTheSphere) {
    // Tangent great circles of a small circle at polar angle phi miss the two
    // polar caps of radius phi, leaving coverage cos(phi).
    const double phi = 1.2;
    const auto b = BinormalCurve::from_analytic(families::latitude_oscillation(phi, 0.0, 1), kTwoPi, 256);
    EXPECT_NEAR(fenchel_coverage(b), std::cos(phi), 0.05);  // one polar cell
    SpineSynthesisProblem p;
    p.binormal = b;
    EXPECT_THROW(synthesize(p), Infeasible);
}

TEST(Reconstruct, ScalingSigmaScalesCurve) {
    const auto b = epicycle(0.3, 0.5, 256);
    std::vector<double> sigma(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) sigma[j] = 1.0 + 0.4 * std::cos(b.grid().params()[j]);
    const auto r1 = reconstruct_spine(b, sigma);
    for (auto& s : sigma) s *= 3.5;
    const auto r2 = reconstruct_spine(b, sigma);
    ASSERT_EQ(r1.size(), r2.size());
    for (std::size_t i = 0; i < r1.size(); ++i)
        EXPECT_LT((r2.samples()[i] - 3.5 * r1.samples()[i]).norm(), 1e-12 * (1.0 + r2.samples()[i].norm()));
}

TEST(Reconstruct, RejectsNonPositiveSigma) {
    const auto b = epicycle(0.3, 0.5, 128);
    std::vector<double> sigma(b.size(), 1.0);
    sigma[17] = 0.0;
    EXPECT_THROW(reconstruct_spine(b, sigma), NonPositiveSigma);
    EXPECT_THROW(elastic_energy(b, sigma), NonPositiveSigma);
}

TEST(Reconstruct, TorsionIsReciprocalSigmaAndFrameMatches) {
    const auto b = epicycle(0.3, 0.5, 1024);
    SigmaFn sigma = [](double t) {
        return std::array<double, 3>{1.0 + 0.3 * std::cos(t) + 0.2 * std::sin(2 * t),
                                     -0.3 * std::sin(t) + 0.4 * std::cos(2 * t),
                                     -0.3 * std::cos(t) - 0.8 * std::sin(2 * t)};
    };
    const auto r = reconstruct_spine(b, sigma);
    EXPECT_FALSE(r.closed());
    const FrenetData fd = frenet_data(r);
    double kmax = *std::max_element(fd.curvature.begin(), fd.curvature.end());
    for (std::size_t j = 0; j < b.size(); ++j) {
        if (fd.curvature[j] < 1e-2 * kmax) continue;
        const double t = b.grid().params()[j];
        EXPECT_NEAR(fd.torsion[j] * sigma(t)[0], 1.0, 1e-3) << j;
        const Vec3 bp = b.derivatives(j).d1;
        EXPECT_LT((fd.tangent[j] - bp.normalized().cross(b.b(j))).norm(), 1e-4) << j;
        // b and -b reconstruct the same curve; the sign is global.
        EXPECT_LT((fd.binormal[j] + b.b(j)).norm(), 1e-4) << j;
    }
}

TEST(Reconstruct, ConstantTorsionRoundTrip) {
    const double s = constant_sigma_scale();
    EXPECT_NEAR(s, 2.17543, 1e-4);
    const auto b = epicycle(s, 0.8, 1024);
    double residual = 0.0;
    const auto spine = reconstruct_spine(b, std::vector<double>(b.size(), 1.0), 1e-6, &residual);
    ASSERT_TRUE(spine.closed()) << residual;
    const FrenetData fd = frenet_data(spine);
    for (std::size_t j = 0; j < spine.size(); ++j) EXPECT_NEAR(fd.torsion[j], 1.0, 1e-6) << j;

    // Rebuild from the sampled binormal alone (no analytic derivatives).
    std::vector<Vec3> bs = fd.binormal;
    for (auto& v : bs) v.normalize();
    const BinormalCurve b2(SampledCurve3(bs, spine.grid()));
    const auto again = reconstruct_spine(b2, std::vector<double>(b2.size(), 1.0), 1e-4);
    EXPECT_LT(sup_distance(again.samples(), spine.samples()), 1e-4 * spine.diameter());
}

TEST(Energy, HomogeneousOfDegreeMinusOne) {
    const auto b = epicycle(0.3, 0.5, 512);
    std::vector<double> sigma(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) sigma[j] = 1.0 + 0.5 * std::sin(3 * b.grid().params()[j]);
    const double e = elastic_energy(b, sigma);
    for (double k : {0.1, 2.0, 7.3}) {
        std::vector<double> scaled = sigma;
        for (auto& v : scaled) v *= k;
        EXPECT_NEAR(elastic_energy(b, scaled), e / k, 1e-9 * e / k);
    }
}

TEST(Energy, FlatStretchContributesNothing) {
    // Equator for t in [0, pi], lifted by a smooth bump elsewhere.
    const std::size_t n = 1024;
    std::vector<Vec3> pts(n);
    std::vector<double> params(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double t = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
        params[j] = t;
        const double h = t > kPi ? 0.6 * std::exp(1.0 - 1.0 / (-std::sin(t) + 1e-300)) * 1.0 : 0.0;
        pts[j] = Vec3(std::cos(t), std::sin(t), h).normalized();
    }
    const BinormalCurve b(SampledCurve3(pts, params, true, kTwoPi));
    const auto dens = detail::energy_density(b);
    const double dmax = *std::max_element(dens.begin(), dens.end());
    EXPECT_GT(dmax, 1e-3);
    for (std::size_t j = 8; j + 8 <= n / 2; ++j) EXPECT_EQ(dens[j], 0.0) << j;
}

TEST(Energy, AgreesWithDenseAnalyticQuadrature) {
    const auto b = epicycle(0.3, 0.5, 512);
    auto sig = [](double t) { return 1.0 + 0.5 * std::sin(3 * t); };
    std::vector<double> sigma(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) sigma[j] = sig(b.grid().params()[j]);
    AnalyticBinormal oracle{families::gnomonic_epicycle(0.3, 0.5, 4)};
    const double ref = oracle.energy(sig);
    EXPECT_NEAR(elastic_energy(b, sigma), ref, 1e-9 * ref);
}

TEST(Energy, MatchesCurvatureIntegralOfReconstruction) {
    // Arbitrary sigma on an open reconstruction, then synthesized spines.
    {
        const auto b = epicycle(0.3, 0.5, 512);
        SigmaFn sigma = [](double t) {
            return std::array<double, 3>{1.0 + 0.5 * std::sin(3 * t), 1.5 * std::cos(3 * t),
                                         -4.5 * std::sin(3 * t)};
        };
        const double e = elastic_energy(b, sigma);
        const auto r = reconstruct_spine(b, sigma);
        // Open curve: Simpson on the closed-up grid of n + 1 points.
        const double k2 = curvature_energy(r);
        EXPECT_NEAR(e, k2, 1e-3 * e);
    }
    for (double target : {kPi / 2, 2.0, kPi, kTwoPi}) {
        SpineSynthesisProblem p;
        p.family = epicycle_family(0.5, 4, 512);
        p.binormal = epicycle(0.3, 0.5, 512);
        const auto r = synthesize(p, target);
        ASSERT_TRUE(r.spine.closed());
        const double k2 = curvature_energy(r.spine);
        EXPECT_NEAR(r.energy, k2, 1e-3 * r.energy) << target;
    }
}

TEST(Synthesize, GreatCircleIsInfeasible) {
    SpineSynthesisProblem p;
    p.binormal = BinormalCurve::from_analytic(families::great_circle(), kTwoPi, 256);
    EXPECT_THROW(synthesize(p), Infeasible);
}

TEST(Synthesize, SigmaFloorAboveMarginIsInfeasible) {
    SpineSynthesisProblem p;
    p.binormal = epicycle(0.3);
    const auto r = synthesize(p);
    p.sigma_min = 1.01 * r.feasibility_margin;
    EXPECT_THROW(synthesize(p), Infeasible);
}

TEST(Synthesize, TargetNeedsFamily) {
    SpineSynthesisProblem p;
    p.binormal = epicycle(0.3);
    EXPECT_THROW(synthesize(p, 2.0), InvalidInput);
}

class SynthesizeTarget : public ::testing::TestWithParam<double> {};

TEST_P(SynthesizeTarget, ClosesAndRealizesTorsion) {
    const double target = GetParam();
    const auto r = synthesize_target(target);
    EXPECT_NEAR(r.trace_length, target, 1e-8);
    ASSERT_TRUE(r.spine.closed());
    EXPECT_LT(r.closing_residual, 1e-6 * r.length_target);
    ASSERT_TRUE(r.achieved_total_torsion.has_value());
    EXPECT_NEAR(*r.achieved_total_torsion, target, 1e-4);
    EXPECT_NEAR(total_torsion(r.spine), target, 1e-4);
    for (double s : r.sigma) EXPECT_GE(s, r.sigma_min * (1.0 - 1e-9));
    EXPECT_LT(r.kkt_residual, 1e-6);
    EXPECT_NEAR(r.spine.length(), 1.0, 1e-8);

    // Binormal round trip.
    const FrenetData fd = frenet_data(r.spine);
    const double kmax = *std::max_element(fd.curvature.begin(), fd.curvature.end());
    const double sign = fd.binormal[0].dot(r.binormal.b(0)) > 0.0 ? 1.0 : -1.0;
    double err = 0.0;
    for (std::size_t j = 0; j < r.spine.size(); ++j)
        if (fd.curvature[j] > 1e-2 * kmax) err = std::max(err, (fd.binormal[j] - sign * r.binormal.b(j)).norm());
    EXPECT_LT(err, 1e-3);

    // Holonomy closes the loop with the torsion.
    const double hol = frame_holonomy(rotation_minimizing_frame(r.spine));
    EXPECT_LT(std::abs(wrap_angle(hol + target)), 1e-5);
}

INSTANTIATE_TEST_SUITE_P(Targets, SynthesizeTarget, ::testing::Values(kPi / 2, 2.0, kPi));

TEST(Synthesize, HomogeneousInLengthTarget) {
    const auto r1 = synthesize_target(2.0, 1.0);
    const auto r2 = synthesize_target(2.0, 2.0);
    EXPECT_LT((r2.coefficients - 2.0 * r1.coefficients).norm(), 1e-6 * r2.coefficients.norm());
    EXPECT_NEAR(r2.energy, 0.5 * r1.energy, 1e-6 * r1.energy);
    ASSERT_EQ(r1.spine.size(), r2.spine.size());
    EXPECT_LT(sup_distance(r2.spine.samples(),
                           [&] {
                               auto v = r1.spine.samples();
                               for (auto& x : v) x *= 2.0;
                               return v;
                           }()),
              1e-6 * r2.spine.diameter());
}

TEST(Synthesize, PeriodicBSplineBasis) {
    const auto r = synthesize_target(2.0, 1.0, PeriodicBasis::bspline(12, 3, kTwoPi));
    ASSERT_TRUE(r.spine.closed());
    EXPECT_NEAR(*r.achieved_total_torsion, 2.0, 1e-4);
    EXPECT_LT(r.kkt_residual, 1e-6);
}

TEST(Synthesize, FullTurnIsCylinderSpine) {
    const auto r = synthesize_target(kTwoPi);
    const auto rep = is_monge_cylinder_spine(r.spine, 1e-6);
    EXPECT_TRUE(rep.is_cylinder) << rep.holonomy;
    const auto q = synthesize_target(kTwoPi / 4);
    const auto rq = is_monge_cylinder_spine(q.spine, 1e-6);
    EXPECT_FALSE(rq.is_cylinder);
    ASSERT_TRUE(rq.torsion_ratio.has_value());
    EXPECT_EQ(rq.torsion_ratio->k, 1);
    EXPECT_EQ(rq.torsion_ratio->n, 4);
}

// Three functions {1, cos 4t, sin 4t} on a 4-fold symmetric binormal: the
// horizontal closing rows vanish, so the feasible set is a segment that a
// dense scan can search directly.
class ThreeTermToy : public ::testing::TestWithParam<double> {};

TEST_P(ThreeTermToy, MatchesDenseScan) {
    const double scale = 0.3;
    const auto basis = PeriodicBasis::trig_harmonics({4}, kTwoPi);
    SpineSynthesisProblem p;
    p.binormal = epicycle(scale);
    p.basis = basis;
    const auto free = synthesize(p);
    // GetParam() in (0, 1) places sigma_min between the default and the margin.
    const double smin = GetParam() == 0.0 ? free.sigma_min : GetParam() * free.feasibility_margin;
    p.sigma_min = smin;
    const auto r = synthesize(p);

    AnalyticBinormal oracle{families::gnomonic_epicycle(scale, 0.5, 4)};
    auto fn = [](int i) {
        return std::function<double(double)>([i](double t) {
            return i == 0 ? 1.0 : (i == 1 ? std::cos(4 * t) : std::sin(4 * t));
        });
    };
    // Rows: vertical closing and length.
    Eigen::Matrix<double, 2, 3> A;
    for (int i = 0; i < 3; ++i) {
        A(0, i) = oracle.area(fn(i)).z();
        A(1, i) = oracle.weighted_speed(fn(i));
        EXPECT_LT(std::hypot(oracle.area(fn(i)).x(), oracle.area(fn(i)).y()), 1e-10);
    }
    const Eigen::Vector3d cp = A.transpose() * (A * A.transpose()).inverse() * Eigen::Vector2d(0.0, 1.0);
    const Eigen::Vector3d d = A.row(0).cross(A.row(1)).transpose().normalized();
    auto sigma_of = [&](const Eigen::Vector3d& c) {
        return [c](double t) { return c[0] + c[1] * std::cos(4 * t) + c[2] * std::sin(4 * t); };
    };
    // sigma(t) = cp(t) + z d(t); the same 1024-point grid as the optimizer
    // enforces the floor.
    double zlo = -1e300;
    double zhi = 1e300;
    for (std::size_t j = 0; j < 1024; ++j) {
        const double t = kTwoPi * static_cast<double>(j) / 1024.0;
        const double s0 = sigma_of(cp)(t);
        const double s1 = sigma_of(d)(t);
        if (std::abs(s1) < 1e-15) continue;
        const double bound = (smin - s0) / s1;
        if (s1 > 0) zlo = std::max(zlo, bound);
        else zhi = std::min(zhi, bound);
    }
    ASSERT_LT(zlo, zhi);
    // Energy weights on the oracle grid, cached for the scan.
    std::vector<double> wts(oracle.n);
    std::vector<Eigen::Vector3d> vals(oracle.n);
    for (std::size_t j = 0; j < oracle.n; ++j) {
        const double t = kTwoPi * static_cast<double>(j) / static_cast<double>(oracle.n);
        const auto jet = oracle.f(t);
        const double det = jet[0].dot(jet[1].cross(jet[2]));
        wts[j] = det * det / std::pow(jet[1].norm(), 5) * kTwoPi / static_cast<double>(oracle.n);
        vals[j] = Eigen::Vector3d(1.0, std::cos(4 * t), std::sin(4 * t));
    }
    auto e_of = [&](double z) {
        const Eigen::Vector3d c = cp + z * d;
        double e = 0.0;
        for (std::size_t j = 0; j < oracle.n; ++j) e += wts[j] / vals[j].dot(c);
        return e;
    };
    double best = std::numeric_limits<double>::infinity();
    double zbest = zlo;
    const int N = 2000;
    for (int k = 0; k <= N; ++k) {
        const double z = zlo + (zhi - zlo) * k / N;
        const double e = e_of(z);
        if (e < best) {
            best = e;
            zbest = z;
        }
    }
    // Golden-section polish inside the bracketing cell.
    double a = std::max(zlo, zbest - (zhi - zlo) / N);
    double b = std::min(zhi, zbest + (zhi - zlo) / N);
    for (int it = 0; it < 60; ++it) {
        const double m1 = a + 0.382 * (b - a);
        const double m2 = a + 0.618 * (b - a);
        if (e_of(m1) < e_of(m2)) b = m2;
        else a = m1;
    }
    best = std::min(best, e_of(0.5 * (a + b)));
    EXPECT_NEAR(r.energy, best, 1e-4 * best);
    EXPECT_GE(r.energy, best * (1.0 - 1e-6));
}

INSTANTIATE_TEST_SUITE_P(SigmaFloors, ThreeTermToy, ::testing::Values(0.0, 0.5, 0.9));

namespace {

CurveJetFn lopsided_epicycle(double eps) {
    return make_analytic([eps](const Jet& t) -> std::array<Jet, 3> {
        const Jet x = 0.3 * (cos(t) + 0.5 * cos(-3.0 * t) + eps * cos(2.0 * t));
        const Jet y = 0.3 * (sin(t) + 0.5 * sin(-3.0 * t) + eps * sin(2.0 * t));
        const Jet r = sqrt(x * x + y * y + 1.0);
        return {x / r, y / r, Jet(1.0) / r};
    });
}

}  // namespace

// Without 4-fold symmetry the floor binds; the KKT system is rebuilt here from
// the analytic jet and must hold with nonnegative floor multipliers.
TEST(Synthesize, ActiveFloorSatisfiesKkt) {
    const auto f = lopsided_epicycle(0.2);
    const std::size_t m = 1024;
    SpineSynthesisProblem p;
    p.binormal = BinormalCurve::from_analytic(f, kTwoPi, m);
    const double margin = synthesize(p).feasibility_margin;
    p.sigma_min = 0.5 * margin;
    const auto r = synthesize(p);
    ASSERT_FALSE(r.active_set.empty());
    EXPECT_LT(r.kkt_residual, 1e-6);
    EXPECT_GE(r.min_multiplier, 0.0);

    const auto& basis = p.basis;
    const long n = static_cast<long>(basis.size());
    const double h = kTwoPi / static_cast<double>(m);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4, n);
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
    std::vector<double> weight(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double t = h * static_cast<double>(j);
        const auto d = f(t);
        const double det = d[0].dot(d[1].cross(d[2]));
        weight[j] = h * det * det / std::pow(d[1].norm(), 5);
        const Vec3 cross = d[0].cross(d[1]);
        for (long i = 0; i < n; ++i) {
            const double bi = basis.value(static_cast<std::size_t>(i), t);
            A.block(0, i, 3, 1) += h * bi * cross;
            A(3, i) += h * bi * d[1].norm();
            grad[i] -= weight[j] * bi / (r.sigma[j] * r.sigma[j]);
        }
    }
    EXPECT_LT((A.topRows(3) * r.coefficients).norm(), 1e-9);
    EXPECT_NEAR(A(3, Eigen::all).dot(r.coefficients), 1.0, 1e-9);
    const long na = static_cast<long>(r.active_set.size());
    Eigen::MatrixXd K(n, 4 + na);
    K.leftCols(4) = A.transpose();
    for (long k = 0; k < na; ++k) {
        const double t = h * static_cast<double>(r.active_set[static_cast<std::size_t>(k)]);
        EXPECT_NEAR(r.sigma[r.active_set[static_cast<std::size_t>(k)]], *p.sigma_min, 1e-10);
        for (long i = 0; i < n; ++i) K(i, 4 + k) = basis.value(static_cast<std::size_t>(i), t);
    }
    const Eigen::VectorXd mult = K.colPivHouseholderQr().solve(grad);
    EXPECT_LT((K * mult - grad).norm(), 1e-6 * grad.norm());
    for (long k = 0; k < na; ++k) EXPECT_GE(mult[4 + k], -1e-6 * grad.norm()) << k;

    // No feasible perturbation lowers the energy.
    auto energy_of = [&](const Eigen::VectorXd& c) {
        double e = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            double s = 0.0;
            for (long i = 0; i < n; ++i) s += c[i] * basis.value(static_cast<std::size_t>(i), h * j);
            if (s < *p.sigma_min) return std::numeric_limits<double>::infinity();
            e += weight[j] / s;
        }
        return e;
    };
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    const Eigen::MatrixXd Z = svd.matrixV().rightCols(n - 4);
    std::mt19937 rng(7);
    std::normal_distribution<double> nd;
    const double e0 = energy_of(r.coefficients);
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXd dz(Z.cols());
        for (long i = 0; i < dz.size(); ++i) dz[i] = nd(rng);
        const Eigen::VectorXd dc = Z * dz.normalized() * 1e-3 * r.coefficients.norm();
        EXPECT_GE(energy_of(r.coefficients + dc), e0 * (1.0 - 1e-9)) << trial;
    }
}
