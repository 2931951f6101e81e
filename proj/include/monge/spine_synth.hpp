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

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "monge/basis.hpp"
#include "monge/curve.hpp"
#include "monge/families.hpp"

namespace monge {

/// A regular closed curve on the unit sphere, used as the binormal
/// indicatrix of a spine to be synthesized.
class BinormalCurve {
public:
    BinormalCurve() = default;

    explicit BinormalCurve(SampledCurve3 curve, double unit_tol = 1e-9) : curve_(std::move(curve)) {
        if (!curve_.closed()) throw OpenCurve("binormal curve must be closed");
        for (std::size_t i = 0; i < curve_.size(); ++i) {
            if (std::abs(curve_.samples()[i].norm() - 1.0) > unit_tol)
                throw InvalidInput("binormal sample " + std::to_string(i) + " is not on the unit sphere");
        }
        derivs_ = curve_.all_derivatives();
        const auto w = quadrature_weights(curve_.grid());
        double mean = 0.0;
        for (std::size_t i = 0; i < derivs_.size(); ++i) {
            trace_length_ += w[i] * derivs_[i].d1.norm();
            mean += derivs_[i].d1.norm();
        }
        mean /= static_cast<double>(derivs_.size());
        for (std::size_t i = 0; i < derivs_.size(); ++i) {
            if (derivs_[i].d1.norm() <= 1e-6 * mean)
                throw DegenerateTangent("binormal curve has a cusp near sample " + std::to_string(i));
        }
    }

    static BinormalCurve from_analytic(const CurveJetFn& f, double period, std::size_t n) {
        return BinormalCurve(SampledCurve3::from_analytic(f, 0.0, period, n, true));
    }

    const SampledCurve3& curve() const { return curve_; }
    const SampleGrid& grid() const { return curve_.grid(); }
    std::size_t size() const { return curve_.size(); }
    double period() const { return curve_.period(); }
    /// Spherical length L_S of the trace.
    double trace_length() const { return trace_length_; }
    const Vec3& b(std::size_t i) const { return curve_.samples()[i]; }
    const CurveDerivatives& derivatives(std::size_t i) const { return derivs_[i]; }

private:
    SampledCurve3 curve_;
    std::vector<CurveDerivatives> derivs_;
    double trace_length_ = 0.0;
};

/// One-parameter family of binormal curves; the scale is tuned so that the
/// trace length hits a torsion target.
struct BinormalFamily {
    std::string name;
    std::function<CurveJetFn(double)> make;
    double period = kTwoPi;
    double scale_lo = 1e-3;
    double scale_hi = 10.0;
    std::size_t samples = 1024;
};

/// Sigma = 1 / tau and its first two derivatives as a function of t.
using SigmaFn = std::function<std::array<double, 3>(double)>;

inline SigmaFn sigma_from_basis(const PeriodicBasis& basis, const Eigen::VectorXd& c) {
    return [basis, c](double t) {
        std::array<double, 3> s{0.0, 0.0, 0.0};
        for (std::size_t i = 0; i < basis.size(); ++i) {
            const auto e = basis.eval(i, t);
            for (std::size_t k = 0; k < 3; ++k) s[k] += c[static_cast<long>(i)] * e[k];
        }
        return s;
    };
}

/// Periodic 8-point interpolant of sigma samples on a grid.
inline SigmaFn sigma_from_samples(const SampleGrid& grid, std::vector<double> values) {
    if (values.size() != grid.size()) throw InvalidInput("sigma samples differ from the grid size");
    return [grid, values = std::move(values)](double t) {
        const Stencil s = interpolation_stencil(grid, t, 2);
        auto fetch = [&](long k) { return values[grid.wrap(k)]; };
        return std::array<double, 3>{apply_stencil<double>(s, 0, fetch), apply_stencil<double>(s, 1, fetch),
                                     apply_stencil<double>(s, 2, fetch)};
    };
}

namespace detail {

inline void require_positive(const std::vector<double>& sigma) {
    for (std::size_t j = 0; j < sigma.size(); ++j)
        if (!(sigma[j] > 0.0))
            throw NonPositiveSigma("sigma is not positive at sample " + std::to_string(j));
}

inline std::vector<double> sample_sigma(const SigmaFn& sigma, const SampleGrid& g) {
    std::vector<double> s(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) s[j] = sigma(g.params()[j])[0];
    return s;
}

/// det(b, b', b'')^2 / |b'|^5 at every sample.
inline std::vector<double> energy_density(const BinormalCurve& b) {
    std::vector<double> w(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) {
        const CurveDerivatives& d = b.derivatives(j);
        const double det = b.b(j).dot(d.d1.cross(d.d2));
        w[j] = det * det / std::pow(d.d1.norm(), 5);
    }
    return w;
}

}  // namespace detail

/// Elastic energy E = integral of det(b, b', b'')^2 / (sigma |b'|^5) dt by
/// the periodic trapezoid rule on the binormal's grid.
inline double elastic_energy(const BinormalCurve& b, const std::vector<double>& sigma) {
    if (sigma.size() != b.size()) throw InvalidInput("sigma samples differ from the binormal grid");
    detail::require_positive(sigma);
    const auto w = quadrature_weights(b.grid());
    const auto dens = detail::energy_density(b);
    double e = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) e += w[j] * dens[j] / sigma[j];
    return e;
}

inline double elastic_energy(const BinormalCurve& b, const SigmaFn& sigma) {
    return elastic_energy(b, detail::sample_sigma(sigma, b.grid()));
}

/// Spine r(t) = integral of sigma b' x b, sampled on the binormal grid. The
/// result carries exact derivatives
///   r' = s b' x b,  r'' = s' b' x b + s b'' x b,
///   r''' = s'' b' x b + 2 s' b'' x b + s (b''' x b + b'' x b').
/// It is a closed curve when |r(P) - r(0)| <= closure_tol * length,
/// otherwise an open curve including the end point r(P).
inline SampledCurve3 reconstruct_spine(const BinormalCurve& b, const SigmaFn& sigma,
                                       double closure_tol = 1e-6, double* closing_residual = nullptr) {
    const SampleGrid& g = b.grid();
    detail::require_positive(detail::sample_sigma(sigma, g));
    auto bin = std::make_shared<const SampledCurve3>(b.curve());
    DerivativeFn deriv = [bin, sigma](double t) {
        const CurveDerivatives d = bin->derivatives_at(t);
        const Vec3 bt = bin->position_at(t).normalized();
        const auto s = sigma(t);
        const Vec3 u = d.d1.cross(bt);
        const Vec3 u1 = d.d2.cross(bt);  // (b' x b)' = b'' x b
        const Vec3 u2 = d.d3.cross(bt) + d.d2.cross(d.d1);
        return CurveDerivatives{s[0] * u, s[1] * u + s[0] * u1, s[2] * u + 2.0 * s[1] * u1 + s[0] * u2};
    };
    const std::size_t n = g.size();
    std::vector<Vec3> pts(n + 1);
    pts[0] = Vec3::Zero();
    double length = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const long lj = static_cast<long>(j);
        const double a = g.param(lj);
        const double c = g.param(lj + 1);
        pts[j + 1] = pts[j] + GaussLegendre8::integrate([&](double t) -> Vec3 { return deriv(t).d1; }, a, c);
        length += GaussLegendre8::integrate([&](double t) { return deriv(t).d1.norm(); }, a, c);
    }
    const double residual = (pts[n] - pts[0]).norm();
    if (closing_residual) *closing_residual = residual;
    if (residual <= closure_tol * length) {
        pts.pop_back();
        return SampledCurve3(std::move(pts), g, std::move(deriv));
    }
    std::vector<double> params = g.params();
    params.push_back(g.param(static_cast<long>(n)));
    return SampledCurve3(std::move(pts), SampleGrid(std::move(params), false, 0.0), std::move(deriv));
}

inline SampledCurve3 reconstruct_spine(const BinormalCurve& b, const std::vector<double>& sigma,
                                       double closure_tol = 1e-6, double* closing_residual = nullptr) {
    detail::require_positive(sigma);
    return reconstruct_spine(b, sigma_from_samples(b.grid(), sigma), closure_tol, closing_residual);
}

/// Fraction of the sphere (by area, on a 64 x 128 grid of cell centres)
/// lying on some tangent great circle of the binormal curve. A point x is
/// on one iff x . p(t) changes sign, p = b x b' / |b x b'| being the pole.
inline double fenchel_coverage(const BinormalCurve& b, std::size_t n_theta = 64, std::size_t n_phi = 128) {
    std::vector<Vec3> poles(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) poles[j] = b.b(j).cross(b.derivatives(j).d1).normalized();
    double covered = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n_theta; ++i) {
        const double th = kPi * (static_cast<double>(i) + 0.5) / static_cast<double>(n_theta);
        const double area = std::sin(th);
        for (std::size_t k = 0; k < n_phi; ++k) {
            const double ph = kTwoPi * (static_cast<double>(k) + 0.5) / static_cast<double>(n_phi);
            const Vec3 x(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (const Vec3& p : poles) {
                const double d = x.dot(p);
                lo = std::min(lo, d);
                hi = std::max(hi, d);
            }
            total += area;
            if (lo <= 0.0 && hi >= 0.0) covered += area;
        }
    }
    return covered / total;
}

struct SpineSynthesisProblem {
    BinormalCurve binormal;
    PeriodicBasis basis = PeriodicBasis::trig(11, kTwoPi);
    double length_target = 1.0;
    /// Lower bound on sigma; default 1e-3 * length_target / L_S.
    std::optional<double> sigma_min;
    /// Shape family used to meet a torsion target.
    std::optional<BinormalFamily> family;
};

struct SynthesisOptions {
    std::size_t max_iterations = 500;
    double kkt_tolerance = 1e-6;
    double closure_tolerance = 1e-6;
    /// Relative accuracy of the trace-length bisection for a torsion target.
    double trace_length_tolerance = 1e-12;
};

struct SynthesisResult {
    Eigen::VectorXd coefficients;
    std::vector<double> sigma;
    SampledCurve3 spine;
    BinormalCurve binormal;
    PeriodicBasis basis = PeriodicBasis::trig(1, kTwoPi);
    double sigma_min = 0.0;
    double length_target = 0.0;
    double trace_length = 0.0;
    std::optional<double> achieved_total_torsion;
    double energy = 0.0;
    double closing_residual = 0.0;
    /// Largest achievable min(sigma) under the equalities (phase 1).
    double feasibility_margin = 0.0;
    double kkt_residual = 0.0;
    double min_multiplier = 0.0;
    std::vector<std::size_t> active_set;
    std::size_t iterations = 0;
    bool minimizer_unique = true;
    std::optional<double> family_scale;
};

/// Closing vectors a_i = integral of B_i b x b' dt (periodic trapezoid).
inline std::vector<Vec3> closing_vectors(const BinormalCurve& b, const PeriodicBasis& basis) {
    const auto w = quadrature_weights(b.grid());
    std::vector<Vec3> a(basis.size(), Vec3::Zero());
    parallel_rows(basis.size(), [&](std::size_t i) {
        Vec3 acc = Vec3::Zero();
        for (std::size_t j = 0; j < b.size(); ++j)
            acc += w[j] * basis.value(i, b.grid().params()[j]) * b.b(j).cross(b.derivatives(j).d1);
        a[i] = acc;
    });
    return a;
}

inline std::vector<Vec3> closing_vectors(const SpineSynthesisProblem& p) {
    return closing_vectors(p.binormal, p.basis);
}

/// Binormal of the family whose trace length equals `target`, by bisection
/// on the scale. Returns the scale and the curve.
inline std::pair<double, BinormalCurve> scale_to_trace_length(const BinormalFamily& fam, double target,
                                                              double rel_tol = 1e-12) {
    if (!(target > 0.0)) throw InvalidInput("torsion target must be positive");
    auto trace = [&](double s) {
        return BinormalCurve::from_analytic(fam.make(s), fam.period, fam.samples).trace_length();
    };
    double lo = fam.scale_lo;
    double hi = fam.scale_hi;
    double flo = trace(lo) - target;
    const double fhi = trace(hi) - target;
    if (flo * fhi > 0.0)
        throw InvalidInput("torsion target outside the trace lengths of family '" + fam.name + "'");
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double fm = trace(mid) - target;
        if (std::abs(fm) <= rel_tol * target) break;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-16 * std::abs(mid)) break;
    }
    return {mid, BinormalCurve::from_analytic(fam.make(mid), fam.period, fam.samples)};
}

namespace detail {

struct NullSpace {
    Eigen::VectorXd particular;
    Eigen::MatrixXd basis;  // columns span ker(A)
};

inline NullSpace solve_equalities(const Eigen::MatrixXd& A, const Eigen::VectorXd& rhs) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cut = 1e-10 * (sv.size() > 0 ? sv[0] : 0.0);
    long rank = 0;
    for (long i = 0; i < sv.size(); ++i)
        if (sv[i] > cut) ++rank;
    const long n = A.cols();
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    for (long i = 0; i < rank; ++i)
        c += (svd.matrixU().col(i).dot(rhs) / sv[i]) * svd.matrixV().col(i);
    const double res = (A * c - rhs).norm();
    if (res > 1e-8 * (rhs.norm() + A.norm() * c.norm()))
        throw Infeasible("closing and length conditions are inconsistent (residual " + std::to_string(res) +
                         "): no sigma in the span of the basis closes the spine");
    return {c, svd.matrixV().rightCols(n - rank)};
}

/// Orthonormal basis of the null space of the rows of G (k columns).
inline Eigen::MatrixXd null_space_of_rows(const Eigen::MatrixXd& G, long k) {
    if (G.rows() == 0) return Eigen::MatrixXd::Identity(k, k);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(G, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    long rank = 0;
    for (long i = 0; i < sv.size(); ++i)
        if (sv[i] > 1e-10 * sv[0]) ++rank;
    return svd.matrixV().rightCols(k - rank);
}

// Phase 1: maximize s subject to sigma(z) >= s (log barrier, Newton).
// Returns (z, s).
inline std::pair<Eigen::VectorXd, double> max_min_sigma(const Eigen::VectorXd& sp, const Eigen::MatrixXd& M,
                                                        double scale) {
    const long k = M.cols();
    const long m = M.rows();
    Eigen::VectorXd z = Eigen::VectorXd::Zero(k);
    double s = sp.minCoeff() - scale;
    if (k == 0) return {z, sp.minCoeff()};
    auto slack = [&](const Eigen::VectorXd& zz, double ss) -> Eigen::VectorXd {
        return (sp + M * zz).array() - ss;
    };
    double tau = static_cast<double>(m) / scale;
    for (int outer = 0; outer < 60; ++outer) {
        for (int inner = 0; inner < 100; ++inner) {
            const Eigen::VectorXd h = slack(z, s);
            const Eigen::ArrayXd inv = h.array().inverse();
            const Eigen::ArrayXd inv2 = inv.square();
            Eigen::VectorXd grad(k + 1);
            grad.head(k) = -M.transpose() * inv.matrix();
            grad[k] = -tau + inv.sum();
            Eigen::MatrixXd H(k + 1, k + 1);
            H.topLeftCorner(k, k) = M.transpose() * inv2.matrix().asDiagonal() * M;
            const Eigen::VectorXd cross = -M.transpose() * inv2.matrix();
            H.block(0, k, k, 1) = cross;
            H.block(k, 0, 1, k) = cross.transpose();
            H(k, k) = inv2.sum();
            const Eigen::VectorXd step = -H.ldlt().solve(grad);
            const double decrement = -grad.dot(step);
            if (decrement < 1e-12) break;
            auto value = [&](const Eigen::VectorXd& zz, double ss) {
                const Eigen::VectorXd hh = slack(zz, ss);
                if (hh.minCoeff() <= 0.0) return std::numeric_limits<double>::infinity();
                return -tau * ss - hh.array().log().sum();
            };
            const double f0 = value(z, s);
            double a = 1.0;
            while (a > 1e-20) {
                const Eigen::VectorXd zn = z + a * step.head(k);
                const double sn = s + a * step[k];
                if (value(zn, sn) <= f0 - 0.25 * a * decrement) {
                    z = zn;
                    s = sn;
                    break;
                }
                a *= 0.5;
            }
            if (a <= 1e-20) break;
        }
        if (static_cast<double>(m) / tau < 1e-10 * scale) break;
        tau *= 10.0;
    }
    return {z, (sp + M * z).minCoeff()};
}

// Log-barrier Newton for min sum W / sigma subject to sigma >= smin, from a
// strictly feasible z. Returns the number of Newton steps taken.
inline std::size_t barrier_energy(const Eigen::VectorXd& sp, const Eigen::MatrixXd& M, const Eigen::VectorXd& W,
                                  double smin, Eigen::VectorXd& z) {
    const long m = M.rows();
    auto sig = [&](const Eigen::VectorXd& zz) -> Eigen::VectorXd { return sp + M * zz; };
    const double e0 = (W.array() / sig(z).array()).sum();
    double mu = e0 / static_cast<double>(m);
    std::size_t steps = 0;
    auto value = [&](const Eigen::VectorXd& zz) {
        const Eigen::VectorXd s = sig(zz);
        const Eigen::ArrayXd h = s.array() - smin;
        if (h.minCoeff() <= 0.0) return std::numeric_limits<double>::infinity();
        return (W.array() / s.array()).sum() - mu * h.log().sum();
    };
    while (mu * static_cast<double>(m) > 1e-13 * e0) {
        for (int inner = 0; inner < 100; ++inner) {
            const Eigen::VectorXd s = sig(z);
            const Eigen::ArrayXd inv = s.array().inverse();
            const Eigen::ArrayXd hinv = (s.array() - smin).inverse();
            const Eigen::VectorXd g = M.transpose() * (-W.array() * inv.square() - mu * hinv).matrix();
            const Eigen::MatrixXd H =
                M.transpose() * (2.0 * W.array() * inv.cube() + mu * hinv.square()).matrix().asDiagonal() * M;
            const Eigen::VectorXd step = -H.ldlt().solve(g);
            const double decrement = -g.dot(step);
            if (!(decrement > 1e-14 * e0)) break;
            const double f0 = value(z);
            double a = 1.0;
            while (a > 1e-20 && !(value(z + a * step) <= f0 - 0.25 * a * decrement)) a *= 0.5;
            if (a <= 1e-20) break;
            z += a * step;
            ++steps;
        }
        mu *= 0.1;
    }
    return steps;
}

}  // namespace detail

/// Minimizes the elastic energy over sigma = sum c_i B_i subject to the
/// closing condition sum c_i a_i = 0, the length normalization
/// integral sigma |b'| dt = length_target, and sigma >= sigma_min at every
/// grid point. Phase 1 maximizes min(sigma) by a log-barrier Newton method
/// (Infeasible when it stays below sigma_min); phase 2 follows the
/// log-barrier path of the energy and finishes with a primal active-set
/// Newton method on the null space of the equalities.
inline SynthesisResult synthesize(const SpineSynthesisProblem& problem, std::optional<double> torsion_target = {},
                                  const SynthesisOptions& opt = {}) {
    SynthesisResult res;
    res.binormal = problem.binormal;
    if (torsion_target) {
        if (!problem.family) throw InvalidInput("a torsion target needs a binormal shape family");
        auto [scale, curve] = scale_to_trace_length(*problem.family, *torsion_target, opt.trace_length_tolerance);
        res.binormal = std::move(curve);
        res.family_scale = scale;
    }
    const BinormalCurve& b = res.binormal;
    const PeriodicBasis& basis = problem.basis;
    if (std::abs(basis.period() - b.period()) > 1e-12 * b.period())
        throw InvalidInput("basis period differs from the binormal period");
    if (!(problem.length_target > 0.0)) throw InvalidInput("length target must be positive");
    const double L = problem.length_target;
    const double LS = b.trace_length();
    res.trace_length = LS;
    res.length_target = L;
    res.basis = basis;
    res.sigma_min = problem.sigma_min.value_or(1e-3 * L / LS);
    if (!(res.sigma_min > 0.0)) throw InvalidInput("sigma_min must be positive");

    const long n = static_cast<long>(basis.size());
    const long m = static_cast<long>(b.size());
    const auto w = quadrature_weights(b.grid());
    Eigen::MatrixXd Phi(m, n);
    for (long j = 0; j < m; ++j)
        for (long i = 0; i < n; ++i)
            Phi(j, i) = basis.value(static_cast<std::size_t>(i), b.grid().params()[static_cast<std::size_t>(j)]);
    const auto a = closing_vectors(b, basis);
    Eigen::MatrixXd A(4, n);
    for (long i = 0; i < n; ++i) {
        A.block(0, i, 3, 1) = a[static_cast<std::size_t>(i)];
        double ell = 0.0;
        for (long j = 0; j < m; ++j)
            ell += w[static_cast<std::size_t>(j)] * Phi(j, i) * b.derivatives(static_cast<std::size_t>(j)).d1.norm();
        A(3, i) = ell;
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(4);
    rhs[3] = L;
    const detail::NullSpace ns = detail::solve_equalities(A, rhs);
    const Eigen::VectorXd sp = Phi * ns.particular;
    const Eigen::MatrixXd M = Phi * ns.basis;
    const long k = M.cols();
    const double sbar = L / LS;

    auto [z, margin] = detail::max_min_sigma(sp, M, sbar);
    res.feasibility_margin = margin;
    if (margin < res.sigma_min * (1.0 - 1e-9)) {
        std::ostringstream msg;
        msg << "no positive sigma closes the spine: the best achievable min(sigma) is " << margin
            << " < sigma_min = " << res.sigma_min;
        throw Infeasible(msg.str());
    }

    // Phase 2.
    const auto dens = detail::energy_density(b);
    Eigen::VectorXd W(m);
    for (long j = 0; j < m; ++j)
        W[j] = w[static_cast<std::size_t>(j)] * dens[static_cast<std::size_t>(j)];
    auto energy = [&](const Eigen::VectorXd& zz) {
        const Eigen::VectorXd s = sp + M * zz;
        if (s.minCoeff() <= 0.0) return std::numeric_limits<double>::infinity();
        return (W.array() / s.array()).sum();
    };
    const double smin = res.sigma_min;
    std::vector<long> working;
    auto in_working = [&](long j) { return std::find(working.begin(), working.end(), j) != working.end(); };
    auto rows_of = [&](const std::vector<long>& set) {
        Eigen::MatrixXd G(static_cast<long>(set.size()), k);
        for (std::size_t r = 0; r < set.size(); ++r) G.row(static_cast<long>(r)) = M.row(set[r]);
        return G;
    };
    auto try_add = [&](long j) {
        std::vector<long> trial = working;
        trial.push_back(j);
        const Eigen::MatrixXd G = rows_of(trial);
        if (detail::null_space_of_rows(G, k).cols() < detail::null_space_of_rows(rows_of(working), k).cols()) {
            working = std::move(trial);
            return true;
        }
        return false;
    };
    std::size_t barrier_steps = 0;
    if (margin > smin * (1.0 + 1e-9) && k > 0) barrier_steps = detail::barrier_energy(sp, M, W, smin, z);
    {
        // Start the working set from the constraints the barrier path
        // pressed against, tightest first, and put z exactly on them.
        const Eigen::VectorXd s = sp + M * z;
        std::vector<long> near;
        for (long j = 0; j < m; ++j)
            if (s[j] - smin <= 1e-7 * sbar) near.push_back(j);
        std::sort(near.begin(), near.end(), [&](long x, long y) { return s[x] < s[y]; });
        for (long j : near) try_add(j);
        if (!working.empty()) {
            const Eigen::MatrixXd G = rows_of(working);
            Eigen::VectorXd target(static_cast<long>(working.size()));
            for (std::size_t r = 0; r < working.size(); ++r) target[static_cast<long>(r)] = smin - s[working[r]];
            z += G.completeOrthogonalDecomposition().solve(target);
        }
    }

    double grad_norm = 0.0;
    double proj_norm = 0.0;
    double min_mult = 0.0;
    bool converged = false;
    bool stalled = false;
    std::size_t iter = 0;
    Eigen::MatrixXd Z;
    Eigen::MatrixXd Hr;
    for (; iter < opt.max_iterations; ++iter) {
        const Eigen::VectorXd s = sp + M * z;
        const Eigen::ArrayXd inv = s.array().inverse();
        const Eigen::VectorXd dEds = -(W.array() * inv.square()).matrix();
        const Eigen::VectorXd g = M.transpose() * dEds;
        const Eigen::MatrixXd H = M.transpose() * (2.0 * W.array() * inv.cube()).matrix().asDiagonal() * M;
        // |grad E| in coefficient space; the null-space gradient g vanishes
        // at an interior optimum while this one carries the equality multipliers.
        grad_norm = (Phi.transpose() * dEds).norm();
        Z = detail::null_space_of_rows(rows_of(working), k);
        const Eigen::VectorXd gr = Z.transpose() * g;
        proj_norm = gr.norm();
        // A line search that cannot decrease E in floating point counts as
        // stationary once the projected gradient meets the KKT tolerance.
        const bool stationary = grad_norm == 0.0 || proj_norm <= 1e-12 * grad_norm ||
                                (stalled && proj_norm <= opt.kkt_tolerance * grad_norm);
        stalled = false;
        if (stationary) {
            min_mult = 0.0;
            if (working.empty()) {
                converged = true;
                break;
            }
            const Eigen::MatrixXd G = rows_of(working);
            const Eigen::VectorXd mu = G.transpose().colPivHouseholderQr().solve(g);
            long worst = -1;
            min_mult = mu.size() > 0 ? mu.minCoeff(&worst) : 0.0;
            if (min_mult >= -1e-9 * grad_norm) {
                converged = true;
                break;
            }
            working.erase(working.begin() + worst);
            continue;
        }
        Hr = Z.transpose() * H * Z;
        const double reg = 1e-14 * std::max(Hr.trace(), 1e-300);
        Eigen::VectorXd pr = -(Hr + reg * Eigen::MatrixXd::Identity(Hr.rows(), Hr.cols())).ldlt().solve(gr);
        if (g.dot(Z * pr) >= 0.0) pr = -gr;  // fall back to steepest descent
        const Eigen::VectorXd p = Z * pr;
        const Eigen::VectorXd Mp = M * p;
        double amax = std::numeric_limits<double>::infinity();
        long blocking = -1;
        for (long j = 0; j < m; ++j) {
            if (in_working(j)) continue;
            if (Mp[j] < -1e-14 * Mp.norm()) {
                const double r = std::max(0.0, s[j] - smin) / -Mp[j];
                if (r < amax) {
                    amax = r;
                    blocking = j;
                }
            }
        }
        double alpha = std::min(1.0, amax);
        const double e0 = energy(z);
        const double slope = g.dot(p);
        // Predicted decrease at rounding level: nothing left to gain.
        if (-slope <= 1e-14 * e0 && proj_norm <= opt.kkt_tolerance * grad_norm) {
            stalled = true;
            continue;
        }
        while (alpha > 1e-16 && energy(z + alpha * p) > e0 + 1e-4 * alpha * slope) alpha *= 0.5;
        if (alpha <= 1e-16) {
            if (proj_norm > opt.kkt_tolerance * grad_norm) break;
            stalled = true;
            continue;
        }
        const bool blocked = blocking >= 0 && alpha == amax && amax <= 1.0;
        z += alpha * p;
        if (blocked) try_add(blocking);
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "active-set iteration did not converge after " << iter << " iterations: energy " << energy(z)
            << ", projected gradient " << proj_norm << " / " << grad_norm << ", working set " << working.size();
        throw NonConvergence(msg.str());
    }

    res.coefficients = ns.particular + ns.basis * z;
    res.sigma.resize(static_cast<std::size_t>(m));
    const Eigen::VectorXd s = sp + M * z;
    for (long j = 0; j < m; ++j) res.sigma[static_cast<std::size_t>(j)] = s[j];
    res.energy = energy(z);
    res.kkt_residual = grad_norm > 0.0 ? proj_norm / grad_norm : 0.0;
    res.min_multiplier = min_mult;
    res.iterations = barrier_steps + iter;
    for (long j : working) res.active_set.push_back(static_cast<std::size_t>(j));
    std::sort(res.active_set.begin(), res.active_set.end());
    if (Z.cols() > 0) {
        const Eigen::MatrixXd H =
            M.transpose() * (2.0 * W.array() * s.array().inverse().cube()).matrix().asDiagonal() * M;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Z.transpose() * H * Z);
        const auto ev = es.eigenvalues();
        res.minimizer_unique = ev.maxCoeff() > 0.0 && ev.minCoeff() > 1e-10 * ev.maxCoeff();
    }
    res.spine = reconstruct_spine(b, sigma_from_basis(basis, res.coefficients), opt.closure_tolerance,
                                  &res.closing_residual);
    if (res.spine.closed()) {
        try {
            res.achieved_total_torsion = total_torsion(res.spine);
        } catch (const GeometryError&) {
            res.achieved_total_torsion.reset();
        }
    }
    return res;
}

/// Epicycle binormal family (central projection of e^{it} + a e^{i(1-m)t}),
/// scaled by its planar size. Its trace has no geodesic inflections, so
/// synthesized spines have no inflection points.
inline BinormalFamily epicycle_family(double a = 0.5, int m = 4, std::size_t samples = 1024) {
    BinormalFamily f;
    f.name = "epicycle";
    f.make = [a, m](double s) { return families::gnomonic_epicycle(s, a, m); };
    f.period = kTwoPi;
    f.scale_lo = 1e-3;
    f.scale_hi = 50.0;
    f.samples = samples;
    return f;
}

/// Figure-8 binormal family (central projection of (sin t, sin t cos t)).
inline BinormalFamily figure8_family(std::size_t samples = 1024) {
    BinormalFamily f;
    f.name = "figure8";
    f.make = [](double s) { return families::gnomonic_figure8(s); };
    f.period = kTwoPi;
    f.scale_lo = 1e-3;
    f.scale_hi = 50.0;
    f.samples = samples;
    return f;
}

/// Latitude oscillation phi(t) = phi0 + amp sin(m t), scaled in amplitude.
inline BinormalFamily latitude_family(double phi0, int m, std::size_t samples = 1024) {
    BinormalFamily f;
    f.name = "latitude";
    f.make = [phi0, m](double amp) { return families::latitude_oscillation(phi0, amp, m); };
    f.period = kTwoPi;
    f.scale_lo = 1e-3;
    f.scale_hi = 1.5;
    f.samples = samples;
    return f;
}

}  // namespace monge
