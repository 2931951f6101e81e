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

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "monge/numerics.hpp"

namespace monge {

/// Periodic scalar basis B_0..B_{n-1} on [0, P): trigonometric
/// (constant plus cos/sin pairs) or uniform periodic B-splines.
class PeriodicBasis {
public:
    enum class Kind { Trig, BSpline };

    /// {1, cos(2 pi j t / P), sin(2 pi j t / P)} for j = 1..(n-1)/2; n odd.
    static PeriodicBasis trig(std::size_t n, double period) {
        if (n == 0 || n % 2 == 0) throw InvalidInput("trigonometric basis size must be odd");
        std::vector<int> h;
        for (int j = 1; j <= static_cast<int>((n - 1) / 2); ++j) h.push_back(j);
        return trig_harmonics(h, period);
    }

    /// Constant plus cos/sin pairs of the listed harmonics.
    static PeriodicBasis trig_harmonics(std::vector<int> harmonics, double period) {
        if (!(period > 0.0)) throw InvalidInput("basis period must be positive");
        for (int j : harmonics)
            if (j < 1) throw InvalidInput("harmonics must be positive");
        PeriodicBasis b;
        b.kind_ = Kind::Trig;
        b.period_ = period;
        b.harmonics_ = std::move(harmonics);
        b.size_ = 1 + 2 * b.harmonics_.size();
        return b;
    }

    /// n uniform periodic B-splines of the given degree.
    static PeriodicBasis bspline(std::size_t n, int degree, double period) {
        if (degree < 0 || degree > 7) throw InvalidInput("B-spline degree must lie in [0, 7]");
        if (n < static_cast<std::size_t>(degree) + 1)
            throw InvalidInput("periodic B-spline basis needs at least degree + 1 functions");
        if (!(period > 0.0)) throw InvalidInput("basis period must be positive");
        PeriodicBasis b;
        b.kind_ = Kind::BSpline;
        b.period_ = period;
        b.degree_ = degree;
        b.size_ = n;
        return b;
    }

    Kind kind() const { return kind_; }
    std::size_t size() const { return size_; }
    double period() const { return period_; }
    int degree() const { return degree_; }
    const std::vector<int>& harmonics() const { return harmonics_; }

    /// Value and first two derivatives of B_i at t.
    std::array<double, 3> eval(std::size_t i, double t) const {
        if (kind_ == Kind::Trig) {
            if (i == 0) return {1.0, 0.0, 0.0};
            const double w = kTwoPi * harmonics_[(i - 1) / 2] / period_;
            const double c = std::cos(w * t);
            const double s = std::sin(w * t);
            if (i % 2 == 1) return {c, -w * s, -w * w * c};
            return {s, w * c, -w * w * s};
        }
        const double n = static_cast<double>(size_);
        const double h = period_ / n;
        double x = t / h - static_cast<double>(i);
        x -= n * std::floor(x / n);  // x in [0, n)
        std::array<double, 3> out{0.0, 0.0, 0.0};
        // Sum over the periodic images x, x + n, x + 2n, ... inside the
        // support [0, degree + 1].
        for (double y = x; y < degree_ + 1.0; y += n) {
            out[0] += cardinal(degree_, y);
            out[1] += cardinal_derivative(degree_, y, 1) / h;
            out[2] += cardinal_derivative(degree_, y, 2) / (h * h);
        }
        return out;
    }

    double value(std::size_t i, double t) const { return eval(i, t)[0]; }

    std::string describe() const {
        if (kind_ == Kind::Trig) return "trig(" + std::to_string(size_) + ")";
        return "bspline(" + std::to_string(size_) + ", degree " + std::to_string(degree_) + ")";
    }

private:
    // Cardinal B-spline of degree d supported on [0, d + 1].
    static double cardinal(int d, double x) {
        if (x < 0.0 || x >= d + 1.0) return 0.0;
        if (d == 0) return 1.0;
        return (x * cardinal(d - 1, x) + (d + 1.0 - x) * cardinal(d - 1, x - 1.0)) / d;
    }

    static double cardinal_derivative(int d, double x, int order) {
        if (order == 0) return cardinal(d, x);
        if (d == 0) return 0.0;
        return cardinal_derivative(d - 1, x, order - 1) - cardinal_derivative(d - 1, x - 1.0, order - 1);
    }

    Kind kind_ = Kind::Trig;
    std::size_t size_ = 1;
    double period_ = 1.0;
    int degree_ = 3;
    std::vector<int> harmonics_;
};

}  // namespace monge
