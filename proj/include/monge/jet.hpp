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

namespace monge {

// Truncated Taylor series of order 3 in one variable. Coefficient k holds
// f^(k)(t0) / k!, so products are plain Cauchy convolutions. Used to get
// exact derivatives of the built-in analytic curve families.
struct Jet {
    std::array<double, 4> c{};

    Jet() = default;
    Jet(double value) : c{value, 0.0, 0.0, 0.0} {}  // NOLINT: implicit by design of the algebra

    static Jet variable(double t) {
        Jet j;
        j.c = {t, 1.0, 0.0, 0.0};
        return j;
    }

    double value() const { return c[0]; }

    /// k-th derivative (k <= 3).
    double derivative(int k) const {
        static constexpr double factorial[] = {1.0, 1.0, 2.0, 6.0};
        return c[k] * factorial[k];
    }

    Jet& operator+=(const Jet& o) {
        for (int k = 0; k < 4; ++k) c[k] += o.c[k];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        for (int k = 0; k < 4; ++k) c[k] -= o.c[k];
        return *this;
    }
};

inline Jet operator-(const Jet& a) {
    Jet r;
    for (int k = 0; k < 4; ++k) r.c[k] = -a.c[k];
    return r;
}
inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }

inline Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (int k = 0; k < 4; ++k) {
        double s = 0.0;
        for (int i = 0; i <= k; ++i) s += a.c[i] * b.c[k - i];
        r.c[k] = s;
    }
    return r;
}

inline Jet operator/(const Jet& a, const Jet& b) {
    Jet q;
    for (int k = 0; k < 4; ++k) {
        double s = a.c[k];
        for (int i = 1; i <= k; ++i) s -= b.c[i] * q.c[k - i];
        q.c[k] = s / b.c[0];
    }
    return q;
}

inline Jet sqrt(const Jet& a) {
    Jet r;
    r.c[0] = std::sqrt(a.c[0]);
    for (int k = 1; k < 4; ++k) {
        double s = a.c[k];
        for (int i = 1; i < k; ++i) s -= r.c[i] * r.c[k - i];
        r.c[k] = s / (2.0 * r.c[0]);
    }
    return r;
}

namespace detail {
inline void sincos_jet(const Jet& x, Jet& s, Jet& co) {
    s.c[0] = std::sin(x.c[0]);
    co.c[0] = std::cos(x.c[0]);
    for (int k = 1; k < 4; ++k) {
        double ss = 0.0;
        double cc = 0.0;
        for (int i = 1; i <= k; ++i) {
            ss += i * x.c[i] * co.c[k - i];
            cc -= i * x.c[i] * s.c[k - i];
        }
        s.c[k] = ss / k;
        co.c[k] = cc / k;
    }
}
}  // namespace detail

inline Jet sin(const Jet& x) {
    Jet s, c;
    detail::sincos_jet(x, s, c);
    return s;
}

inline Jet cos(const Jet& x) {
    Jet s, c;
    detail::sincos_jet(x, s, c);
    return c;
}

}  // namespace monge
