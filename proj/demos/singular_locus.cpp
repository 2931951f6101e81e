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

// The plane family with kappa1 = -1, kappa2 = 0, lambda = v: every plane
// rotates about a line through its own origin, and a line profile crosses
// that axis somewhere. Prints where.
//
//   singular_locus

#include <cmath>
#include <cstdio>

#include "monge_kit.hpp"

using namespace monge;

int main() {
    const double v0 = -2.0, v1 = 2.0;
    const std::size_t n = 2001;
    const FamilyCoefficients coeff{[](double) { return -1.0; }, [](double) { return 0.0; },
                                   [](double v) { return v; }};
    const Vec3 t(-std::sin(v0), std::cos(v0), 0.0);
    const Vec3 q1(std::cos(v0), std::sin(v0), 0.0);
    const Vec3 p(v0 * std::cos(v0) - std::sin(v0), v0 * std::sin(v0) + std::cos(v0), 0.0);
    const PlaneFamily family = from_coefficients(coeff, SampleGrid::uniform(v0, v1 - v0, n, false), t, q1, p);

    const double h = std::sqrt(2.0);
    const std::pair<const char*, PlaneCurve> profiles[] = {
        {"diagonal", families::segment_profile(Vec2(-h, -h), Vec2(h, h), 81)},
        {"x-axis", families::segment_profile(Vec2(-2, 0), Vec2(2, 0), 81)},
        {"y-axis", families::segment_profile(Vec2(0, -2), Vec2(0, 2), 81)}};

    for (const auto& [name, profile] : profiles) {
        const MongeSurface s(family, profile);
        const MarginReport r = regularity_margin(s, 41, 41);
        std::printf("%s: margin [%.3f, %.3f], %zu singular points\n", name, r.min, r.max, r.zero_set.size());
        for (std::size_t i = 0; i < r.zero_set.size(); i += std::max<std::size_t>(1, r.zero_set.size() / 6)) {
            const Vec2 z = r.zero_set[i];
            const Vec2 xy = s.profile().evaluate(z.x());
            std::printf("    u %+.3f  v %+.3f  profile point (%+.3f, %+.3f)\n", z.x(), z.y(), xy.x(), xy.y());
        }
        MeshOptions opt;
        opt.allow_singular = true;
        const QuadMesh m = make_mesh(s, 41, 41, classify_closure(s), opt);
        std::printf("    mesh with %zu singular vertices\n", m.singular_vertices.size());
    }
    return 0;
}
