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

#include <filesystem>
#include <fstream>

#include "monge_kit.hpp"

using namespace monge;
using io::json;

namespace {

json reparse(const json& j) { return json::parse(j.dump()); }

std::filesystem::path temp_dir() {
    const auto d = std::filesystem::temp_directory_path() / "monge_kit_test_io";
    std::filesystem::create_directories(d);
    return d;
}

}  // namespace

TEST(IoCurve, SpaceCurveRoundTripIsExact) {
    const auto c = SampledCurve3::from_analytic(families::torus_knot(2, 3, 1.0, 0.3), 0.0, kTwoPi, 64, true);
    const json j = io::to_json(c);
    EXPECT_EQ(j["dim"], 3);
    EXPECT_EQ(j["closed"], true);
    EXPECT_EQ(j["samples"].size(), 64u);
    const SampledCurve3 back = io::curve3_from_json(reparse(j));
    ASSERT_EQ(back.size(), c.size());
    EXPECT_EQ(back.period(), c.period());
    for (std::size_t i = 0; i < c.size(); ++i) {
        EXPECT_EQ(back.samples()[i], c.samples()[i]);
        EXPECT_EQ(back.params()[i], c.params()[i]);
    }
}

TEST(IoCurve, PlaneCurveKeepsSymmetryOrder) {
    const PlaneCurve c = families::rose_profile(0.3, 0.2, 4, 64);
    const json j = io::to_json(c);
    EXPECT_EQ(j["dim"], 2);
    EXPECT_EQ(j["symmetry_order"], 4);
    const PlaneCurve back = io::plane_curve_from_json(reparse(j));
    EXPECT_EQ(back.symmetry_order(), 4);
    EXPECT_EQ(back.samples(), c.samples());
}

TEST(IoCurve, OpenCurveHasNoPeriod) {
    const PlaneCurve c = families::segment_profile(Vec2(0, 0), Vec2(1, 1), 9);
    const json j = io::to_json(c);
    EXPECT_FALSE(j.contains("period"));
    EXPECT_FALSE(io::plane_curve_from_json(reparse(j)).closed());
}

TEST(IoCurve, DoublesSurviveText) {
    std::vector<Vec3> pts;
    for (int i = 0; i < 8; ++i) pts.emplace_back(1.0 / 3.0 + i, std::nextafter(0.1 * i, 1.0), -1e-300 * (i + 1));
    const SampledCurve3 c(pts, SampleGrid::uniform(0.0, 1.0, 8, true));
    const SampledCurve3 back = io::curve3_from_json(json::parse(io::to_json(c).dump(2)));
    for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(back.samples()[i], pts[i]);
}

TEST(IoCurve, RejectsMalformedDocuments) {
    json j = io::to_json(SampledCurve3::from_analytic(families::circle(1), 0, kTwoPi, 16, true));
    json wrong_dim = j;
    wrong_dim["dim"] = 4;
    EXPECT_THROW(io::curve3_from_json(wrong_dim), InvalidInput);
    json no_samples = j;
    no_samples.erase("samples");
    EXPECT_THROW(io::curve3_from_json(no_samples), InvalidInput);
    json short_point = j;
    short_point["samples"][0] = json::array({1.0, 2.0});
    EXPECT_THROW(io::curve3_from_json(short_point), InvalidInput);
    json no_period = j;
    no_period.erase("period");
    EXPECT_THROW(io::curve3_from_json(no_period), InvalidInput);
    json text = j;
    text["samples"][0][1] = "x";
    EXPECT_THROW(io::curve3_from_json(text), InvalidInput);
    EXPECT_THROW(io::plane_curve_from_json(j), InvalidInput);  // dim 3 is not a profile
}

TEST(IoFrame, RoundTrip) {
    const auto c = SampledCurve3::from_analytic(families::torus_knot(2, 3, 1.0, 0.3), 0.0, kTwoPi, 128, true);
    const MovingFrame f = rotation_minimizing_frame(c);
    const json j = io::to_json(f);
    ASSERT_TRUE(j.contains("frame"));
    EXPECT_EQ(j["frame"]["t"].size(), 128u);
    const MovingFrame back = io::frame_from_json(reparse(j));
    EXPECT_EQ(back.q1, f.q1);
    EXPECT_EQ(back.q2, f.q2);
    EXPECT_EQ(back.t, f.t);
    ASSERT_TRUE(back.holonomy_angle.has_value());
    EXPECT_EQ(*back.holonomy_angle, *f.holonomy_angle);
}

TEST(IoFamily, RoundTripPreservesEvaluation) {
    const auto c = SampledCurve3::from_analytic(families::torus_knot(2, 3, 1.0, 0.3), 0.0, kTwoPi, 256, true);
    const PlaneFamily f = from_spine(c);
    const json j = io::to_json(f);
    for (const char* key : {"params", "p", "t", "q1", "q2", "kappa1", "kappa2", "lambda"})
        EXPECT_EQ(j[key].size(), 256u) << key;
    const PlaneFamily back = io::family_from_json(reparse(j));
    EXPECT_EQ(back.monodromy(), f.monodromy());
    const PlaneCurve prof = families::circle_profile(0.05);
    const MongeSurface a(f, prof), b(back, prof);
    for (double v : {0.0, 1.3, 5.9, 7.0})
        for (double u : {0.0, 0.1, 0.2}) EXPECT_EQ(a.evaluate(u, v), b.evaluate(u, v));
}

TEST(IoFamily, RejectsLengthMismatch) {
    json j = io::to_json(from_spine(SampledCurve3::from_analytic(families::circle(1), 0, kTwoPi, 32, true)));
    j["kappa1"].erase(0);
    EXPECT_THROW(io::family_from_json(j), InvalidInput);
}

TEST(IoProblem, InlineBinormalAndDefaults) {
    json j;
    j["binormal"] = io::to_json(SampledCurve3::from_analytic(families::great_circle(), 0, kTwoPi, 64, true));
    const io::ProblemSpec s = io::problem_from_json(j);
    EXPECT_EQ(s.problem.basis.size(), 11u);
    EXPECT_EQ(s.problem.length_target, 1.0);
    EXPECT_FALSE(s.problem.sigma_min.has_value());
    EXPECT_FALSE(s.torsion_target.has_value());
    EXPECT_THROW(synthesize(s.problem), Infeasible);
}

TEST(IoProblem, FileReferenceGeneratorAndFamily) {
    const auto dir = temp_dir();
    const auto b = SampledCurve3::from_analytic(families::gnomonic_epicycle(0.3, 0.5, 4), 0, kTwoPi, 256, true);
    io::write_json_file(dir / "b.json", io::to_json(b));
    const json by_file = json::parse(R"({"binormal": {"file": "b.json"},
        "basis": {"type": "bspline", "n": 12, "degree": 3}, "length_target": 2.5, "sigma_min": 0.001})");
    const io::ProblemSpec s = io::problem_from_json(by_file, dir);
    EXPECT_EQ(s.problem.binormal.size(), 256u);
    EXPECT_EQ(s.problem.basis.kind(), PeriodicBasis::Kind::BSpline);
    EXPECT_EQ(s.problem.length_target, 2.5);
    EXPECT_EQ(*s.problem.sigma_min, 0.001);

    const json by_gen = json::parse(R"({"binormal": {"generator": "epicycle", "scale": 0.3, "samples": 256},
        "basis": {"type": "trig", "harmonics": [1, 4]}})");
    const io::ProblemSpec g = io::problem_from_json(by_gen);
    EXPECT_EQ(g.problem.basis.size(), 5u);
    EXPECT_EQ(g.problem.binormal.curve().samples(), s.problem.binormal.curve().samples());

    const json by_family = json::parse(R"({"family": {"name": "epicycle", "a": 0.5, "m": 4}, "torsion_target": 2.0})");
    const io::ProblemSpec f = io::problem_from_json(by_family);
    ASSERT_TRUE(f.problem.family.has_value());
    EXPECT_EQ(*f.torsion_target, 2.0);
}

TEST(IoProblem, TargetArgumentOverridesFile) {
    const json family_only = json::parse(R"({"family": {"name": "epicycle", "a": 0.5, "m": 4}})");
    EXPECT_THROW(io::problem_from_json(family_only), InvalidInput);
    const io::ProblemSpec a = io::problem_from_json(family_only, {}, 1.5);
    EXPECT_EQ(*a.torsion_target, 1.5);
    const json with_target = json::parse(R"({"family": {"name": "epicycle", "a": 0.5, "m": 4}, "torsion_target": 2.0})");
    EXPECT_EQ(*io::problem_from_json(with_target, {}, 3.0).torsion_target, 3.0);
}

TEST(IoProblem, Errors) {
    EXPECT_THROW(io::problem_from_json(json::parse(R"({"torsion_target": 2.0})")), InvalidInput);
    EXPECT_THROW(io::problem_from_json(json::parse(R"({"family": {"name": "nope"}, "torsion_target": 2})")),
                 InvalidInput);
    EXPECT_THROW(io::problem_from_json(json::parse(
                     R"({"binormal": {"generator": "great_circle"}, "basis": {"type": "wavelet", "n": 4}})")),
                 InvalidInput);
    EXPECT_THROW(io::problem_from_json(json::parse(R"({"binormal": {"file": "does-not-exist.json"}})")),
                 InvalidInput);
    EXPECT_THROW(io::problem_from_json(json::parse(R"({"binormal": {"generator": "great_circle"}, "sigma_min": "x"})")),
                 InvalidInput);
    const auto bad = temp_dir() / "bad.json";
    std::ofstream(bad) << "{ not json";
    EXPECT_THROW(io::read_json_file(bad), InvalidInput);
}

TEST(IoResult, SpineReadsBackFromResultFile) {
    const json j = json::parse(R"({"family": {"name": "epicycle"}, "torsion_target": 1.5707963267948966})");
    const io::ProblemSpec s = io::problem_from_json(j);
    const SynthesisResult r = synthesize(s.problem, s.torsion_target);
    const json out = reparse(io::to_json(r));
    EXPECT_EQ(out["coefficients"].size(), r.coefficients.size());
    EXPECT_EQ(out["sigma"]["values"].size(), r.sigma.size());
    EXPECT_EQ(out["diagnostics"]["energy"].get<double>(), r.energy);
    const SampledCurve3 spine = io::spine_from_json(out);
    EXPECT_EQ(spine.samples(), r.spine.samples());
    // Without the exact derivative oracle the total torsion still matches.
    EXPECT_NEAR(total_torsion(spine), kTwoPi / 4, 1e-4);
    EXPECT_EQ(io::to_json(r).dump(), io::to_json(r).dump());
}

TEST(IoReports, ClosureAndMeshCheck) {
    ClosureReport r;
    r.kind = ClosureKind::covered_torus;
    r.holonomy = -kTwoPi / 4;
    r.holonomy_ratio = Rational{-1, 4, 0.0};
    r.covering_degree = 4;
    const json j = io::to_json(r);
    EXPECT_EQ(j["kind"], "covered_torus");
    EXPECT_EQ(j["covering_degree"], 4);
    EXPECT_EQ(j["holonomy_ratio"]["n"], 4);
    EXPECT_TRUE(j["total_torsion"].is_null());
    MeshCheck c;
    c.watertight = true;
    c.euler_characteristic = -2;
    EXPECT_EQ(io::to_json(c)["euler_characteristic"], -2);
}
