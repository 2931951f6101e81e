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

// monge-kit: command line front end.
//
//   analyze      closed space curve -> total torsion, holonomy, cylinder verdict
//   synthesize   problem file -> closed spine with the requested total torsion
//   surface      spine or family + profile -> OBJ mesh and JSON report
//   mesh-check   OBJ -> watertightness and orientability
//   make-curve   test curves and profiles
//   make-family  plane family files (Example-1 family, or a spine's normal planes)
//
// Exit codes: 0 ok, 2 unreadable input, 3 geometric precondition failed,
// 4 infeasible synthesis, 5 singular surface, 1 anything else.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "monge_kit.hpp"

using namespace monge;
using io::json;

namespace {

void emit(const json& j, const std::string& path) {
    if (path.empty()) std::cout << j.dump(2) << '\n';
    else io::write_json_file(path, j);
}

json optional_rational(const std::optional<Rational>& r) { return r ? io::to_json(*r) : json(nullptr); }

// ---- analyze ------------------------------------------------------------

struct AnalyzeArgs {
    std::string curve;
    double tol = 1e-6;
    std::string out;
};

int run_analyze(const AnalyzeArgs& a) {
    const json doc = io::read_json_file(a.curve);
    const SampledCurve3 c = io::spine_from_json(doc);
    if (!c.closed()) throw OpenCurve("analyze needs a closed curve");
    const CylinderReport r = is_monge_cylinder_spine(c, a.tol);
    json j;
    j["samples"] = c.size();
    j["length"] = c.length();
    j["total_torsion"] = r.total_torsion;
    j["trace_length"] = r.trace_length;
    j["holonomy"] = r.holonomy;
    j["torsion_ratio"] = optional_rational(r.torsion_ratio);
    j["holonomy_plus_torsion"] = wrap_angle(r.holonomy + r.total_torsion);
    j["monge_cylinder"] = r.is_cylinder;
    const FrenetData fd = frenet_data(c);
    double kmax = 0.0;
    for (double k : fd.curvature) kmax = std::max(kmax, k);
    j["max_curvature"] = kmax;
    emit(j, a.out);
    return 0;
}

// ---- synthesize ---------------------------------------------------------

struct SynthesizeArgs {
    std::string problem;
    std::optional<double> torsion_target;
    std::string out;
    SynthesisOptions opt;
};

int run_synthesize(const SynthesizeArgs& a) {
    const std::filesystem::path path(a.problem);
    const io::ProblemSpec spec = io::problem_from_json(io::read_json_file(path), path.parent_path(), a.torsion_target);
    const SynthesisResult r = synthesize(spec.problem, spec.torsion_target, a.opt);
    const json j = io::to_json(r);
    if (a.out.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        io::write_json_file(a.out, j);
        std::cout << j["diagnostics"].dump(2) << '\n';
    }
    return 0;
}

// ---- surface ------------------------------------------------------------

struct SurfaceArgs {
    std::string spine, family, profile;
    std::size_t nu = 128, nv = 256;
    std::size_t family_samples = 4096;
    std::size_t diag_n = 64;
    std::string out_mesh, out_report;
    bool allow_singular = false;
    double closure_tol = 1e-6;
    double seam_tol = 1e-8;
    double pgf_tol = 1e-5;
    double regularity_tol = kRegularityTolerance;
};

int run_surface(const SurfaceArgs& a) {
    if (a.spine.empty() == a.family.empty()) throw InvalidInput("give exactly one of --spine and --family");
    // Parse everything before computing anything.
    const json profile_doc = io::read_json_file(a.profile);
    const json source_doc = io::read_json_file(a.spine.empty() ? a.family : a.spine);
    const PlaneCurve profile = io::plane_curve_from_json(profile_doc);
    PlaneFamily family;
    if (!a.spine.empty()) family = from_spine(io::spine_from_json(source_doc), std::nullopt, a.family_samples);
    else family = io::family_from_json(source_doc);

    const MongeSurface s(family, profile);
    const MarginReport margin = regularity_margin(s, a.diag_n, a.diag_n, a.regularity_tol);
    if (!margin.regular && !a.allow_singular) {
        const Vec2 z = margin.zero_set.front();
        throw SingularPoint(z.x(), z.y());
    }
    const ClosureReport closure = classify_closure(s, a.closure_tol);
    MeshOptions mo;
    mo.allow_singular = a.allow_singular;
    mo.seam_tolerance = a.seam_tol;
    mo.regularity_tolerance = a.regularity_tol;
    const QuadMesh mesh = make_mesh(s, a.nu, a.nv, closure, mo);
    const MeshCheck check = check_mesh(mesh);

    json report;
    report["closure"] = io::to_json(closure);
    json m;
    m["nu"] = mesh.nu;
    m["nv"] = mesh.nv;
    m["identification"] = mesh.identification;
    m["seam_residual"] = mesh.seam_residual;
    m["singular_vertices"] = mesh.singular_vertices;
    m["check"] = io::to_json(check);
    report["mesh"] = std::move(m);
    report["margin"] = io::to_json(margin, &s);
    if (margin.regular) {
        const SurfaceDiagnostics d = fundamental_forms(s, a.diag_n, a.diag_n, a.regularity_tol);
        const GridField op = d.margin.array().square().matrix();
        json f;
        f["grid"] = a.diag_n;
        f["max_abs_E_minus_1"] = (d.E.array() - 1.0).abs().maxCoeff();
        f["max_abs_F"] = d.F.cwiseAbs().maxCoeff();
        f["max_abs_G_minus_margin_squared"] = (d.G - op).cwiseAbs().maxCoeff();
        f["max_abs_M"] = d.M.cwiseAbs().maxCoeff();
        f["max_M_over_L_plus_N"] =
            (d.M.array().abs() / (d.L.array().abs() + d.N.array().abs() + 1e-300)).maxCoeff();
        report["forms"] = std::move(f);
        report["pgf"] = io::to_json(check_pgf(s, a.diag_n, a.diag_n, a.pgf_tol, a.regularity_tol));
    } else {
        report["forms"] = nullptr;
        report["pgf"] = nullptr;
    }

    if (!a.out_mesh.empty()) {
        std::ofstream os(a.out_mesh);
        if (!os) throw InvalidInput("cannot write " + a.out_mesh);
        std::vector<std::string> header{"monge-kit surface", std::string("closure: ") + to_string(closure.kind),
                                        mesh.identification};
        if (!mesh.singular_vertices.empty())
            header.push_back("singular vertices: " + std::to_string(mesh.singular_vertices.size()) +
                             " (listed in the report)");
        write_obj(os, mesh, header);
    }
    if (!a.out_report.empty()) io::write_json_file(a.out_report, report);
    json summary;
    summary["kind"] = report["closure"]["kind"];
    summary["covering_degree"] = report["closure"]["covering_degree"];
    summary["regular"] = margin.regular;
    summary["margin_min"] = margin.min;
    summary["margin_max"] = margin.max;
    summary["seam_residual"] = mesh.seam_residual;
    summary["watertight"] = check.watertight;
    summary["orientable"] = check.orientable;
    summary["pgf"] = report["pgf"].is_null() ? json(nullptr) : report["pgf"]["pgf"];
    std::cout << summary.dump(2) << '\n';
    return 0;
}

// ---- mesh-check ---------------------------------------------------------

int run_mesh_check(const std::string& path, bool allow_boundary) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    const MeshCheck c = check_mesh(read_obj(in));
    std::cout << io::to_json(c).dump(2) << '\n';
    const bool ok = c.watertight || (allow_boundary && c.nonmanifold_edges == 0);
    return ok ? 0 : 3;
}

// ---- make-curve / make-family -------------------------------------------

struct MakeCurveArgs {
    std::string kind;
    std::size_t samples = 0;
    std::uint64_t seed = 1;
    std::vector<std::string> set;
    std::string out;
};

std::map<std::string, double> parse_settings(const std::vector<std::string>& items) {
    std::map<std::string, double> m;
    for (const auto& s : items) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw InvalidInput("--set expects key=value, got '" + s + "'");
        try {
            m[s.substr(0, eq)] = std::stod(s.substr(eq + 1));
        } catch (const std::exception&) {
            throw InvalidInput("--set value is not a number: '" + s + "'");
        }
    }
    return m;
}

int run_make_curve(const MakeCurveArgs& a) {
    const auto p = parse_settings(a.set);
    auto get = [&](const char* k, double d) {
        const auto it = p.find(k);
        return it == p.end() ? d : it->second;
    };
    auto n_or = [&](std::size_t d) { return a.samples ? a.samples : d; };
    json j;
    const std::string& k = a.kind;
    auto space = [&](const CurveJetFn& f, double period, std::size_t n) {
        j = io::to_json(SampledCurve3::from_analytic(f, 0.0, period, n, true));
    };
    if (k == "circle") space(families::circle(get("radius", 1.0)), kTwoPi, n_or(512));
    else if (k == "torus-knot")
        space(families::torus_knot(int(get("p", 2)), int(get("q", 3)), get("R", 1.0), get("r", 0.3)), kTwoPi, n_or(1024));
    else if (k == "viviani") space(families::viviani(), 2 * kTwoPi, n_or(1024));
    else if (k == "random-sphere")
        space(families::random_sphere_curve(a.seed, int(get("harmonics", 3)), get("amplitude", 0.25)), kTwoPi, n_or(1024));
    else if (k == "great-circle") space(families::great_circle(), kTwoPi, n_or(1024));
    else if (k == "epicycle")
        space(families::gnomonic_epicycle(get("scale", 0.3), get("a", 0.5), int(get("m", 4))), kTwoPi, n_or(1024));
    else if (k == "profile-circle")
        j = io::to_json(families::circle_profile(get("radius", 1.0), Vec2(get("cx", 0.0), get("cy", 0.0)), n_or(256)));
    else if (k == "profile-ellipse")
        j = io::to_json(families::ellipse_profile(get("a", 1.0), get("b", 0.5), Vec2(get("cx", 0.0), get("cy", 0.0)),
                                                  n_or(256)));
    else if (k == "profile-rose")
        j = io::to_json(families::rose_profile(get("radius", 1.0), get("amp", 0.2), int(get("order", 4)), n_or(1024)));
    else if (k == "profile-figure8") j = io::to_json(families::figure8_profile(get("radius", 1.0), n_or(1024)));
    else if (k == "profile-segment")
        j = io::to_json(families::segment_profile(Vec2(get("x0", -1.0), get("y0", 0.0)),
                                                  Vec2(get("x1", 1.0), get("y1", 0.0)), n_or(65)));
    else throw InvalidInput("unknown curve kind '" + k + "'");
    emit(j, a.out);
    return 0;
}

struct MakeFamilyArgs {
    std::string kind;
    std::string spine;
    double v0 = -2.0, v1 = 2.0;
    std::size_t samples = 0;
    std::string out;
};

int run_make_family(const MakeFamilyArgs& a) {
    PlaneFamily f;
    if (a.kind == "example1") {
        // kappa1 = -1, kappa2 = 0, lambda = v through the frame
        // q1 = (cos v, sin v, 0), t = (-sin v, cos v, 0) and p(0) = (0, 1, 0).
        const double v0 = a.v0;
        const FamilyCoefficients c{[](double) { return -1.0; }, [](double) { return 0.0; },
                                   [](double v) { return v; }};
        const Vec3 t0(-std::sin(v0), std::cos(v0), 0.0);
        const Vec3 q10(std::cos(v0), std::sin(v0), 0.0);
        const Vec3 p0(v0 * std::cos(v0) - std::sin(v0), v0 * std::sin(v0) + std::cos(v0), 0.0);
        f = from_coefficients(c, SampleGrid::uniform(v0, a.v1 - v0, a.samples ? a.samples : 2001, false), t0, q10, p0);
    } else if (a.kind == "spine") {
        if (a.spine.empty()) throw InvalidInput("make-family spine needs --spine");
        f = from_spine(io::spine_from_json(io::read_json_file(a.spine)), std::nullopt, a.samples);
    } else {
        throw InvalidInput("unknown family kind '" + a.kind + "'");
    }
    emit(io::to_json(f), a.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"monge-kit: generalized Monge surfaces from plane families and profiles"};
    app.require_subcommand(1);

    AnalyzeArgs an;
    auto* c_an = app.add_subcommand("analyze", "Total torsion, holonomy and Monge-cylinder verdict of a closed curve");
    c_an->add_option("curve", an.curve, "Curve JSON (or a synthesis result)")->required();
    c_an->add_option("--tol", an.tol, "Holonomy tolerance")->capture_default_str();
    c_an->add_option("--out", an.out, "Write the report here instead of stdout");

    SynthesizeArgs sy;
    auto* c_sy = app.add_subcommand("synthesize", "Closed spine from a binormal curve");
    c_sy->add_option("problem", sy.problem, "Problem JSON")->required();
    c_sy->add_option("--torsion-target", sy.torsion_target, "Total torsion (overrides the file)");
    c_sy->add_option("--out", sy.out, "Result JSON");
    c_sy->add_option("--max-iterations", sy.opt.max_iterations)->capture_default_str();
    c_sy->add_option("--kkt-tol", sy.opt.kkt_tolerance)->capture_default_str();
    c_sy->add_option("--closure-tol", sy.opt.closure_tolerance)->capture_default_str();
    c_sy->add_option("--trace-length-tol", sy.opt.trace_length_tolerance)->capture_default_str();

    SurfaceArgs su;
    auto* c_su = app.add_subcommand("surface", "Build, classify and mesh a Monge surface");
    c_su->add_option("--spine", su.spine, "Spine curve JSON (or a synthesis result)");
    c_su->add_option("--family", su.family, "Plane family JSON");
    c_su->add_option("--profile", su.profile, "Profile curve JSON (dim 2, unit speed)")->required();
    c_su->add_option("--nu", su.nu, "Mesh vertices along the profile")->capture_default_str();
    c_su->add_option("--nv", su.nv, "Mesh vertices along the family")->capture_default_str();
    c_su->add_option("--family-samples", su.family_samples, "Arc-length samples of the spine's family")
        ->capture_default_str();
    c_su->add_option("--diag-n", su.diag_n, "Grid size for margins, forms and the PGF check")->capture_default_str();
    c_su->add_option("--out-mesh", su.out_mesh, "OBJ output");
    c_su->add_option("--out-report", su.out_report, "JSON report output");
    c_su->add_flag("--allow-singular", su.allow_singular, "Mesh singular surfaces and annotate the singular locus");
    c_su->add_option("--closure-tol", su.closure_tol)->capture_default_str();
    c_su->add_option("--seam-tol", su.seam_tol)->capture_default_str();
    c_su->add_option("--pgf-tol", su.pgf_tol)->capture_default_str();
    c_su->add_option("--regularity-tol", su.regularity_tol, "Relative margin tolerance")->capture_default_str();

    std::string mc_path;
    bool mc_allow_boundary = false;
    auto* c_mc = app.add_subcommand("mesh-check", "Watertightness and orientability of an OBJ mesh");
    c_mc->add_option("mesh", mc_path, "OBJ file")->required();
    c_mc->add_flag("--allow-boundary", mc_allow_boundary, "Accept manifold meshes with boundary");

    MakeCurveArgs mk;
    auto* c_mk = app.add_subcommand("make-curve", "Write a test curve or profile");
    c_mk->add_option("kind", mk.kind,
                     "circle | torus-knot | viviani | random-sphere | great-circle | epicycle | profile-circle | "
                     "profile-ellipse | profile-rose | profile-figure8 | profile-segment")
        ->required();
    c_mk->add_option("--samples", mk.samples, "Sample count (0: default for the kind)");
    c_mk->add_option("--seed", mk.seed, "Seed for random-sphere")->capture_default_str();
    c_mk->add_option("--set", mk.set, "Shape parameter key=value (repeatable)");
    c_mk->add_option("--out", mk.out, "Output file (default stdout)");

    MakeFamilyArgs mf;
    auto* c_mf = app.add_subcommand("make-family", "Write a plane family");
    c_mf->add_option("kind", mf.kind, "example1 | spine")->required();
    c_mf->add_option("--spine", mf.spine, "Spine curve for kind spine");
    c_mf->add_option("--v0", mf.v0)->capture_default_str();
    c_mf->add_option("--v1", mf.v1)->capture_default_str();
    c_mf->add_option("--samples", mf.samples, "Sample count (0: default)");
    c_mf->add_option("--out", mf.out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*c_an) return run_analyze(an);
        if (*c_sy) return run_synthesize(sy);
        if (*c_su) return run_surface(su);
        if (*c_mc) return run_mesh_check(mc_path, mc_allow_boundary);
        if (*c_mk) return run_make_curve(mk);
        if (*c_mf) return run_make_family(mf);
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const SingularPoint& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 5;
    } catch (const GeometryError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const Infeasible& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
