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

// JSON exchange formats: curves, frames, plane families, synthesis problems
// and results, and the report sidecar written next to meshes. Doubles are
// written in shortest round-trip form, so reading a file back gives the
// same bits.

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "monge/mesh.hpp"
#include "monge/monge.hpp"
#include "monge/spine_synth.hpp"

namespace monge::io {

using json = nlohmann::ordered_json;

namespace detail {

inline const json& field(const json& j, const char* key) {
    if (!j.is_object()) throw InvalidInput("expected a JSON object");
    const auto it = j.find(key);
    if (it == j.end()) throw InvalidInput(std::string("missing field '") + key + "'");
    return *it;
}

inline double number(const json& j, const char* what) {
    if (!j.is_number()) throw InvalidInput(std::string("'") + what + "' must be a number");
    return j.get<double>();
}

inline double number_field(const json& j, const char* key) { return number(field(j, key), key); }

inline std::optional<double> optional_number(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return number(*it, key);
}

template <class T>
T optional_value(const json& j, const char* key, T fallback) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InvalidInput(std::string("field '") + key + "' has the wrong type");
    }
}

inline std::vector<double> numbers(const json& j, const char* key) {
    const json& a = field(j, key);
    if (!a.is_array()) throw InvalidInput(std::string("'") + key + "' must be an array");
    std::vector<double> out;
    out.reserve(a.size());
    for (const auto& x : a) out.push_back(number(x, key));
    return out;
}

template <int D>
std::vector<Eigen::Matrix<double, D, 1>> points(const json& j, const char* key) {
    const json& a = field(j, key);
    if (!a.is_array()) throw InvalidInput(std::string("'") + key + "' must be an array");
    std::vector<Eigen::Matrix<double, D, 1>> out;
    out.reserve(a.size());
    for (const auto& p : a) {
        if (!p.is_array() || p.size() != static_cast<std::size_t>(D))
            throw InvalidInput(std::string("'") + key + "' entries must have " + std::to_string(D) + " coordinates");
        Eigen::Matrix<double, D, 1> v;
        for (int k = 0; k < D; ++k) v[k] = number(p[static_cast<std::size_t>(k)], key);
        out.push_back(v);
    }
    return out;
}

template <class V>
json point_array(const std::vector<V>& pts) {
    json a = json::array();
    for (const auto& p : pts) {
        json q = json::array();
        for (int k = 0; k < p.size(); ++k) q.push_back(p[k]);
        a.push_back(std::move(q));
    }
    return a;
}

inline SampleGrid grid_from(const json& j) {
    const bool closed = field(j, "closed").get<bool>();
    const double period = closed ? number_field(j, "period") : 0.0;
    return SampleGrid(numbers(j, "params"), closed, period);
}

inline void put_grid(json& j, const SampleGrid& g) {
    j["closed"] = g.closed();
    if (g.closed()) j["period"] = g.period();
    j["params"] = g.params();
}

}  // namespace detail

/// Parses a JSON file; parse errors become InvalidInput.
inline json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(path.string() + ": " + e.what());
    }
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

// ---- curves -------------------------------------------------------------

inline json to_json(const SampledCurve3& c) {
    json j;
    j["dim"] = 3;
    detail::put_grid(j, c.grid());
    j["samples"] = detail::point_array(c.samples());
    return j;
}

inline json to_json(const PlaneCurve& c) {
    json j;
    j["dim"] = 2;
    detail::put_grid(j, c.grid());
    j["samples"] = detail::point_array(c.samples());
    if (c.symmetry_order()) j["symmetry_order"] = *c.symmetry_order();
    return j;
}

/// Curve plus its frame: per-sample t, q1, q2 and the holonomy angle.
inline json to_json(const MovingFrame& f) {
    json j = to_json(f.curve);
    json fr;
    fr["t"] = detail::point_array(f.t);
    fr["q1"] = detail::point_array(f.q1);
    fr["q2"] = detail::point_array(f.q2);
    fr["holonomy_angle"] = f.holonomy_angle ? json(*f.holonomy_angle) : json(nullptr);
    j["frame"] = std::move(fr);
    return j;
}

inline int curve_dim(const json& j) {
    const int d = detail::field(j, "dim").get<int>();
    if (d != 2 && d != 3) throw InvalidInput("'dim' must be 2 or 3");
    return d;
}

inline SampledCurve3 curve3_from_json(const json& j) {
    try {
        if (curve_dim(j) != 3) throw InvalidInput("expected a 3D curve (dim 3)");
        return SampledCurve3(detail::points<3>(j, "samples"), detail::grid_from(j));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("curve: ") + e.what());
    }
}

inline PlaneCurve plane_curve_from_json(const json& j) {
    try {
        if (curve_dim(j) != 2) throw InvalidInput("expected a plane curve (dim 2)");
        std::optional<int> order;
        if (j.contains("symmetry_order") && !j["symmetry_order"].is_null())
            order = j["symmetry_order"].get<int>();
        return PlaneCurve(detail::points<2>(j, "samples"), detail::grid_from(j), order);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("profile: ") + e.what());
    }
}

inline MovingFrame frame_from_json(const json& j) {
    MovingFrame f;
    f.curve = curve3_from_json(j);
    const json& fr = detail::field(j, "frame");
    f.t = detail::points<3>(fr, "t");
    f.q1 = detail::points<3>(fr, "q1");
    f.q2 = detail::points<3>(fr, "q2");
    const std::size_t n = f.curve.size();
    if (f.t.size() != n || f.q1.size() != n || f.q2.size() != n)
        throw InvalidInput("frame fields differ in length from the curve");
    if (fr.contains("holonomy_angle") && !fr["holonomy_angle"].is_null())
        f.holonomy_angle = detail::number_field(fr, "holonomy_angle");
    return f;
}

// ---- plane families -----------------------------------------------------

inline json to_json(const PlaneFamily& f) {
    json j;
    detail::put_grid(j, f.grid());
    if (f.closed()) j["monodromy"] = f.monodromy();
    j["p"] = detail::point_array(f.p());
    j["t"] = detail::point_array(f.t());
    j["q1"] = detail::point_array(f.q1());
    j["q2"] = detail::point_array(f.q2());
    j["kappa1"] = f.kappa1();
    j["kappa2"] = f.kappa2();
    j["lambda"] = f.lambda();
    return j;
}

inline PlaneFamily family_from_json(const json& j) {
    try {
        return PlaneFamily(detail::grid_from(j), detail::points<3>(j, "p"), detail::points<3>(j, "t"),
                           detail::points<3>(j, "q1"), detail::points<3>(j, "q2"), detail::numbers(j, "kappa1"),
                           detail::numbers(j, "kappa2"), detail::numbers(j, "lambda"),
                           detail::optional_value<double>(j, "monodromy", 0.0));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("family: ") + e.what());
    }
}

// ---- synthesis problems -------------------------------------------------

/// Analytic binormal by name: great_circle, epicycle {scale, a, m},
/// figure8 {scale}, latitude {phi0, amp, m}, viviani, random {seed}.
inline BinormalCurve binormal_from_generator(const json& j) {
    const std::string name = detail::field(j, "generator").get<std::string>();
    const std::size_t n = detail::optional_value<std::size_t>(j, "samples", 1024);
    double period = kTwoPi;
    CurveJetFn f;
    if (name == "great_circle") {
        f = families::great_circle();
    } else if (name == "epicycle") {
        f = families::gnomonic_epicycle(detail::number_field(j, "scale"), detail::optional_value(j, "a", 0.5),
                                        detail::optional_value(j, "m", 4));
    } else if (name == "figure8") {
        f = families::gnomonic_figure8(detail::number_field(j, "scale"));
    } else if (name == "latitude") {
        f = families::latitude_oscillation(detail::number_field(j, "phi0"), detail::number_field(j, "amp"),
                                           detail::optional_value(j, "m", 3));
    } else if (name == "viviani") {
        f = families::viviani();
        period = 2.0 * kTwoPi;
    } else if (name == "random") {
        f = families::random_sphere_curve(detail::optional_value<std::uint64_t>(j, "seed", 1));
    } else {
        throw InvalidInput("unknown binormal generator '" + name + "'");
    }
    return BinormalCurve::from_analytic(f, period, n);
}

/// Shape family by name: epicycle {a, m}, figure8, latitude {phi0, m}.
inline BinormalFamily binormal_family_from_json(const json& j) {
    const std::string name = detail::field(j, "name").get<std::string>();
    const std::size_t n = detail::optional_value<std::size_t>(j, "samples", 1024);
    if (name == "epicycle")
        return epicycle_family(detail::optional_value(j, "a", 0.5), detail::optional_value(j, "m", 4), n);
    if (name == "figure8") return figure8_family(n);
    if (name == "latitude")
        return latitude_family(detail::number_field(j, "phi0"), detail::optional_value(j, "m", 3), n);
    throw InvalidInput("unknown binormal family '" + name + "'");
}

/// {type: "trig", n} or {type: "trig", harmonics: [...]} or
/// {type: "bspline", n, degree}.
inline PeriodicBasis basis_from_json(const json& j, double period) {
    const std::string type = detail::field(j, "type").get<std::string>();
    if (type == "trig") {
        if (j.contains("harmonics")) return PeriodicBasis::trig_harmonics(j["harmonics"].get<std::vector<int>>(), period);
        return PeriodicBasis::trig(detail::field(j, "n").get<std::size_t>(), period);
    }
    if (type == "bspline")
        return PeriodicBasis::bspline(detail::field(j, "n").get<std::size_t>(), detail::optional_value(j, "degree", 3),
                                      period);
    throw InvalidInput("unknown basis type '" + type + "'");
}

inline json to_json(const PeriodicBasis& b) {
    json j;
    if (b.kind() == PeriodicBasis::Kind::Trig) {
        j["type"] = "trig";
        j["n"] = b.size();
        j["harmonics"] = b.harmonics();
    } else {
        j["type"] = "bspline";
        j["n"] = b.size();
        j["degree"] = b.degree();
    }
    j["period"] = b.period();
    return j;
}

struct ProblemSpec {
    SpineSynthesisProblem problem;
    std::optional<double> torsion_target;
};

/// Problem file. The binormal is an inline curve, {"file": path} (relative
/// to `base_dir`) or {"generator": name, ...}; with a torsion target a
/// "family" object names the shape family that is scaled to meet it.
/// `torsion_target` overrides the file's value.
inline ProblemSpec problem_from_json(const json& j, const std::filesystem::path& base_dir = {},
                                     std::optional<double> torsion_target = std::nullopt) {
    try {
        ProblemSpec spec;
        spec.torsion_target = torsion_target ? torsion_target : detail::optional_number(j, "torsion_target");
        if (j.contains("family")) spec.problem.family = binormal_family_from_json(j["family"]);
        double period = spec.problem.family ? spec.problem.family->period : kTwoPi;
        if (j.contains("binormal")) {
            const json& b = j["binormal"];
            if (b.contains("file")) {
                const std::filesystem::path p = base_dir / b["file"].get<std::string>();
                spec.problem.binormal = BinormalCurve(curve3_from_json(read_json_file(p)));
            } else if (b.contains("generator")) {
                spec.problem.binormal = binormal_from_generator(b);
            } else {
                spec.problem.binormal = BinormalCurve(curve3_from_json(b));
            }
            period = spec.problem.binormal.period();
        } else if (!(spec.torsion_target && spec.problem.family)) {
            throw InvalidInput("problem needs a binormal, or a family with a torsion target");
        }
        spec.problem.basis = j.contains("basis") ? basis_from_json(j["basis"], period) : PeriodicBasis::trig(11, period);
        spec.problem.length_target = detail::optional_value(j, "length_target", 1.0);
        spec.problem.sigma_min = detail::optional_number(j, "sigma_min");
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("problem: ") + e.what());
    }
}

inline json to_json(const SynthesisResult& r) {
    json j;
    j["coefficients"] = std::vector<double>(r.coefficients.data(), r.coefficients.data() + r.coefficients.size());
    j["basis"] = to_json(r.basis);
    json s;
    s["params"] = r.binormal.grid().params();
    s["values"] = r.sigma;
    j["sigma"] = std::move(s);
    j["spine"] = to_json(r.spine);
    j["binormal"] = to_json(r.binormal.curve());
    json d;
    d["length_target"] = r.length_target;
    d["sigma_min"] = r.sigma_min;
    d["trace_length"] = r.trace_length;
    d["achieved_total_torsion"] = r.achieved_total_torsion ? json(*r.achieved_total_torsion) : json(nullptr);
    d["energy"] = r.energy;
    d["closing_residual"] = r.closing_residual;
    d["feasibility_margin"] = r.feasibility_margin;
    d["kkt_residual"] = r.kkt_residual;
    d["min_multiplier"] = r.min_multiplier;
    d["active_set"] = r.active_set;
    d["iterations"] = r.iterations;
    d["minimizer_unique"] = r.minimizer_unique;
    d["family_scale"] = r.family_scale ? json(*r.family_scale) : json(nullptr);
    j["diagnostics"] = std::move(d);
    return j;
}

/// Spine stored in a curve file or in a synthesis result file.
inline SampledCurve3 spine_from_json(const json& j) {
    if (j.is_object() && j.contains("spine")) return curve3_from_json(j["spine"]);
    return curve3_from_json(j);
}

// ---- reports ------------------------------------------------------------

inline json to_json(const Rational& r) { return json{{"k", r.k}, {"n", r.n}, {"error", r.error}}; }

inline json to_json(const ProfileMap& m) {
    return json{{"kind", m.kind == ProfileMap::Kind::shift ? "shift" : "reversal"},
                {"offset", m.offset},
                {"residual", m.residual}};
}

template <class T>
json optional_json(const std::optional<T>& x) {
    if (!x) return nullptr;
    if constexpr (std::is_arithmetic_v<T>) return *x;
    else return to_json(*x);
}

inline json to_json(const ClosureReport& r) {
    json j;
    j["kind"] = to_string(r.kind);
    j["total_torsion"] = optional_json(r.total_torsion);
    j["holonomy"] = r.holonomy;
    j["holonomy_ratio"] = optional_json(r.holonomy_ratio);
    j["profile_symmetry_order"] = optional_json(r.profile_symmetry_order);
    j["covering_degree"] = optional_json(r.covering_degree);
    j["seam"] = optional_json(r.seam);
    j["parallels_close"] = r.parallels_close;
    j["note"] = r.note;
    return j;
}

inline json to_json(const CylinderReport& r) {
    json j;
    j["total_torsion"] = r.total_torsion;
    j["trace_length"] = r.trace_length;
    j["holonomy"] = r.holonomy;
    j["torsion_ratio"] = optional_json(r.torsion_ratio);
    j["monge_cylinder"] = r.is_cylinder;
    return j;
}

inline json to_json(const MeshCheck& c) {
    json j;
    j["vertices"] = c.vertices;
    j["faces"] = c.faces;
    j["edges"] = c.edges;
    j["boundary_edges"] = c.boundary_edges;
    j["nonmanifold_edges"] = c.nonmanifold_edges;
    j["degenerate_faces"] = c.degenerate_faces;
    j["watertight"] = c.watertight;
    j["orientable"] = c.orientable;
    j["consistently_oriented"] = c.consistently_oriented;
    j["euler_characteristic"] = c.euler_characteristic;
    return j;
}

inline json to_json(const PgfReport& r) {
    return json{{"planarity_residual", r.planarity_residual},
                {"geodesic_residual", r.geodesic_residual},
                {"normal_residual", r.normal_residual},
                {"pgf", r.pgf}};
}

/// Summary of a margin sweep: range, verdict and the zero set with the
/// surface points on it.
inline json to_json(const MarginReport& r, const MongeSurface* s = nullptr) {
    json j;
    j["min"] = r.min;
    j["max"] = r.max;
    j["regular"] = r.regular;
    json zs = json::array();
    for (const Vec2& z : r.zero_set) {
        json e{{"u", z[0]}, {"v", z[1]}};
        if (s) e["point"] = detail::point_array(std::vector<Vec3>{s->evaluate(z[0], z[1])})[0];
        zs.push_back(std::move(e));
    }
    j["zero_set"] = std::move(zs);
    return j;
}

}  // namespace monge::io
