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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace monge {

/// Base class of every error raised by the library. `kind()` is the stable
/// name used by the command line tool when reporting failures.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

/// Malformed input: bad sizes, non-monotone parameters, unparsable files.
class InvalidInput : public Error {
public:
    explicit InvalidInput(const std::string& what) : Error("InvalidInput", what) {}
};

/// Errors caused by a geometric precondition that does not hold.
class GeometryError : public Error {
public:
    using Error::Error;
};

class DegenerateCurve : public GeometryError {
public:
    explicit DegenerateCurve(const std::string& what) : GeometryError("DegenerateCurve", what) {}
};

class DegenerateTangent : public GeometryError {
public:
    explicit DegenerateTangent(const std::string& what)
        : GeometryError("DegenerateTangent", what) {}
};

class InflectionPoint : public GeometryError {
public:
    explicit InflectionPoint(std::size_t index)
        : GeometryError("InflectionPoint",
                        "curvature vanishes at sample " + std::to_string(index)),
          index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class NonPeriodicBinormal : public GeometryError {
public:
    explicit NonPeriodicBinormal(const std::string& what)
        : GeometryError("NonPeriodicBinormal", what) {}
};

class OpenCurve : public GeometryError {
public:
    explicit OpenCurve(const std::string& what) : GeometryError("OpenCurve", what) {}
};

class OutOfDomain : public GeometryError {
public:
    explicit OutOfDomain(const std::string& what) : GeometryError("OutOfDomain", what) {}
};

class SingularPoint : public GeometryError {
public:
    SingularPoint(double u, double v)
        : GeometryError("SingularPoint", "surface is singular at (u, v) = (" +
                                             std::to_string(u) + ", " + std::to_string(v) + ")"),
          u_(u), v_(v) {}

    double u() const noexcept { return u_; }
    double v() const noexcept { return v_; }

private:
    double u_;
    double v_;
};

class SeamMismatch : public GeometryError {
public:
    explicit SeamMismatch(const std::string& what) : GeometryError("SeamMismatch", what) {}
};

class NonPositiveSigma : public GeometryError {
public:
    explicit NonPositiveSigma(const std::string& what)
        : GeometryError("NonPositiveSigma", what) {}
};

class Infeasible : public Error {
public:
    explicit Infeasible(const std::string& what) : Error("Infeasible", what) {}
};

class NonConvergence : public Error {
public:
    explicit NonConvergence(const std::string& what) : Error("NonConvergence", what) {}
};

}  // namespace monge
