#pragma once

#include <stdexcept>
#include <string>

namespace holofib {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A coefficient evaluator produced NaN/Inf at a stencil or sample point.
struct NonFiniteEvaluation : Error {
    explicit NonFiniteEvaluation(const std::string& msg) : Error(msg) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

/// Curvature/pseudo-curvature requested where the defining condition fails.
struct NotRelativelyHolomorphic : Error {
    NotRelativelyHolomorphic(const std::string& msg, double defect_)
        : Error(msg), defect(defect_) {}
    double defect;
};

struct SingularFiberJacobian : Error {
    explicit SingularFiberJacobian(const std::string& msg) : Error(msg) {}
};

struct SingularMetric : Error {
    explicit SingularMetric(const std::string& msg) : Error(msg) {}
};

struct IncompleteTransport : Error {
    explicit IncompleteTransport(const std::string& msg) : Error(msg) {}
};

/// Twisted transforms refuse points where the two fiber complex structures coincide.
struct DegenerateTwist : Error {
    explicit DegenerateTwist(const std::string& msg) : Error(msg) {}
};

struct UnknownFamily : Error {
    explicit UnknownFamily(const std::string& msg) : Error(msg) {}
};

struct IndexOutOfRange : Error {
    explicit IndexOutOfRange(const std::string& msg) : Error(msg) {}
};

} // namespace holofib
