#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "holofib/families.hpp"

namespace holofib {

/// Tolerance tiers by numerical pathway: exact algebra < first-order finite
/// differences < nested second differences ~ ODE integration.
struct Tolerances {
    double algebraic = 1e-10;
    double first_fd = 1e-6;
    double second_fd = 1e-5;
    double ode = 1e-6;
};

struct SuiteConfig {
    std::string family;
    int samples = 50;
    std::uint64_t seed = 1;
    Tolerances tol;
    double base_box_radius = 1.0; // base coordinates in [-r,r] + i[-r,r]
    double fiber_radius = 2.0;
};

enum class Expectation { Below, Above };

struct CheckRecord {
    std::string id;
    std::string identity; // which identity the check evaluates
    int samples = 0;
    double max_defect = 0;
    double tolerance = 0;
    Expectation expect = Expectation::Below;
    bool pass = false;
};

struct VerificationReport {
    int schema_version = 1;
    std::string family;
    std::uint64_t seed = 0;
    int samples = 0;
    Tolerances tol;
    std::string compiler;
    std::string eigen_version;
    std::vector<CheckRecord> checks; // sorted by id
    bool pass = false;
};

/// Runs every check registered for the family. Deterministic given the seed;
/// identity failures are recorded, never thrown. Negative-control checks pass
/// exactly when their defect exceeds the tolerance. Throws UnknownFamily for
/// unrecognized ids.
VerificationReport run_suite(const SuiteConfig& config);

/// Stable-field-order JSON; defects and tolerances as decimal strings with 17
/// significant digits. The timestamp is optional so report bodies can be
/// compared byte-for-byte.
std::string report_serialize(const VerificationReport& report, bool with_timestamp = false);

} // namespace holofib
