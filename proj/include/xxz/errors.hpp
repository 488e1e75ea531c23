#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace xxz {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad construction arguments (invalid sizes, malformed graphs, index ranges).
struct InvalidArgument : Error {
    using Error::Error;
};

// |Delta| < 1 on an edge where a nontrivial factorized solution is required.
struct InfeasibleAnisotropy : Error {
    using Error::Error;
};

// A sign assignment is not single-valued around some cycle of the graph.
struct LoopInconsistency : Error {
    LoopInconsistency(std::string msg, std::vector<int> cycle)
        : Error(std::move(msg)), cycle_sites(std::move(cycle)) {}
    std::vector<int> cycle_sites;  // closed walk of site indices witnessing the violation
};

// Hilbert-space budget exceeded (CLI exit code 4).
struct BudgetExceeded : Error {
    using Error::Error;
};

// Scenario file / schema problems (CLI exit code 3).
struct ScenarioError : Error {
    using Error::Error;
};

}  // namespace xxz
