#pragma once

#include <optional>

#include "onticlab/scenario.hpp"

namespace onticlab {

// Configuration of the built-in Mach-Zehnder layouts.
//
// Layouts 1/2: a balanced source beamsplitter, a phase shifter in path a_1,
// an output beamsplitter and two detectors B_1, B_2 (Hilbert dimension 2).
// Layouts 3/4: an unbalanced source (alpha <= beta), plus a tap beamsplitter
// of transmissivity T in path a_1 feeding a third detector B_0 (dimension 3).
// The tap equalizes the surviving amplitudes, which requires sqrt(T)*beta
// == alpha.
//
// Every built scenario carries both preparations: "psi" (the source state
// alpha|a_0> + beta|a_1>) and "phi" (the state |a_0> injected directly).
// `phase`, when set, restricts CLI-facing reports to that shifter setting;
// the scenario itself always contains both members.
struct MziConfig {
    double alpha = 0.0;
    double beta = 0.0;
    bool with_bs3 = false;
    double transmissivity = 1.0;          // meaningful iff with_bs3
    std::optional<double> phase;          // 0 or pi, display filter only

    static MziConfig balanced();          // layouts 1 and 2
    static MziConfig tapped(double alpha2); // layouts 3 and 4, T = alpha^2/beta^2

    void validate(const Tolerances& tol = default_tolerances()) const;
};

inline constexpr const char* kMziMemberPhi0 = "phi=0";
inline constexpr const char* kMziMemberPhiPi = "phi=pi";

// Builds the interferometer as a QuantumScenario. Members "phi=0"/"phi=pi"
// of family "phase" are the full evolution between the preparation and the
// detector measurement (phase shifter, then the tap beamsplitter when
// present); the measurement "detectors" folds the output beamsplitter into
// its basis. Internal path lengths contribute no phase.
QuantumScenario build_mzi(const MziConfig& config,
                          const Tolerances& tol = default_tolerances());

// Zero structure of the built scenario.
ZeroStructure mzi_zero_table(const MziConfig& config,
                             const Tolerances& tol = default_tolerances());

// Scenario documents may request a builder instead of explicit matrices:
//   {"builder": "mzi", "figure": 3, "alpha2": 0.2}
// (figure optional when alpha2/with_bs3 are given directly). Plain scenario
// documents pass through scenario_from_json unchanged.
QuantumScenario scenario_from_document(const nlohmann::json& j,
                                       const Tolerances& tol = default_tolerances());
QuantumScenario load_scenario_document(const std::string& filename,
                                       const Tolerances& tol = default_tolerances());

} // namespace onticlab
