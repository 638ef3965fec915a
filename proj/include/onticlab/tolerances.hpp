#pragma once

namespace onticlab {

// Numerical tolerances used across the toolkit. Dimensions stay small
// (a few hundred at most), so double precision with these defaults is ample.
//
// zero / zero_guard bound probabilities, the rest bound amplitudes or
// matrix entries. The open interval (zero, zero_guard) is a forbidden band:
// a probability landing there raises AmbiguousZero instead of being
// silently classified.
struct Tolerances {
    double unitary = 1e-10;     // max |(U†U - I)_ij|
    double norm = 1e-12;        // | ||v||^2 - 1 |
    double zero = 1e-9;         // probability counted as zero
    double zero_guard = 1e-6;   // probabilities below this must be below `zero`
};

inline const Tolerances& default_tolerances() {
    static const Tolerances t{};
    return t;
}

} // namespace onticlab
