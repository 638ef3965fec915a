#pragma once

#include "onticlab/ontology.hpp"

namespace onticlab {

// Four-state toy bit: epistemic states are uniform over pairs of ontic
// states, transformations are permutations, measurements coarse-grain over
// pairs. Bound to a qubit scenario where "swap" corresponds to the phase
// gate diag(1,-1): it fixes the |0>-analog state while permuting the ontic
// states underneath it.
//
// Ships the three named analogs (zero, plus, minus); the remaining
// pair-supported epistemic states are an extension point.
struct ToyBitModel {
    OntologicalModel model;
};

// Field-ontology interferometer model: one (occupation, phase) pair per
// path, 16 ontic states, 8 of them in the single-particle sector. The
// phase shifter flips the phase variable of path a_1 regardless of
// occupation, so it moves ontic states even when the quantum state |a_0>
// is untouched. Bound to the balanced two-detector interferometer scenario.
struct FieldPathModel {
    OntologicalModel model;
};

ToyBitModel toy_bit();
FieldPathModel field_path_mzi();

// Per-path ontic variables of the field model.
struct PathState {
    int occupation = 0;  // 0 or 1
    int phase = 0;       // 0 or 1, meaning phase 0 or pi
    auto operator<=>(const PathState&) const = default;
};

// Deterministic local beamsplitter update on the pair of paths that meet.
// Bijective on the 16 joint states; in the single-particle sector the
// particle exits the first port when the paths are in phase and the second
// when they are out of phase.
std::pair<PathState, PathState> beamsplitter_update(PathState a0, PathState a1);

std::string field_label(PathState a0, PathState a1);

} // namespace onticlab
