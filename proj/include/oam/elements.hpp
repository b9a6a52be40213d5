#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "oam/angle.hpp"
#include "oam/fock.hpp"

namespace oam {

inline constexpr double kVacuumTol = 1e-10;

// --- primitive element descriptions (the wire format of circuit files) ---

struct Hologram {
    PathId path = 0;
    std::int64_t delta_ell = 0;  // ell -> ell + delta_ell on `path`
};

struct DovePrism {
    PathId path = 0;
    Angle alpha = Angle::pi_over(1);  // ell -> -ell with phase e^{i ell alpha}
};

struct OamFlip {
    PathId path = 0;  // mirror: ell -> -ell, no phase
};

struct Beamsplitter {
    PathId path_up = 0;
    PathId path_down = 1;
};

struct ArmPhase {
    PathId path = 0;
    Angle alpha = Angle::pi_over(1);  // phase e^{i ell alpha}, ell preserved
};

struct DualRailCnot {
    PathId control_path = 0;
    PathId target_a = 1;
    PathId target_b = 2;
};

struct OamScale {
    PathId path = 0;
    std::int64_t factor = 1;  // ell -> factor * ell
};

struct AssertVacuum {
    PathId path = 0;
    double tol = kVacuumTol;
};

struct QndMeasure {
    PathId path = 0;
};

using Element = std::variant<Hologram, DovePrism, OamFlip, Beamsplitter, ArmPhase,
                             DualRailCnot, OamScale, AssertVacuum, QndMeasure>;

// Counters of applied elements, used to verify complexity claims.
struct GateTally {
    std::int64_t hologram = 0;
    std::int64_t dove = 0;
    std::int64_t oam_flip = 0;
    std::int64_t beamsplitter = 0;
    std::int64_t arm_phase = 0;
    std::int64_t cnot = 0;
    std::int64_t oam_scale = 0;
    std::int64_t vacuum_check = 0;
    std::int64_t qnd = 0;
    std::int64_t interferometer = 0;  // composite splitter-phase-splitter blocks
    std::int64_t classical_switch = 0;
};

inline GateTally& operator+=(GateTally& lhs, const GateTally& rhs) {
    lhs.hologram += rhs.hologram;
    lhs.dove += rhs.dove;
    lhs.oam_flip += rhs.oam_flip;
    lhs.beamsplitter += rhs.beamsplitter;
    lhs.arm_phase += rhs.arm_phase;
    lhs.cnot += rhs.cnot;
    lhs.oam_scale += rhs.oam_scale;
    lhs.vacuum_check += rhs.vacuum_check;
    lhs.qnd += rhs.qnd;
    lhs.interferometer += rhs.interferometer;
    lhs.classical_switch += rhs.classical_switch;
    return lhs;
}

struct VacuumCheck {
    PathId path = 0;
    double probability = 0.0;
    double tol = kVacuumTol;
    bool pass = true;
    std::string label;
};

struct QndOutcome {
    int bit = 0;
    PureState state;  // collapsed and renormalized
};

// --- element application; all return a new state ---

PureState apply_hologram(const PureState& state, PathId path, std::int64_t delta_ell);
PureState apply_dove(const PureState& state, PathId path, Angle alpha);
PureState apply_oam_flip(const PureState& state, PathId path);

// Creation operators transform by [[1, 1], [1, -1]]/sqrt(2) on (up, down)
// for each ell independently, with bosonic normalization for multiply
// occupied modes.
PureState apply_beamsplitter(const PureState& state, PathId path_up, PathId path_down);

PureState apply_arm_phase(const PureState& state, PathId path, Angle alpha);

// Swaps target_a <-> target_b in every term that has at least one photon
// anywhere on the control path. A pure relabeling of the basis.
PureState apply_dual_rail_cnot(const PureState& state, PathId control_path,
                               PathId target_a, PathId target_b);

PureState apply_oam_scale(const PureState& state, PathId path, std::int64_t factor);

// Report-style detector check: does not modify the state.
VacuumCheck assert_vacuum(const PureState& state, PathId path, double tol = kVacuumTol);

// Samples path occupancy with the Born probability and collapses onto the
// matching subspace; superpositions within the surviving path are kept.
QndOutcome qnd_measure_path(const PureState& state, PathId path, std::mt19937_64& rng);
QndOutcome qnd_measure_path(const PureState& state, PathId path, std::uint64_t seed);

// Unconditional path relabel (the classical switch of the QND sorter).
PureState swap_paths(const PureState& state, PathId a, PathId b);

// Deterministic uniform draw in [0, 1); identical across platforms for a
// given engine state.
double uniform_unit(std::mt19937_64& rng);

struct ApplyContext {
    GateTally* tally = nullptr;
    std::mt19937_64* rng = nullptr;
    std::vector<VacuumCheck>* vacuum_checks = nullptr;
    std::vector<int>* qnd_bits = nullptr;
};

// Dispatches one element description, updating whatever the context carries.
PureState apply_element(const PureState& state, const Element& element,
                        ApplyContext ctx = {});

}  // namespace oam
