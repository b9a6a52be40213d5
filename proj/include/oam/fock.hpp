#pragma once

#include <compare>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oam/errors.hpp"

namespace oam {

using Complex = std::complex<double>;
using PathId = std::int32_t;

inline constexpr double kNormTol = 1e-9;
inline constexpr double kAmpPrune = 1e-14;
inline constexpr std::int64_t kDefaultEllMax = 4096;

// Global |ell| bound; overridable at runtime (OAMSIM_LMAX in the CLI).
std::int64_t ell_max();
void set_ell_max(std::int64_t bound);

// One bosonic mode: a spatial path carrying winding number ell.
// Modes order lexicographically by (path, ell).
struct Mode {
    PathId path = 0;
    std::int64_t ell = 0;
    auto operator<=>(const Mode&) const = default;
};

struct ModeCount {
    Mode mode;
    std::int64_t count = 0;
    auto operator<=>(const ModeCount&) const = default;
};

// One Fock basis element: occupied modes, strictly increasing, counts >= 1.
// The empty list is the vacuum.
struct BasisState {
    std::vector<ModeCount> occ;
    auto operator<=>(const BasisState&) const = default;

    std::int64_t photon_count() const;
    std::int64_t occupancy(PathId path) const;  // photons on a path, any ell
    std::int64_t count_at(Mode m) const;
};

// Sorts and merges duplicate modes; rejects non-positive counts.
BasisState make_basis(std::vector<ModeCount> modes);

// Sparse state of fixed total photon number: canonical basis -> amplitude.
// Every element in the library preserves `photons`; amplitudes below
// kAmpPrune are dropped after each operation.
struct PureState {
    std::map<BasisState, Complex> terms;
    std::int64_t photons = 0;

    static PureState vacuum();

    double norm_sq() const;
    double norm() const;
    std::size_t term_count() const { return terms.size(); }
    Complex amplitude(const BasisState& b) const;  // zero when absent
};

struct QubitSpec {
    Complex alpha{1.0, 0.0};
    Complex beta{0.0, 0.0};
    PathId path_zero = 0;
    PathId path_one = 1;
};

// An (alpha, beta) pair with no path binding; pipelines and oracles take
// lists of these, most significant channel first.
struct QubitAmplitudes {
    Complex alpha{1.0, 0.0};
    Complex beta{0.0, 0.0};
};

PureState make_single_photon(PathId path, std::int64_t ell);
PureState make_qubit(const QubitSpec& spec);

// Product state; multiset union of occupations, amplitudes multiply.
// Coinciding modes simply add their occupation counts.
PureState tensor(const PureState& a, const PureState& b);

Complex inner_product(const PureState& a, const PureState& b);
double fidelity(const PureState& a, const PureState& b);  // |<a|b>|^2

// Probability of finding at least one photon in any mode of `path`.
double marginal_path_probability(const PureState& state, PathId path);

// Accumulates a term, enforcing the fixed-photon-number invariant.
void add_term(PureState& state, BasisState basis, Complex amp);
void prune(PureState& state, double threshold = kAmpPrune);
void normalize(PureState& state);

// Projects onto the subspace where `path` is occupied (or not), with exact
// renormalization. nullopt when the branch has no weight.
std::optional<PureState> project_path_occupancy(const PureState& state, PathId path,
                                                bool occupied);

// Removes one photon at (path, ell) that must appear, unentangled, in every
// term; used to strip parked qubit photons and terminal carriers.
PureState factor_out_photon(const PureState& state, PathId path, std::int64_t ell);

// Canonical text form: `path:ell:count` triples joined by `;`, sorted.
// The vacuum serializes to the empty string.
std::string basis_to_string(const BasisState& b);
BasisState basis_from_string(std::string_view text);

}  // namespace oam
