#include "oam/elements.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>

namespace oam {

namespace {

// factorials as exact doubles up to 18!, best-effort beyond
constexpr int kMaxFact = 40;

const std::array<double, kMaxFact>& factorials() {
    static const std::array<double, kMaxFact> table = [] {
        std::array<double, kMaxFact> t{};
        t[0] = 1.0;
        for (int i = 1; i < kMaxFact; ++i) t[i] = t[i - 1] * static_cast<double>(i);
        return t;
    }();
    return table;
}

double binomial(int n, int k) {
    const auto& f = factorials();
    return f[n] / (f[k] * f[n - k]);
}

// 2^(-total/2) without accumulating rounding when total is even
double inv_sqrt2_pow(int total) {
    if (total % 2 == 0) return std::ldexp(1.0, -total / 2);
    return std::ldexp(std::sqrt(0.5), -(total - 1) / 2);
}

// Applies an injective per-mode relabel plus a per-mode amplitude factor.
template <typename ModeFn, typename PhaseFn>
PureState transform_modes(const PureState& state, ModeFn&& mode_fn, PhaseFn&& phase_fn) {
    PureState out;
    out.photons = state.photons;
    for (const auto& [basis, amp] : state.terms) {
        std::vector<ModeCount> modes;
        modes.reserve(basis.occ.size());
        Complex factor{1.0, 0.0};
        for (const auto& mc : basis.occ) {
            factor *= phase_fn(mc.mode, mc.count);
            modes.push_back({mode_fn(mc.mode), mc.count});
        }
        add_term(out, make_basis(std::move(modes)), amp * factor);
    }
    prune(out);
    return out;
}

const Complex kOne{1.0, 0.0};

}  // namespace

PureState apply_hologram(const PureState& state, PathId path, std::int64_t delta_ell) {
    const std::int64_t bound = ell_max();
    return transform_modes(
        state,
        [&](Mode m) {
            if (m.path != path) return m;
            const std::int64_t shifted = m.ell + delta_ell;
            if (std::llabs(shifted) > bound)
                throw EllOutOfRange("apply_hologram: |ell + delta| exceeds bound");
            return Mode{m.path, shifted};
        },
        [](Mode, std::int64_t) { return kOne; });
}

PureState apply_dove(const PureState& state, PathId path, Angle alpha) {
    return transform_modes(
        state,
        [&](Mode m) { return m.path == path ? Mode{m.path, -m.ell} : m; },
        [&](Mode m, std::int64_t count) {
            return m.path == path ? alpha.phase(m.ell * count) : kOne;
        });
}

PureState apply_oam_flip(const PureState& state, PathId path) {
    return transform_modes(
        state,
        [&](Mode m) { return m.path == path ? Mode{m.path, -m.ell} : m; },
        [](Mode, std::int64_t) { return kOne; });
}

PureState apply_arm_phase(const PureState& state, PathId path, Angle alpha) {
    return transform_modes(
        state,
        [](Mode m) { return m; },
        [&](Mode m, std::int64_t count) {
            return m.path == path ? alpha.phase(m.ell * count) : kOne;
        });
}

PureState apply_oam_scale(const PureState& state, PathId path, std::int64_t factor) {
    if (factor < 1) throw Error("apply_oam_scale: factor must be >= 1");
    const std::int64_t bound = ell_max();
    return transform_modes(
        state,
        [&](Mode m) {
            if (m.path != path) return m;
            if (std::llabs(m.ell) > bound / factor)
                throw EllOutOfRange("apply_oam_scale: |factor * ell| exceeds bound");
            return Mode{m.path, m.ell * factor};
        },
        [](Mode, std::int64_t) { return kOne; });
}

PureState apply_dual_rail_cnot(const PureState& state, PathId control_path,
                               PathId target_a, PathId target_b) {
    if (control_path == target_a || control_path == target_b || target_a == target_b)
        throw Error("apply_dual_rail_cnot: paths must be pairwise distinct");
    PureState out;
    out.photons = state.photons;
    for (const auto& [basis, amp] : state.terms) {
        if (basis.occupancy(control_path) == 0) {
            add_term(out, basis, amp);
            continue;
        }
        std::vector<ModeCount> modes = basis.occ;
        for (auto& mc : modes) {
            if (mc.mode.path == target_a)
                mc.mode.path = target_b;
            else if (mc.mode.path == target_b)
                mc.mode.path = target_a;
        }
        add_term(out, make_basis(std::move(modes)), amp);
    }
    return out;
}

PureState apply_beamsplitter(const PureState& state, PathId path_up, PathId path_down) {
    if (path_up == path_down)
        throw Error("apply_beamsplitter: ports must differ");
    const auto& fact = factorials();
    PureState out;
    out.photons = state.photons;

    for (const auto& [basis, amp] : state.terms) {
        // split the term into spectator modes and per-ell port occupations
        std::vector<ModeCount> spectators;
        struct PortPair {
            std::int64_t ell;
            int n_up = 0;
            int n_down = 0;
        };
        std::vector<PortPair> pairs;
        for (const auto& mc : basis.occ) {
            if (mc.mode.path != path_up && mc.mode.path != path_down) {
                spectators.push_back(mc);
                continue;
            }
            auto it = std::find_if(pairs.begin(), pairs.end(),
                                   [&](const PortPair& p) { return p.ell == mc.mode.ell; });
            if (it == pairs.end()) {
                pairs.push_back({mc.mode.ell, 0, 0});
                it = pairs.end() - 1;
            }
            if (mc.mode.path == path_up)
                it->n_up = static_cast<int>(mc.count);
            else
                it->n_down = static_cast<int>(mc.count);
        }

        struct Branch {
            std::vector<ModeCount> modes;
            Complex coeff;
        };
        std::vector<Branch> branches{{spectators, amp}};

        // each ell transforms independently; expand the creation-operator
        // monomial (a_u^dag)^n_up (a_d^dag)^n_down under the port mixing
        for (const PortPair& p : pairs) {
            const int total = p.n_up + p.n_down;
            const double scale = inv_sqrt2_pow(total) /
                                 std::sqrt(fact[p.n_up] * fact[p.n_down]);
            std::vector<std::pair<int, double>> outcomes;  // (k_up, weight)
            for (int k_up = 0; k_up <= total; ++k_up) {
                const int k_down = total - k_up;
                double signed_sum = 0.0;
                for (int i = std::max(0, k_up - p.n_down);
                     i <= std::min(k_up, p.n_up); ++i) {
                    const int j = k_up - i;  // from the down operator
                    const double c = binomial(p.n_up, i) * binomial(p.n_down, j);
                    signed_sum += ((p.n_down - j) % 2 == 0) ? c : -c;
                }
                if (signed_sum == 0.0) continue;
                outcomes.emplace_back(
                    k_up, signed_sum * scale * std::sqrt(fact[k_up] * fact[k_down]));
            }

            std::vector<Branch> next;
            next.reserve(branches.size() * outcomes.size());
            for (const Branch& br : branches) {
                for (const auto& [k_up, weight] : outcomes) {
                    Branch nb = br;
                    if (k_up > 0)
                        nb.modes.push_back({Mode{path_up, p.ell}, k_up});
                    if (total - k_up > 0)
                        nb.modes.push_back({Mode{path_down, p.ell}, total - k_up});
                    nb.coeff *= weight;
                    next.push_back(std::move(nb));
                }
            }
            branches = std::move(next);
        }

        for (Branch& br : branches)
            add_term(out, make_basis(std::move(br.modes)), br.coeff);
    }
    prune(out);
    return out;
}

VacuumCheck assert_vacuum(const PureState& state, PathId path, double tol) {
    VacuumCheck check;
    check.path = path;
    check.tol = tol;
    check.probability = marginal_path_probability(state, path);
    check.pass = check.probability <= tol;
    return check;
}

double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

QndOutcome qnd_measure_path(const PureState& state, PathId path, std::mt19937_64& rng) {
    const double p_occupied = marginal_path_probability(state, path);
    const int bit = uniform_unit(rng) < p_occupied ? 1 : 0;
    auto projected = project_path_occupancy(state, path, bit == 1);
    if (!projected)
        throw Error("qnd_measure_path: sampled branch has zero weight");
    return QndOutcome{bit, std::move(*projected)};
}

QndOutcome qnd_measure_path(const PureState& state, PathId path, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return qnd_measure_path(state, path, rng);
}

PureState swap_paths(const PureState& state, PathId a, PathId b) {
    if (a == b) return state;
    return transform_modes(
        state,
        [&](Mode m) {
            if (m.path == a) return Mode{b, m.ell};
            if (m.path == b) return Mode{a, m.ell};
            return m;
        },
        [](Mode, std::int64_t) { return kOne; });
}

PureState apply_element(const PureState& state, const Element& element, ApplyContext ctx) {
    GateTally dummy;
    GateTally& tally = ctx.tally ? *ctx.tally : dummy;
    return std::visit(
        [&](const auto& el) -> PureState {
            using T = std::decay_t<decltype(el)>;
            if constexpr (std::is_same_v<T, Hologram>) {
                ++tally.hologram;
                return apply_hologram(state, el.path, el.delta_ell);
            } else if constexpr (std::is_same_v<T, DovePrism>) {
                ++tally.dove;
                return apply_dove(state, el.path, el.alpha);
            } else if constexpr (std::is_same_v<T, OamFlip>) {
                ++tally.oam_flip;
                return apply_oam_flip(state, el.path);
            } else if constexpr (std::is_same_v<T, Beamsplitter>) {
                ++tally.beamsplitter;
                return apply_beamsplitter(state, el.path_up, el.path_down);
            } else if constexpr (std::is_same_v<T, ArmPhase>) {
                ++tally.arm_phase;
                return apply_arm_phase(state, el.path, el.alpha);
            } else if constexpr (std::is_same_v<T, DualRailCnot>) {
                ++tally.cnot;
                return apply_dual_rail_cnot(state, el.control_path, el.target_a,
                                            el.target_b);
            } else if constexpr (std::is_same_v<T, OamScale>) {
                ++tally.oam_scale;
                return apply_oam_scale(state, el.path, el.factor);
            } else if constexpr (std::is_same_v<T, AssertVacuum>) {
                ++tally.vacuum_check;
                VacuumCheck check = assert_vacuum(state, el.path, el.tol);
                if (ctx.vacuum_checks) ctx.vacuum_checks->push_back(check);
                return state;
            } else {  // QndMeasure
                ++tally.qnd;
                if (!ctx.rng)
                    throw Error("apply_element: qnd measurement needs an rng");
                QndOutcome outcome = qnd_measure_path(state, el.path, *ctx.rng);
                if (ctx.qnd_bits) ctx.qnd_bits->push_back(outcome.bit);
                return std::move(outcome.state);
            }
        },
        element);
}

}  // namespace oam
