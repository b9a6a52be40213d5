#include "oam/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

namespace oam {

namespace {

bool is_power_of_two(std::int64_t v) { return v >= 1 && (v & (v - 1)) == 0; }

void bump(GateTally* tally, std::int64_t GateTally::*field, std::int64_t by = 1) {
    if (tally) tally->*field += by;
}

// qubits lists are most significant channel first
const QubitAmplitudes& channel_amps(const std::vector<QubitAmplitudes>& qubits, int n,
                                    int channel) {
    return qubits[static_cast<std::size_t>(n - 1 - channel)];
}

std::vector<int> default_order(int n, bool descending) {
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    if (descending) std::reverse(order.begin(), order.end());
    return order;
}

void check_order(const std::vector<int>& requested, int n, bool descending,
                 OrderCheck check, const char* what) {
    if (requested.empty() || check == OrderCheck::permissive) return;
    if (requested != default_order(n, descending))
        throw OrderViolation(std::string(what) +
                             ": blocks must run in the prescribed index order");
}

// photons on the carrier pair must sit entirely on `up`, one per term
void check_carrier_shape(const PureState& state, PathId up, PathId down,
                         const char* what) {
    for (const auto& [basis, amp] : state.terms) {
        if (basis.occupancy(up) != 1 || basis.occupancy(down) != 0)
            throw Error(std::string(what) +
                        ": expected exactly one carrier photon on the upper path");
    }
}

}  // namespace

int ceil_log2(std::int64_t m) {
    if (m < 1) throw Error("ceil_log2: argument must be >= 1");
    int k = 0;
    while ((std::int64_t{1} << k) < m) ++k;
    return k;
}

ChannelPlan ChannelPlan::standard(int n) {
    if (n < 0) throw Error("ChannelPlan::standard: negative channel count");
    ChannelPlan plan;
    plan.n = n;
    plan.carrier_up = 0;
    plan.carrier_down = 1;
    for (int i = 0; i < n; ++i)
        plan.qubit_paths.emplace_back(static_cast<PathId>(2 + 2 * i),
                                      static_cast<PathId>(3 + 2 * i));
    return plan;
}

std::pair<PathId, PathId> ChannelPlan::qubit(int i) const {
    if (i < 0 || i >= static_cast<int>(qubit_paths.size()))
        throw Error("ChannelPlan::qubit: channel index out of range");
    return qubit_paths[static_cast<std::size_t>(i)];
}

void validate_plan(const ChannelPlan& plan) {
    std::vector<PathId> all{plan.carrier_up, plan.carrier_down};
    for (const auto& [q0, q1] : plan.qubit_paths) {
        all.push_back(q0);
        all.push_back(q1);
    }
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end())
        throw Error("validate_plan: paths must be pairwise distinct");
    if (static_cast<int>(plan.qubit_paths.size()) != plan.n)
        throw Error("validate_plan: channel count does not match path table");
}

bool is_multiplexed(const PureState& state, PathId carrier, int j, int n) {
    const std::int64_t stride = std::int64_t{1} << j;
    const std::int64_t bound = std::int64_t{1} << n;
    for (const auto& [basis, amp] : state.terms) {
        for (const auto& mc : basis.occ) {
            if (mc.mode.path != carrier) continue;
            if (mc.mode.ell < 0 || mc.mode.ell >= bound || mc.mode.ell % stride != 0)
                return false;
        }
    }
    return true;
}

PureState sorting_interferometer(const PureState& state, PathId up, PathId down,
                                 std::int64_t K, GateTally* tally) {
    if (K == 0) throw Error("sorting_interferometer: K must be nonzero");
    PureState out = apply_beamsplitter(state, up, down);
    out = apply_arm_phase(out, down, Angle::pi_over(K));
    out = apply_beamsplitter(out, up, down);
    bump(tally, &GateTally::beamsplitter, 2);
    bump(tally, &GateTally::arm_phase);
    bump(tally, &GateTally::interferometer);
    return out;
}

PureState converter(const PureState& state, PathId q0, PathId q1, std::int64_t delta,
                    const ConverterOptions& options, GateTally* tally) {
    if (!is_power_of_two(delta))
        throw Error("converter: delta must be a power of two");
    if (options.final_hologram && delta < 2)
        throw Error("converter: re-centering needs delta >= 2");
    if (options.check == OrderCheck::enforce) {
        double bad = 0.0;
        for (const auto& [basis, amp] : state.terms) {
            const std::int64_t on_pair = basis.occupancy(q0) + basis.occupancy(q1);
            const bool ok = on_pair == 1 && (basis.count_at(Mode{q0, 0}) +
                                             basis.count_at(Mode{q1, 0})) == 1;
            if (!ok) bad += std::norm(amp);
        }
        if (bad > options.input_tol)
            throw InputNotDualRail("converter: off-rail probability " +
                                   std::to_string(bad));
    }
    PureState out = apply_hologram(state, q1, delta);
    bump(tally, &GateTally::hologram);
    out = sorting_interferometer(out, q0, q1, delta, tally);
    if (options.final_hologram) {
        out = apply_hologram(out, q0, -delta / 2);
        bump(tally, &GateTally::hologram);
    }
    return out;
}

PureState merger(const PureState& state, PathId up, PathId down, int j,
                 OrderCheck check, GateTally* tally) {
    if (j < 0) throw Error("merger: negative band index");
    const std::int64_t band = std::int64_t{1} << j;
    if (check == OrderCheck::enforce) {
        for (const auto& [basis, amp] : state.terms) {
            std::int64_t down_photons = 0;
            for (const auto& mc : basis.occ) {
                const std::int64_t mag = std::llabs(mc.mode.ell);
                if (mc.mode.path == down) {
                    down_photons += mc.count;
                    if (mag != band)
                        throw OrderViolation(
                            "merger: lower port must carry the band-j qubit");
                } else if (mc.mode.path == up) {
                    if (!is_power_of_two(mag) || mag <= band)
                        throw OrderViolation(
                            "merger: upper port may only hold bands above j");
                }
            }
            if (down_photons != 1)
                throw OrderViolation("merger: lower port must hold exactly one photon");
        }
    }
    return sorting_interferometer(state, up, down, band, tally);
}

CombinerResult combiner_pipeline(const std::vector<QubitAmplitudes>& qubits, int n) {
    return combiner_pipeline(qubits, ChannelPlan::standard(n));
}

CombinerResult combiner_pipeline(const std::vector<QubitAmplitudes>& qubits,
                                 const ChannelPlan& plan) {
    validate_plan(plan);
    const int n = plan.n;
    if (n < 1) throw Error("combiner_pipeline: need at least one channel");
    if (static_cast<int>(qubits.size()) != n)
        throw Error("combiner_pipeline: qubit count does not match plan");

    CombinerResult result;
    PureState state = PureState::vacuum();
    for (int i = n - 1; i >= 0; --i) {
        const auto [q0, q1] = plan.qubit(i);
        const auto& amps = channel_amps(qubits, n, i);
        state = tensor(state, make_qubit({amps.alpha, amps.beta, q0, q1}));
    }
    for (int i = n - 1; i >= 0; --i) {
        const auto [q0, q1] = plan.qubit(i);
        state = converter(state, q0, q1, std::int64_t{1} << (i + 1), {},
                          &result.tally);
    }
    const PathId merged = plan.qubit(n - 1).first;
    for (int i = n - 2; i >= 0; --i)
        state = merger(state, merged, plan.qubit(i).first, i, OrderCheck::enforce,
                       &result.tally);
    result.state = std::move(state);
    result.output_path = merged;
    return result;
}

PureState mux_block(const PureState& state, const ChannelPlan& plan, int i,
                    OrderCheck check, GateTally* tally) {
    const auto [q0, q1] = plan.qubit(i);
    const PathId u = plan.carrier_up;
    const PathId d = plan.carrier_down;
    if (check == OrderCheck::enforce && !is_multiplexed(state, u, i + 1, plan.n))
        throw OrderViolation(
            "mux_block: carrier not a multiple of 2^(i+1); most significant "
            "channels must be added first");

    PureState out = apply_dual_rail_cnot(state, q1, u, d);
    out = apply_hologram(out, d, std::int64_t{1} << i);
    out = apply_dual_rail_cnot(out, d, q0, q1);
    bump(tally, &GateTally::cnot, 2);
    bump(tally, &GateTally::hologram);
    return sorting_interferometer(out, u, d, std::int64_t{1} << i, tally);
}

PureState demux_block(const PureState& state, const ChannelPlan& plan, int i,
                      OrderCheck check, GateTally* tally) {
    const auto [q0, q1] = plan.qubit(i);
    const PathId u = plan.carrier_up;
    const PathId d = plan.carrier_down;
    if (check == OrderCheck::enforce && !is_multiplexed(state, u, i, plan.n))
        throw OrderViolation(
            "demux_block: carrier not a multiple of 2^i; extraction must start "
            "from the least significant channel");

    PureState out = sorting_interferometer(state, u, d, std::int64_t{1} << i, tally);
    out = apply_dual_rail_cnot(out, d, q0, q1);
    out = apply_hologram(out, d, -(std::int64_t{1} << i));
    out = apply_dual_rail_cnot(out, q1, u, d);
    bump(tally, &GateTally::cnot, 2);
    bump(tally, &GateTally::hologram);
    return out;
}

MuxResult mux_pipeline(const std::vector<QubitAmplitudes>& qubits, int n,
                       const MuxOptions& options) {
    return mux_pipeline(qubits, ChannelPlan::standard(n), options);
}

MuxResult mux_pipeline(const std::vector<QubitAmplitudes>& qubits,
                       const ChannelPlan& plan, const MuxOptions& options) {
    const int n = plan.n;
    if (n < 1) throw Error("mux_pipeline: need at least one channel");
    if (static_cast<int>(qubits.size()) != n)
        throw Error("mux_pipeline: qubit count does not match plan");

    PureState state = options.recycle_first
                          ? PureState::vacuum()
                          : make_single_photon(plan.carrier_up, 0);
    for (int i = 0; i < n; ++i) {
        const auto& amps = channel_amps(qubits, n, i);
        if (options.recycle_first && i == n - 1) {
            // the most significant qubit's photon becomes the carrier
            state = tensor(state, make_qubit({amps.alpha, amps.beta, plan.carrier_up,
                                              plan.carrier_down}));
        } else {
            const auto [q0, q1] = plan.qubit(i);
            state = tensor(state, make_qubit({amps.alpha, amps.beta, q0, q1}));
        }
    }
    return mux_pipeline_on_state(std::move(state), plan, options);
}

MuxResult mux_pipeline_on_state(PureState state, const ChannelPlan& plan,
                                const MuxOptions& options) {
    validate_plan(plan);
    const int n = plan.n;
    if (n < 1) throw Error("mux_pipeline: need at least one channel");
    check_order(options.order, n, /*descending=*/true, options.check, "mux_pipeline");
    const std::vector<int> order =
        options.order.empty() ? default_order(n, true) : options.order;

    MuxResult result;
    for (int i : order) {
        if (options.recycle_first && i == n - 1) {
            state = converter(state, plan.carrier_up, plan.carrier_down,
                              std::int64_t{1} << (n - 1),
                              {.final_hologram = false, .check = options.check},
                              &result.tally);
        } else {
            state = mux_block(state, plan, i, options.check, &result.tally);
        }
    }

    // every qubit photon must now be parked at (q_i0, 0), detectably absent
    // from q_i1; the lower carrier arm must be empty too
    for (int i = n - 1; i >= 0; --i) {
        if (options.recycle_first && i == n - 1) continue;
        VacuumCheck check = assert_vacuum(state, plan.qubit(i).second);
        check.label = "mux q" + std::to_string(i) + ".1";
        result.tally.vacuum_check += 1;
        result.vacuum_checks.push_back(std::move(check));
    }
    {
        VacuumCheck check = assert_vacuum(state, plan.carrier_down);
        check.label = "mux carrier down";
        result.tally.vacuum_check += 1;
        result.vacuum_checks.push_back(std::move(check));
    }

    for (int i = 0; i < n; ++i) {
        if (options.recycle_first && i == n - 1) continue;
        state = factor_out_photon(state, plan.qubit(i).first, 0);
    }

    if (options.check == OrderCheck::enforce) {
        if (state.photons != 1)
            throw Error("mux_pipeline: carrier is not a single photon");
        for (const auto& [basis, amp] : state.terms)
            if (basis.occ.size() != 1 || basis.occ[0].mode.path != plan.carrier_up)
                throw Error("mux_pipeline: carrier photon strayed off the upper path");
    }
    result.carrier = std::move(state);
    return result;
}

DemuxResult demux_pipeline(const PureState& carrier, int n,
                           const DemuxOptions& options) {
    return demux_pipeline(carrier, ChannelPlan::standard(n), options);
}

DemuxResult demux_pipeline(const PureState& carrier, const ChannelPlan& plan,
                           const DemuxOptions& options) {
    validate_plan(plan);
    const int n = plan.n;
    check_order(options.order, n, /*descending=*/false, options.check,
                "demux_pipeline");
    const std::vector<int> order =
        options.order.empty() ? default_order(n, false) : options.order;

    if (options.check == OrderCheck::enforce) {
        check_carrier_shape(carrier, plan.carrier_up, plan.carrier_down,
                            "demux_pipeline");
        if (!is_multiplexed(carrier, plan.carrier_up, 0, n))
            throw OrderViolation(
                "demux_pipeline: carrier ell outside [0, 2^n)");
    }

    DemuxResult result;
    PureState state = carrier;
    for (int i : order) {
        if (options.recycle_last && i == n - 1) {
            // inverse converter: the remaining OAM dual-rail qubit becomes a
            // path dual-rail qubit on the carrier pair
            state = sorting_interferometer(state, plan.carrier_up, plan.carrier_down,
                                           -(std::int64_t{1} << (n - 1)),
                                           &result.tally);
            state = apply_hologram(state, plan.carrier_down,
                                   -(std::int64_t{1} << (n - 1)));
            result.tally.hologram += 1;
            continue;
        }
        state = tensor(state, make_single_photon(plan.qubit(i).first, 0));
        state = demux_block(state, plan, i, options.check, &result.tally);

        VacuumCheck check = assert_vacuum(state, plan.carrier_down);
        check.label = "demux stage " + std::to_string(i) + " carrier down";
        result.tally.vacuum_check += 1;
        result.vacuum_checks.push_back(std::move(check));
    }

    if (options.recycle_last) {
        result.terminal_zero_probability = 1.0;
        result.terminal_ok = true;
        result.state = std::move(state);
        result.qubits = result.state;
        return result;
    }

    double zero_weight = 0.0;
    for (const auto& [basis, amp] : state.terms)
        if (basis.count_at(Mode{plan.carrier_up, 0}) >= 1) zero_weight += std::norm(amp);
    result.terminal_zero_probability = zero_weight > 1.0 ? 1.0 : zero_weight;
    result.terminal_ok = result.terminal_zero_probability >= 1.0 - kVacuumTol;
    result.state = std::move(state);
    try {
        result.qubits = factor_out_photon(result.state, plan.carrier_up, 0);
    } catch (const Error&) {
        result.qubits.reset();  // misordered permissive runs leave the carrier mixed in
        result.terminal_ok = false;
    }
    return result;
}

SorterResult sorter_coherent(const PureState& carrier, std::int64_t M,
                             OrderCheck check) {
    if (M < 1) throw Error("sorter_coherent: M must be >= 1");
    for (const auto& [basis, amp] : carrier.terms)
        for (const auto& mc : basis.occ)
            if (mc.mode.ell < 0 || mc.mode.ell > M)
                throw EllOutOfDeclaredRange(
                    "sorter_coherent: input ell outside [0, M]");
    SorterResult result;
    result.stages = ceil_log2(M);
    result.demux = demux_pipeline(carrier, ChannelPlan::standard(result.stages),
                                  {.check = check});
    return result;
}

QndSorterResult sorter_qnd(const PureState& carrier, std::int64_t M,
                           std::uint64_t seed) {
    if (M < 1) throw Error("sorter_qnd: M must be >= 1");
    for (const auto& [basis, amp] : carrier.terms)
        for (const auto& mc : basis.occ)
            if (mc.mode.ell < 0 || mc.mode.ell > M)
                throw EllOutOfDeclaredRange("sorter_qnd: input ell outside [0, M]");

    const PathId u = 0;
    const PathId d = 1;
    QndSorterResult result;
    result.stages = ceil_log2(M);
    result.degenerate = marginal_path_probability(carrier, u) +
                            marginal_path_probability(carrier, d) <
                        1.0 - kVacuumTol;

    std::mt19937_64 rng(seed);
    PureState state = carrier;
    for (int i = 0; i < result.stages; ++i) {
        state = sorting_interferometer(state, u, d, std::int64_t{1} << i,
                                       &result.tally);
        QndOutcome outcome = qnd_measure_path(state, d, rng);
        result.tally.qnd += 1;
        result.bits.push_back(outcome.bit);
        state = std::move(outcome.state);
        if (outcome.bit == 1) {
            state = apply_hologram(state, d, -(std::int64_t{1} << i));
            result.tally.hologram += 1;
            state = swap_paths(state, u, d);
            result.tally.classical_switch += 1;
            result.reconstructed_ell += std::int64_t{1} << i;
        }
    }
    result.carrier = std::move(state);
    return result;
}

PureState adder_block(const PureState& state, std::pair<PathId, PathId> m_paths,
                      PathId u, PathId d, int j, GateTally* tally) {
    PureState out = apply_dual_rail_cnot(state, m_paths.second, u, d);
    out = apply_hologram(out, d, std::int64_t{1} << j);
    out = apply_dual_rail_cnot(out, m_paths.second, u, d);
    bump(tally, &GateTally::cnot, 2);
    bump(tally, &GateTally::hologram);
    return out;
}

PureState multiply_block(const PureState& state, std::pair<PathId, PathId> m_paths,
                         PathId u, PathId d, int j, GateTally* tally) {
    PureState out = apply_dual_rail_cnot(state, m_paths.second, u, d);
    out = apply_oam_scale(out, d, std::int64_t{1} << j);
    out = apply_dual_rail_cnot(out, m_paths.second, u, d);
    bump(tally, &GateTally::cnot, 2);
    bump(tally, &GateTally::oam_scale);
    return out;
}

ArithmeticLayout ArithmeticLayout::standard(int n, bool with_sum_channels) {
    ArithmeticLayout layout;
    layout.input_plan = ChannelPlan::standard(n);
    PathId next = static_cast<PathId>(2 + 2 * n);
    for (int j = 0; j < n; ++j) {
        layout.operand_paths.emplace_back(next, static_cast<PathId>(next + 1));
        next += 2;
    }
    if (with_sum_channels) {
        layout.sum_plan.n = n + 1;
        layout.sum_plan.carrier_up = layout.input_plan.carrier_up;
        layout.sum_plan.carrier_down = layout.input_plan.carrier_down;
        for (int i = 0; i <= n; ++i) {
            layout.sum_plan.qubit_paths.emplace_back(next,
                                                     static_cast<PathId>(next + 1));
            next += 2;
        }
    }
    return layout;
}

namespace {

PureState attach_operand_qubits(PureState state,
                                const std::vector<QubitAmplitudes>& m_qubits,
                                const ArithmeticLayout& layout, int n) {
    for (int j = 0; j < n; ++j) {
        const auto& amps = channel_amps(m_qubits, n, j);
        const auto [m0, m1] = layout.operand_paths[static_cast<std::size_t>(j)];
        state = tensor(state, make_qubit({amps.alpha, amps.beta, m0, m1}));
    }
    return state;
}

}  // namespace

AdderResult adder_pipeline(const std::vector<QubitAmplitudes>& n_qubits,
                           const std::vector<QubitAmplitudes>& m_qubits, int n,
                           bool recycle) {
    if (n < 1) throw Error("adder_pipeline: need at least one qubit per operand");
    if (static_cast<int>(n_qubits.size()) != n ||
        static_cast<int>(m_qubits.size()) != n)
        throw Error("adder_pipeline: operands must both have n qubits");

    AdderResult result;
    result.layout = ArithmeticLayout::standard(n, /*with_sum_channels=*/true);

    MuxResult mux = mux_pipeline(n_qubits, result.layout.input_plan,
                                 {.recycle_first = recycle});
    result.tally += mux.tally;
    result.vacuum_checks = std::move(mux.vacuum_checks);

    PureState state = attach_operand_qubits(std::move(mux.carrier), m_qubits,
                                            result.layout, n);
    for (int j = 0; j < n; ++j)
        state = adder_block(state, result.layout.operand_paths[static_cast<std::size_t>(j)],
                            result.layout.input_plan.carrier_up,
                            result.layout.input_plan.carrier_down, j, &result.tally);

    DemuxResult demux = demux_pipeline(state, result.layout.sum_plan,
                                       {.recycle_last = recycle});
    result.tally += demux.tally;
    result.vacuum_checks.insert(result.vacuum_checks.end(),
                                demux.vacuum_checks.begin(),
                                demux.vacuum_checks.end());
    result.terminal_zero_probability = demux.terminal_zero_probability;
    result.terminal_ok = demux.terminal_ok;
    if (!demux.qubits)
        throw Error("adder_pipeline: carrier not disentangled at the output");
    result.state = std::move(*demux.qubits);
    return result;
}

MultiplyResult multiply_pipeline(const std::vector<QubitAmplitudes>& n_qubits,
                                 const std::vector<QubitAmplitudes>& m_qubits, int n) {
    if (n < 1) throw Error("multiply_pipeline: need at least one qubit per operand");
    if (static_cast<int>(n_qubits.size()) != n ||
        static_cast<int>(m_qubits.size()) != n)
        throw Error("multiply_pipeline: operands must both have n qubits");

    MultiplyResult result;
    result.layout = ArithmeticLayout::standard(n, /*with_sum_channels=*/false);

    MuxResult mux = mux_pipeline(n_qubits, result.layout.input_plan, {});
    result.tally += mux.tally;

    PureState state = attach_operand_qubits(std::move(mux.carrier), m_qubits,
                                            result.layout, n);
    for (int j = 0; j < n; ++j)
        state = multiply_block(state,
                               result.layout.operand_paths[static_cast<std::size_t>(j)],
                               result.layout.input_plan.carrier_up,
                               result.layout.input_plan.carrier_down, j, &result.tally);
    result.state = std::move(state);
    return result;
}

std::vector<QubitAmplitudes> qubits_from_integer(std::uint64_t value, int n) {
    if (n < 1 || n >= 63) throw Error("qubits_from_integer: bad width");
    if (value >> n)
        throw Error("qubits_from_integer: value does not fit in n bits");
    std::vector<QubitAmplitudes> qubits;
    qubits.reserve(static_cast<std::size_t>(n));
    for (int pos = 0; pos < n; ++pos) {
        const bool bit = (value >> (n - 1 - pos)) & 1;
        qubits.push_back(bit ? QubitAmplitudes{{0.0, 0.0}, {1.0, 0.0}}
                             : QubitAmplitudes{{1.0, 0.0}, {0.0, 0.0}});
    }
    return qubits;
}

}  // namespace oam
