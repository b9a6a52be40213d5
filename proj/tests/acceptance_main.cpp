// Acceptance suite: one pass/fail line per claim, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "oam/blocks.hpp"
#include "oam/circuit.hpp"
#include "oam/oracle.hpp"
#include "test_support.hpp"

using namespace oam;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

struct Outcome {
    int id;
    std::string name;
    bool pass;
    std::string detail;
};

std::vector<Outcome> g_outcomes;

void record(int id, std::string name, bool pass, std::string detail) {
    g_outcomes.push_back({id, std::move(name), pass, std::move(detail)});
}

template <typename Fn>
void criterion(int id, std::string name, Fn&& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        record(id, std::move(name), false, std::string("exception: ") + e.what());
        return;
    }
    // fn records its own outcome; nothing to do here
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

PureState carrier_state(std::vector<std::pair<std::int64_t, Complex>> terms) {
    PureState s;
    s.photons = 1;
    for (auto& [ell, amp] : terms) add_term(s, make_basis({{Mode{0, ell}, 1}}), amp);
    return s;
}

// --- criterion 1: mux output against the transmitted-qudit product formula ---
void check_mux_formula() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1001);
    double worst = 0.0;
    for (int n = 1; n <= 4; ++n) {
        for (int trial = 0; trial < 100; ++trial) {
            const auto qs = oamtest::random_qubits(rng, n);
            const MuxResult result = mux_pipeline(qs, n);
            const Eigen::VectorXcd expected = oracle::mux_amplitudes(qs, n);
            for (std::int64_t ell = 0; ell < expected.size(); ++ell) {
                const Complex sim =
                    result.carrier.amplitude(make_basis({{Mode{0, ell}, 1}}));
                worst = std::max(worst, std::abs(sim - expected(ell)));
            }
        }
    }
    const double elapsed = seconds_since(start);
    record(1, "mux matches the product formula (n=1..4, 100 random tuples)",
           worst < 1e-10 && elapsed < 5.0,
           "max amplitude deviation " + sci(worst) + ", " + sci(elapsed) + " s");
}

// --- criterion 2: combiner output against the tensor-product formula ---
void check_combiner_formula() {
    std::mt19937_64 rng(1002);
    double worst = 1.0;
    for (int n = 1; n <= 3; ++n) {
        for (int trial = 0; trial < 100; ++trial) {
            const auto qs = oamtest::random_qubits(rng, n);
            const CombinerResult result = combiner_pipeline(qs, n);
            worst = std::min(worst,
                             fidelity(result.state, oracle::combiner_state(
                                                        qs, n, result.output_path)));
        }
    }
    record(2, "combiner matches the tensor product (n=1..3, 100 random tuples)",
           worst >= 1.0 - 1e-9, "worst infidelity " + sci(1.0 - worst));
}

// --- criterion 3: demux(mux(psi)) restores psi, including a Bell pair ---
void check_round_trip() {
    std::mt19937_64 rng(1003);
    double worst = 1.0;
    for (int n = 1; n <= 4; ++n) {
        const ChannelPlan plan = ChannelPlan::standard(n);
        for (int trial = 0; trial < 25; ++trial) {
            const auto qs = oamtest::random_qubits(rng, n);
            const MuxResult mux = mux_pipeline(qs, plan);
            const DemuxResult demux = demux_pipeline(mux.carrier, plan);
            if (!demux.qubits) {
                worst = 0.0;
                continue;
            }
            worst = std::min(worst, fidelity(*demux.qubits,
                                             oamtest::product_qubits_state(plan, qs)));
        }
    }

    const ChannelPlan plan2 = ChannelPlan::standard(2);
    PureState bell;
    bell.photons = 2;
    add_term(bell, make_basis({{Mode{plan2.qubit(1).first, 0}, 1},
                               {Mode{plan2.qubit(0).first, 0}, 1}}),
             Complex{kInvSqrt2, 0.0});
    add_term(bell, make_basis({{Mode{plan2.qubit(1).second, 0}, 1},
                               {Mode{plan2.qubit(0).second, 0}, 1}}),
             Complex{kInvSqrt2, 0.0});
    const MuxResult mux = mux_pipeline_on_state(
        tensor(bell, make_single_photon(plan2.carrier_up, 0)), plan2);
    const DemuxResult demux = demux_pipeline(mux.carrier, plan2);
    const double bell_fid = demux.qubits ? fidelity(*demux.qubits, bell) : 0.0;

    record(3, "round trip restores product and Bell inputs",
           worst >= 1.0 - 1e-9 && bell_fid >= 1.0 - 1e-9,
           "worst product infidelity " + sci(1.0 - worst) + ", Bell infidelity " +
               sci(1.0 - bell_fid));
}

// --- criterion 4: gate-count formulas, exact integer equality ---
void check_gate_counts() {
    bool pass = true;
    std::string detail;

    for (int n = 1; n <= 6 && pass; ++n) {
        const auto qs = qubits_from_integer((std::uint64_t{1} << n) - 1, n);
        const MuxResult mux = mux_pipeline(qs, n);
        const DemuxResult demux = demux_pipeline(mux.carrier, n);
        if (mux.tally.cnot + demux.tally.cnot != 4 * n) {
            pass = false;
            detail = "mux+demux cnot != 4n at n=" + std::to_string(n);
        }
        const MuxResult mux_r = mux_pipeline(qs, n, {.recycle_first = true});
        const DemuxResult demux_r =
            demux_pipeline(mux_r.carrier, n, {.recycle_last = true});
        if (mux_r.tally.cnot + demux_r.tally.cnot != 4 * n - 4) {
            pass = false;
            detail = "recycled mux+demux cnot != 4n-4 at n=" + std::to_string(n);
        }
    }

    for (int n = 1; n <= 4 && pass; ++n) {
        const auto zeros = qubits_from_integer(0, n);
        const AdderResult plain = adder_pipeline(zeros, zeros, n);
        if (plain.tally.cnot != 6 * n + 2) {
            pass = false;
            detail = "adder cnot != 6n+2 at n=" + std::to_string(n);
        }
        const AdderResult recycled = adder_pipeline(zeros, zeros, n, true);
        if (recycled.tally.cnot != 6 * n - 2) {
            pass = false;
            detail = "recycled adder cnot != 6n-2 at n=" + std::to_string(n);
        }
    }

    for (std::int64_t m = 1; m <= 64 && pass; ++m) {
        const int expected = static_cast<int>(
            std::ceil(std::log2(static_cast<double>(m))));
        const SorterResult sorter = sorter_coherent(carrier_state({{0, {1.0, 0.0}}}), m);
        if (sorter.stages != expected) {
            pass = false;
            detail = "sorter stages != ceil(log2 M) at M=" + std::to_string(m);
        }
        const QndSorterResult qnd = sorter_qnd(carrier_state({{0, {1.0, 0.0}}}), m, 7);
        if (qnd.stages != expected) {
            pass = false;
            detail = "qnd sorter stages != ceil(log2 M) at M=" + std::to_string(m);
        }
    }

    record(4, "gate tallies: 4n / 4n-4, 6n+2 / 6n-2, ceil(log2 M) stages", pass,
           pass ? "all integer counts exact" : detail);
}

// --- criterion 5: exhaustive three-bit adder plus a superposed operand ---
void check_adder() {
    const auto start = std::chrono::steady_clock::now();
    double worst = 1.0;
    for (std::uint64_t a = 0; a < 8; ++a) {
        for (std::uint64_t b = 0; b < 8; ++b) {
            const AdderResult result = adder_pipeline(qubits_from_integer(a, 3),
                                                      qubits_from_integer(b, 3), 3);
            const PureState expected =
                tensor(oamtest::integer_rail_state(result.layout.operand_paths, b),
                       oamtest::integer_rail_state(result.layout.sum_plan.qubit_paths,
                                                   a + b));
            worst = std::min(worst, fidelity(result.state, expected));
        }
    }

    // N = 3 with M uniform over [0, 8): eight equally weighted sum branches
    std::vector<QubitAmplitudes> uniform(3, {{kInvSqrt2, 0.0}, {kInvSqrt2, 0.0}});
    const AdderResult result =
        adder_pipeline(qubits_from_integer(3, 3), uniform, 3);
    PureState expected;
    expected.photons = 0;
    bool first = true;
    const double amp = 1.0 / std::sqrt(8.0);
    for (std::uint64_t m = 0; m < 8; ++m) {
        PureState term =
            tensor(oamtest::integer_rail_state(result.layout.operand_paths, m),
                   oamtest::integer_rail_state(result.layout.sum_plan.qubit_paths,
                                               3 + m));
        if (first) {
            expected = term;
            for (auto& [basis, a] : expected.terms) a *= amp;
            first = false;
        } else {
            for (const auto& [basis, a] : term.terms)
                add_term(expected, basis, a * amp);
        }
    }
    const double super_fid = fidelity(result.state, expected);
    const double elapsed = seconds_since(start);

    record(5, "adder: all 64 basis pairs plus a uniform-M superposition",
           worst > 1.0 - 1e-9 && super_fid > 1.0 - 1e-9 && elapsed < 10.0,
           "worst basis infidelity " + sci(1.0 - worst) + ", superposition infidelity " +
               sci(1.0 - super_fid) + ", " + sci(elapsed) + " s");
}

// --- criterion 6: interferometer routing against the closed form ---
void check_interferometer_parity() {
    double worst = 0.0;
    bool exact_parity = true;
    for (std::int64_t K : {1, 2, 4, 8}) {
        for (std::int64_t ell = -32; ell <= 32; ++ell) {
            const Eigen::Matrix2cd m = oracle::interferometer_matrix(ell, K);
            for (int port = 0; port < 2; ++port) {
                const PureState out = sorting_interferometer(
                    make_single_photon(static_cast<PathId>(port), ell), 0, 1, K);
                const Complex up = out.amplitude(make_basis({{Mode{0, ell}, 1}}));
                const Complex down = out.amplitude(make_basis({{Mode{1, ell}, 1}}));
                worst = std::max({worst, std::abs(up - m(0, port)),
                                  std::abs(down - m(1, port))});
                if (ell % K == 0) {
                    // multiples must route to exactly one port, no leakage term
                    if (out.term_count() != 1) exact_parity = false;
                    const bool odd = (ell / K) % 2 != 0;
                    const bool lands_down = odd != (port == 1);
                    if (std::abs(lands_down ? down : up) == 0.0) exact_parity = false;
                }
            }
        }
    }
    record(6, "interferometer matches the transfer matrix; parity routing exact",
           worst < 1e-12 && exact_parity,
           "max deviation " + sci(worst) + std::string(", parity ") +
               (exact_parity ? "exact" : "leaky"));
}

// --- criterion 7: sorter determinism and QND statistics ---
void check_sorters() {
    bool coherent_ok = true;
    const ChannelPlan plan = ChannelPlan::standard(4);
    for (std::int64_t ell = 0; ell < 16; ++ell) {
        const SorterResult result = sorter_coherent(carrier_state({{ell, {1.0, 0.0}}}), 15);
        if (!result.demux.qubits ||
            fidelity(*result.demux.qubits,
                     oamtest::integer_rail_state(
                         plan.qubit_paths, static_cast<std::uint64_t>(ell))) <
                1.0 - 1e-9) {
            coherent_ok = false;
        }
    }

    const PureState superposed =
        carrier_state({{1, {kInvSqrt2, 0.0}}, {3, {kInvSqrt2, 0.0}}});
    const int trials = 10000;
    int stage1_ones = 0;
    for (int t = 0; t < trials; ++t) {
        const QndSorterResult result =
            sorter_qnd(superposed, 3, static_cast<std::uint64_t>(t));
        if (result.bits.size() == 2 && result.bits[1] == 1) ++stage1_ones;
    }
    const double freq = static_cast<double>(stage1_ones) / trials;
    const double sigma = std::sqrt(0.25 / trials);
    const bool stats_ok = std::abs(freq - 0.5) <= 4.0 * sigma;

    record(7, "coherent sorter exact on [0,16); QND stage-1 frequency within 4 sigma",
           coherent_ok && stats_ok,
           "stage-1 frequency " + sci(freq) + " (target 0.5 +- " + sci(4.0 * sigma) + ")");
}

// --- criterion 8: unitarity, linearity and involutions on random states ---
void check_element_properties() {
    std::mt19937_64 rng(1008);
    double norm_drift = 0.0;
    double linearity_err = 0.0;
    double inv_worst = 1.0;

    const auto apply_nth = [](const PureState& s, int which) {
        switch (which % 7) {
            case 0: return apply_hologram(s, 0, 3);
            case 1: return apply_dove(s, 1, Angle::pi_over(3));
            case 2: return apply_oam_flip(s, 2);
            case 3: return apply_beamsplitter(s, 0, 1);
            case 4: return apply_arm_phase(s, 3, Angle::pi_over(5));
            case 5: return apply_dual_rail_cnot(s, 2, 0, 1);
            default: return apply_oam_scale(s, 3, 3);
        }
    };

    for (int trial = 0; trial < 500; ++trial) {
        const int photons = 1 + trial % 4;
        const PureState s = oamtest::random_state(rng, photons);
        norm_drift = std::max(norm_drift, std::abs(apply_nth(s, trial).norm() - 1.0));

        const PureState phi = oamtest::random_state(rng, photons);
        const Complex a = oamtest::random_phase_amp(rng);
        const Complex b = oamtest::random_phase_amp(rng);
        const PureState lhs = apply_nth(oamtest::combine(a, s, b, phi), trial);
        const PureState rhs =
            oamtest::combine(a, apply_nth(s, trial), b, apply_nth(phi, trial));
        linearity_err = std::max(linearity_err, oamtest::max_amplitude_diff(lhs, rhs));

        inv_worst = std::min(
            {inv_worst, fidelity(apply_hologram(apply_hologram(s, 0, 4), 0, -4), s),
             fidelity(apply_oam_flip(apply_oam_flip(s, 1), 1), s),
             fidelity(apply_dual_rail_cnot(apply_dual_rail_cnot(s, 3, 0, 1), 3, 0, 1),
                      s),
             fidelity(apply_beamsplitter(apply_beamsplitter(s, 2, 3), 2, 3), s)});
    }

    record(8, "element suite: unitarity, linearity, involutions (500 random states)",
           norm_drift < 1e-12 && linearity_err < 1e-12 && inv_worst >= 1.0 - 1e-12,
           "norm drift " + sci(norm_drift) + ", linearity " + sci(linearity_err) +
               ", worst involution infidelity " + sci(1.0 - inv_worst));
}

// --- criterion 9: multiplier exact for single-bit M, documented otherwise ---
void check_multiplier() {
    bool single_bit_ok = true;
    for (int j = 0; j < 3; ++j) {
        const std::uint64_t m = std::uint64_t{1} << j;
        for (std::uint64_t n_val = 0; n_val < 8; ++n_val) {
            const MultiplyResult result = multiply_pipeline(
                qubits_from_integer(n_val, 3), qubits_from_integer(m, 3), 3);
            const PureState expected = tensor(
                oamtest::integer_rail_state(result.layout.operand_paths, m),
                make_single_photon(result.layout.input_plan.carrier_up,
                                   static_cast<std::int64_t>(n_val * m)));
            if (fidelity(result.state, expected) <= 1.0 - 1e-9) single_bit_ok = false;
        }
    }

    const std::int64_t literal =
        oracle::arithmetic(3, 3, oracle::ArithmeticOp::scale_shift_composition);
    const MultiplyResult m33 = multiply_pipeline(qubits_from_integer(3, 2),
                                                 qubits_from_integer(3, 2), 2);
    const PureState expected33 =
        tensor(oamtest::integer_rail_state(m33.layout.operand_paths, 3),
               make_single_photon(m33.layout.input_plan.carrier_up, literal));
    const bool literal_ok = literal == 6 && fidelity(m33.state, expected33) > 1.0 - 1e-9;

    CircuitSpec spec;
    spec.pipeline = PipelineInvocation{"multiplier", 2, false, 0, 3, 3, {}, {}};
    const VerifyReport verify = verify_circuit(spec);
    const bool flagged = verify.status == VerifyStatus::documented_divergence;

    record(9, "multiplier: exact for single-bit M; M=3 composition gives 6, flagged",
           single_bit_ok && literal_ok && flagged,
           std::string("single-bit cases ") + (single_bit_ok ? "exact" : "WRONG") +
               ", 3x3 literal value " + std::to_string(literal) + ", verify status " +
               to_string(verify.status));
}

// --- criterion 10: order enforcement and the permissive corruption demo ---
void check_order_enforcement() {
    bool raised = true;
    bool corrupted = true;

    const auto converted_channels = [](const ChannelPlan& plan) {
        PureState state = PureState::vacuum();
        for (int i = 0; i < plan.n; ++i) {
            const auto [q0, q1] = plan.qubit(i);
            state = tensor(state, make_qubit({kInvSqrt2, kInvSqrt2, q0, q1}));
        }
        for (int i = plan.n - 1; i >= 0; --i)
            state = converter(state, plan.qubit(i).first, plan.qubit(i).second,
                              std::int64_t{1} << (i + 1));
        return state;
    };

    {
        // n = 2 merger: the single merge run with its ports swapped, so the
        // low band rides on the upper port
        const ChannelPlan plan = ChannelPlan::standard(2);
        const PureState converted = converted_channels(plan);
        const PathId top = plan.qubit(1).first;
        const PathId low = plan.qubit(0).first;
        const PureState good = merger(converted, top, low, 0);

        bool threw = false;
        try {
            merger(converted, low, top, 1);
        } catch (const OrderViolation&) {
            threw = true;
        }
        raised = raised && threw;

        const PureState bad = merger(converted, low, top, 1, OrderCheck::permissive);
        corrupted = corrupted && fidelity(swap_paths(bad, low, top), good) < 0.99;
    }

    {
        // n = 3 merger: ascending band order instead of descending
        const ChannelPlan plan = ChannelPlan::standard(3);
        const PureState converted = converted_channels(plan);
        const PathId top = plan.qubit(2).first;
        const PureState good = merger(merger(converted, top, plan.qubit(1).first, 1),
                                      top, plan.qubit(0).first, 0);

        const PureState after_low = merger(converted, top, plan.qubit(0).first, 0);
        bool threw = false;
        try {
            merger(after_low, top, plan.qubit(1).first, 1);
        } catch (const OrderViolation&) {
            threw = true;
        }
        raised = raised && threw;

        const PureState bad =
            merger(after_low, top, plan.qubit(1).first, 1, OrderCheck::permissive);
        corrupted = corrupted && fidelity(bad, good) < 0.99;
    }

    for (int n = 2; n <= 3; ++n) {
        // demux: extract a higher bit before a lower one
        const ChannelPlan plan = ChannelPlan::standard(n);
        std::vector<QubitAmplitudes> qs(
            static_cast<std::size_t>(n), {{kInvSqrt2, 0.0}, {kInvSqrt2, 0.0}});
        const MuxResult mux = mux_pipeline(qs, plan);
        std::vector<int> wrong(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) wrong[static_cast<std::size_t>(i)] = i;
        std::swap(wrong[0], wrong[1]);

        bool threw = false;
        try {
            demux_pipeline(mux.carrier, plan, {.order = wrong});
        } catch (const OrderViolation&) {
            threw = true;
        }
        raised = raised && threw;

        const DemuxResult ordered = demux_pipeline(mux.carrier, plan);
        const DemuxResult shuffled = demux_pipeline(
            mux.carrier, plan, {.order = wrong, .check = OrderCheck::permissive});
        corrupted = corrupted && fidelity(shuffled.state, ordered.state) < 0.99;
    }

    record(10, "order violations raise; permissive runs corrupt (fidelity < 0.99)",
           raised && corrupted,
           std::string("violations ") + (raised ? "raised" : "MISSED") +
               ", permissive corruption " + (corrupted ? "reproduced" : "ABSENT"));
}

}  // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();

    criterion(1, "mux formula", check_mux_formula);
    criterion(2, "combiner formula", check_combiner_formula);
    criterion(3, "round trip", check_round_trip);
    criterion(4, "gate counts", check_gate_counts);
    criterion(5, "adder", check_adder);
    criterion(6, "interferometer parity", check_interferometer_parity);
    criterion(7, "sorters", check_sorters);
    criterion(8, "element properties", check_element_properties);
    criterion(9, "multiplier", check_multiplier);
    criterion(10, "order enforcement", check_order_enforcement);

    bool all_pass = true;
    for (const Outcome& o : g_outcomes) {
        std::printf("[%s] %2d. %s -- %s\n", o.pass ? "PASS" : "FAIL", o.id,
                    o.name.c_str(), o.detail.c_str());
        all_pass = all_pass && o.pass;
    }
    std::printf("%zu/10 criteria passed in %.2f s\n",
                static_cast<std::size_t>(
                    std::count_if(g_outcomes.begin(), g_outcomes.end(),
                                  [](const Outcome& o) { return o.pass; })),
                seconds_since(start));
    return all_pass && g_outcomes.size() == 10 ? 0 : 1;
}
