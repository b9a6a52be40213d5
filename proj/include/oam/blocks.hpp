#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "oam/elements.hpp"
#include "oam/fock.hpp"

namespace oam {

// Precondition validators either raise OrderViolation or are skipped, in
// which case a misordered circuit runs anyway and corrupts the state with
// partial phase shifts.
enum class OrderCheck { enforce, permissive };

// Path layout shared by the multiplexing pipelines: one carrier pair and a
// dual-rail pair per channel. Channel n-1 holds the most significant bit.
struct ChannelPlan {
    int n = 0;
    PathId carrier_up = 0;
    PathId carrier_down = 1;
    std::vector<std::pair<PathId, PathId>> qubit_paths;  // [i] -> (q_i0, q_i1)

    static ChannelPlan standard(int n);
    std::pair<PathId, PathId> qubit(int i) const;
};

void validate_plan(const ChannelPlan& plan);

// True when every carrier-path winding number is a non-negative multiple of
// 2^j below 2^n.
bool is_multiplexed(const PureState& state, PathId carrier, int j, int n);

// Splitter-phase-splitter block with arm phase pi/K on the lower arm.
// Winding numbers ell = mK route by the parity of m: even multiples keep
// their port, odd multiples switch it. Other ell split between the ports as
// out_up = ((1 + e^{i theta}) in_up + (1 - e^{i theta}) in_down) / 2 with
// theta = ell pi / K.
PureState sorting_interferometer(const PureState& state, PathId up, PathId down,
                                 std::int64_t K, GateTally* tally = nullptr);

struct ConverterOptions {
    bool final_hologram = true;  // re-center onto {-delta/2, +delta/2}
    double input_tol = kVacuumTol;
    OrderCheck check = OrderCheck::enforce;
};

// Path dual-rail (ell = 0 on q0/q1) to OAM dual-rail on q0. `delta` is the
// hologram shift and interferometer constant, a power of two.
PureState converter(const PureState& state, PathId q0, PathId q1, std::int64_t delta,
                    const ConverterOptions& options = {}, GateTally* tally = nullptr);

// Merges the band-j OAM dual-rail qubit on `down` into the already merged
// photons (bands above j) on `up`. Lower bands must never merge first.
PureState merger(const PureState& state, PathId up, PathId down, int j,
                 OrderCheck check = OrderCheck::enforce, GateTally* tally = nullptr);

struct CombinerResult {
    PureState state;  // n photons in one path, one band +-2^i per channel
    PathId output_path = 0;
    GateTally tally;
};

// Converts every channel and merges them in descending index order.
// `qubits` is most significant channel first.
CombinerResult combiner_pipeline(const std::vector<QubitAmplitudes>& qubits, int n);
CombinerResult combiner_pipeline(const std::vector<QubitAmplitudes>& qubits,
                                 const ChannelPlan& plan);

// Adds channel i of the plan into the carrier: +2^i on the carrier ell when
// the qubit is |1>, qubit photon left disentangled on q_i0.
PureState mux_block(const PureState& state, const ChannelPlan& plan, int i,
                    OrderCheck check = OrderCheck::enforce, GateTally* tally = nullptr);

// Extracts bit i of the carrier onto the fresh ancilla photon expected at
// (q_i0, ell = 0), subtracting the 2^i contribution.
PureState demux_block(const PureState& state, const ChannelPlan& plan, int i,
                      OrderCheck check = OrderCheck::enforce, GateTally* tally = nullptr);

struct MuxOptions {
    bool recycle_first = false;       // channel n-1 becomes the carrier
    std::vector<int> order;           // empty -> n-1 .. 0
    OrderCheck check = OrderCheck::enforce;
};

struct MuxResult {
    PureState carrier;  // single photon on carrier_up, parked photons stripped
    GateTally tally;
    std::vector<VacuumCheck> vacuum_checks;
};

MuxResult mux_pipeline(const std::vector<QubitAmplitudes>& qubits, int n,
                       const MuxOptions& options = {});
MuxResult mux_pipeline(const std::vector<QubitAmplitudes>& qubits,
                       const ChannelPlan& plan, const MuxOptions& options = {});

// Runs the blocks on a caller-built input state (entangled channels are
// fine). Without recycling the state must hold the carrier photon at
// (carrier_up, 0); with recycling, channel n-1 rides on the carrier pair.
MuxResult mux_pipeline_on_state(PureState state, const ChannelPlan& plan,
                                const MuxOptions& options = {});

struct DemuxOptions {
    bool recycle_last = false;        // last qubit stays on the carrier pair
    std::vector<int> order;           // empty -> 0 .. n-1
    OrderCheck check = OrderCheck::enforce;
};

struct DemuxResult {
    PureState state;                  // all photons, before carrier stripping
    std::optional<PureState> qubits;  // terminal carrier factored out
    double terminal_zero_probability = 1.0;
    bool terminal_ok = true;
    GateTally tally;
    std::vector<VacuumCheck> vacuum_checks;
};

DemuxResult demux_pipeline(const PureState& carrier, int n,
                           const DemuxOptions& options = {});
DemuxResult demux_pipeline(const PureState& carrier, const ChannelPlan& plan,
                           const DemuxOptions& options = {});

struct SorterResult {
    int stages = 0;
    DemuxResult demux;  // qubits encode ell in binary, LSB on channel 0
};

// Coherent sorter: a demultiplexer with ceil(log2 M) blocks.
SorterResult sorter_coherent(const PureState& carrier, std::int64_t M,
                             OrderCheck check = OrderCheck::enforce);

struct QndSorterResult {
    int stages = 0;
    std::vector<int> bits;  // stage outcomes, least significant first
    std::int64_t reconstructed_ell = 0;
    PureState carrier;  // collapsed, corrections applied
    bool degenerate = false;  // no photon was present
    GateTally tally;
};

// Projective sorter: per stage, QND presence detection on the lower port, a
// -2^i correction and a classical switch instead of the CNOT pair.
QndSorterResult sorter_qnd(const PureState& carrier, std::int64_t M,
                           std::uint64_t seed);

// Conditional +2^j on the carrier, controlled by operand qubit j. Keeps the
// operand; blocks may run in any j order.
PureState adder_block(const PureState& state, std::pair<PathId, PathId> m_paths,
                      PathId u, PathId d, int j, GateTally* tally = nullptr);

// Conditional ell -> 2^j ell on the carrier.
PureState multiply_block(const PureState& state, std::pair<PathId, PathId> m_paths,
                         PathId u, PathId d, int j, GateTally* tally = nullptr);

// Path layout for the arithmetic pipelines: input channels, operand pairs,
// and (for the adder) n+1 extraction channels sharing the same carrier.
struct ArithmeticLayout {
    ChannelPlan input_plan;
    std::vector<std::pair<PathId, PathId>> operand_paths;
    ChannelPlan sum_plan;  // adder only; n+1 channels

    static ArithmeticLayout standard(int n, bool with_sum_channels);
};

struct AdderResult {
    PureState state;  // operand qubits tensor sum qubits, carrier stripped
    ArithmeticLayout layout;
    GateTally tally;
    std::vector<VacuumCheck> vacuum_checks;
    double terminal_zero_probability = 1.0;
    bool terminal_ok = true;
};

// N + M over n-qubit operands; the sum occupies n+1 channels. With
// `recycle`, the first multiplexed qubit and the last extracted qubit are
// encoded in the carrier photon itself.
AdderResult adder_pipeline(const std::vector<QubitAmplitudes>& n_qubits,
                           const std::vector<QubitAmplitudes>& m_qubits, int n,
                           bool recycle = false);

struct MultiplyResult {
    PureState state;  // operand qubits tensor the scaled carrier qudit
    ArithmeticLayout layout;
    GateTally tally;
};

// Literal composition of conditional scale blocks over the bits of M. The
// carrier ends in |N * 2^(sum of set bit positions of M)>, which equals
// |N * M> exactly when M has a single set bit.
MultiplyResult multiply_pipeline(const std::vector<QubitAmplitudes>& n_qubits,
                                 const std::vector<QubitAmplitudes>& m_qubits, int n);

// Most-significant-first amplitude list encoding an integer.
std::vector<QubitAmplitudes> qubits_from_integer(std::uint64_t value, int n);

// Smallest k with 2^k >= m (stage count of the sorters).
int ceil_log2(std::int64_t m);

}  // namespace oam
