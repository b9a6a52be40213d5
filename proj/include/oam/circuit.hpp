#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oam/blocks.hpp"
#include "oam/elements.hpp"
#include "oam/fock.hpp"

namespace oam {

inline constexpr std::string_view kSchemaVersion = "1";

// state-size guard: 2^n amplitudes for the single-photon pipelines
inline constexpr int kMaxPipelineWidth = 12;

struct PhotonInit {
    PathId path = 0;
    std::int64_t ell = 0;
    std::int64_t count = 1;
};

struct LabeledElement {
    Element element;
    std::string label;
};

struct CarrierTerm {
    std::int64_t ell = 0;
    Complex amp{1.0, 0.0};
};

// A named composite circuit with its parameters. Which fields matter depends
// on the name: combiner/mux take `qubits`; demux and the sorters take
// `carrier` (and the sorters `bound`); adder/multiplier take the integer
// operands.
struct PipelineInvocation {
    std::string name;
    int n = 0;
    bool recycle = false;
    std::int64_t bound = 0;  // sorter M
    std::uint64_t operand_n = 0;
    std::uint64_t operand_m = 0;
    std::vector<QubitAmplitudes> qubits;  // most significant channel first
    std::vector<CarrierTerm> carrier;
};

struct CheckDirective {
    std::string path;  // resolved against the run's path table
    double tol = kVacuumTol;
};

struct CircuitSpec {
    std::string version{kSchemaVersion};
    std::vector<std::string> paths;  // declaration order assigns PathIds
    std::vector<PhotonInit> photons;
    std::vector<QubitSpec> qubit_inits;
    std::vector<LabeledElement> elements;
    std::optional<PipelineInvocation> pipeline;
    std::vector<CheckDirective> checks;
    std::uint64_t seed = 0;
};

CircuitSpec parse_circuit(const std::string& json_text);
std::string serialize_circuit(const CircuitSpec& spec);

struct AmplitudeEntry {
    std::string basis;  // path-name:ell:count triples joined by ';'
    Complex amp;
};

struct ReportCheck {
    std::string path;
    std::string label;
    double probability = 0.0;
    double tol = kVacuumTol;
    bool pass = true;
};

struct RunReport {
    std::uint64_t seed = 0;
    double norm = 0.0;
    std::vector<AmplitudeEntry> amplitudes;  // canonical basis order
    std::vector<ReportCheck> vacuum_checks;
    std::vector<int> qnd_bits;
    GateTally tally;
    bool checks_passed = true;
    std::vector<std::string> notes;
    double duration_ms = 0.0;  // console summary only, never serialized
};

RunReport run_circuit(const CircuitSpec& spec);
RunReport run_circuit(const CircuitSpec& spec, std::uint64_t seed_override);

// Deterministic function of the report content; amplitudes carry 17
// significant digits.
std::string report_to_json(const RunReport& report);

enum class VerifyStatus { pass, fail, documented_divergence };

struct TallyCheck {
    std::string name;
    std::int64_t expected = 0;
    std::int64_t actual = 0;
    bool pass = true;
};

struct VerifyReport {
    std::string pipeline;
    VerifyStatus status = VerifyStatus::fail;
    double max_deviation = 0.0;   // worst amplitude deviation from the oracle
    double worst_fidelity = 1.0;  // worst fidelity across verified cases
    std::vector<TallyCheck> tally_checks;
    std::vector<std::string> cases;
    std::vector<std::string> notes;
};

// Runs the named pipeline against its closed-form reference and the gate
// count formulas; pass/fail gate is 1e-9. `exhaustive` sweeps every basis
// input where that is meaningful (adder operand pairs, sorter inputs).
VerifyReport verify_circuit(const CircuitSpec& spec, bool exhaustive = false);
std::string verify_report_to_json(const VerifyReport& report);

const char* to_string(VerifyStatus status);

}  // namespace oam
