// oamsim: run, verify and tally OAM multiplexing circuit files.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "oam/circuit.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw oam::Error("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw oam::Error("cannot write '" + tmp + "'");
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

void apply_ell_max_env() {
    const char* raw = std::getenv("OAMSIM_LMAX");
    if (!raw) return;
    char* end = nullptr;
    const long long bound = std::strtoll(raw, &end, 10);
    if (end == raw || *end != '\0' || bound < 1)
        throw oam::Error("OAMSIM_LMAX must be a positive integer");
    oam::set_ell_max(bound);
}

void print_run_summary(const oam::RunReport& report) {
    std::printf("final state (%zu terms, norm %.12f):\n", report.amplitudes.size(),
                report.norm);
    const std::size_t shown = std::min<std::size_t>(report.amplitudes.size(), 32);
    for (std::size_t i = 0; i < shown; ++i) {
        const auto& entry = report.amplitudes[i];
        std::printf("  |%s>  %+.12f %+.12fi\n",
                    entry.basis.empty() ? "vacuum" : entry.basis.c_str(),
                    entry.amp.real(), entry.amp.imag());
    }
    if (shown < report.amplitudes.size())
        std::printf("  ... %zu more terms\n", report.amplitudes.size() - shown);
    if (!report.qnd_bits.empty()) {
        std::printf("qnd bits:");
        for (int bit : report.qnd_bits) std::printf(" %d", bit);
        std::printf("\n");
    }
    for (const auto& check : report.vacuum_checks)
        std::printf("[%s] %s on %s: probability %.3e (tol %.1e)\n",
                    check.pass ? "PASS" : "FAIL",
                    check.label.empty() ? "vacuum check" : check.label.c_str(),
                    check.path.c_str(), check.probability, check.tol);
    std::printf("tally: cnot %lld, hologram %lld, interferometer %lld, qnd %lld\n",
                static_cast<long long>(report.tally.cnot),
                static_cast<long long>(report.tally.hologram),
                static_cast<long long>(report.tally.interferometer),
                static_cast<long long>(report.tally.qnd));
    for (const auto& note : report.notes) std::printf("note: %s\n", note.c_str());
    std::printf("seed: %llu, runtime %.2f ms\n",
                static_cast<unsigned long long>(report.seed), report.duration_ms);
}

void print_tally(const oam::GateTally& tally) {
    const auto row = [](const char* name, std::int64_t value) {
        if (value != 0) std::printf("  %-16s %lld\n", name, static_cast<long long>(value));
    };
    std::printf("gate tally:\n");
    row("cnot", tally.cnot);
    row("hologram", tally.hologram);
    row("interferometer", tally.interferometer);
    row("beamsplitter", tally.beamsplitter);
    row("arm_phase", tally.arm_phase);
    row("dove", tally.dove);
    row("oam_flip", tally.oam_flip);
    row("oam_scale", tally.oam_scale);
    row("qnd", tally.qnd);
    row("classical_switch", tally.classical_switch);
    row("vacuum_check", tally.vacuum_check);
}

void print_verify_summary(const oam::VerifyReport& report) {
    std::printf("pipeline: %s\n", report.pipeline.c_str());
    for (const auto& check : report.tally_checks)
        std::printf("[%s] %s: expected %lld, got %lld\n",
                    check.pass ? "PASS" : "FAIL", check.name.c_str(),
                    static_cast<long long>(check.expected),
                    static_cast<long long>(check.actual));
    for (const auto& line : report.cases) std::printf("  case %s\n", line.c_str());
    for (const auto& note : report.notes) std::printf("note: %s\n", note.c_str());
    std::printf("status: %s\n", oam::to_string(report.status));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"OAM multiplexing circuit simulator"};
    app.require_subcommand(1);

    std::string file;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    bool exhaustive = false;

    CLI::App* run = app.add_subcommand("run", "simulate a circuit file");
    run->add_option("file", file, "circuit JSON file")->required();
    run->add_option("--seed", seed, "override the circuit's rng seed");
    run->add_option("--out", out_path, "write the run report JSON here");

    CLI::App* verify =
        app.add_subcommand("verify", "check a pipeline against its closed form");
    verify->add_option("file", file, "circuit JSON file")->required();
    verify->add_flag("--exhaustive", exhaustive, "sweep every basis input");
    verify->add_option("--out", out_path, "write the verification report JSON here");

    CLI::App* tally = app.add_subcommand("tally", "print the gate tally of a run");
    tally->add_option("file", file, "circuit JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // stable contract: 1 for any usage error
    }

    try {
        apply_ell_max_env();
        const oam::CircuitSpec spec = oam::parse_circuit(read_file(file));

        if (run->parsed()) {
            const oam::RunReport report =
                seed ? oam::run_circuit(spec, *seed) : oam::run_circuit(spec);
            print_run_summary(report);
            if (!out_path.empty()) write_file_atomic(out_path, report_to_json(report));
            return report.checks_passed ? 0 : 2;
        }
        if (verify->parsed()) {
            const oam::VerifyReport report = oam::verify_circuit(spec, exhaustive);
            print_verify_summary(report);
            if (!out_path.empty())
                write_file_atomic(out_path, verify_report_to_json(report));
            return report.status == oam::VerifyStatus::fail ? 2 : 0;
        }
        const oam::RunReport report = oam::run_circuit(spec);
        print_tally(report.tally);
        return 0;
    } catch (const oam::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
