#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "oam/fock.hpp"

// Closed-form reference computations for the pipelines. Everything here is
// direct arithmetic on the defining formulas; none of it goes through the
// element engine, so agreement between the two is evidence rather than
// tautology.
namespace oam::oracle {

// Amplitude over the carrier winding numbers 0 .. 2^n - 1 produced by
// multiplexing the given channels: entry ell is the product over channels k
// of alpha_k (bit k of ell clear) or beta_k (bit k set). `qubits` is most
// significant channel first.
Eigen::VectorXcd mux_amplitudes(const std::vector<QubitAmplitudes>& qubits, int n);

// The n-photon product state of the combiner: channel i contributes
// alpha_i |-2^i> + beta_i |+2^i> on a single shared path.
PureState combiner_state(const std::vector<QubitAmplitudes>& qubits, int n,
                         PathId path = 0);

// Single-photon transfer matrix of the splitter-phase-splitter block on
// (up, down), theta = ell pi / K. Exact for theta a multiple of pi/2.
Eigen::Matrix2cd interferometer_matrix(std::int64_t ell, std::int64_t K);

enum class ArithmeticOp {
    add,                      // N + M
    scale_shift_composition,  // N * 2^(sum of set bit positions of M)
};

std::int64_t arithmetic(std::int64_t N, std::int64_t M, ArithmeticOp op);

}  // namespace oam::oracle
