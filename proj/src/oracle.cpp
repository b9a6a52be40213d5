#include "oam/oracle.hpp"

#include <cmath>
#include <numbers>

namespace oam::oracle {

namespace {

void check_normalized(const std::vector<QubitAmplitudes>& qubits) {
    for (const auto& q : qubits) {
        const double total = std::norm(q.alpha) + std::norm(q.beta);
        if (std::abs(total - 1.0) > kNormTol)
            throw NotNormalized("oracle: qubit amplitudes not normalized");
    }
}

}  // namespace

Eigen::VectorXcd mux_amplitudes(const std::vector<QubitAmplitudes>& qubits, int n) {
    if (n < 1 || static_cast<int>(qubits.size()) != n)
        throw Error("mux_amplitudes: need exactly n qubit pairs");
    check_normalized(qubits);
    const std::int64_t dim = std::int64_t{1} << n;
    Eigen::VectorXcd amps(dim);
    for (std::int64_t ell = 0; ell < dim; ++ell) {
        Complex product{1.0, 0.0};
        for (int k = 0; k < n; ++k) {
            const auto& q = qubits[static_cast<std::size_t>(n - 1 - k)];
            product *= ((ell >> k) & 1) ? q.beta : q.alpha;
        }
        amps(ell) = product;
    }
    return amps;
}

PureState combiner_state(const std::vector<QubitAmplitudes>& qubits, int n,
                         PathId path) {
    if (n < 1 || static_cast<int>(qubits.size()) != n)
        throw Error("combiner_state: need exactly n qubit pairs");
    check_normalized(qubits);
    PureState state;
    state.photons = n;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        Complex amp{1.0, 0.0};
        std::vector<ModeCount> modes;
        modes.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const auto& q = qubits[static_cast<std::size_t>(n - 1 - i)];
            const bool one = (mask >> i) & 1;
            amp *= one ? q.beta : q.alpha;
            modes.push_back({Mode{path, one ? (std::int64_t{1} << i)
                                            : -(std::int64_t{1} << i)},
                             1});
        }
        if (std::abs(amp) < kAmpPrune) continue;
        add_term(state, make_basis(std::move(modes)), amp);
    }
    return state;
}

Eigen::Matrix2cd interferometer_matrix(std::int64_t ell, std::int64_t K) {
    if (K < 1) throw Error("interferometer_matrix: K must be >= 1");
    // e^{i ell pi / K}, exact for multiples of K/2
    Complex phase;
    const std::int64_t two_k = 2 * K;
    const std::int64_t r = ((ell % two_k) + two_k) % two_k;  // in [0, 2K)
    if (r % K == 0) {
        phase = (r / K) % 2 == 0 ? Complex{1.0, 0.0} : Complex{-1.0, 0.0};
    } else if ((2 * r) % K == 0) {
        const std::int64_t quarter_turns = (2 * r / K) % 4;  // odd
        phase = quarter_turns == 1 ? Complex{0.0, 1.0} : Complex{0.0, -1.0};
    } else {
        phase = std::polar(1.0, std::numbers::pi * static_cast<double>(r) /
                                    static_cast<double>(K));
    }
    const Complex keep = (Complex{1.0, 0.0} + phase) / 2.0;
    const Complex swap = (Complex{1.0, 0.0} - phase) / 2.0;
    Eigen::Matrix2cd m;
    m << keep, swap, swap, keep;
    return m;
}

std::int64_t arithmetic(std::int64_t N, std::int64_t M, ArithmeticOp op) {
    if (N < 0 || M < 0) throw Error("arithmetic: operands must be non-negative");
    switch (op) {
        case ArithmeticOp::add:
            return N + M;
        case ArithmeticOp::scale_shift_composition: {
            std::int64_t shift = 0;
            for (std::int64_t bit = 0; bit < 62; ++bit)
                if ((M >> bit) & 1) shift += bit;
            return N << shift;
        }
    }
    throw Error("arithmetic: unknown operation");
}

}  // namespace oam::oracle
