#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oam/oracle.hpp"
#include "test_support.hpp"

using namespace oam;
using oracle::ArithmeticOp;

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}

TEST_CASE("mux amplitude products") {
    SUBCASE("single channel passes through") {
        Eigen::VectorXcd v = oracle::mux_amplitudes({{{0.6, 0.0}, {0.0, 0.8}}}, 1);
        CHECK(v.size() == 2);
        CHECK(v(0) == Complex{0.6, 0.0});
        CHECK(v(1) == Complex{0.0, 0.8});
    }

    SUBCASE("two uniform channels give four equal entries") {
        std::vector<QubitAmplitudes> qs(2, {{kInvSqrt2, 0.0}, {kInvSqrt2, 0.0}});
        Eigen::VectorXcd v = oracle::mux_amplitudes(qs, 2);
        for (int i = 0; i < 4; ++i)
            CHECK(std::abs(v(i) - Complex{0.5, 0.0}) < 1e-15);
    }

    SUBCASE("basis channels pick one entry") {
        // most significant channel |0>, least significant |1> -> ell = 1
        std::vector<QubitAmplitudes> qs{{{1.0, 0.0}, {0.0, 0.0}},
                                        {{0.0, 0.0}, {1.0, 0.0}}};
        Eigen::VectorXcd v = oracle::mux_amplitudes(qs, 2);
        CHECK(v(1) == Complex{1.0, 0.0});
        CHECK(v(0) == Complex{0.0, 0.0});
        CHECK(v(2) == Complex{0.0, 0.0});
        CHECK(v(3) == Complex{0.0, 0.0});
    }

    SUBCASE("unit norm for normalized inputs") {
        std::mt19937_64 rng(31);
        for (int n = 1; n <= 4; ++n)
            for (int trial = 0; trial < 25; ++trial) {
                Eigen::VectorXcd v =
                    oracle::mux_amplitudes(oamtest::random_qubits(rng, n), n);
                CHECK(std::abs(v.norm() - 1.0) < 1e-12);
            }
    }

    CHECK_THROWS_AS(oracle::mux_amplitudes({{{0.9, 0.0}, {0.9, 0.0}}}, 1),
                    NotNormalized);
}

TEST_CASE("combiner product state") {
    SUBCASE("single channel") {
        PureState s = oracle::combiner_state({{{0.6, 0.0}, {0.0, 0.8}}}, 1, 0);
        CHECK(s.photons == 1);
        CHECK(s.amplitude(make_basis({{Mode{0, -1}, 1}})) == Complex{0.6, 0.0});
        CHECK(s.amplitude(make_basis({{Mode{0, 1}, 1}})) == Complex{0.0, 0.8});
    }

    SUBCASE("two channels expand to four terms") {
        const Complex ai{0.6, 0.0}, bi{0.8, 0.0};
        const Complex aj{kInvSqrt2, 0.0}, bj{0.0, kInvSqrt2};
        PureState s = oracle::combiner_state({{ai, bi}, {aj, bj}}, 2, 0);
        CHECK(s.term_count() == 4);
        CHECK(s.amplitude(make_basis({{Mode{0, -2}, 1}, {Mode{0, -1}, 1}})) == ai * aj);
        CHECK(s.amplitude(make_basis({{Mode{0, -2}, 1}, {Mode{0, 1}, 1}})) == ai * bj);
        CHECK(s.amplitude(make_basis({{Mode{0, 2}, 1}, {Mode{0, -1}, 1}})) == bi * aj);
        CHECK(s.amplitude(make_basis({{Mode{0, 2}, 1}, {Mode{0, 1}, 1}})) == bi * bj);
    }

    SUBCASE("basis channels give one product term") {
        std::vector<QubitAmplitudes> qs{{{0.0, 0.0}, {1.0, 0.0}},
                                        {{1.0, 0.0}, {0.0, 0.0}},
                                        {{1.0, 0.0}, {0.0, 0.0}}};
        PureState s = oracle::combiner_state(qs, 3, 5);
        CHECK(s.term_count() == 1);
        CHECK(s.amplitude(make_basis({{Mode{5, 4}, 1}, {Mode{5, -2}, 1},
                                      {Mode{5, -1}, 1}})) == Complex{1.0, 0.0});
    }
}

TEST_CASE("interferometer transfer matrix") {
    SUBCASE("even multiples keep ports, odd multiples exchange them") {
        Eigen::Matrix2cd id = oracle::interferometer_matrix(8, 4);
        CHECK(id(0, 0) == Complex{1.0, 0.0});
        CHECK(id(0, 1) == Complex{0.0, 0.0});

        Eigen::Matrix2cd swap = oracle::interferometer_matrix(4, 4);
        CHECK(swap(0, 0) == Complex{0.0, 0.0});
        CHECK(swap(0, 1) == Complex{1.0, 0.0});
        CHECK(swap(1, 0) == Complex{1.0, 0.0});
        CHECK(swap(1, 1) == Complex{0.0, 0.0});
    }

    SUBCASE("half multiples split evenly") {
        Eigen::Matrix2cd m = oracle::interferometer_matrix(1, 2);
        CHECK(std::abs(std::abs(m(0, 0)) - kInvSqrt2) < 1e-15);
        CHECK(m(0, 0) == Complex{0.5, 0.5});
        CHECK(m(0, 1) == Complex{0.5, -0.5});
    }

    SUBCASE("unitary for every ell and K") {
        for (std::int64_t K : {1, 2, 4, 8}) {
            for (std::int64_t ell = -32; ell <= 32; ++ell) {
                Eigen::Matrix2cd m = oracle::interferometer_matrix(ell, K);
                Eigen::Matrix2cd gram = m * m.adjoint();
                CHECK((gram - Eigen::Matrix2cd::Identity()).norm() < 1e-12);
            }
        }
    }
}

TEST_CASE("integer arithmetic references") {
    CHECK(oracle::arithmetic(3, 5, ArithmeticOp::add) == 8);
    CHECK(oracle::arithmetic(11, 0, ArithmeticOp::add) == 11);
    // set bits of 3 sit at positions {0, 1}: N * 2^(0+1)
    CHECK(oracle::arithmetic(3, 3, ArithmeticOp::scale_shift_composition) == 6);
    CHECK(oracle::arithmetic(5, 4, ArithmeticOp::scale_shift_composition) == 20);
    CHECK(oracle::arithmetic(7, 0, ArithmeticOp::scale_shift_composition) == 7);
}
