#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "onticlab/numerics.hpp"

using namespace onticlab;

namespace {

std::mt19937 rng(20240817);

CVector random_unit_vector(int dim) {
    std::normal_distribution<double> g(0.0, 1.0);
    CVector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = Complex{g(rng), g(rng)};
    return v * Complex{1.0 / v.norm(), 0.0};
}

CMatrix random_unitary(int dim) {
    // canonical completion of a random orthonormal pair
    CVector v = random_unit_vector(dim);
    return complete_to_unitary(dim, {{0, v}});
}

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

} // namespace

TEST_CASE("born probabilities on eigenstate and superposition") {
    std::vector<CVector> basis{CVector::basis(2, 0), CVector::basis(2, 1)};

    auto p = born_probabilities(CVector::basis(2, 0), basis);
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.0).epsilon(1e-12));

    CVector plus{{kInvSqrt2, 0.0}, {kInvSqrt2, 0.0}};
    p = born_probabilities(plus, basis);
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("born probabilities after balanced interferometer evolution") {
    // source through the first beamsplitter, measured in the output basis
    CMatrix bs(2, 2);
    bs(0, 0) = Complex{kInvSqrt2, 0.0};
    bs(0, 1) = Complex{kInvSqrt2, 0.0};
    bs(1, 0) = Complex{-kInvSqrt2, 0.0};
    bs(1, 1) = Complex{kInvSqrt2, 0.0};
    CVector after = apply_unitary(bs, CVector::basis(2, 1));
    std::vector<CVector> out_basis{CVector{{kInvSqrt2, 0.0}, {kInvSqrt2, 0.0}},
                                   CVector{{kInvSqrt2, 0.0}, {-kInvSqrt2, 0.0}}};
    auto p = born_probabilities(after, out_basis);
    CHECK(std::abs(p[0] - 1.0) <= 1e-12);
    CHECK(p[1] <= 1e-12);
}

TEST_CASE("born probabilities rejects bad input") {
    std::vector<CVector> basis{CVector::basis(2, 0), CVector::basis(2, 1)};
    CHECK_THROWS_AS(born_probabilities(CVector::basis(3, 0), basis), DimensionMismatch);

    std::vector<CVector> skew{CVector::basis(2, 0), CVector{{kInvSqrt2, 0.0}, {kInvSqrt2, 0.0}}};
    CHECK_THROWS_AS(born_probabilities(CVector::basis(2, 0), skew), NonOrthonormalBasis);
}

TEST_CASE("born probabilities sum to one on random inputs") {
    for (int trial = 0; trial < 25; ++trial) {
        int dim = 2 + static_cast<int>(rng() % 7);
        CMatrix u = random_unitary(dim);
        std::vector<CVector> basis;
        for (int i = 0; i < dim; ++i) basis.push_back(u.column(i));
        auto p = born_probabilities(random_unit_vector(dim), basis);
        double sum = 0.0;
        for (double x : p) {
            CHECK(x >= 0.0);
            CHECK(x <= 1.0);
            sum += x;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("apply_unitary basics") {
    CVector s1 = CVector::basis(2, 1);
    CMatrix bs(2, 2);
    bs(0, 0) = Complex{kInvSqrt2, 0.0};
    bs(0, 1) = Complex{kInvSqrt2, 0.0};
    bs(1, 0) = Complex{-kInvSqrt2, 0.0};
    bs(1, 1) = Complex{kInvSqrt2, 0.0};

    CVector r = apply_unitary(bs, s1);
    CHECK(std::abs(r[0] - Complex{kInvSqrt2, 0.0}) <= 1e-15);
    CHECK(std::abs(r[1] - Complex{kInvSqrt2, 0.0}) <= 1e-15);

    CVector v = random_unit_vector(2);
    CHECK(max_abs_diff(apply_unitary(CMatrix::identity(2), v), v) == 0.0);

    CMatrix not_unitary(2, 2);
    not_unitary(0, 0) = Complex{2.0, 0.0};
    CHECK_THROWS_AS(apply_unitary(not_unitary, v), NonUnitary);
    CHECK_THROWS_AS(apply_unitary(bs, random_unit_vector(3)), DimensionMismatch);
}

TEST_CASE("apply_unitary round trip") {
    for (int trial = 0; trial < 25; ++trial) {
        int dim = 2 + static_cast<int>(rng() % 7);
        CMatrix u = random_unitary(dim);
        CVector v = random_unit_vector(dim);
        CVector back = apply_unitary(u.adjoint(), apply_unitary(u, v));
        CHECK(max_abs_diff(back, v) <= 1e-12);
    }
}

TEST_CASE("complete_to_unitary canonical completions") {
    CMatrix m = complete_to_unitary(2, {{0, CVector::basis(2, 0)}});
    CHECK(max_abs_diff(m, CMatrix::identity(2)) == 0.0);

    m = complete_to_unitary(3, {{0, CVector::basis(3, 0)}, {1, CVector::basis(3, 1)}});
    CHECK(max_abs_diff(m, CMatrix::identity(3)) == 0.0);
}

TEST_CASE("complete_to_unitary fixes supplied columns and is unitary") {
    for (int trial = 0; trial < 25; ++trial) {
        int dim = 3 + static_cast<int>(rng() % 6);
        // arbitrary unit b orthogonal to e_0
        CVector b = random_unit_vector(dim);
        b[0] = Complex{0.0, 0.0};
        b = b * Complex{1.0 / b.norm(), 0.0};
        CMatrix u = complete_to_unitary(dim, {{0, CVector::basis(dim, 0)}, {1, b}});
        CHECK(u.unitarity_defect() <= 1e-10);
        CHECK(max_abs_diff(u.column(0), CVector::basis(dim, 0)) == 0.0);
        CHECK(max_abs_diff(u.column(1), b) == 0.0);
    }
}

TEST_CASE("complete_to_unitary is deterministic") {
    CVector b = random_unit_vector(5);
    auto u1 = complete_to_unitary(5, {{2, b}});
    auto u2 = complete_to_unitary(5, {{2, b}});
    CHECK(u1 == u2);  // bit-identical
}

TEST_CASE("complete_to_unitary input validation") {
    CHECK_THROWS_AS(complete_to_unitary(2, {{0, CVector::basis(2, 0)},
                                            {1, CVector::basis(2, 1)},
                                            {2, CVector::basis(2, 0)}}),
                    Overconstrained);
    CVector not_unit{{0.5, 0.0}, {0.0, 0.0}};
    CHECK_THROWS_AS(complete_to_unitary(2, {{0, not_unit}}), NotOrthonormal);
    CVector v = random_unit_vector(2);
    CHECK_THROWS_AS(complete_to_unitary(2, {{0, v}, {1, v}}), NotOrthonormal);
}

TEST_CASE("equal_up_to_global_phase") {
    CVector v = random_unit_vector(4);
    Complex phase = std::polar(1.0, 0.7);
    CHECK(equal_up_to_global_phase(v, v * phase, 1e-12));
    CHECK_FALSE(equal_up_to_global_phase(v, random_unit_vector(4), 1e-9));
}

TEST_CASE("tensor product shapes and values") {
    CVector a{{1.0, 0.0}, {0.0, 0.0}};
    CVector b{{0.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}};
    CVector t = tensor(a, b);
    CHECK(t.dim() == 6);
    CHECK(t[1] == Complex{1.0, 0.0});

    CMatrix m = CMatrix::tensor(CMatrix::identity(2), CMatrix::identity(3));
    CHECK(max_abs_diff(m, CMatrix::identity(6)) == 0.0);
}

TEST_CASE("constructed unitaries stay within tolerance") {
    for (int trial = 0; trial < 10; ++trial) {
        int dim = 2 + static_cast<int>(rng() % 10);
        CHECK(random_unitary(dim).unitarity_defect() <= 1e-10);
    }
}
