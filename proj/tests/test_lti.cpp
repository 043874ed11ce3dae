#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dtdob/errors.hpp"
#include "dtdob/lti.hpp"

using namespace dtdob;

TEST(RationalTransfer, RejectsZeroDenominator) {
    EXPECT_THROW(RationalTransfer(Polynomial{1.0}, Polynomial{}), ZeroPolynomial);
}

TEST(RationalTransfer, DiscreteEvaluationUsesShiftedBasis) {
    // (w + 0.5)/(w^2 + 0.3) in w = z - 1
    const RationalTransfer tf(Polynomial{0.5, 1.0}, Polynomial{0.3, 0.0, 1.0}, Domain::DiscreteZ);
    const cplx z(0.4, 0.7);
    const cplx expected = tf.num_z()(z) / tf.den_z()(z);
    EXPECT_NEAR(std::abs(tf.eval(z) - expected), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(tf.poles()[0]), std::abs(cplx(1.0, std::sqrt(0.3))), 1e-12);
    EXPECT_NEAR(tf.zeros()[0].real(), 0.5, 1e-14);
}

TEST(RationalTransfer, RelativeDegreeAndGain) {
    const RationalTransfer tf(Polynomial{1.0, 3.0}, Polynomial{1.0, 2.0, 2.0, 4.0});
    EXPECT_EQ(tf.relative_degree(), 2);
    EXPECT_DOUBLE_EQ(high_frequency_gain(tf), 0.75);
    EXPECT_DOUBLE_EQ(tf.normalized().den.leading(), 1.0);
}

TEST(StateSpace, CharacteristicPolynomialOfCompanion) {
    Eigen::MatrixXd A(3, 3);
    A << 0, 1, 0, 0, 0, 1, -6, -11, -6;
    EXPECT_TRUE(approx_equal(characteristic_polynomial(A), Polynomial({6.0, 11.0, 6.0, 1.0}), 1e-12));
}

TEST(StateSpace, RealizationRoundTrip) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + trial % 6;
        const int m = trial % (n + 1);
        std::vector<double> den(n + 1), num(m + 1);
        for (double& x : den) x = u(rng);
        for (double& x : num) x = u(rng);
        den.back() = 1.0 + std::abs(den.back());
        const RationalTransfer tf{Polynomial(num), Polynomial(den)};
        const StateSpace ss = realize_controllable_canonical(tf);
        EXPECT_EQ(ss.order(), n);
        const RationalTransfer back = ss.transfer();
        for (cplx s : {cplx(0.3, 1.1), cplx(-2.0, 0.5), cplx(4.0, -3.0)})
            EXPECT_NEAR(std::abs(back.eval(s) - tf.eval(s)), 0.0, 1e-9 * std::max(1.0, std::abs(tf.eval(s))));
    }
}

TEST(StateSpace, ImproperTransferRejected) {
    EXPECT_THROW(realize_controllable_canonical(RationalTransfer(Polynomial{1.0, 1.0, 1.0}, Polynomial{1.0, 1.0})),
                 ImproperTransfer);
}

TEST(TwoMassSpring, MemberCoefficients) {
    const RationalTransfer p = two_mass_spring_member(0.8, 0.8, 2.0);
    EXPECT_TRUE(approx_equal(p.num, Polynomial({2.0})));
    EXPECT_TRUE(approx_equal(p.den, Polynomial({0.0, 0.0, 3.2, 0.0, 0.64})));
    EXPECT_EQ(p.relative_degree(), 4);
    EXPECT_NEAR(high_frequency_gain(two_mass_spring_member(2.0, 2.0, 1.2)), 0.3, 1e-15);
    EXPECT_THROW(two_mass_spring_member(0.0, 1.0, 1.0), PreconditionViolation);
}

TEST(TwoMassSpring, InducedFamilyBounds) {
    const UncertainPlantFamily fam = two_mass_spring_family({0.5, 2.0}, {0.5, 2.0}, {0.8, 1.2}, 5);
    EXPECT_EQ(fam.n, 4);
    EXPECT_EQ(fam.nu, 4);
    const auto [glo, ghi] = gain_interval(fam);
    EXPECT_NEAR(glo, 0.2, 1e-12);
    EXPECT_NEAR(ghi, 4.8, 1e-12);
    EXPECT_NEAR(fam.alpha_lo[2], 0.8, 1e-12);
    EXPECT_NEAR(fam.alpha_hi[2], 4.8, 1e-12);
    EXPECT_EQ(fam.members().size(), 125u);
    for (const RationalTransfer& m : fam.members()) EXPECT_TRUE(family_contains(fam, m));
}

TEST(Family, Containment) {
    const UncertainPlantFamily fam = two_mass_spring_family({0.5, 2.0}, {0.5, 2.0}, {0.8, 1.2}, 5);
    EXPECT_TRUE(family_contains(fam, two_mass_spring_member(1.0, 1.0, 1.0)));
    // alpha2 = 2 K / M = 5 exceeds 4.8
    EXPECT_FALSE(family_contains(fam, two_mass_spring_member(0.8, 0.8, 2.0)));
    EXPECT_FALSE(family_contains(fam, RationalTransfer(Polynomial{1.0}, Polynomial{1.0, 1.0})));
}

TEST(Family, SampleMemberChecksBounds) {
    UncertainPlantFamily fam;
    fam.n = 2;
    fam.nu = 1;
    fam.g_lo = 1.0;
    fam.g_hi = 2.0;
    fam.alpha_lo = {1.0, 1.0};
    fam.alpha_hi = {2.0, 3.0};
    fam.beta_lo = {0.5};
    fam.beta_hi = {1.0};
    const RationalTransfer m = sample_member(fam, {1.5, {1.0, 2.0}, {0.5}});
    EXPECT_TRUE(approx_equal(m.num, Polynomial({0.75, 1.5})));
    EXPECT_TRUE(approx_equal(m.den, Polynomial({1.0, 2.0, 1.0})));
    EXPECT_THROW(sample_member(fam, {3.0, {1.0, 2.0}, {0.5}}), OutOfBounds);
    EXPECT_THROW(sample_member(fam, {1.5, {1.0}, {0.5}}), OutOfBounds);
    // three levels on each of four free coefficients
    EXPECT_EQ(fam.members().size(), 81u);
    const IntervalPolynomial num = fam.numerator_interval();
    EXPECT_EQ(num.lo, (std::vector<double>{0.5, 1.0}));
    EXPECT_EQ(num.hi, (std::vector<double>{1.0, 1.0}));
    EXPECT_EQ(fam.denominator_interval().hi, (std::vector<double>{2.0, 3.0, 1.0}));
}

TEST(Family, ValidateRejectsInconsistentBounds) {
    UncertainPlantFamily fam = point_family(RationalTransfer(Polynomial{2.0}, Polynomial{1.0, 1.0}));
    EXPECT_NO_THROW(fam.validate());
    fam.g_lo = 3.0;
    EXPECT_THROW(fam.validate(), PreconditionViolation);
    fam = point_family(RationalTransfer(Polynomial{2.0}, Polynomial{1.0, 1.0}));
    fam.alpha_lo = {2.0};
    fam.alpha_hi = {1.0};
    EXPECT_THROW(fam.validate(), PreconditionViolation);
}

TEST(Family, PointFamilyHasOneMember) {
    const RationalTransfer p(Polynomial{2.0, 4.0}, Polynomial{1.0, 3.0, 2.0});
    const UncertainPlantFamily fam = point_family(p);
    EXPECT_EQ(fam.n, 2);
    EXPECT_EQ(fam.nu, 1);
    EXPECT_DOUBLE_EQ(fam.g_lo, 2.0);
    ASSERT_EQ(fam.members().size(), 1u);
    EXPECT_TRUE(family_contains(fam, p));
}

TEST(Coprimality, WarnsOnSharedFactor) {
    const RationalTransfer shared(Polynomial{1.0, 1.0}, Polynomial{2.0, 3.0, 1.0});
    EXPECT_EQ(coprimality_warnings(shared).size(), 1u);
    const RationalTransfer coprime(Polynomial{3.0, 1.0}, Polynomial{2.0, 3.0, 1.0});
    EXPECT_TRUE(coprimality_warnings(coprime).empty());
}
