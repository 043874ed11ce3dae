#include <gtest/gtest.h>

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dtdob/errors.hpp"
#include "dtdob/sim.hpp"
#include "support/benchmark_cases.hpp"

using namespace dtdob;
using dtdob::testing::benchmark_cases;
using dtdob::testing::proposed_filter;

namespace {

const BenchmarkConfig kCfg;

}  // namespace

TEST(Rk4, IntegratorIsExact) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(1, 1);
    Eigen::VectorXd B = Eigen::VectorXd::Ones(1);
    const Eigen::VectorXd x = rk4_sample_step(A, B, Eigen::VectorXd::Zero(1), 1.0, SignalSpec::zero(), 0.0, 0.1, 1);
    EXPECT_NEAR(x(0), 0.1, 1e-15);
}

TEST(Rk4, MatchesExponentialForLag) {
    Eigen::MatrixXd A(1, 1);
    A << -1.0;
    Eigen::VectorXd B = Eigen::VectorXd::Ones(1);
    const Eigen::VectorXd x = rk4_sample_step(A, B, Eigen::VectorXd::Zero(1), 1.0, SignalSpec::zero(), 0.0, 0.1, 20);
    EXPECT_NEAR(x(0), 1.0 - std::exp(-0.1), 1e-12);
    EXPECT_THROW(rk4_sample_step(A, B, x, 1.0, SignalSpec::zero(), 0.0, 0.1, 0), PreconditionViolation);
}

TEST(Rk4, RecordsSubsteps) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(1, 1);
    Eigen::VectorXd B = Eigen::VectorXd::Ones(1);
    Eigen::RowVectorXd C = Eigen::RowVectorXd::Ones(1);
    std::vector<double> t, y;
    rk4_sample_step(A, B, Eigen::VectorXd::Zero(1), 2.0, SignalSpec::zero(), 1.0, 0.5, 5, &C, &t, &y);
    ASSERT_EQ(t.size(), 5u);
    EXPECT_NEAR(t.back(), 1.5, 1e-15);
    EXPECT_NEAR(y.back(), 1.0, 1e-15);
}

TEST(Signals, Terms) {
    SignalSpec s = SignalSpec::step(2.0, 1.0);
    EXPECT_DOUBLE_EQ(s(0.5), 0.0);
    EXPECT_DOUBLE_EQ(s(1.0), 2.0);
    s.terms.push_back({SignalSpec::Kind::Constant, 0.5});
    s.terms.push_back({SignalSpec::Kind::Sine, 1.0, 2.0, 0.25});
    EXPECT_NEAR(s(3.0), 2.5 + std::sin(6.25), 1e-15);
    EXPECT_DOUBLE_EQ(SignalSpec::zero()(4.0), 0.0);
}

TEST(Realization, TransfersMatchBlockComposition) {
    for (const auto& c : benchmark_cases(kCfg)) {
        const ControllerRealization k = realize_controller(c.design);
        const RationalTransfer C = c.design.controller_dt();
        const RationalTransfer Pn = c.design.nominal_dt();
        const RationalTransfer Q = c.design.q.transfer();
        for (int i = 0; i < 20; ++i) {
            const double w = std::pow(10.0, -2.0 + 4.0 * i / 19.0) * 0.5;
            const cplx z = std::exp(cplx(0.0, std::min(w * c.design.delta, 3.0)));
            const cplx q = Q.eval(z), cz = C.eval(z), pn = Pn.eval(z);
            const cplx tr = cz / (1.0 - q);
            const cplx ty = -(cz + q / pn) / (1.0 - q);
            const auto [gr, gy] = k.transfer_at(z);
            EXPECT_NEAR(std::abs(gr - tr), 0.0, 1e-7 * std::max(1.0, std::abs(tr))) << c.name << " z " << z;
            EXPECT_NEAR(std::abs(gy - ty), 0.0, 1e-7 * std::max(1.0, std::abs(ty))) << c.name << " z " << z;
        }
    }
}

TEST(Realization, DisabledFilterIsPlainController) {
    const DobDesign d = kCfg.design(QFilter::zero(), DiscretizationMethod::FDM);
    const ControllerRealization k = realize_controller(d);
    EXPECT_EQ(k.order(), 2);
    const RationalTransfer C = d.controller_dt();
    const cplx z(0.3, 0.8);
    const auto [gr, gy] = k.transfer_at(z);
    EXPECT_NEAR(std::abs(gr - C.eval(z)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(gy + C.eval(z)), 0.0, 1e-12);
}

TEST(Realization, RejectsFeedthroughFilter) {
    DobDesign d = kCfg.design(QFilter{{0.5}, {0.5, 1.0}}, DiscretizationMethod::BDM);
    EXPECT_THROW(realize_controller(d), AlgebraicLoop);
}

TEST(Simulate, ZeroHorizonIsEmpty) {
    SimulationOptions opts;
    opts.horizon = 0.0;
    const auto tr =
        simulate(benchmark_cases(kCfg)[0].design, kCfg.member(), kCfg.reference(), kCfg.disturbance(), opts);
    EXPECT_TRUE(tr.t.empty());
    EXPECT_FALSE(tr.divergent);
    opts.substeps = 0;
    EXPECT_THROW(simulate(benchmark_cases(kCfg)[0].design, kCfg.member(), kCfg.reference(), kCfg.disturbance(), opts),
                 PreconditionViolation);
}

TEST(Simulate, SampleCountAndDeterminism) {
    SimulationOptions opts;
    opts.horizon = 3.0;
    const DobDesign d = benchmark_cases(kCfg)[0].design;
    const auto a = simulate(d, kCfg.member(), kCfg.reference(), kCfg.disturbance(), opts);
    const auto b = simulate(d, kCfg.member(), kCfg.reference(), kCfg.disturbance(), opts);
    EXPECT_EQ(a.t.size(), 200u);
    EXPECT_EQ(a.y, b.y);
    EXPECT_EQ(a.u, b.u);
    EXPECT_DOUBLE_EQ(a.y[0], 0.0);
}

TEST(Simulate, ConstantDisturbanceIsRejectedOnTheNominalPlant) {
    // Q has unity DC gain, so a constant input disturbance leaves no steady-state output error
    const DobDesign d = benchmark_cases(kCfg)[0].design;
    SimulationOptions opts;
    opts.horizon = 120.0;
    const auto clean = simulate(d, kCfg.nominal(), kCfg.reference(), SignalSpec::zero(), opts);
    SignalSpec dist;
    dist.terms.push_back({SignalSpec::Kind::Constant, 0.5});
    const auto hit = simulate(d, kCfg.nominal(), kCfg.reference(), dist, opts);
    ASSERT_FALSE(hit.divergent);
    EXPECT_LT(std::abs(hit.y.back() - clean.y.back()), 0.005);
    EXPECT_NEAR(hit.u.back() - clean.u.back(), -0.5, 0.005);
}

TEST(Simulate, DivergentCaseStopsAtBlowup) {
    const auto cases = benchmark_cases(kCfg);
    SimulationOptions opts;
    opts.horizon = kCfg.horizon;
    const auto tr = simulate(cases[4].design, kCfg.member(), kCfg.reference(), kCfg.disturbance(), opts);
    EXPECT_TRUE(tr.divergent);
    EXPECT_LT(tr.t.size(), 10000u);
    EXPECT_EQ(classify_trace(tr, 1e6), TraceClass::Divergent);
}

TEST(Simulate, RecordsContinuousTrace) {
    SimulationOptions opts;
    opts.horizon = 0.15;
    opts.substeps = 4;
    opts.record_ct = true;
    const auto tr = simulate(benchmark_cases(kCfg)[0].design, kCfg.member(), kCfg.reference(), kCfg.disturbance(), opts);
    EXPECT_EQ(tr.t.size(), 10u);
    EXPECT_EQ(tr.t_ct.size(), 41u);
    EXPECT_NEAR(tr.t_ct.back(), 0.15, 1e-12);
}

TEST(TraceClassification, BoundedAndDivergent) {
    SimulationTrace tr;
    tr.y = {0.0, 1.0, -2.0};
    EXPECT_EQ(classify_trace(tr, 10.0), TraceClass::Bounded);
    tr.y.push_back(std::nan(""));
    EXPECT_EQ(classify_trace(tr, 10.0), TraceClass::Divergent);
    EXPECT_STREQ(to_string(TraceClass::Bounded), "bounded");
}

TEST(FrequencyResponse, FirstOrderFilterAtNyquist) {
    const double delta = 0.01;
    const RationalTransfer q = QFilter::first_order(0.15).transfer();
    const auto pts = frequency_response(q, {0.0, std::numbers::pi / delta}, delta);
    EXPECT_NEAR(std::abs(pts[0].value - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(pts[1].value.real(), 0.15 / -1.85, 1e-12);
    EXPECT_NEAR(pts[1].value.imag(), 0.0, 1e-12);
    EXPECT_FALSE(pts[1].pole_proximity);
    EXPECT_TRUE(frequency_response(q, {}, delta).empty());
    EXPECT_THROW(frequency_response(q, {1.0}, 0.0), PreconditionViolation);
}

TEST(FrequencyResponse, PoleProximityFlag) {
    const RationalTransfer integ(Polynomial{1.0}, Polynomial{0.0, 1.0});
    const auto pts = frequency_response(integ, {0.0, 1.0});
    EXPECT_TRUE(pts[0].pole_proximity);
    EXPECT_FALSE(pts[1].pole_proximity);
    EXPECT_NEAR(std::abs(pts[1].value - cplx(0.0, -1.0)), 0.0, 1e-15);
}

TEST(Benchmark, ConfigurationBasics) {
    EXPECT_FALSE(kCfg.in_family());
    BenchmarkConfig nominal;
    nominal.M1 = nominal.M2 = nominal.K = 1.0;
    EXPECT_TRUE(nominal.in_family());
    EXPECT_TRUE(approx_equal(kCfg.member().den, two_mass_spring_member(0.8, 0.8, 2.0).den));
    EXPECT_EQ(kCfg.design(proposed_filter(), DiscretizationMethod::FDM).delta, 0.015);
}

TEST(Csv, ShortestRoundTripFormatting) {
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(1.0), "1");
    EXPECT_EQ(format_double(-2.5e-10), "-2.5e-10");
    for (double x : {1.0 / 3.0, std::numbers::pi, 1e-300, -7.123456789012345e12}) {
        const std::string s = format_double(x);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        EXPECT_EQ(back, x);
    }
}

TEST(Csv, TraceWriters) {
    SimulationTrace tr;
    tr.t = {0.0, 0.5};
    tr.y = {0.0, 0.25};
    tr.u = {1.0, 2.0};
    tr.d = {0.0, 0.0};
    std::ostringstream os;
    write_trace_csv(os, tr);
    EXPECT_EQ(os.str(), "t,y,u,d\n0,0,1,0\n0.5,0.25,2,0\n");
    std::ostringstream ct;
    write_trace_ct_csv(ct, SimulationTrace{});
    EXPECT_EQ(ct.str(), "t_ct,y_ct\n");
}
