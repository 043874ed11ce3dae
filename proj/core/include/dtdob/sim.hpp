#pragma once

#include <Eigen/Dense>
#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "dtdob/dob.hpp"
#include "dtdob/lti.hpp"

namespace dtdob {

/**
 * @brief Combined DT controller with inputs (r, y) and output u.
 *
 * Realizes u = C^d (r - y) - Q^d (P_n^d)^{-1} y + Q^d u in the z state update
 * x[k+1] = A x[k] + B [r; y], u[k] = C x[k] + D [r; y].
 */
struct ControllerRealization {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;  ///< columns r, y
    Eigen::RowVectorXd C;
    Eigen::RowVector2d D = Eigen::RowVector2d::Zero();
    Eigen::VectorXd state;

    int order() const { return static_cast<int>(A.rows()); }
    /// Output for the current state, then advance one sample.
    double step(double r, double y);
    void reset() { state.setZero(A.rows()); }
    /// Transfers from r and from y to u at z.
    std::pair<cplx, cplx> transfer_at(cplx z) const;
};

ControllerRealization realize_controller(const DobDesign& design);

/// Sum of step, sinusoid and constant terms.
struct SignalSpec {
    enum class Kind { Constant, Step, Sine };
    struct Term {
        Kind kind = Kind::Constant;
        double amplitude = 0.0;
        double omega = 0.0;   ///< rad/s, Sine only
        double phase = 0.0;   ///< rad, Sine only
        double t0 = 0.0;      ///< switch time, Step only
    };
    std::vector<Term> terms;

    double operator()(double t) const;
    static SignalSpec zero() { return {}; }
    static SignalSpec step(double amplitude, double t0 = 0.0);
    static SignalSpec sine(double amplitude, double omega, double phase = 0.0);
};

struct SimulationTrace {
    std::vector<double> t, y, u, d;
    std::vector<double> t_ct, y_ct;  ///< substep resolution, filled when requested
    bool divergent = false;
    double max_abs_y = 0.0;
};

struct SimulationOptions {
    double horizon = 10.0;
    int substeps = 20;
    double blowup = 1e6;
    bool record_ct = false;
};

/// One sample interval of x' = A x + B (u + d(t)) with classical RK4 and u held.
Eigen::VectorXd rk4_sample_step(const Eigen::MatrixXd& A, const Eigen::VectorXd& B, const Eigen::VectorXd& x, double u,
                                const SignalSpec& d, double t0, double delta, int substeps,
                                const Eigen::RowVectorXd* C = nullptr, std::vector<double>* t_ct = nullptr,
                                std::vector<double>* y_ct = nullptr);

/// Sampled-data closed loop with zero initial states. Stops early once |y| exceeds the blow-up bound.
SimulationTrace simulate(const DobDesign& design, const RationalTransfer& member, const SignalSpec& r,
                         const SignalSpec& d, const SimulationOptions& opts);

enum class TraceClass { Bounded, Divergent };
const char* to_string(TraceClass c);
TraceClass classify_trace(const SimulationTrace& trace, double bound);

struct FrequencyPoint {
    double omega = 0.0;
    cplx value;
    bool pole_proximity = false;
};

/// tf at s = j omega, or at z = exp(j omega delta) for a discrete transfer. A point is flagged when
/// |den| falls below 1e-12 of the sum of its term magnitudes.
std::vector<FrequencyPoint> frequency_response(const RationalTransfer& tf, const std::vector<double>& omegas,
                                               double delta = 0.0);

/**
 * @brief Two-mass-spring benchmark: family M1, M2 in [0.5, 2], K in [0.8, 1.2], unit nominal
 * parameters and the lead-lag controller (-6.83 s^2 + 1.85 s + 0.28)/(s^2 + 4.28 s + 6.08).
 */
struct BenchmarkConfig {
    double M1 = 0.8, M2 = 0.8, K = 2.0;
    double Mn1 = 1.0, Mn2 = 1.0, Kn = 1.0;
    std::vector<double> controller_num{0.28, 1.85, -6.83};
    std::vector<double> controller_den{6.08, 4.28, 1.0};
    double delta = 0.015;
    double disturbance_amplitude = 0.5;
    double disturbance_omega = 1.0;
    double horizon = 150.0;

    static constexpr double kM_lo = 0.5, kM_hi = 2.0, kK_lo = 0.8, kK_hi = 1.2;

    bool in_family() const;
    RationalTransfer member() const;
    RationalTransfer nominal() const;
    RationalTransfer controller() const;
    UncertainPlantFamily family(int grid_points = 21) const;
    DobDesign design(const QFilter& q, DiscretizationMethod nominal_method,
                     DiscretizationMethod controller_method = DiscretizationMethod::FDM) const;
    SignalSpec reference() const { return SignalSpec::step(1.0); }
    SignalSpec disturbance() const { return SignalSpec::sine(disturbance_amplitude, disturbance_omega); }
};

/// Shortest round-trip decimal form.
std::string format_double(double x);

/// Header t,y,u,d.
void write_trace_csv(std::ostream& os, const SimulationTrace& trace);
/// Header t_ct,y_ct.
void write_trace_ct_csv(std::ostream& os, const SimulationTrace& trace);

}  // namespace dtdob
