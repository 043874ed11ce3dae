#include "dtdob/sim.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "dtdob/discretize.hpp"
#include "dtdob/errors.hpp"

namespace dtdob {

namespace {

struct ZBlock {
    Eigen::MatrixXd A;  // z-domain state matrix
    Eigen::VectorXd B;
    Eigen::RowVectorXd C;
    double D = 0.0;
};

ZBlock realize_z(const RationalTransfer& tf_w) {
    const StateSpace ss = realize_controllable_canonical(tf_w);
    ZBlock b;
    b.A = Eigen::MatrixXd::Identity(ss.order(), ss.order()) + ss.A;
    b.B = ss.B;
    b.C = ss.C;
    b.D = ss.D;
    return b;
}

}  // namespace

ControllerRealization realize_controller(const DobDesign& design) {
    const ZBlock c = realize_z(design.controller_dt());
    ZBlock f, q;
    const bool dob = !design.q.disabled();
    if (dob) {
        design.q.validate();
        const RationalTransfer Pn = design.nominal_dt();
        const RationalTransfer F(design.q.num_w() * Pn.den, design.q.den_w() * Pn.num, Domain::DiscreteZ);
        if (F.relative_degree() < 0) throw ImproperTransfer("Q P_n^{-1} is improper for this Q-filter");
        f = realize_z(F);
        q = realize_z(design.q.transfer());
        if (q.D != 0.0) throw AlgebraicLoop("Q-filter has direct feedthrough");
    }
    const int nc = static_cast<int>(c.A.rows());
    const int nf = dob ? static_cast<int>(f.A.rows()) : 0;
    const int nqs = dob ? static_cast<int>(q.A.rows()) : 0;
    const int n = nc + nf + nqs;

    ControllerRealization k;
    k.A = Eigen::MatrixXd::Zero(n, n);
    k.B = Eigen::MatrixXd::Zero(n, 2);
    k.C = Eigen::RowVectorXd::Zero(n);

    // u = C_c x_c + D_c (r - y) - C_f x_f - D_f y + C_q x_q
    k.C.segment(0, nc) = c.C;
    k.D << c.D, -c.D;
    k.A.block(0, 0, nc, nc) = c.A;
    k.B.block(0, 0, nc, 1) = c.B;
    k.B.block(0, 1, nc, 1) = -c.B;
    if (dob) {
        k.C.segment(nc, nf) = -f.C;
        k.C.segment(nc + nf, nqs) = q.C;
        k.D(1) -= f.D;
        k.A.block(nc, nc, nf, nf) = f.A;
        k.B.block(nc, 1, nf, 1) = f.B;
        k.A.block(nc + nf, nc + nf, nqs, nqs) = q.A;
        // x_q is driven by u
        k.A.block(nc + nf, 0, nqs, n) += q.B * k.C;
        k.B.block(nc + nf, 0, nqs, 2) += q.B * k.D;
    }
    k.state = Eigen::VectorXd::Zero(n);
    return k;
}

double ControllerRealization::step(double r, double y) {
    const Eigen::Vector2d in(r, y);
    const double u = (C * state)(0) + D * in;
    state = A * state + B * in;
    return u;
}

std::pair<cplx, cplx> ControllerRealization::transfer_at(cplx z) const {
    const int n = order();
    if (n == 0) return {D(0), D(1)};
    const Eigen::MatrixXcd M = z * Eigen::MatrixXcd::Identity(n, n) - A.cast<cplx>();
    const Eigen::MatrixXcd X = M.partialPivLu().solve(B.cast<cplx>());
    const Eigen::RowVectorXcd Cc = C.cast<cplx>();
    return {(Cc * X.col(0))(0) + D(0), (Cc * X.col(1))(0) + D(1)};
}

double SignalSpec::operator()(double t) const {
    double v = 0.0;
    for (const Term& term : terms) {
        switch (term.kind) {
            case Kind::Constant: v += term.amplitude; break;
            case Kind::Step: v += t >= term.t0 ? term.amplitude : 0.0; break;
            case Kind::Sine: v += term.amplitude * std::sin(term.omega * t + term.phase); break;
        }
    }
    return v;
}

SignalSpec SignalSpec::step(double amplitude, double t0) {
    SignalSpec s;
    s.terms.push_back({Kind::Step, amplitude, 0.0, 0.0, t0});
    return s;
}

SignalSpec SignalSpec::sine(double amplitude, double omega, double phase) {
    SignalSpec s;
    s.terms.push_back({Kind::Sine, amplitude, omega, phase, 0.0});
    return s;
}

Eigen::VectorXd rk4_sample_step(const Eigen::MatrixXd& A, const Eigen::VectorXd& B, const Eigen::VectorXd& x, double u,
                                const SignalSpec& d, double t0, double delta, int substeps, const Eigen::RowVectorXd* C,
                                std::vector<double>* t_ct, std::vector<double>* y_ct) {
    if (substeps < 1) throw PreconditionViolation("substeps must be at least 1");
    const double h = delta / substeps;
    auto f = [&](double t, const Eigen::VectorXd& s) -> Eigen::VectorXd { return A * s + B * (u + d(t)); };
    Eigen::VectorXd s = x;
    for (int i = 0; i < substeps; ++i) {
        const double t = t0 + i * h;
        const Eigen::VectorXd k1 = f(t, s);
        const Eigen::VectorXd k2 = f(t + 0.5 * h, s + 0.5 * h * k1);
        const Eigen::VectorXd k3 = f(t + 0.5 * h, s + 0.5 * h * k2);
        const Eigen::VectorXd k4 = f(t + h, s + h * k3);
        s += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (C && t_ct && y_ct) {
            t_ct->push_back(t0 + (i + 1) * h);
            y_ct->push_back((*C * s)(0));
        }
    }
    return s;
}

SimulationTrace simulate(const DobDesign& design, const RationalTransfer& member, const SignalSpec& r,
                         const SignalSpec& d, const SimulationOptions& opts) {
    if (opts.horizon < 0.0) throw PreconditionViolation("horizon must be non-negative");
    if (opts.substeps < 1) throw PreconditionViolation("substeps must be at least 1");
    if (member.relative_degree() < 1) throw PreconditionViolation("plant must be strictly proper");
    const StateSpace plant = realize_controllable_canonical(member);
    ControllerRealization ctrl = realize_controller(design);
    const double delta = design.delta;
    const long steps = static_cast<long>(std::floor(opts.horizon / delta + 1e-9));

    SimulationTrace tr;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(plant.order());
    if (opts.record_ct && steps > 0) {
        tr.t_ct.push_back(0.0);
        tr.y_ct.push_back(0.0);
    }
    for (long k = 0; k < steps; ++k) {
        const double t = k * delta;
        const double y = (plant.C * x)(0);
        tr.max_abs_y = std::max(tr.max_abs_y, std::abs(y));
        if (!std::isfinite(y) || std::abs(y) > opts.blowup) {
            tr.divergent = true;
            tr.t.push_back(t);
            tr.y.push_back(y);
            tr.u.push_back(0.0);
            tr.d.push_back(d(t));
            break;
        }
        const double u = ctrl.step(r(t), y);
        tr.t.push_back(t);
        tr.y.push_back(y);
        tr.u.push_back(u);
        tr.d.push_back(d(t));
        x = rk4_sample_step(plant.A, plant.B, x, u, d, t, delta, opts.substeps, opts.record_ct ? &plant.C : nullptr,
                            &tr.t_ct, &tr.y_ct);
    }
    return tr;
}

const char* to_string(TraceClass c) { return c == TraceClass::Bounded ? "bounded" : "divergent"; }

TraceClass classify_trace(const SimulationTrace& trace, double bound) {
    for (double y : trace.y)
        if (!std::isfinite(y) || std::abs(y) > bound) return TraceClass::Divergent;
    return TraceClass::Bounded;
}

std::vector<FrequencyPoint> frequency_response(const RationalTransfer& tf, const std::vector<double>& omegas,
                                               double delta) {
    if (tf.is_discrete() && !(delta > 0.0)) throw PreconditionViolation("discrete frequency response needs delta > 0");
    std::vector<FrequencyPoint> out;
    out.reserve(omegas.size());
    for (double w : omegas) {
        FrequencyPoint p;
        p.omega = w;
        const cplx x = tf.is_discrete() ? expm1c(cplx(0.0, w * delta)) : cplx(0.0, w);
        const cplx den = tf.den(x);
        double scale = 0.0;
        for (int k = 0; k <= tf.den.degree(); ++k) scale += std::abs(tf.den[k]) * std::pow(std::abs(x), k);
        p.pole_proximity = std::abs(den) <= 1e-12 * scale;
        p.value = tf.num(x) / den;
        out.push_back(p);
    }
    return out;
}

bool BenchmarkConfig::in_family() const {
    auto in = [](double x, double lo, double hi) { return x >= lo && x <= hi; };
    return in(M1, kM_lo, kM_hi) && in(M2, kM_lo, kM_hi) && in(K, kK_lo, kK_hi);
}

RationalTransfer BenchmarkConfig::member() const { return two_mass_spring_member(M1, M2, K); }
RationalTransfer BenchmarkConfig::nominal() const { return two_mass_spring_member(Mn1, Mn2, Kn); }
RationalTransfer BenchmarkConfig::controller() const {
    return RationalTransfer(Polynomial(controller_num), Polynomial(controller_den));
}

UncertainPlantFamily BenchmarkConfig::family(int grid_points) const {
    return two_mass_spring_family({kM_lo, kM_hi}, {kM_lo, kM_hi}, {kK_lo, kK_hi}, grid_points);
}

DobDesign BenchmarkConfig::design(const QFilter& q, DiscretizationMethod nominal_method,
                                  DiscretizationMethod controller_method) const {
    DobDesign d;
    d.family = family();
    d.nominal_ct = nominal();
    d.controller_ct = controller();
    d.nominal_method = nominal_method;
    d.controller_method = controller_method;
    d.q = q;
    d.delta = delta;
    return d;
}

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& os, const SimulationTrace& trace) {
    os << "t,y,u,d\n";
    for (size_t i = 0; i < trace.t.size(); ++i)
        os << format_double(trace.t[i]) << ',' << format_double(trace.y[i]) << ',' << format_double(trace.u[i]) << ','
           << format_double(trace.d[i]) << '\n';
}

void write_trace_ct_csv(std::ostream& os, const SimulationTrace& trace) {
    os << "t_ct,y_ct\n";
    for (size_t i = 0; i < trace.t_ct.size(); ++i)
        os << format_double(trace.t_ct[i]) << ',' << format_double(trace.y_ct[i]) << '\n';
}

}  // namespace dtdob
