#include "dtdob/dob.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "dtdob/errors.hpp"

namespace dtdob {

void QFilter::validate() const {
    if (disabled()) {
        if (!c.empty()) throw PreconditionViolation("disabled Q-filter must have no numerator coefficients");
        return;
    }
    if (c.empty()) throw PreconditionViolation("Q-filter numerator is empty");
    if (a[0] == 0.0) throw PreconditionViolation("Q-filter needs a0 != 0");
    if (std::abs(c[0] - a[0]) > 1e-12 * std::abs(a[0])) throw PreconditionViolation("Q-filter needs c0 = a0 for unity DC gain");
    if (mq() >= nq()) throw AlgebraicLoop("Q-filter must be strictly proper (mq < nq)");
}

Polynomial QFilter::den_w() const {
    std::vector<double> v = a;
    v.push_back(1.0);
    return Polynomial(std::move(v));
}

Polynomial QFilter::num_w() const { return Polynomial(c); }

RationalTransfer QFilter::transfer() const {
    if (disabled()) return RationalTransfer(Polynomial{}, Polynomial{1.0}, Domain::DiscreteZ);
    return RationalTransfer(num_w(), den_w(), Domain::DiscreteZ);
}

void DobDesign::validate() const {
    family.validate();
    q.validate();
    if (!(delta > 0.0)) throw PreconditionViolation("sampling period must be positive");
    if (nominal_ct.relative_degree() != family.nu)
        throw PreconditionViolation("nominal model relative degree differs from the family");
    if (!q.disabled()) {
        const int need = std::max(nu() - n_mn(), 1);
        if (q.nq() - q.mq() < need)
            throw PreconditionViolation("Q-filter relative degree " + std::to_string(q.nq() - q.mq()) + " below required " +
                                        std::to_string(need));
    }
}

int DobDesign::expected_degree() const {
    const int n = family.n;
    const int nc = controller_ct.den.degree();
    if (q.disabled()) return n + nc;
    return n + nc + q.nq() + (n - nu() + n_mn());
}

RationalTransfer DobDesign::nominal_dt() const { return discretize(nominal_ct, nominal_method, delta); }
RationalTransfer DobDesign::controller_dt() const { return discretize(controller_ct, controller_method, delta); }

Polynomial characteristic_polynomial(const DobDesign& design, const RationalTransfer& member) {
    design.validate();
    const RationalTransfer P = zoh_discretize(member, design.delta);
    const RationalTransfer C = design.controller_dt();
    const Polynomial loop = P.den * C.den + P.num * C.num;
    Polynomial psi;
    if (design.q.disabled()) {
        psi = loop;
    } else {
        const RationalTransfer Pn = design.nominal_dt();
        const Polynomial Dq = design.q.den_w();
        const Polynomial Nq = design.q.num_w();
        psi = loop * Pn.num * Dq + Nq * C.den * (P.num * Pn.den - Pn.num * P.den);
    }
    const Polynomial t = psi.trimmed(1e-10);
    if (t.degree() != design.expected_degree())
        throw DegreeMismatch("characteristic polynomial has degree " + std::to_string(t.degree()) + ", expected " +
                             std::to_string(design.expected_degree()));
    return t;
}

Polynomial psi_fast(const Polynomial& m_n_star, const Polynomial& m_star, const QFilter& q, double g_ratio) {
    if (q.disabled()) throw PreconditionViolation("psi_fast needs an active Q-filter");
    const Polynomial Dq = q.den_z();
    const Polynomial Nq = q.num_z();
    return m_n_star * (Dq - Nq) + g_ratio * (m_star * Nq);
}

Polynomial psi_fast(const DobDesign& design, double g) {
    if (!(g > 0.0)) throw PreconditionViolation("psi_fast needs g > 0");
    const Polynomial mn = limit_m_star(design.nu(), design.nominal_method);
    const Polynomial m = limit_m_star(design.family.nu, DiscretizationMethod::ZOH);
    return psi_fast(mn, m, design.q, g / design.g_nominal());
}

Polynomial psi_slow(const DobDesign& design, const RationalTransfer& member) {
    const RationalTransfer P = member.normalized();
    const RationalTransfer Pn = design.nominal_ct.normalized();
    const RationalTransfer C = design.controller_ct.normalized();
    return P.num * (Pn.den * C.den + Pn.num * C.num);
}

namespace {

Verdict combine(Verdict a, Verdict b) {
    if (a == Verdict::Fail || b == Verdict::Fail) return Verdict::Fail;
    if (a == Verdict::Inconclusive || b == Verdict::Inconclusive) return Verdict::Inconclusive;
    return Verdict::Pass;
}

}  // namespace

StabilityVerdict theorem1_verdict(const DobDesign& design, int grid_points, double tol) {
    if (grid_points < 2) throw PreconditionViolation("theorem1_verdict needs grid_points >= 2");
    design.validate();
    StabilityVerdict v;
    v.grid_points = grid_points;

    const RationalTransfer Pn = design.nominal_ct.normalized();
    const RationalTransfer C = design.controller_ct.normalized();
    const HurwitzResult a = is_hurwitz(Pn.num * C.num + Pn.den * C.den, tol);
    v.item_a = {a.verdict, a.max_real_part, "nominal CT loop N_n N_c + D_n D_c"};

    if (design.family.n == design.family.nu) {
        v.item_b = {Verdict::Pass, -std::numeric_limits<double>::infinity(), "no CT zeros"};
    } else {
        const HurwitzResult b = kharitonov_hurwitz(design.family.numerator_interval(), tol);
        v.item_b = {b.verdict, b.max_real_part, "Kharitonov vertices of the numerator interval polynomial"};
    }

    const auto [glo, ghi] = gain_interval(design.family);
    Verdict c = Verdict::Pass;
    double worst = 0.0;
    int bad = 0;
    const int m = glo == ghi ? 1 : grid_points;
    for (int i = 0; i < m; ++i) {
        const double g = m == 1 ? glo : glo + (ghi - glo) * i / (m - 1);
        const SchurResult s = is_schur(psi_fast(design, g), 0.0, tol);
        if (s.max_modulus > worst) {
            worst = s.max_modulus;
            v.worst_gain = g;
        }
        if (s.verdict != Verdict::Pass) ++bad;
        c = combine(c, s.verdict);
    }
    std::ostringstream note;
    if (c == Verdict::Pass)
        note << "pass (grid)";
    else
        note << bad << " of " << m << " grid gains not certified Schur";
    v.item_c = {c, worst, note.str()};
    v.overall = combine(combine(v.item_a.verdict, v.item_b.verdict), v.item_c.verdict);

    std::ostringstream prov;
    prov << "item (c) checked on " << m << " gains over [" << glo << ", " << ghi << "], endpoints included; marginal tolerance "
         << tol;
    v.provenance = prov.str();
    return v;
}

double matched_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    struct Pair {
        double d;
        size_t i, j;
    };
    std::vector<Pair> pairs;
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) pairs.push_back({std::abs(a[i] - b[j]), i, j});
    std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.d < y.d; });
    std::vector<bool> ua(a.size(), false), ub(b.size(), false);
    double worst = 0.0;
    size_t matched = 0;
    for (const Pair& p : pairs) {
        if (ua[p.i] || ub[p.j]) continue;
        ua[p.i] = ub[p.j] = true;
        worst = std::max(worst, p.d);
        ++matched;
    }
    if (matched != std::min(a.size(), b.size()) || a.size() != b.size()) return std::numeric_limits<double>::infinity();
    return worst;
}

ContourRecord contour_at(const DobDesign& design, const RationalTransfer& member, double delta) {
    DobDesign d = design;
    d.delta = delta;
    ContourRecord rec;
    rec.delta = delta;
    const std::vector<cplx> w = roots(characteristic_polynomial(d, member)).roots;
    const std::vector<cplx> fast_ref = roots(psi_fast(d, high_frequency_gain(member))).roots;
    const size_t nf = fast_ref.size();

    std::vector<double> score(w.size());
    for (size_t i = 0; i < w.size(); ++i) {
        double df = std::numeric_limits<double>::infinity();
        for (const cplx& f : fast_ref) df = std::min(df, std::abs(1.0 + w[i] - f));
        const double ds = std::abs(w[i]);
        score[i] = ds == 0.0 ? std::numeric_limits<double>::infinity() : df / ds;
    }
    std::vector<size_t> order(w.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t x, size_t y) { return score[x] < score[y]; });
    std::vector<bool> fast(w.size(), false);
    for (size_t k = 0; k < nf && k < order.size(); ++k) fast[order[k]] = true;
    if (nf > 0 && nf < order.size()) {
        const double lo = score[order[nf - 1]];
        const double hi = score[order[nf]];
        if (!(hi >= 2.0 * lo)) {
            rec.partition_ok = false;
            std::ostringstream os;
            os << "PartitionFailure: score ratio " << (lo > 0.0 ? hi / lo : 0.0) << " < 2";
            rec.note = os.str();
        }
    }
    for (size_t i = 0; i < w.size(); ++i) rec.roots.push_back({fast[i], 1.0 + w[i], w[i] / delta});
    return rec;
}

std::vector<ContourRecord> root_contour(const DobDesign& design, const RationalTransfer& member,
                                        const std::vector<double>& deltas) {
    std::vector<ContourRecord> out;
    for (double d : deltas) out.push_back(contour_at(design, member, d));
    return out;
}

bool corollary1_predicate(int nu, const QFilter& q, double g_over_gn) {
    if (nu < 1) throw PreconditionViolation("corollary1_predicate needs nu >= 1");
    const Polynomial m = limit_m_star(nu, DiscretizationMethod::ZOH);
    const Polynomial p = psi_fast(m, m, q, g_over_gn);
    return max_modulus(roots(p).roots) > 1.0 + kMarginalTol;
}

namespace {

QFilter allpass_filter(int nq) {
    QFilter q;
    // z^nq = (1 + w)^nq
    const Polynomial d = pow(Polynomial{1.0, 1.0}, nq);
    for (int i = 0; i < nq; ++i) q.a.push_back(d[i]);
    q.c = {1.0};
    return q;
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace

AllpassCheck allpass_check(int nu, DiscretizationMethod method, int nq, double g_over_gn) {
    const bool fdm = method == DiscretizationMethod::FDM && nu >= 3;
    const bool bt = (method == DiscretizationMethod::BT || method == DiscretizationMethod::MPZ) && nu >= 2;
    if (!(fdm || bt)) throw PreconditionViolation("all-pass predicate covers (nu >= 3, FDM) and (nu >= 2, BT or MPZ)");
    if (nq < 1) throw PreconditionViolation("all-pass filter needs nq >= 1");
    AllpassCheck out;
    const QFilter q = allpass_filter(nq);
    const Polynomial p = psi_fast(limit_m_star(nu, method), limit_m_star(nu, DiscretizationMethod::ZOH), q, g_over_gn);
    out.max_modulus = max_modulus(roots(p).roots);
    out.non_schur = out.max_modulus >= 1.0 - kMarginalTol;
    out.two_row_conditions = jury_two_row_conditions(p);
    if (bt) {
        const double two_nu = std::pow(2.0, nu);
        const double K = two_nu * g_over_gn / factorial(nu);
        const double rhs = nq == 1 ? two_nu * K : (two_nu - 1.0) * K;
        out.K = K;
        out.closed_form_non_schur = !(K > 0.0 && K < 2.0 && -K * K + 2.0 * K > rhs);
    } else {
        out.K = g_over_gn / factorial(nu);
        out.closed_form_non_schur = !out.two_row_conditions;
    }
    return out;
}

bool allpass_instability_predicate(int nu, DiscretizationMethod method, int nq, double g_over_gn) {
    return allpass_check(nu, method, nq, g_over_gn).non_schur;
}

RationalTransfer sensitivity(const DobDesign& design, const RationalTransfer& member) {
    const RationalTransfer P = zoh_discretize(member, design.delta);
    const RationalTransfer C = design.controller_dt();
    if (design.q.disabled()) return RationalTransfer(P.den * C.den, P.den * C.den + P.num * C.num, Domain::DiscreteZ);
    const RationalTransfer Pn = design.nominal_dt();
    const Polynomial num = (design.q.den_w() - design.q.num_w()) * C.den * Pn.num * P.den;
    return RationalTransfer(num, characteristic_polynomial(design, member), Domain::DiscreteZ);
}

}  // namespace dtdob
