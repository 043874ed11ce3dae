#include "dtdob/design.hpp"

#include <cmath>
#include <sstream>

#include "dtdob/errors.hpp"

namespace dtdob {

namespace {

constexpr double kScanLo = 1e-6;
constexpr double kScanHi = 1e3;
constexpr int kPerDecade = 10;
constexpr int kVerifyPoints = 200;

bool schur_at(const Polynomial& base, const Polynomial& m_star, double k) {
    return is_schur(base + k * m_star).verdict == Verdict::Pass;
}

std::vector<double> gain_grid(const UncertainPlantFamily& family, int grid_points) {
    const auto [lo, hi] = gain_interval(family);
    if (lo == hi) return {lo};
    std::vector<double> g(grid_points);
    for (int i = 0; i < grid_points; ++i) g[i] = lo + (hi - lo) * i / (grid_points - 1);
    return g;
}

}  // namespace

KbarResult kbar_search(const Polynomial& m_n_star, const Polynomial& v, const Polynomial& m_star) {
    if (is_schur(m_n_star).verdict != Verdict::Pass) throw MethodNotSchur("M_n* is not Schur");
    if (is_schur(v).verdict != Verdict::Pass) throw PreconditionViolation("V is not Schur");
    const Polynomial base = m_n_star * Polynomial{-1.0, 1.0} * v;

    const int decades = static_cast<int>(std::lround(std::log10(kScanHi / kScanLo)));
    const int steps = decades * kPerDecade;
    auto grid_k = [&](int i) { return kScanLo * std::pow(10.0, static_cast<double>(i) / kPerDecade); };

    if (!schur_at(base, m_star, kScanLo)) throw SearchFailure("not Schur at the smallest probed K");
    KbarResult res;
    int fail = -1;
    for (int i = 1; i <= steps; ++i)
        if (!schur_at(base, m_star, grid_k(i))) {
            fail = i;
            break;
        }
    if (fail < 0) {
        res.k_bar = kScanHi;
        res.capped = true;
    } else {
        double lo = grid_k(fail - 1);
        double hi = grid_k(fail);
        while ((hi - lo) > 1e-9 * hi) {
            const double mid = 0.5 * (lo + hi);
            (schur_at(base, m_star, mid) ? lo : hi) = mid;
        }
        res.k_bar = lo;
    }

    for (int round = 0; round < 8; ++round) {
        int first_bad = 0;
        for (int j = 1; j <= kVerifyPoints; ++j)
            if (!schur_at(base, m_star, res.k_bar * j / kVerifyPoints)) {
                first_bad = j;
                break;
            }
        if (first_bad == 0) return res;
        if (first_bad == 1) throw SearchFailure("verification sweep fails at the first point");
        res.k_bar = res.k_bar * (first_bad - 1) / kVerifyPoints;
        res.capped = false;
    }
    throw SearchFailure("verification sweep did not settle");
}

DirectDesignResult design_q_direct(const UncertainPlantFamily& family, double g_nominal, DiscretizationMethod method,
                                   int nq, double safety, int grid_points) {
    family.validate();
    if (!(safety > 0.0 && safety < 1.0)) throw PreconditionViolation("safety must lie in (0, 1)");
    if (!(g_nominal > 0.0)) throw PreconditionViolation("nominal gain must be positive");
    if (grid_points < 2) throw PreconditionViolation("grid_points must be at least 2");
    const int nu = family.nu;
    const Polynomial mn = limit_m_star(nu, method);
    if (is_schur(mn).verdict != Verdict::Pass)
        throw MethodNotSchur(std::string("M_n* of ") + to_string(method) + " is not Schur for nu = " + std::to_string(nu));
    const int need = std::max(nu - limit_m_degree(nu, method), 1);
    if (nq < need) throw PreconditionViolation("nq must be at least " + std::to_string(need));

    DirectDesignResult out;
    out.v_poly = Polynomial::monomial(nq - 1);
    const Polynomial m_star = limit_m_star(nu, DiscretizationMethod::ZOH);
    const KbarResult kb = kbar_search(mn, out.v_poly, m_star);
    out.k_bar = kb.k_bar;
    out.k_bar_capped = kb.capped;

    // D_q(w) = w (1 + w)^{nq-1} + a0
    const Polynomial vw = pow(Polynomial{1.0, 1.0}, nq - 1);
    const auto gains = gain_grid(family, grid_points);
    const double g_hi = gain_interval(family).second;
    double a0 = safety * (g_nominal / g_hi) * kb.k_bar;
    for (int attempt = 0; attempt <= 20; ++attempt, a0 *= 0.5) {
        QFilter q;
        q.a.push_back(a0);
        for (int i = 1; i < nq; ++i) q.a.push_back(vw[i - 1]);
        q.c = {a0};
        double worst = 0.0;
        bool ok = true;
        for (double g : gains) {
            const SchurResult s = is_schur(psi_fast(mn, m_star, q, g / g_nominal));
            worst = std::max(worst, s.max_modulus);
            if (s.verdict != Verdict::Pass) {
                ok = false;
                break;
            }
        }
        if (ok) {
            out.q = q;
            out.a0 = a0;
            out.worst_modulus = worst;
            out.halvings = attempt;
            return out;
        }
    }
    throw SearchFailure("no certified a0 after 20 halvings");
}

QFilter indirect_q_filter(const std::vector<double>& ct_a, const std::vector<double>& ct_c, double psi) {
    if (!(psi > 0.0)) throw PreconditionViolation("psi must be positive");
    const int nq = static_cast<int>(ct_a.size());
    QFilter q;
    for (int i = 0; i < nq; ++i) q.a.push_back(ct_a[i] * std::pow(psi, i - nq));
    for (size_t i = 0; i < ct_c.size(); ++i) q.c.push_back(ct_c[i] * std::pow(psi, static_cast<int>(i) - nq));
    q.validate();
    return q;
}

Polynomial psi_fast_ind(const std::vector<double>& ct_a, const std::vector<double>& ct_c, double kappa) {
    std::vector<double> d = ct_a;
    d.push_back(1.0);
    const Polynomial n(ct_c);
    return Polynomial(d) + (kappa - 1.0) * n;
}

IndirectDesignResult design_q_indirect(const std::vector<double>& ct_a, const std::vector<double>& ct_c, double psi,
                                       const UncertainPlantFamily& family, double g_nominal, int grid_points) {
    family.validate();
    if (!(psi > 1.0)) throw PreconditionViolation("psi must exceed 1");
    if (ct_a.empty() || ct_c.empty() || ct_c[0] != ct_a[0]) throw PreconditionViolation("CT filter needs c0 = a0 != 0");
    if (grid_points < 2) throw PreconditionViolation("grid_points must be at least 2");
    IndirectDesignResult out;
    out.psi_ratio = psi;
    out.q = indirect_q_filter(ct_a, ct_c, psi);
    const auto gains = gain_grid(family, grid_points);

    out.ct_fast_hurwitz = Verdict::Pass;
    out.ct_worst_real_part = -std::numeric_limits<double>::infinity();
    for (double g : gains) {
        const HurwitzResult h = is_hurwitz(psi_fast_ind(ct_a, ct_c, g / g_nominal));
        out.ct_worst_real_part = std::max(out.ct_worst_real_part, h.max_real_part);
        if (h.verdict == Verdict::Fail) {
            std::ostringstream os;
            os << "D_q - N_q + kappa N_q not Hurwitz at kappa = " << g / g_nominal << " (max real part "
               << h.max_real_part << ")";
            throw CtDesignInvalid(os.str());
        }
        if (h.verdict == Verdict::Inconclusive) out.ct_fast_hurwitz = Verdict::Inconclusive;
    }

    const Polynomial mn{1.0};
    const Polynomial m_star = limit_m_star(family.nu, DiscretizationMethod::ZOH);
    out.dt_fast_schur = Verdict::Pass;
    for (double g : gains) {
        const SchurResult s = is_schur(psi_fast(mn, m_star, out.q, g / g_nominal));
        out.dt_worst_modulus = std::max(out.dt_worst_modulus, s.max_modulus);
        if (s.verdict == Verdict::Fail)
            out.dt_fast_schur = Verdict::Fail;
        else if (s.verdict == Verdict::Inconclusive && out.dt_fast_schur == Verdict::Pass)
            out.dt_fast_schur = Verdict::Inconclusive;
    }
    return out;
}

}  // namespace dtdob
