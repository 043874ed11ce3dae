#pragma once

#include <string>
#include <vector>

#include "dtdob/discretize.hpp"
#include "dtdob/lti.hpp"
#include "dtdob/polynomial.hpp"

namespace dtdob {

/**
 * @brief DT Q-filter N_q/D_q in the (z-1) basis.
 *
 * D_q(w) = w^nq + a[nq-1] w^{nq-1} + ... + a[0], N_q(w) = c[mq] w^mq + ... + c[0], w = z - 1.
 * Empty a and c encode the disabled filter Q = 0.
 */
struct QFilter {
    std::vector<double> a;
    std::vector<double> c;

    static QFilter zero() { return {}; }
    /// a0/((z-1) + a0).
    static QFilter first_order(double a0) { return {{a0}, {a0}}; }

    int nq() const { return static_cast<int>(a.size()); }
    int mq() const { return static_cast<int>(c.size()) - 1; }
    bool disabled() const { return a.empty(); }

    /// Throws PreconditionViolation unless c0 = a0 != 0 and the filter is strictly proper.
    void validate() const;
    Polynomial den_w() const;
    Polynomial num_w() const;
    Polynomial den_z() const { return compose_affine(den_w(), 1.0, -1.0); }
    Polynomial num_z() const { return compose_affine(num_w(), 1.0, -1.0); }
    RationalTransfer transfer() const;
};

struct DobDesign {
    UncertainPlantFamily family;
    RationalTransfer nominal_ct;
    RationalTransfer controller_ct;
    DiscretizationMethod nominal_method = DiscretizationMethod::FDM;
    DiscretizationMethod controller_method = DiscretizationMethod::FDM;
    QFilter q;
    double delta = 0.01;

    int nu() const { return nominal_ct.relative_degree(); }
    int n_mn() const { return limit_m_degree(nu(), nominal_method); }
    double g_nominal() const { return high_frequency_gain(nominal_ct); }
    /// Throws PreconditionViolation when the filter cannot be bound to this nominal model.
    void validate() const;
    /// n + n_c + n_q + (n - nu + n_mn).
    int expected_degree() const;

    RationalTransfer nominal_dt() const;
    RationalTransfer controller_dt() const;
};

struct ItemResult {
    Verdict verdict = Verdict::Inconclusive;
    double value = 0.0;  ///< max real part for (a)/(b), worst root modulus for (c)
    std::string note;
};

struct StabilityVerdict {
    ItemResult item_a;
    ItemResult item_b;
    ItemResult item_c;
    Verdict overall = Verdict::Inconclusive;
    int grid_points = 0;
    double worst_gain = 0.0;  ///< g where item (c) attains its worst modulus
    std::string provenance;
};

/// Psi^d in w = z - 1 for a CT member of the family.
Polynomial characteristic_polynomial(const DobDesign& design, const RationalTransfer& member);

/// M_n*(D_q* - N_q*) + g_ratio M* N_q*, in z.
Polynomial psi_fast(const Polynomial& m_n_star, const Polynomial& m_star, const QFilter& q, double g_ratio);
Polynomial psi_fast(const DobDesign& design, double g);

/// N (D_n D_c + N_n N_c), in s.
Polynomial psi_slow(const DobDesign& design, const RationalTransfer& member);

StabilityVerdict theorem1_verdict(const DobDesign& design, int grid_points = 101, double tol = kMarginalTol);

struct ContourRoot {
    bool fast = false;
    cplx z;
    cplx gamma;
};

struct ContourRecord {
    double delta = 0.0;
    std::vector<ContourRoot> roots;
    bool partition_ok = true;
    std::string note;
};

ContourRecord contour_at(const DobDesign& design, const RationalTransfer& member, double delta);
std::vector<ContourRecord> root_contour(const DobDesign& design, const RationalTransfer& member,
                                        const std::vector<double>& deltas);

/// Largest distance under a greedy nearest pairing of two equally sized root sets.
double matched_distance(const std::vector<cplx>& a, const std::vector<cplx>& b);

/// True when Psi_fast with a ZOH nominal model has a root strictly outside the unit disk.
bool corollary1_predicate(int nu, const QFilter& q, double g_over_gn);

struct AllpassCheck {
    bool non_schur = false;             ///< root oracle: some root with modulus >= 1
    bool closed_form_non_schur = false; ///< the stated Jury inequalities fail
    bool two_row_conditions = false;    ///< unsimplified two-row Jury conditions hold on the coefficients
    double K = 0.0;
    double max_modulus = 0.0;
};

/// Psi_fast with Q = 1/z^nq. K is 2^nu (g/g_n)/nu! for BT/MPZ and (g/g_n)/nu! for FDM.
AllpassCheck allpass_check(int nu, DiscretizationMethod method, int nq, double g_over_gn);
bool allpass_instability_predicate(int nu, DiscretizationMethod method, int nq, double g_over_gn);

/// S = (1 - Q)/(1 - Q + P(C + Q P_n^{-1})) for a member, in w.
RationalTransfer sensitivity(const DobDesign& design, const RationalTransfer& member);

}  // namespace dtdob
