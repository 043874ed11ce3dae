#pragma once

#include <vector>

#include "dtdob/discretize.hpp"
#include "dtdob/dob.hpp"
#include "dtdob/lti.hpp"
#include "dtdob/polynomial.hpp"

namespace dtdob {

struct KbarResult {
    double k_bar = 0.0;
    bool capped = false;  ///< Schur up to the top of the scan range
};

/// Largest K such that M_n*(z)(z-1)V(z) + K M*(z) is Schur on (0, K].
KbarResult kbar_search(const Polynomial& m_n_star, const Polynomial& v, const Polynomial& m_star);

struct DirectDesignResult {
    QFilter q;
    Polynomial v_poly;  ///< V(z), in z
    double k_bar = 0.0;
    bool k_bar_capped = false;
    double a0 = 0.0;
    double worst_modulus = 0.0;  ///< over the certification gain grid
    int halvings = 0;            ///< a0 reductions needed before certification passed
};

/// Constant-numerator Q-filter with V(z) = z^{nq-1}, certified on a gain grid over the family.
DirectDesignResult design_q_direct(const UncertainPlantFamily& family, double g_nominal, DiscretizationMethod method,
                                   int nq, double safety = 0.8, int grid_points = 101);

/// Q(z) = N_q(psi(z-1))/D_q(psi(z-1)) from ascending CT coefficients, D_q monic and implied.
QFilter indirect_q_filter(const std::vector<double>& ct_a, const std::vector<double>& ct_c, double psi);

struct IndirectDesignResult {
    QFilter q;
    double psi_ratio = 0.0;
    Verdict ct_fast_hurwitz = Verdict::Inconclusive;
    double ct_worst_real_part = 0.0;
    Verdict dt_fast_schur = Verdict::Inconclusive;
    double dt_worst_modulus = 0.0;
};

/// D_q(s) - N_q(s) + kappa N_q(s).
Polynomial psi_fast_ind(const std::vector<double>& ct_a, const std::vector<double>& ct_c, double kappa);

/// Indirect design with an FDM nominal model. Throws CtDesignInvalid when the CT condition fails on the grid.
IndirectDesignResult design_q_indirect(const std::vector<double>& ct_a, const std::vector<double>& ct_c, double psi,
                                       const UncertainPlantFamily& family, double g_nominal, int grid_points = 101);

}  // namespace dtdob
