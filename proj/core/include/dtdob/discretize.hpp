#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dtdob/lti.hpp"
#include "dtdob/polynomial.hpp"

namespace dtdob {

enum class DiscretizationMethod { ZOH, FDM, BDM, BT, MPZ };

const char* to_string(DiscretizationMethod m);
/// Case-insensitive parse of "zoh", "fdm", "bdm", "bt", "mpz".
DiscretizationMethod parse_method(const std::string& s);

/// Euler-Frobenius coefficients b_{(nu-1,j)}, ascending, exact integers.
std::vector<std::int64_t> euler_frobenius_coefficients(int nu);
/// B_{nu-1}(z).
Polynomial euler_frobenius(int nu);

/// (exp(A delta), integral_0^delta exp(A r) B dr) from one exponential of the augmented block matrix.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> matrix_exponential_with_integral(const Eigen::MatrixXd& A,
                                                                             const Eigen::VectorXd& B, double delta);

/// exp(x) - 1 without cancellation for small |x|.
cplx expm1c(cplx x);

/// ZOH equivalent of a strictly proper CT transfer. Result is stored in w = z - 1.
RationalTransfer zoh_discretize(const RationalTransfer& tf_ct, double delta);

/// FDM, BDM, BT or MPZ discretization. Result is stored in w = z - 1.
RationalTransfer approx_discretize(const RationalTransfer& tf_ct, DiscretizationMethod method, double delta);

/// Dispatches to zoh_discretize or approx_discretize. ZOH of a biproper transfer keeps the feedthrough.
RationalTransfer discretize(const RationalTransfer& tf_ct, DiscretizationMethod method, double delta);

struct LimitComponents {
    double g_limit = 1.0;
    Polynomial m_star;  ///< polynomial in z
    int m_degree = 0;
};

LimitComponents limit_components(const RationalTransfer& tf_ct, DiscretizationMethod method);
/// M* for relative degree nu under the given method, in z.
Polynomial limit_m_star(int nu, DiscretizationMethod method);
/// n_mn for relative degree nu under the given method.
int limit_m_degree(int nu, DiscretizationMethod method);

struct ZeroClassification {
    std::vector<cplx> intrinsic;
    std::vector<cplx> sampling;
    double match_error = 0.0;
};

ZeroClassification classify_zeros(const RationalTransfer& tf_dt, const RationalTransfer& tf_ct, double delta);

struct SamplingPeriodCheck {
    bool valid = false;
    double margin = 0.0;  ///< min over members of g/2 - p_bar(delta)
};

/// Perturbation bound p_bar(delta) = delta |C A^nu| e^{|A| delta} |B| for one member.
double cdbd_perturbation_bound(const RationalTransfer& member, double delta);

SamplingPeriodCheck validate_sampling_period(const UncertainPlantFamily& fam, double delta);

/// CdBd nu!/(g delta^nu) for one member. Equals 1 + O(delta); nonzero means delta is not degenerate.
double cdbd_normalized(const RationalTransfer& member, double delta);

}  // namespace dtdob
