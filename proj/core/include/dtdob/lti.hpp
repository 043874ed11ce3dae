#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dtdob/polynomial.hpp"

namespace dtdob {

enum class Domain { ContinuousS, DiscreteZ };

/**
 * @brief SISO transfer function num/den.
 *
 * Continuous transfers are polynomials in s. Discrete transfers are stored in the
 * shift variable w = z - 1; num_z()/den_z() expand them in z.
 */
struct RationalTransfer {
    Polynomial num;
    Polynomial den;
    Domain domain = Domain::ContinuousS;

    RationalTransfer() = default;
    RationalTransfer(Polynomial n, Polynomial d, Domain dom = Domain::ContinuousS);

    int relative_degree() const { return den.degree() - num.degree(); }
    bool is_discrete() const { return domain == Domain::DiscreteZ; }

    Polynomial num_z() const;
    Polynomial den_z() const;

    /// Value at s (continuous) or at z (discrete).
    cplx eval(cplx x) const;
    /// Value of a discrete transfer at w = z - 1.
    cplx eval_w(cplx w) const;

    /// Poles and zeros in s or z.
    std::vector<cplx> poles() const;
    std::vector<cplx> zeros() const;

    /// Same transfer with a monic denominator.
    RationalTransfer normalized() const;
};

/// Leading numerator coefficient over leading denominator coefficient.
double high_frequency_gain(const RationalTransfer& tf);

struct StateSpace {
    Eigen::MatrixXd A;
    Eigen::VectorXd B;
    Eigen::RowVectorXd C;
    double D = 0.0;

    int order() const { return static_cast<int>(A.rows()); }
    /// Transfer C(xI - A)^{-1}B + D in the given domain variable.
    RationalTransfer transfer(Domain domain = Domain::ContinuousS) const;
};

/// Characteristic polynomial det(xI - A), Faddeev-LeVerrier.
Polynomial characteristic_polynomial(const Eigen::MatrixXd& A);

/// Controllable canonical form of a proper transfer, in its own variable (s, or w for discrete).
StateSpace realize_controllable_canonical(const RationalTransfer& tf);

/// Maps a parameter vector to a continuous-time plant.
struct ParameterBox {
    std::vector<std::string> names;
    std::vector<double> lo;
    std::vector<double> hi;
    std::function<RationalTransfer(const std::vector<double>&)> member;
    int grid_points = 21;

    /// Grid over the box with grid_points values per parameter, endpoints included.
    std::vector<std::vector<double>> grid() const;
};

/**
 * @brief Interval plant family g*(s^{n-nu} + beta...)/(s^n + alpha...).
 *
 * alpha holds the n lower denominator coefficients, beta the n-nu lower numerator
 * coefficients, both ascending. A structured family also carries the parameter box it
 * was induced from.
 */
struct UncertainPlantFamily {
    int n = 0;
    int nu = 1;
    double g_lo = 1.0;
    double g_hi = 1.0;
    std::vector<double> alpha_lo, alpha_hi;
    std::vector<double> beta_lo, beta_hi;
    std::optional<ParameterBox> box;

    /// Throws PreconditionViolation when the bounds are inconsistent.
    void validate() const;
    IntervalPolynomial numerator_interval() const;
    IntervalPolynomial denominator_interval() const;
    /// Representative members: the parameter grid when structured, else a coefficient grid.
    std::vector<RationalTransfer> members() const;
};

struct MemberPoint {
    double g = 1.0;
    std::vector<double> alpha;
    std::vector<double> beta;
};

RationalTransfer sample_member(const UncertainPlantFamily& fam, const MemberPoint& point);

std::pair<double, double> gain_interval(const UncertainPlantFamily& fam);

/// Family whose coefficient intervals bound every member on the box grid.
UncertainPlantFamily induced_family(const ParameterBox& box, int n, int nu);

/// Single-member family.
UncertainPlantFamily point_family(const RationalTransfer& member);

/// True when the member's normalized coefficients lie inside the family intervals (relative slack rel_tol).
bool family_contains(const UncertainPlantFamily& fam, const RationalTransfer& member, double rel_tol = 1e-9);

/// K/(M1 M2 s^4 + K (M1 + M2) s^2).
RationalTransfer two_mass_spring_member(double M1, double M2, double K);

/// Two-mass-spring family over M1, M2, K boxes.
UncertainPlantFamily two_mass_spring_family(std::pair<double, double> M1, std::pair<double, double> M2,
                                            std::pair<double, double> K, int grid_points = 21);

/// Warnings for numerator/denominator roots closer than tol (approximate common factors).
std::vector<std::string> coprimality_warnings(const RationalTransfer& tf, double tol = 1e-7);

}  // namespace dtdob
