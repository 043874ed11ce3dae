#pragma once

#include <array>
#include <complex>
#include <initializer_list>
#include <vector>

namespace dtdob {

using cplx = std::complex<double>;

/// Outcome of a stability test. Inconclusive marks a decisive quantity within tolerance of its boundary.
enum class Verdict { Pass, Fail, Inconclusive };

const char* to_string(Verdict v);

/// Real univariate polynomial, coefficients in ascending powers.
class Polynomial {
   public:
    Polynomial() = default;
    Polynomial(std::initializer_list<double> ascending);
    explicit Polynomial(std::vector<double> ascending);

    static Polynomial constant(double c);
    static Polynomial monomial(int k, double c = 1.0);
    /// Monic polynomial (times `lead`) with the given roots; complex roots must come in conjugate pairs.
    static Polynomial from_roots(const std::vector<cplx>& roots, double lead = 1.0);

    const std::vector<double>& coeffs() const { return c_; }
    /// -1 for the zero polynomial.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    /// Coefficient of the k-th power, 0 outside the stored range.
    double operator[](int k) const;
    double leading() const;
    double max_abs_coeff() const;

    double operator()(double x) const;
    cplx operator()(cplx x) const;

    Polynomial derivative() const;
    /// Drops trailing coefficients whose magnitude is at most rel_tol times the largest one.
    Polynomial trimmed(double rel_tol) const;
    /// Divides by the leading coefficient.
    Polynomial monic() const;
    /// Coefficients in descending order, useful for printing.
    std::vector<double> descending() const;

    Polynomial operator-() const;
    Polynomial& operator*=(double s);

   private:
    void normalize();
    std::vector<double> c_;
};

Polynomial add(const Polynomial& p, const Polynomial& q);
Polynomial sub(const Polynomial& p, const Polynomial& q);
Polynomial mul(const Polynomial& p, const Polynomial& q);
Polynomial pow(const Polynomial& p, int k);
/// q(x) = p(shift + scale*x).
Polynomial compose_affine(const Polynomial& p, double scale, double shift);

Polynomial operator+(const Polynomial& p, const Polynomial& q);
Polynomial operator-(const Polynomial& p, const Polynomial& q);
Polynomial operator*(const Polynomial& p, const Polynomial& q);
Polynomial operator*(double s, const Polynomial& p);
Polynomial operator*(const Polynomial& p, double s);

/// Max-norm relative comparison of coefficient vectors.
bool approx_equal(const Polynomial& p, const Polynomial& q, double rel_tol = 1e-12);

struct ComplexRootSet {
    std::vector<cplx> roots;
    double residual = 0.0;  ///< max |p(root)|
};

/// All complex roots. Balanced companion eigenvalues followed by Newton polishing.
ComplexRootSet roots(const Polynomial& p);

double max_modulus(const std::vector<cplx>& r);
double max_real_part(const std::vector<cplx>& r);

struct SchurResult {
    Verdict verdict = Verdict::Inconclusive;
    double max_modulus = 0.0;
    bool used_root_fallback = false;
};

struct HurwitzResult {
    Verdict verdict = Verdict::Inconclusive;
    double max_real_part = 0.0;
    bool used_root_fallback = false;
};

constexpr double kMarginalTol = 1e-9;

/// Jury (Schur-Cohn) test of all roots inside radius 1 - margin; root oracle on degenerate rows.
SchurResult is_schur(const Polynomial& p, double margin = 0.0, double tol = kMarginalTol);
/// Root-oracle Schur test for a polynomial given in w = z - 1.
SchurResult is_schur_shifted(const Polynomial& p_w, double margin = 0.0, double tol = kMarginalTol);
/// Routh array test; root oracle on zero pivots.
HurwitzResult is_hurwitz(const Polynomial& p, double tol = kMarginalTol);

/// Two leading Jury conditions |a0| < |an| and |a0^2 - an^2| > |a0 a_{n-1} - an a1|. Necessary for Schur.
bool jury_two_row_conditions(const Polynomial& p);

struct IntervalPolynomial {
    std::vector<double> lo;
    std::vector<double> hi;
};

/// The four Kharitonov vertex polynomials.
std::array<Polynomial, 4> kharitonov_vertices(const IntervalPolynomial& ip);

/// Hurwitz verdict for the whole interval family via its Kharitonov vertices.
HurwitzResult kharitonov_hurwitz(const IntervalPolynomial& ip, double tol = kMarginalTol);

}  // namespace dtdob
