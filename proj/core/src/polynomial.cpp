#include "dtdob/polynomial.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "dtdob/errors.hpp"

namespace dtdob {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

Polynomial::Polynomial(std::initializer_list<double> ascending) : c_(ascending) { normalize(); }

Polynomial::Polynomial(std::vector<double> ascending) : c_(std::move(ascending)) { normalize(); }

void Polynomial::normalize() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

Polynomial Polynomial::constant(double c) { return Polynomial(std::vector<double>{c}); }

Polynomial Polynomial::monomial(int k, double c) {
    std::vector<double> v(static_cast<size_t>(k) + 1, 0.0);
    v[static_cast<size_t>(k)] = c;
    return Polynomial(std::move(v));
}

Polynomial Polynomial::from_roots(const std::vector<cplx>& roots, double lead) {
    Polynomial p = constant(lead);
    for (const cplx& r : roots) {
        const double scale = 1.0 + std::abs(r);
        if (std::abs(r.imag()) <= 1e-14 * scale) {
            p = p * Polynomial{-r.real(), 1.0};
        } else if (r.imag() > 0.0) {
            p = p * Polynomial{std::norm(r), -2.0 * r.real(), 1.0};
        }
    }
    return p;
}

double Polynomial::operator[](int k) const {
    if (k < 0 || k >= static_cast<int>(c_.size())) return 0.0;
    return c_[static_cast<size_t>(k)];
}

double Polynomial::leading() const { return c_.empty() ? 0.0 : c_.back(); }

double Polynomial::max_abs_coeff() const {
    double m = 0.0;
    for (double x : c_) m = std::max(m, std::abs(x));
    return m;
}

double Polynomial::operator()(double x) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

cplx Polynomial::operator()(cplx x) const {
    cplx acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<double> d(c_.size() - 1);
    for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
    return Polynomial(std::move(d));
}

Polynomial Polynomial::trimmed(double rel_tol) const {
    const double cut = rel_tol * max_abs_coeff();
    std::vector<double> v = c_;
    while (!v.empty() && std::abs(v.back()) <= cut) v.pop_back();
    return Polynomial(std::move(v));
}

Polynomial Polynomial::monic() const {
    if (c_.empty()) throw ZeroPolynomial("cannot normalize the zero polynomial");
    return (1.0 / leading()) * *this;
}

std::vector<double> Polynomial::descending() const { return {c_.rbegin(), c_.rend()}; }

Polynomial Polynomial::operator-() const { return -1.0 * *this; }

Polynomial& Polynomial::operator*=(double s) {
    for (double& x : c_) x *= s;
    normalize();
    return *this;
}

namespace {

Polynomial combine(const Polynomial& p, const Polynomial& q, double sign) {
    const size_t n = std::max(p.coeffs().size(), q.coeffs().size());
    std::vector<double> v(n, 0.0);
    for (size_t k = 0; k < n; ++k) v[k] = p[static_cast<int>(k)] + sign * q[static_cast<int>(k)];
    // Cancellation residue at the top is relative to the operands, not the result.
    const double cut = 1e-12 * std::max(p.max_abs_coeff(), q.max_abs_coeff());
    while (!v.empty() && std::abs(v.back()) <= cut) v.pop_back();
    return Polynomial(std::move(v));
}

}  // namespace

Polynomial add(const Polynomial& p, const Polynomial& q) { return combine(p, q, 1.0); }
Polynomial sub(const Polynomial& p, const Polynomial& q) { return combine(p, q, -1.0); }

Polynomial mul(const Polynomial& p, const Polynomial& q) {
    if (p.is_zero() || q.is_zero()) return {};
    const auto& a = p.coeffs();
    const auto& b = q.coeffs();
    std::vector<double> v(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) v[i + j] += a[i] * b[j];
    return Polynomial(std::move(v));
}

Polynomial pow(const Polynomial& p, int k) {
    Polynomial r = Polynomial::constant(1.0);
    for (int i = 0; i < k; ++i) r = mul(r, p);
    return r;
}

Polynomial compose_affine(const Polynomial& p, double scale, double shift) {
    const Polynomial lin{shift, scale};
    Polynomial acc;
    const auto& c = p.coeffs();
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = mul(acc, lin) + Polynomial::constant(*it);
    return acc;
}

Polynomial operator+(const Polynomial& p, const Polynomial& q) { return add(p, q); }
Polynomial operator-(const Polynomial& p, const Polynomial& q) { return sub(p, q); }
Polynomial operator*(const Polynomial& p, const Polynomial& q) { return mul(p, q); }
Polynomial operator*(double s, const Polynomial& p) {
    std::vector<double> v = p.coeffs();
    for (double& x : v) x *= s;
    return Polynomial(std::move(v));
}
Polynomial operator*(const Polynomial& p, double s) { return s * p; }

bool approx_equal(const Polynomial& p, const Polynomial& q, double rel_tol) {
    const double scale = std::max({p.max_abs_coeff(), q.max_abs_coeff(), std::numeric_limits<double>::min()});
    const int n = std::max(p.degree(), q.degree());
    for (int k = 0; k <= n; ++k)
        if (std::abs(p[k] - q[k]) > rel_tol * scale) return false;
    return true;
}

namespace {

// Parlett-Reinsch balancing with power-of-two scalings.
void balance(Eigen::MatrixXd& m) {
    const int n = static_cast<int>(m.rows());
    const double gamma = 0.9;
    bool changed = true;
    for (int sweep = 0; changed && sweep < 100; ++sweep) {
        changed = false;
        for (int i = 0; i < n; ++i) {
            const double row = m.row(i).lpNorm<1>() - std::abs(m(i, i));
            const double col = m.col(i).lpNorm<1>() - std::abs(m(i, i));
            if (row == 0.0 || col == 0.0) continue;
            int e = 0;
            std::frexp(row / col, &e);
            e /= 2;
            if (e == 0) continue;
            if (std::ldexp(col, e) + std::ldexp(row, -e) < gamma * (col + row)) {
                changed = true;
                m.row(i) *= std::ldexp(1.0, -e);
                m.col(i) *= std::ldexp(1.0, e);
            }
        }
    }
}

double scaled_residual(const Polynomial& p, cplx r) {
    double denom = 0.0;
    const double ar = std::abs(r);
    double pw = 1.0;
    for (double c : p.coeffs()) {
        denom += std::abs(c) * pw;
        pw *= ar;
    }
    return denom > 0.0 ? std::abs(p(r)) / denom : 0.0;
}

// Newton steps on one root, accepted only while the residual drops and the step stays local.
cplx polish(const Polynomial& p, const Polynomial& dp, cplx r, double max_step) {
    double res = std::abs(p(r));
    for (int it = 0; it < 8 && res > 0.0; ++it) {
        const cplx d = dp(r);
        if (d == cplx(0.0)) break;
        const cplx step = p(r) / d;
        if (std::abs(step) > max_step) break;
        const cplx next = r - step;
        const double nres = std::abs(p(next));
        if (!(nres < res)) break;
        r = next;
        res = nres;
    }
    return r;
}

}  // namespace

ComplexRootSet roots(const Polynomial& p) {
    if (p.is_zero()) throw ZeroPolynomial("roots of the zero polynomial");
    ComplexRootSet out;
    const auto& c = p.coeffs();
    size_t zeros = 0;
    while (zeros < c.size() && c[zeros] == 0.0) ++zeros;
    out.roots.assign(zeros, cplx(0.0));
    const Polynomial q(std::vector<double>(c.begin() + static_cast<long>(zeros), c.end()));
    const int n = q.degree();
    if (n <= 0) return out;

    std::vector<cplx> found;
    if (n == 1) {
        found.emplace_back(-q[0] / q[1]);
    } else {
        Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
        for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
        for (int i = 0; i < n; ++i) comp(i, n - 1) = -q[i] / q[n];
        balance(comp);
        Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
        if (es.info() != Eigen::Success) throw ConvergenceFailure("companion eigenvalue iteration did not converge");
        for (int i = 0; i < n; ++i) found.push_back(es.eigenvalues()(i));
    }

    // Polish the real roots and the upper member of each conjugate pair, then mirror.
    const Polynomial dq = q.derivative();
    std::vector<cplx> polished;
    for (size_t i = 0; i < found.size(); ++i) {
        const cplx r = found[i];
        if (r.imag() < 0.0) continue;
        double gap = std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < found.size(); ++j)
            if (j != i) gap = std::min(gap, std::abs(found[j] - r));
        cplx s = polish(q, dq, r, 0.25 * gap);
        if (r.imag() == 0.0) s = cplx(s.real(), 0.0);
        if (r.imag() > 0.0 && s.imag() <= 0.0) s = r;
        polished.push_back(s);
        if (r.imag() > 0.0) polished.push_back(std::conj(s));
    }
    if (polished.size() != found.size()) polished = found;

    double worst = 0.0;
    for (const cplx& r : polished) {
        out.roots.push_back(r);
        out.residual = std::max(out.residual, std::abs(p(r)));
        worst = std::max(worst, scaled_residual(q, r));
    }
    if (!(worst < 1e-6)) throw ConvergenceFailure("root residual " + std::to_string(worst) + " after polishing");
    return out;
}

double max_modulus(const std::vector<cplx>& r) {
    double m = 0.0;
    for (const cplx& x : r) m = std::max(m, std::abs(x));
    return m;
}

double max_real_part(const std::vector<cplx>& r) {
    double m = -std::numeric_limits<double>::infinity();
    for (const cplx& x : r) m = std::max(m, x.real());
    return m;
}

SchurResult is_schur(const Polynomial& p, double margin, double tol) {
    if (p.is_zero()) throw ZeroPolynomial("Schur test of the zero polynomial");
    SchurResult res;
    if (p.degree() == 0) {
        res.verdict = Verdict::Pass;
        return res;
    }
    const double radius = 1.0 - margin;
    res.max_modulus = max_modulus(roots(p).roots);
    if (std::abs(res.max_modulus - radius) <= tol) {
        res.verdict = Verdict::Inconclusive;
        return res;
    }

    std::vector<double> a = p.coeffs();
    double rk = 1.0;
    for (double& x : a) {
        x *= rk;
        rk *= radius;
    }
    bool degenerate = false;
    Verdict v = Verdict::Pass;
    for (size_t n = a.size() - 1; n >= 1; --n) {
        const double an = a[n];
        const double a0 = a[0];
        if (std::abs(an * an - a0 * a0) <= 1e-10 * an * an) {
            degenerate = true;
            break;
        }
        if (std::abs(a0) > std::abs(an)) {
            v = Verdict::Fail;
            break;
        }
        std::vector<double> b(n);
        double scale = 0.0;
        for (size_t k = 0; k < n; ++k) {
            b[k] = an * a[k + 1] - a0 * a[n - 1 - k];
            scale = std::max(scale, std::abs(b[k]));
        }
        if (scale == 0.0) {
            degenerate = true;
            break;
        }
        for (double& x : b) x /= scale;
        a = std::move(b);
    }
    if (degenerate) {
        res.used_root_fallback = true;
        v = res.max_modulus < radius ? Verdict::Pass : Verdict::Fail;
    }
    res.verdict = v;
    return res;
}

SchurResult is_schur_shifted(const Polynomial& p_w, double margin, double tol) {
    if (p_w.is_zero()) throw ZeroPolynomial("Schur test of the zero polynomial");
    SchurResult res;
    res.used_root_fallback = true;
    double m = 0.0;
    for (const cplx& w : roots(p_w).roots) m = std::max(m, std::abs(1.0 + w));
    res.max_modulus = m;
    const double radius = 1.0 - margin;
    if (std::abs(m - radius) <= tol)
        res.verdict = Verdict::Inconclusive;
    else
        res.verdict = m < radius ? Verdict::Pass : Verdict::Fail;
    return res;
}

HurwitzResult is_hurwitz(const Polynomial& p, double tol) {
    if (p.is_zero()) throw ZeroPolynomial("Hurwitz test of the zero polynomial");
    HurwitzResult res;
    res.max_real_part = -std::numeric_limits<double>::infinity();
    if (p.degree() == 0) {
        res.verdict = Verdict::Pass;
        return res;
    }
    res.max_real_part = max_real_part(roots(p).roots);
    if (std::abs(res.max_real_part) <= tol) {
        res.verdict = Verdict::Inconclusive;
        return res;
    }

    const int n = p.degree();
    const double sign = p.leading() > 0.0 ? 1.0 : -1.0;
    const size_t width = static_cast<size_t>(n / 2 + 1);
    std::vector<double> r0(width, 0.0), r1(width, 0.0);
    for (int k = 0; k <= n; ++k) {
        const double v = sign * p[n - k];
        if (k % 2 == 0)
            r0[static_cast<size_t>(k / 2)] = v;
        else
            r1[static_cast<size_t>(k / 2)] = v;
    }
    const double scale = p.max_abs_coeff();
    bool degenerate = false;
    Verdict v = Verdict::Pass;
    for (int row = 1; row <= n; ++row) {
        if (std::abs(r1[0]) <= 1e-12 * scale) {
            degenerate = true;
            break;
        }
        if (r1[0] < 0.0) {
            v = Verdict::Fail;
            break;
        }
        std::vector<double> r2(width, 0.0);
        for (size_t j = 0; j + 1 < width; ++j) r2[j] = (r1[0] * r0[j + 1] - r0[0] * r1[j + 1]) / r1[0];
        r0 = std::move(r1);
        r1 = std::move(r2);
    }
    if (degenerate) {
        res.used_root_fallback = true;
        v = res.max_real_part < 0.0 ? Verdict::Pass : Verdict::Fail;
    }
    res.verdict = v;
    return res;
}

bool jury_two_row_conditions(const Polynomial& p) {
    const int n = p.degree();
    if (n < 1) return true;
    double an = p[n];
    const double s = an < 0.0 ? -1.0 : 1.0;
    an *= s;
    const double a0 = s * p[0];
    const double a1 = s * p[1];
    const double an1 = s * p[n - 1];
    if (!(std::abs(a0) < an)) return false;
    if (n == 1) return true;
    return std::abs(a0 * a0 - an * an) > std::abs(a0 * an1 - an * a1);
}

std::array<Polynomial, 4> kharitonov_vertices(const IntervalPolynomial& ip) {
    if (ip.lo.size() != ip.hi.size() || ip.lo.empty())
        throw PreconditionViolation("interval polynomial bounds must be nonempty and of equal length");
    for (size_t k = 0; k < ip.lo.size(); ++k)
        if (ip.lo[k] > ip.hi[k]) throw PreconditionViolation("interval bound lo > hi at power " + std::to_string(k));
    std::vector<double> lo = ip.lo, hi = ip.hi;
    const size_t n = lo.size() - 1;
    if (lo[n] <= 0.0 && hi[n] >= 0.0) throw DegenerateLeadingCoefficient("leading coefficient interval contains 0");
    if (hi[n] < 0.0) {
        for (size_t k = 0; k <= n; ++k) {
            const double l = lo[k];
            lo[k] = -hi[k];
            hi[k] = -l;
        }
    }
    static constexpr bool kHigh[4][4] = {
        {false, false, true, true}, {true, true, false, false}, {false, true, true, false}, {true, false, false, true}};
    std::array<Polynomial, 4> out;
    for (int v = 0; v < 4; ++v) {
        std::vector<double> c(n + 1);
        for (size_t k = 0; k <= n; ++k) c[k] = kHigh[v][k % 4] ? hi[k] : lo[k];
        out[static_cast<size_t>(v)] = Polynomial(std::move(c));
    }
    return out;
}

HurwitzResult kharitonov_hurwitz(const IntervalPolynomial& ip, double tol) {
    HurwitzResult res;
    res.verdict = Verdict::Pass;
    res.max_real_part = -std::numeric_limits<double>::infinity();
    for (const Polynomial& v : kharitonov_vertices(ip)) {
        const HurwitzResult h = is_hurwitz(v, tol);
        res.max_real_part = std::max(res.max_real_part, h.max_real_part);
        res.used_root_fallback = res.used_root_fallback || h.used_root_fallback;
        if (h.verdict == Verdict::Fail)
            res.verdict = Verdict::Fail;
        else if (h.verdict == Verdict::Inconclusive && res.verdict == Verdict::Pass)
            res.verdict = Verdict::Inconclusive;
    }
    return res;
}

}  // namespace dtdob
