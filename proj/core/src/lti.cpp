#include "dtdob/lti.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dtdob/errors.hpp"

namespace dtdob {

RationalTransfer::RationalTransfer(Polynomial n, Polynomial d, Domain dom) : num(std::move(n)), den(std::move(d)), domain(dom) {
    if (den.is_zero()) throw ZeroPolynomial("transfer denominator is identically zero");
}

Polynomial RationalTransfer::num_z() const { return is_discrete() ? compose_affine(num, 1.0, -1.0) : num; }
Polynomial RationalTransfer::den_z() const { return is_discrete() ? compose_affine(den, 1.0, -1.0) : den; }

cplx RationalTransfer::eval(cplx x) const { return is_discrete() ? eval_w(x - 1.0) : num(x) / den(x); }

cplx RationalTransfer::eval_w(cplx w) const { return num(w) / den(w); }

namespace {

std::vector<cplx> native_roots(const Polynomial& p, bool discrete) {
    if (p.degree() < 1) return {};
    std::vector<cplx> r = roots(p).roots;
    if (discrete)
        for (cplx& x : r) x += 1.0;
    return r;
}

}  // namespace

std::vector<cplx> RationalTransfer::poles() const { return native_roots(den, is_discrete()); }
std::vector<cplx> RationalTransfer::zeros() const { return native_roots(num, is_discrete()); }

RationalTransfer RationalTransfer::normalized() const {
    const double l = den.leading();
    return RationalTransfer((1.0 / l) * num, (1.0 / l) * den, domain);
}

double high_frequency_gain(const RationalTransfer& tf) { return tf.num.leading() / tf.den.leading(); }

Polynomial characteristic_polynomial(const Eigen::MatrixXd& A) {
    const int n = static_cast<int>(A.rows());
    std::vector<double> c(static_cast<size_t>(n) + 1, 0.0);
    c[static_cast<size_t>(n)] = 1.0;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    for (int k = 1; k <= n; ++k) {
        M = A * M + c[static_cast<size_t>(n - k + 1)] * I;
        c[static_cast<size_t>(n - k)] = -(A * M).trace() / k;
    }
    return Polynomial(std::move(c));
}

RationalTransfer StateSpace::transfer(Domain domain) const {
    const Polynomial den = characteristic_polynomial(A);
    if (order() == 0) return RationalTransfer(Polynomial::constant(D), Polynomial::constant(1.0), domain);
    const Eigen::MatrixXd closed = A - B * C;
    const Polynomial strict = characteristic_polynomial(closed) - den;
    return RationalTransfer(strict + D * den, den, domain);
}

StateSpace realize_controllable_canonical(const RationalTransfer& tf) {
    if (tf.num.degree() > tf.den.degree())
        throw ImproperTransfer("numerator degree " + std::to_string(tf.num.degree()) + " exceeds denominator degree " +
                               std::to_string(tf.den.degree()));
    const RationalTransfer t = tf.normalized();
    const int n = t.den.degree();
    StateSpace ss;
    ss.D = t.num[n];
    ss.A = Eigen::MatrixXd::Zero(n, n);
    ss.B = Eigen::VectorXd::Zero(n);
    ss.C = Eigen::RowVectorXd::Zero(n);
    if (n == 0) return ss;
    for (int i = 0; i + 1 < n; ++i) ss.A(i, i + 1) = 1.0;
    for (int j = 0; j < n; ++j) {
        ss.A(n - 1, j) = -t.den[j];
        ss.C(j) = t.num[j] - ss.D * t.den[j];
    }
    ss.B(n - 1) = 1.0;
    return ss;
}

std::vector<std::vector<double>> ParameterBox::grid() const {
    std::vector<std::vector<double>> axes;
    for (size_t i = 0; i < lo.size(); ++i) {
        std::vector<double> ax;
        const int m = lo[i] == hi[i] ? 1 : std::max(grid_points, 2);
        for (int k = 0; k < m; ++k) ax.push_back(m == 1 ? lo[i] : lo[i] + (hi[i] - lo[i]) * k / (m - 1));
        axes.push_back(std::move(ax));
    }
    std::vector<std::vector<double>> out{{}};
    for (const auto& ax : axes) {
        std::vector<std::vector<double>> next;
        for (const auto& prefix : out)
            for (double v : ax) {
                auto p = prefix;
                p.push_back(v);
                next.push_back(std::move(p));
            }
        out = std::move(next);
    }
    return out;
}

void UncertainPlantFamily::validate() const {
    if (n < 1 || nu < 1 || nu > n) throw PreconditionViolation("family needs 1 <= nu <= n");
    if (!(g_lo > 0.0) || g_lo > g_hi) throw PreconditionViolation("family gain bounds need 0 < g_lo <= g_hi");
    if (alpha_lo.size() != static_cast<size_t>(n) || alpha_hi.size() != static_cast<size_t>(n))
        throw PreconditionViolation("alpha bounds must have length n");
    if (beta_lo.size() != static_cast<size_t>(n - nu) || beta_hi.size() != static_cast<size_t>(n - nu))
        throw PreconditionViolation("beta bounds must have length n - nu");
    for (int i = 0; i < n; ++i)
        if (alpha_lo[i] > alpha_hi[i]) throw PreconditionViolation("alpha_lo > alpha_hi at index " + std::to_string(i));
    for (int i = 0; i < n - nu; ++i)
        if (beta_lo[i] > beta_hi[i]) throw PreconditionViolation("beta_lo > beta_hi at index " + std::to_string(i));
}

IntervalPolynomial UncertainPlantFamily::numerator_interval() const {
    IntervalPolynomial ip{beta_lo, beta_hi};
    ip.lo.push_back(1.0);
    ip.hi.push_back(1.0);
    return ip;
}

IntervalPolynomial UncertainPlantFamily::denominator_interval() const {
    IntervalPolynomial ip{alpha_lo, alpha_hi};
    ip.lo.push_back(1.0);
    ip.hi.push_back(1.0);
    return ip;
}

std::vector<RationalTransfer> UncertainPlantFamily::members() const {
    if (box) {
        std::vector<RationalTransfer> out;
        for (const auto& p : box->grid()) out.push_back(box->member(p));
        return out;
    }
    // Coefficient grid: g, alpha, beta. Three levels per free coefficient while small, vertices beyond.
    std::vector<std::pair<double, double>> iv{{g_lo, g_hi}};
    for (int i = 0; i < n; ++i) iv.emplace_back(alpha_lo[i], alpha_hi[i]);
    for (int i = 0; i < n - nu; ++i) iv.emplace_back(beta_lo[i], beta_hi[i]);
    size_t free = 0;
    for (auto& [l, h] : iv) free += l < h ? 1 : 0;
    const int levels = free <= 8 ? 3 : 2;
    std::vector<std::vector<double>> pts{{}};
    for (auto& [l, h] : iv) {
        std::vector<double> vals;
        if (l == h)
            vals = {l};
        else if (levels == 3)
            vals = {l, 0.5 * (l + h), h};
        else
            vals = {l, h};
        std::vector<std::vector<double>> next;
        for (const auto& prefix : pts)
            for (double v : vals) {
                auto p = prefix;
                p.push_back(v);
                next.push_back(std::move(p));
            }
        pts = std::move(next);
        if (pts.size() > 20000) break;
    }
    std::vector<RationalTransfer> out;
    for (const auto& p : pts) {
        if (p.size() != iv.size()) continue;
        MemberPoint mp;
        mp.g = p[0];
        mp.alpha.assign(p.begin() + 1, p.begin() + 1 + n);
        mp.beta.assign(p.begin() + 1 + n, p.end());
        out.push_back(sample_member(*this, mp));
    }
    return out;
}

RationalTransfer sample_member(const UncertainPlantFamily& fam, const MemberPoint& point) {
    fam.validate();
    auto check = [](double v, double lo, double hi, const std::string& what) {
        const double slack = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
        if (v < lo - slack || v > hi + slack) {
            std::ostringstream os;
            os << what << " = " << v << " outside [" << lo << ", " << hi << "]";
            throw OutOfBounds(os.str());
        }
    };
    check(point.g, fam.g_lo, fam.g_hi, "g");
    if (point.alpha.size() != static_cast<size_t>(fam.n) || point.beta.size() != static_cast<size_t>(fam.n - fam.nu))
        throw OutOfBounds("member coefficient vectors have the wrong length");
    for (int i = 0; i < fam.n; ++i) check(point.alpha[i], fam.alpha_lo[i], fam.alpha_hi[i], "alpha[" + std::to_string(i) + "]");
    for (int i = 0; i < fam.n - fam.nu; ++i) check(point.beta[i], fam.beta_lo[i], fam.beta_hi[i], "beta[" + std::to_string(i) + "]");
    std::vector<double> den = point.alpha;
    den.push_back(1.0);
    std::vector<double> num = point.beta;
    num.push_back(1.0);
    for (double& x : num) x *= point.g;
    return RationalTransfer(Polynomial(num), Polynomial(den));
}

std::pair<double, double> gain_interval(const UncertainPlantFamily& fam) { return {fam.g_lo, fam.g_hi}; }

namespace {

void widen(std::vector<double>& lo, std::vector<double>& hi, const Polynomial& p, int len) {
    for (int i = 0; i < len; ++i) {
        lo[static_cast<size_t>(i)] = std::min(lo[static_cast<size_t>(i)], p[i]);
        hi[static_cast<size_t>(i)] = std::max(hi[static_cast<size_t>(i)], p[i]);
    }
}

}  // namespace

UncertainPlantFamily induced_family(const ParameterBox& box, int n, int nu) {
    UncertainPlantFamily fam;
    fam.n = n;
    fam.nu = nu;
    const double inf = std::numeric_limits<double>::infinity();
    fam.g_lo = inf;
    fam.g_hi = -inf;
    fam.alpha_lo.assign(static_cast<size_t>(n), inf);
    fam.alpha_hi.assign(static_cast<size_t>(n), -inf);
    fam.beta_lo.assign(static_cast<size_t>(n - nu), inf);
    fam.beta_hi.assign(static_cast<size_t>(n - nu), -inf);
    for (const auto& p : box.grid()) {
        const RationalTransfer m = box.member(p).normalized();
        if (m.den.degree() != n || m.relative_degree() != nu)
            throw PreconditionViolation("parameter box member does not have order n and relative degree nu");
        const double g = m.num.leading();
        fam.g_lo = std::min(fam.g_lo, g);
        fam.g_hi = std::max(fam.g_hi, g);
        widen(fam.alpha_lo, fam.alpha_hi, m.den, n);
        widen(fam.beta_lo, fam.beta_hi, (1.0 / g) * m.num, n - nu);
    }
    fam.box = box;
    fam.validate();
    return fam;
}

UncertainPlantFamily point_family(const RationalTransfer& member) {
    ParameterBox box;
    box.member = [member](const std::vector<double>&) { return member; };
    box.grid_points = 1;
    const RationalTransfer m = member.normalized();
    return induced_family(box, m.den.degree(), m.relative_degree());
}

bool family_contains(const UncertainPlantFamily& fam, const RationalTransfer& member, double rel_tol) {
    const RationalTransfer m = member.normalized();
    if (m.den.degree() != fam.n || m.relative_degree() != fam.nu) return false;
    auto inside = [rel_tol](double x, double lo, double hi) {
        const double slack = rel_tol * std::max({1.0, std::abs(lo), std::abs(hi)});
        return x >= lo - slack && x <= hi + slack;
    };
    const double g = m.num.leading();
    if (!inside(g, fam.g_lo, fam.g_hi)) return false;
    for (int i = 0; i < fam.n; ++i)
        if (!inside(m.den[i], fam.alpha_lo[i], fam.alpha_hi[i])) return false;
    for (int i = 0; i < fam.n - fam.nu; ++i)
        if (!inside(m.num[i] / g, fam.beta_lo[i], fam.beta_hi[i])) return false;
    return true;
}

RationalTransfer two_mass_spring_member(double M1, double M2, double K) {
    if (!(M1 > 0.0 && M2 > 0.0 && K > 0.0)) throw PreconditionViolation("two-mass-spring parameters must be positive");
    return RationalTransfer(Polynomial{K}, Polynomial{0.0, 0.0, K * (M1 + M2), 0.0, M1 * M2});
}

UncertainPlantFamily two_mass_spring_family(std::pair<double, double> M1, std::pair<double, double> M2,
                                            std::pair<double, double> K, int grid_points) {
    ParameterBox box;
    box.names = {"M1", "M2", "K"};
    box.lo = {M1.first, M2.first, K.first};
    box.hi = {M1.second, M2.second, K.second};
    box.grid_points = grid_points;
    box.member = [](const std::vector<double>& p) { return two_mass_spring_member(p[0], p[1], p[2]); };
    return induced_family(box, 4, 4);
}

std::vector<std::string> coprimality_warnings(const RationalTransfer& tf, double tol) {
    std::vector<std::string> out;
    if (tf.num.degree() < 1 || tf.den.degree() < 1) return out;
    const auto zr = roots(tf.num).roots;
    const auto pr = roots(tf.den).roots;
    for (const cplx& z : zr)
        for (const cplx& p : pr)
            if (std::abs(z - p) <= tol * std::max(1.0, std::abs(p))) {
                std::ostringstream os;
                os << "numerator and denominator share an approximate root near (" << p.real() << ", " << p.imag() << ")";
                out.push_back(os.str());
            }
    return out;
}

}  // namespace dtdob
