#include "dtdob/discretize.hpp"

#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "dtdob/errors.hpp"

namespace dtdob {

const char* to_string(DiscretizationMethod m) {
    switch (m) {
        case DiscretizationMethod::ZOH: return "zoh";
        case DiscretizationMethod::FDM: return "fdm";
        case DiscretizationMethod::BDM: return "bdm";
        case DiscretizationMethod::BT: return "bt";
        case DiscretizationMethod::MPZ: return "mpz";
    }
    return "?";
}

DiscretizationMethod parse_method(const std::string& s) {
    std::string l;
    for (char ch : s) l.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    if (l == "zoh") return DiscretizationMethod::ZOH;
    if (l == "fdm") return DiscretizationMethod::FDM;
    if (l == "bdm") return DiscretizationMethod::BDM;
    if (l == "bt" || l == "tustin") return DiscretizationMethod::BT;
    if (l == "mpz") return DiscretizationMethod::MPZ;
    throw PreconditionViolation("unknown discretization method '" + s + "'");
}

namespace {

__int128 binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    __int128 r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

__int128 ipow(int b, int e) {
    __int128 r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace

std::vector<std::int64_t> euler_frobenius_coefficients(int nu) {
    if (nu < 1 || nu > 20) throw PreconditionViolation("euler_frobenius needs 1 <= nu <= 20");
    std::vector<std::int64_t> b(static_cast<size_t>(nu));
    for (int j = 0; j < nu; ++j) {
        __int128 s = 0;
        for (int l = 1; l <= nu - j; ++l) {
            const int e = nu - j - l;
            const __int128 term = ipow(l, nu) * binom(nu + 1, e);
            s += (e % 2 == 0) ? term : -term;
        }
        if (s > std::numeric_limits<std::int64_t>::max() || s < std::numeric_limits<std::int64_t>::min())
            throw PreconditionViolation("euler_frobenius coefficient overflows int64");
        b[static_cast<size_t>(j)] = static_cast<std::int64_t>(s);
    }
    return b;
}

Polynomial euler_frobenius(int nu) {
    const auto b = euler_frobenius_coefficients(nu);
    return Polynomial(std::vector<double>(b.begin(), b.end()));
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> matrix_exponential_with_integral(const Eigen::MatrixXd& A,
                                                                             const Eigen::VectorXd& B, double delta) {
    if (!(delta > 0.0)) throw PreconditionViolation("sampling period must be positive");
    const Eigen::Index n = A.rows();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + 1, n + 1);
    M.topLeftCorner(n, n) = A * delta;
    M.topRightCorner(n, 1) = B * delta;
    const Eigen::MatrixXd E = M.exp();
    return {E.topLeftCorner(n, n), E.topRightCorner(n, 1)};
}

cplx expm1c(cplx x) {
    const double a = x.real();
    const double b = x.imag();
    const double s = std::sin(0.5 * b);
    return {std::expm1(a) * std::cos(b) - 2.0 * s * s, std::exp(a) * std::sin(b)};
}

namespace {

void require_positive(double delta) {
    if (!(delta > 0.0)) throw PreconditionViolation("sampling period must be positive");
}

// Scaled Markov parameters ht[i] = delta^{i-1} h_i of num/den (den monic), i = 1..count.
std::vector<double> scaled_markov(const Polynomial& num, const Polynomial& den, double delta, int count) {
    const int n = den.degree();
    std::vector<double> ht(static_cast<size_t>(count) + 1, 0.0);
    for (int i = 1; i <= count; ++i) {
        double v = (n - i >= 0) ? num[n - i] * std::pow(delta, i - 1) : 0.0;
        for (int j = 1; j <= std::min(i - 1, n); ++j) v -= den[n - j] * std::pow(delta, j) * ht[static_cast<size_t>(i - j)];
        ht[static_cast<size_t>(i)] = v;
    }
    return ht;
}

}  // namespace

RationalTransfer zoh_discretize(const RationalTransfer& tf_ct, double delta) {
    require_positive(delta);
    if (tf_ct.is_discrete()) throw PreconditionViolation("zoh_discretize needs a continuous transfer");
    if (tf_ct.relative_degree() < 1) throw ImproperTransfer("zoh_discretize needs a strictly proper transfer");
    const RationalTransfer t = tf_ct.normalized();
    const int n = t.den.degree();

    std::vector<cplx> lam;
    double rho = 0.0;
    if (n >= 1) {
        lam = roots(t.den).roots;
        rho = max_modulus(lam);
    }
    std::vector<cplx> mu;
    for (const cplx& l : lam) mu.push_back(expm1c(l * delta));
    const Polynomial den_w = Polynomial::from_roots(mu);

    // mt[k] = delta^{k-1} m_k with m_k the delta-domain Markov parameters.
    std::vector<double> mt(static_cast<size_t>(n) + 1, 0.0);
    if (rho * delta <= 0.5) {
        const int J = 60;
        const std::vector<double> ht = scaled_markov(t.num, t.den, delta, n + J);
        std::vector<double> e(static_cast<size_t>(J) + 1);
        double f = 1.0;
        for (int j = 0; j <= J; ++j) {
            f *= (j + 1);
            e[static_cast<size_t>(j)] = 1.0 / f;
        }
        std::vector<double> phi(static_cast<size_t>(J) + 1, 0.0);
        phi[0] = 1.0;
        for (int k = 1; k <= n; ++k) {
            std::vector<double> next(static_cast<size_t>(J) + 1, 0.0);
            for (int i = 0; i <= J; ++i)
                for (int j = 0; i + j <= J; ++j) next[static_cast<size_t>(i + j)] += phi[static_cast<size_t>(i)] * e[static_cast<size_t>(j)];
            phi = std::move(next);
            double s = 0.0;
            for (int j = 0; j <= J; ++j) s += phi[static_cast<size_t>(j)] * ht[static_cast<size_t>(k + j)];
            mt[static_cast<size_t>(k)] = s;
        }
    } else {
        const StateSpace ss = realize_controllable_canonical(t);
        const auto [Ad, Bd] = matrix_exponential_with_integral(ss.A, ss.B, delta);
        const Eigen::MatrixXd Aw = Ad - Eigen::MatrixXd::Identity(n, n);
        Eigen::VectorXd v = Bd / delta;
        for (int k = 1; k <= n; ++k) {
            mt[static_cast<size_t>(k)] = ss.C.dot(v);
            v = Aw * v;
        }
    }

    double scale = 0.0;
    for (int k = 1; k <= n; ++k) scale = std::max(scale, std::abs(mt[static_cast<size_t>(k)]));
    if (!(std::abs(mt[1]) > 1e-10 * scale))
        throw DegenerateSamplingPeriod("CdBd vanishes at delta = " + std::to_string(delta));

    std::vector<double> nw(static_cast<size_t>(n), 0.0);
    for (int k = 1; k <= n; ++k) {
        double s = 0.0;
        for (int j = 1; j <= k; ++j) s += den_w[n - k + j] * mt[static_cast<size_t>(j)];
        nw[static_cast<size_t>(n - k)] = delta * s;
    }
    return RationalTransfer(Polynomial(std::move(nw)), den_w, Domain::DiscreteZ);
}

namespace {

// sum_k p_k sk(w)^k * rest(w)^{n-k}, the homogenized substitution s = sk(w)/rest(w).
Polynomial homogenize(const Polynomial& p, const Polynomial& sk, const Polynomial& rest, int n) {
    Polynomial acc;
    for (int k = 0; k <= p.degree(); ++k) {
        if (p[k] == 0.0) continue;
        acc = acc + p[k] * pow(sk, k) * pow(rest, n - k);
    }
    return acc;
}

cplx mpz_factor(cplx x) {
    if (std::abs(x) < 1e-300) return 1.0;
    return expm1c(x) / x;
}

}  // namespace

RationalTransfer approx_discretize(const RationalTransfer& tf_ct, DiscretizationMethod method, double delta) {
    require_positive(delta);
    if (tf_ct.is_discrete()) throw PreconditionViolation("approx_discretize needs a continuous transfer");
    if (tf_ct.relative_degree() < 0) throw ImproperTransfer("approx_discretize needs a proper transfer");
    const RationalTransfer t = tf_ct.normalized();
    const int n = t.den.degree();
    const int nu = t.relative_degree();

    Polynomial num_w, den_w;
    switch (method) {
        case DiscretizationMethod::FDM: {
            const Polynomial sk{0.0, 1.0}, rest = Polynomial::constant(delta);
            num_w = homogenize(t.num, sk, rest, n);
            den_w = homogenize(t.den, sk, rest, n);
            break;
        }
        case DiscretizationMethod::BDM: {
            const Polynomial sk{0.0, 1.0}, rest{delta, delta};
            num_w = homogenize(t.num, sk, rest, n);
            den_w = homogenize(t.den, sk, rest, n);
            break;
        }
        case DiscretizationMethod::BT: {
            const Polynomial sk{0.0, 2.0}, rest{2.0 * delta, delta};
            num_w = homogenize(t.num, sk, rest, n);
            den_w = homogenize(t.den, sk, rest, n);
            break;
        }
        case DiscretizationMethod::MPZ: {
            const double g = t.num.leading();
            std::vector<cplx> zc = t.num.degree() >= 1 ? roots(t.num).roots : std::vector<cplx>{};
            std::vector<cplx> pc = n >= 1 ? roots(t.den).roots : std::vector<cplx>{};
            cplx gd = g;
            for (const cplx& p : pc) gd *= mpz_factor(p * delta);
            for (const cplx& z : zc) gd /= mpz_factor(z * delta);
            std::vector<cplx> zw, pw;
            for (const cplx& z : zc) zw.push_back(expm1c(z * delta));
            for (const cplx& p : pc) pw.push_back(expm1c(p * delta));
            const Polynomial m = pow(Polynomial{1.0, 0.5}, nu);
            num_w = (gd.real() * std::pow(delta, nu)) * m * Polynomial::from_roots(zw);
            den_w = Polynomial::from_roots(pw);
            break;
        }
        case DiscretizationMethod::ZOH:
            throw PreconditionViolation("approx_discretize does not handle ZOH");
    }
    if (den_w.degree() < n || std::abs(den_w.leading()) <= 1e-12 * den_w.max_abs_coeff())
        throw SingularSubstitution(std::string(to_string(method)) + " substitution collapses the denominator degree");
    const double l = den_w.leading();
    return RationalTransfer((1.0 / l) * num_w, (1.0 / l) * den_w, Domain::DiscreteZ);
}

RationalTransfer discretize(const RationalTransfer& tf_ct, DiscretizationMethod method, double delta) {
    if (method != DiscretizationMethod::ZOH) return approx_discretize(tf_ct, method, delta);
    if (tf_ct.relative_degree() >= 1) return zoh_discretize(tf_ct, delta);
    if (tf_ct.relative_degree() < 0) throw ImproperTransfer("cannot discretize an improper transfer");
    const RationalTransfer t = tf_ct.normalized();
    const double d = high_frequency_gain(t);
    const Polynomial rest = t.num - d * t.den;
    if (rest.is_zero() || t.den.degree() == 0)
        return RationalTransfer(Polynomial::constant(d), Polynomial::constant(1.0), Domain::DiscreteZ);
    const RationalTransfer sp = zoh_discretize(RationalTransfer(rest, t.den), delta);
    return RationalTransfer(sp.num + d * sp.den, sp.den, Domain::DiscreteZ);
}

Polynomial limit_m_star(int nu, DiscretizationMethod method) {
    switch (method) {
        case DiscretizationMethod::ZOH: return nu >= 1 ? (1.0 / factorial(nu)) * euler_frobenius(nu) : Polynomial{1.0};
        case DiscretizationMethod::FDM: return Polynomial{1.0};
        case DiscretizationMethod::BDM: return Polynomial::monomial(nu);
        case DiscretizationMethod::BT:
        case DiscretizationMethod::MPZ: return pow(Polynomial{0.5, 0.5}, nu);
    }
    return Polynomial{1.0};
}

int limit_m_degree(int nu, DiscretizationMethod method) {
    switch (method) {
        case DiscretizationMethod::ZOH: return std::max(nu - 1, 0);
        case DiscretizationMethod::FDM: return 0;
        default: return nu;
    }
}

LimitComponents limit_components(const RationalTransfer& tf_ct, DiscretizationMethod method) {
    LimitComponents lc;
    lc.g_limit = high_frequency_gain(tf_ct);
    lc.m_star = limit_m_star(tf_ct.relative_degree(), method);
    lc.m_degree = limit_m_degree(tf_ct.relative_degree(), method);
    return lc;
}

ZeroClassification classify_zeros(const RationalTransfer& tf_dt, const RationalTransfer& tf_ct, double delta) {
    ZeroClassification out;
    std::vector<cplx> dz = tf_dt.zeros();
    if (dz.empty()) return out;
    std::vector<cplx> targets;
    for (const cplx& z : tf_ct.zeros()) targets.push_back(std::exp(z * delta));
    const int nu = tf_ct.relative_degree();
    std::vector<cplx> sampling_targets;
    if (nu >= 2) sampling_targets = roots(euler_frobenius(nu)).roots;

    std::vector<cplx> all = targets;
    all.insert(all.end(), sampling_targets.begin(), sampling_targets.end());
    double gap = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < all.size(); ++i)
        for (size_t j = i + 1; j < all.size(); ++j) {
            const double d = std::abs(all[i] - all[j]);
            if (d > 1e-12) gap = std::min(gap, d);
        }
    const double tol = std::isfinite(gap) ? 0.25 * gap : 0.25;

    std::vector<bool> used(dz.size(), false);
    for (const cplx& t : targets) {
        size_t best = dz.size();
        double bd = std::numeric_limits<double>::infinity();
        int within = 0;
        for (size_t i = 0; i < dz.size(); ++i) {
            if (used[i]) continue;
            const double d = std::abs(dz[i] - t);
            if (d <= tol) ++within;
            if (d < bd) {
                bd = d;
                best = i;
            }
        }
        if (best == dz.size()) break;
        bool repeated = false;
        for (const cplx& u : targets)
            if (&u != &t && std::abs(u - t) <= 1e-12) repeated = true;
        if (within > 1 && !repeated)
            throw AmbiguousPairing("two DT zeros lie within tolerance of the CT zero image " + std::to_string(t.real()));
        used[best] = true;
        out.intrinsic.push_back(dz[best]);
        out.match_error = std::max(out.match_error, bd);
    }
    for (size_t i = 0; i < dz.size(); ++i) {
        if (used[i]) continue;
        out.sampling.push_back(dz[i]);
        double bd = sampling_targets.empty() ? 0.0 : std::numeric_limits<double>::infinity();
        for (const cplx& s : sampling_targets) bd = std::min(bd, std::abs(dz[i] - s));
        out.match_error = std::max(out.match_error, bd);
    }
    return out;
}

namespace {

double op_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

}  // namespace

double cdbd_perturbation_bound(const RationalTransfer& member, double delta) {
    const RationalTransfer t = member.normalized();
    const StateSpace ss = realize_controllable_canonical(t);
    const int nu = t.relative_degree();
    Eigen::MatrixXd Anu = Eigen::MatrixXd::Identity(ss.order(), ss.order());
    for (int i = 0; i < nu; ++i) Anu = Anu * ss.A;
    const Eigen::MatrixXd CA = ss.C * Anu;
    return delta * op_norm(CA) * std::exp(op_norm(ss.A) * delta) * ss.B.norm();
}

SamplingPeriodCheck validate_sampling_period(const UncertainPlantFamily& fam, double delta) {
    require_positive(delta);
    SamplingPeriodCheck out;
    out.margin = std::numeric_limits<double>::infinity();
    for (const RationalTransfer& m : fam.members()) {
        const double g = high_frequency_gain(m);
        out.margin = std::min(out.margin, 0.5 * g - cdbd_perturbation_bound(m, delta));
    }
    out.valid = out.margin > 0.0;
    return out;
}

double cdbd_normalized(const RationalTransfer& member, double delta) {
    const RationalTransfer t = member.normalized();
    const int nu = t.relative_degree();
    try {
        const RationalTransfer d = zoh_discretize(t, delta);
        return d.num.leading() * factorial(nu) / (high_frequency_gain(t) * std::pow(delta, nu));
    } catch (const DegenerateSamplingPeriod&) {
        return 0.0;
    }
}

}  // namespace dtdob
