#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>

namespace sleepcell::num {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// ==== compensated accumulation ====

// Neumaier variant; needed because the cross-power series alternates with
// partial cancellation.
struct Accum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double v) {
        double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

// ==== regularized incomplete gamma ====

// P(a,x), a > 0, x >= 0.
double gamma_p(double a, double x);
// Q(a,x) = 1 - P(a,x), computed directly to keep relative accuracy in the tail.
double gamma_q(double a, double x);

// E1(x) for x > 0.
double exp1(double x);

double log_binom(double n, double k);

// ==== adaptive Gauss-Kronrod 15(7) ====

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = false;
    int evals = 0;
};

namespace detail {
// 15-point Kronrod nodes/weights on [-1,1], 7-point Gauss weights embedded.
inline constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <class F>
inline void gk15(const F& f, double a, double b, double& resk, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fc = f(c);
    double rg = fc * kWg[3];
    double rk = fc * kWgk[7];
    double fv[7][2];
    for (int i = 0; i < 7; ++i) {
        fv[i][0] = f(c - h * kXgk[i]);
        fv[i][1] = f(c + h * kXgk[i]);
        rk += kWgk[i] * (fv[i][0] + fv[i][1]);
    }
    for (int i = 1; i < 7; i += 2)
        rg += kWg[i / 2] * (fv[i][0] + fv[i][1]);
    resk = rk * h;
    err = std::abs((rk - rg) * h);
}
}  // namespace detail

// Recursive bisection until abs/rel tolerance or depth cap. The integrand is
// evaluated only at interior Kronrod nodes, so integrable endpoint blowups
// are tolerated.
template <class F>
QuadResult integrate(const F& f, double a, double b, double abs_tol = 1e-12,
                     double rel_tol = 1e-10, int max_depth = 28) {
    struct Seg {
        double a, b, val, err;
        int depth;
    };
    QuadResult out;
    double v0, e0;
    detail::gk15(f, a, b, v0, e0);
    out.evals = 15;
    // explicit stack; worst case depth*2 segments pending
    Seg stack[128];
    int top = 0;
    stack[top++] = {a, b, v0, e0, 0};
    Accum total, toterr;
    while (top > 0) {
        Seg s = stack[--top];
        double tol = std::max(abs_tol, rel_tol * std::abs(s.val));
        if (s.err <= tol || s.depth >= max_depth || top > 120) {
            total.add(s.val);
            toterr.add(s.err);
            continue;
        }
        double m = 0.5 * (s.a + s.b);
        double v1, e1, v2, e2;
        detail::gk15(f, s.a, m, v1, e1);
        detail::gk15(f, m, s.b, v2, e2);
        out.evals += 30;
        stack[top++] = {s.a, m, v1, e1, s.depth + 1};
        stack[top++] = {m, s.b, v2, e2, s.depth + 1};
    }
    out.value = total.value();
    out.error = toterr.value();
    out.converged =
        out.error <= std::max(abs_tol, rel_tol * std::abs(out.value)) * 4.0 + 1e-300;
    return out;
}

// ==== incomplete-gamma machinery for the cross-power series ====

// sigma(a,z) = sum_k z^k / (a (a+1) ... (a+k)); entire in a, analytic
// continuation of z^-a e^z gamma(a,z). Returns nullopt when a is within
// 1e-7 of a nonpositive integer (a factor in the denominator vanishes).
std::optional<double> sigma_cont(double a, double z);

// b2^(kappa-a) * integral_{b1}^{b2} t^(a-1) e^-t dt for 0 < b1 <= b2, any
// real a. The prefactor keeps results representable when the series pairs
// this with B^g factors. kappa is only used for that scaling.
double gamma_bracket(double a, double b1, double b2, double kappa);

// 2F1(kappa, -gob; 1-gob; -z) for z >= 0 via the Pfaff transform; the
// transformed argument w = z/(1+z) stays in [0,1). Returns nullopt when the
// third parameter is within 1e-3 of a nonpositive integer (series pole) or
// when w is too close to 1 for the series to make progress.
std::optional<double> hyp2f1_ratio(double kappa, double gob, double z);

// ==== Laplace transform of a tabulated CDF ====

// M(t) = E[e^-tX] = 1 - t * int_0^inf e^-ts (1-F(s)) ds, exact for the
// piecewise-linear interpolant of (s,F) at any real or complex t. Below
// grid.front() the survival is held at 1-F.front(); above grid.back() it is
// zero. Grids must be strictly increasing with F nondecreasing in [0,1].
//
// Each linear segment integrates to e^{-t s_i} ds (h_j E + (h_i - h_j) G)
// with d = t ds, E = (1 - e^-d)/d, G = (1 - E)/d. Evaluating E and G by
// series for small |d| keeps the rule cancellation-free at any magnitude of
// t; the naive slope/t^2 arrangement loses ~1/(t ds)^2 digits and turns the
// small-t region into sign-flipping noise.
template <class T>
T mgf_from_cdf(const std::vector<double>& s, const std::vector<double>& F, T t) {
    const std::size_t n = s.size();
    auto eg = [](T d, T w, T& E, T& G) {
        if (std::abs(d) < 1e-3) {
            E = T(1.0) +
                d * (T(-1.0 / 2.0) +
                     d * (T(1.0 / 6.0) + d * (T(-1.0 / 24.0) + d * T(1.0 / 120.0))));
            G = T(1.0 / 2.0) +
                d * (T(-1.0 / 6.0) +
                     d * (T(1.0 / 24.0) + d * (T(-1.0 / 120.0) + d * T(1.0 / 720.0))));
        } else {
            E = (T(1.0) - w) / d;
            G = (T(1.0) - E) / d;
        }
    };
    T E, G;
    T expPrev = std::exp(-t * s[0]);
    eg(t * s[0], expPrev, E, G);
    T acc = (1.0 - F.front()) * s[0] * E;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double hi = 1.0 - F[i];
        const double hj = 1.0 - F[i + 1];
        if (hi == 0.0 && hj == 0.0)
            break;
        if (std::abs(expPrev) < 1e-300)
            break;  // every remaining term underflows
        const double ds = s[i + 1] - s[i];
        const T expNext = std::exp(-t * s[i + 1]);
        eg(t * ds, expNext / expPrev, E, G);
        acc += expPrev * (ds * (hj * E + (hi - hj) * G));
        expPrev = expNext;
    }
    return T(1.0) - t * acc;
}

// splitmix-style combiner for deriving independent seeds from (stream, index)
inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 0x2545f4914f6cdd1dULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace sleepcell::num
