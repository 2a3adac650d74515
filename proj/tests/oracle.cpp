#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

namespace oracle {

namespace {

constexpr long double kInvSqrt2Pi = 0.3989422804014326779399460599343818684759L;
constexpr long double kPi = 3.1415926535897932384626433832795028841972L;

template <typename F>
long double simpson(const F& f, long double a, long double b, long double fa,
                    long double fm, long double fb, long double eps, int depth) {
    const long double m = (a + b) / 2;
    const long double lm = (a + m) / 2;
    const long double rm = (m + b) / 2;
    const long double flm = f(lm);
    const long double frm = f(rm);
    const long double whole = (b - a) / 6 * (fa + 4 * fm + fb);
    const long double left = (m - a) / 6 * (fa + 4 * flm + fm);
    const long double right = (b - m) / 6 * (fm + 4 * frm + fb);
    const long double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15 * eps) return left + right + delta / 15;
    return simpson(f, a, m, fa, flm, fm, eps / 2, depth - 1) +
           simpson(f, m, b, fm, frm, fb, eps / 2, depth - 1);
}

template <typename F>
long double integrate(const F& f, long double a, long double b, long double eps) {
    const long double m = (a + b) / 2;
    return simpson(f, a, b, f(a), f(m), f(b), eps, 48);
}

} // namespace

long double normal_cdf(long double z) {
    if (std::isnan(static_cast<double>(z))) return std::numeric_limits<long double>::quiet_NaN();
    if (z <= -40.0L) return 0.0L;
    if (z >= 40.0L) return 1.0L;
    const auto density = [](long double x) { return kInvSqrt2Pi * std::exp(-x * x / 2); };
    const long double tail = integrate(density, 0.0L, std::fabs(z), 1e-15L);
    return z >= 0 ? 0.5L + tail : 0.5L - tail;
}

long double t_cdf(long double x, int df) {
    if (std::isnan(static_cast<double>(x))) return std::numeric_limits<long double>::quiet_NaN();
    if (std::isinf(static_cast<double>(x))) return x > 0 ? 1.0L : 0.0L;
    const long double nu = df;
    const long double log_norm =
        std::lgamma((nu + 1) / 2) - std::lgamma(nu / 2) - std::log(std::sqrt(nu * kPi));
    const long double ax = std::fabs(x);

    if (ax <= 32.0L) {
        const long double norm = std::exp(log_norm);
        const auto density = [&](long double t) {
            return norm * std::pow(1 + t * t / nu, -(nu + 1) / 2);
        };
        const long double half = integrate(density, 0.0L, ax, 5e-14L);
        return x >= 0 ? 0.5L + half : 0.5L - half;
    }

    // Far tail via u = 1/t, which maps [ax, inf) onto (0, 1/ax]:
    // integrand g(u) = norm * nu^((nu+1)/2) * u^(nu-1) / (1 + nu*u^2)^((nu+1)/2).
    const auto tail_integrand = [&](long double u) -> long double {
        if (u <= 0.0L) return df == 1 ? std::exp(log_norm) : 0.0L;
        const long double log_g = log_norm + (nu + 1) / 2 * std::log(nu) +
                                  (nu - 1) * std::log(u) -
                                  (nu + 1) / 2 * std::log(1 + nu * u * u);
        return std::exp(log_g);
    };
    const long double tail = integrate(tail_integrand, 0.0L, 1 / ax, 5e-14L);
    return x >= 0 ? 1.0L - tail : tail;
}

long double t_quantile(long double prob, int df) {
    static std::map<std::pair<int, long double>, long double> cache;
    const auto key = std::make_pair(df, prob);
    if (const auto it = cache.find(key); it != cache.end()) return it->second;
    long double lo = -1.0L;
    long double hi = 1.0L;
    while (t_cdf(lo, df) > prob) lo *= 2;
    while (t_cdf(hi, df) < prob) hi *= 2;
    for (int i = 0; i < 120; ++i) {
        const long double mid = (lo + hi) / 2;
        if (mid == lo || mid == hi) break;
        if (hi - lo < 1e-13L * std::max(1.0L, std::fabs(mid))) break;
        if (t_cdf(mid, df) < prob)
            lo = mid;
        else
            hi = mid;
    }
    const long double q = (lo + hi) / 2;
    cache.emplace(key, q);
    return q;
}

long double angle_between_deg(const klm3d::Vec3& a, const klm3d::Vec3& b) {
    const long double ax = a.x, ay = a.y, az = a.z;
    const long double bx = b.x, by = b.y, bz = b.z;
    const long double dot = ax * bx + ay * by + az * bz;
    const long double cx = ay * bz - az * by;
    const long double cy = az * bx - ax * bz;
    const long double cz = ax * by - ay * bx;
    const long double cross = std::sqrt(cx * cx + cy * cy + cz * cz);
    return std::atan2(cross, dot) * 180.0L / kPi;
}

ZRef paired_z(const std::vector<double>& actual, const std::vector<double>& predicted) {
    const std::size_t n = actual.size();
    long double sum = 0;
    for (std::size_t i = 0; i < n; ++i)
        sum += static_cast<long double>(actual[i]) - static_cast<long double>(predicted[i]);
    const long double mean = sum / static_cast<long double>(n);
    long double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const long double delta =
            static_cast<long double>(actual[i]) - static_cast<long double>(predicted[i]) - mean;
        ss += delta * delta;
    }
    const long double sd = std::sqrt(ss / static_cast<long double>(n - 1));
    ZRef out;
    out.sd = sd;
    out.z = mean / (sd / std::sqrt(static_cast<long double>(n)));
    out.p = 2 * (1 - normal_cdf(std::fabs(out.z)));
    out.d = mean / sd;
    return out;
}

namespace {

long double limit_ratio(long double numerator) {
    if (numerator > 0) return std::numeric_limits<long double>::infinity();
    if (numerator < 0) return -std::numeric_limits<long double>::infinity();
    return 0.0L;
}

} // namespace

TostRef tost(const std::vector<double>& diffs, double bound) {
    const std::size_t n = diffs.size();
    const int df = static_cast<int>(n) - 1;
    long double sum = 0;
    for (double v : diffs) sum += v;
    const long double mean = sum / static_cast<long double>(n);
    long double ss = 0;
    for (double v : diffs) {
        const long double delta = static_cast<long double>(v) - mean;
        ss += delta * delta;
    }
    const long double sd = std::sqrt(ss / static_cast<long double>(n - 1));
    const long double se = sd / std::sqrt(static_cast<long double>(n));
    const long double b = bound;
    TostRef out;
    out.t_lower = se > 0 ? (mean + b) / se : limit_ratio(mean + b);
    out.t_upper = se > 0 ? (mean - b) / se : limit_ratio(mean - b);
    out.p_lower = 1 - t_cdf(out.t_lower, df);
    out.p_upper = t_cdf(out.t_upper, df);
    out.p = out.p_lower > out.p_upper ? out.p_lower : out.p_upper;
    const long double q = t_quantile(0.95L, df);
    out.ci_low = se > 0 ? mean - q * se : mean;
    out.ci_high = se > 0 ? mean + q * se : mean;
    out.equivalent_by_p = out.p < 0.05L;
    out.equivalent_by_ci = out.ci_low > -b && out.ci_high < b;
    return out;
}

std::vector<bool> outlier_keep_mask(const std::vector<double>& deltas, double multiplier) {
    const std::size_t n = deltas.size();
    std::vector<bool> keep(n, true);
    if (n == 0) return keep;
    long double sum = 0;
    for (double v : deltas) sum += v;
    const long double mean = sum / static_cast<long double>(n);
    long double ss = 0;
    for (double v : deltas) {
        const long double delta = static_cast<long double>(v) - mean;
        ss += delta * delta;
    }
    const long double pop_sd = std::sqrt(ss / static_cast<long double>(n));
    const long double cut = static_cast<long double>(multiplier) * pop_sd;
    for (std::size_t i = 0; i < n; ++i)
        if (std::fabs(static_cast<long double>(deltas[i]) - mean) > cut) keep[i] = false;
    return keep;
}

} // namespace oracle
