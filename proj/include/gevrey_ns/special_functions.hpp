#ifndef GEVREY_NS_SPECIAL_FUNCTIONS_HPP
#define GEVREY_NS_SPECIAL_FUNCTIONS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

namespace gevrey_ns {

/// log(k!) evaluated through lgamma; exact for small k up to rounding.
inline double log_factorial(int k)
{
    if (k < 2) {
        return 0.0;
    }
    return std::lgamma(static_cast<double>(k) + 1.0);
}

inline double log_binomial(int n, int k)
{
    if (k < 0 || k > n) {
        return -std::numeric_limits<double>::infinity();
    }
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

/// Binomial coefficient. Exact (integer multiplicative recurrence) while the
/// result fits in 2^53, log-gamma beyond that.
inline double binomial(int n, int k)
{
    if (k < 0 || k > n) {
        return 0.0;
    }
    k = std::min(k, n - k);
    constexpr unsigned __int128 exact_limit = static_cast<unsigned __int128>(1) << 53;
    unsigned __int128 r = 1;
    for (int i = 1; i <= k; ++i) {
        // r * (n - k + i) / i stays an integer at every step
        r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
        if (r > exact_limit * 64) {
            return std::exp(log_binomial(n, k));
        }
    }
    if (r <= exact_limit) {
        return static_cast<double>(r);
    }
    return std::exp(log_binomial(n, k));
}

/// Poisson probability e^{-x} x^m / m!, evaluated in log space.
inline double poisson_term(int m, double x)
{
    if (x == 0.0) {
        return m == 0 ? 1.0 : 0.0;
    }
    return std::exp(-x + m * std::log(x) - log_factorial(m));
}

/// Probability that a Poisson(x) variable exceeds m, i.e. sum_{i>m} e^{-x} x^i / i!.
inline double poisson_tail(int m, double x)
{
    if (x <= 0.0) {
        return 0.0;
    }
    return boost::math::gamma_p(static_cast<double>(m) + 1.0, x);
}

/// log of the Gevrey sequence c_k = (k!)^alpha.
inline double log_gevrey_sequence(int k, double alpha) { return alpha * log_factorial(k); }

/// C_alpha = sqrt(1 / (1 - 2^{-2 alpha})), the l^2 norm of (2^{-j alpha})_j.
inline double c_alpha(double alpha)
{
    return std::sqrt(1.0 / (-std::expm1(-2.0 * alpha * std::numbers::ln2)));
}

} // namespace gevrey_ns

#endif
