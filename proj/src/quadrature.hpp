#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace optoforce::detail {

/// Integral of f over the real line, split at the given breakpoints so that
/// every sharp feature sits at a segment boundary. The two outer segments are
/// semi-infinite and handled by the quadrature's own variable mapping.
/// f may return double or std::complex<double> (two real integrands at once).
template <class F>
auto integrate_real_line(F&& f, std::vector<double> breaks, double tol = 1e-11) {
    using boost::math::quadrature::gauss_kronrod;
    constexpr double inf = std::numeric_limits<double>::infinity();
    constexpr unsigned max_depth = 18;

    std::sort(breaks.begin(), breaks.end());
    std::vector<double> cuts;
    for (double b : breaks) {
        if (cuts.empty() || b - cuts.back() > 1e-9) {
            cuts.push_back(b);
        }
    }
    if (cuts.empty()) {
        cuts.push_back(0.0);
    }
    auto total = gauss_kronrod<double, 61>::integrate(f, -inf, cuts.front(), max_depth, tol);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        total += gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], max_depth, tol);
    }
    total += gauss_kronrod<double, 61>::integrate(f, cuts.back(), inf, max_depth, tol);
    return total;
}

/// Breakpoints around a Lorentzian-like feature at `center` with half-width `width`.
inline void add_feature_breaks(std::vector<double>& breaks, double center, double width) {
    for (double k : {-20.0, -4.0, -1.0, 0.0, 1.0, 4.0, 20.0}) {
        breaks.push_back(center + k * width);
    }
}

}  // namespace optoforce::detail
