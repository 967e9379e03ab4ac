#include "optoforce/franck_condon.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "optoforce/errors.hpp"
#include "optoforce/mech_states.hpp"

namespace optoforce {

double displaced_overlap(int m, int n, double d) {
    if (m < 0 || n < 0) {
        throw InputError("Fock indices must be non-negative");
    }
    if (!std::isfinite(d)) {
        throw InputError("displacement must be finite");
    }
    if (d == 0.0) {
        return m == n ? 1.0 : 0.0;
    }
    const int lower = std::min(m, n);
    const int alpha = std::abs(n - m);
    const double x = d * d;

    // n >= m carries (-d)^alpha, m > n carries d^alpha.
    const bool negative_base = (n >= m) ? (d > 0.0) : (d < 0.0);
    const double sign = (negative_base && (alpha % 2 == 1)) ? -1.0 : 1.0;
    const double log_prefactor = -0.5 * x + alpha * std::log(std::abs(d)) - 0.5 * std::lgamma(alpha + 1.0);

    // f_k = sqrt(k! alpha! / (k+alpha)!) L_k^alpha(x), f_0 = 1.
    double f_prev = 0.0;
    double f = 1.0;
    for (int k = 0; k < lower; ++k) {
        const double next = ((2.0 * k + 1.0 + alpha - x) * f - std::sqrt(double(k) * (k + alpha)) * f_prev) /
                            std::sqrt((k + 1.0) * (k + 1.0 + alpha));
        f_prev = f;
        f = next;
    }
    return sign * std::exp(log_prefactor) * f;
}

FranckCondonTable::FranckCondonTable(double displacement, int size)
    : displacement_(displacement), size_(size), entries_(static_cast<std::size_t>(size) * size) {
    if (size < 1) {
        throw InputError("Franck-Condon table size must be positive");
    }
    if (size > kTruncationCap) {
        throw TruncationError("Franck-Condon table size exceeds truncation cap");
    }
    for (int m = 0; m < size; ++m) {
        for (int n = m; n < size; ++n) {
            const double v = displaced_overlap(m, n, displacement);
            entries_[static_cast<std::size_t>(m) * size + n] = v;
            // <n|D(d)|m> = (-1)^(n-m) <m|D(d)|n>
            entries_[static_cast<std::size_t>(n) * size + m] = ((n - m) % 2 == 0) ? v : -v;
        }
    }
}

FranckCondonTable fc_table(double d, int size) { return FranckCondonTable(d, size); }

namespace {

[[noreturn]] void cap_exceeded(double d, int cap) {
    std::ostringstream msg;
    msg << "truncation for displacement " << d << " exceeds cap " << cap;
    throw TruncationError(msg.str());
}

void check_tol(double weight_tol) {
    if (!(weight_tol > 0.0 && weight_tol < 1.0)) {
        throw InputError("weight tolerance must lie in (0, 1)");
    }
}

}  // namespace

int adaptive_truncation(double d, std::span<const StateComponent> components, double weight_tol, int cap) {
    check_tol(weight_tol);
    int needed = 1;
    for (const auto& comp : components) {
        if (comp.weight <= weight_tol) {
            continue;
        }
        double norm2 = 0.0;
        for (double c : comp.coeffs) {
            norm2 += c * c;
        }
        if (norm2 == 0.0) {
            continue;
        }
        const double target = (1.0 - weight_tol) * norm2;
        double captured = 0.0;
        int j = 0;
        for (; captured < target; ++j) {
            if (j >= cap) {
                cap_exceeded(d, cap);
            }
            double amp = 0.0;
            for (std::size_t i = 0; i < comp.coeffs.size(); ++i) {
                if (comp.coeffs[i] != 0.0) {
                    amp += displaced_overlap(j, static_cast<int>(i), d) * comp.coeffs[i];
                }
            }
            captured += amp * amp;
        }
        needed = std::max(needed, j);
    }
    return needed;
}

int adaptive_truncation(double d, const MechanicalState& state, double weight_tol, int cap) {
    const auto comps = state.components();
    return adaptive_truncation(d, comps, weight_tol, cap);
}

int incoherent_truncation(double d, std::span<const StateComponent> components, double weight_tol, int cap) {
    check_tol(weight_tol);
    std::vector<double> occupation;
    for (const auto& comp : components) {
        if (comp.coeffs.size() > occupation.size()) {
            occupation.resize(comp.coeffs.size(), 0.0);
        }
        for (std::size_t i = 0; i < comp.coeffs.size(); ++i) {
            occupation[i] += comp.weight * comp.coeffs[i] * comp.coeffs[i];
        }
    }
    double total = 0.0;
    for (double o : occupation) {
        total += o;
    }
    if (total == 0.0) {
        return 1;
    }
    const double target = (1.0 - weight_tol) * total;
    double captured = 0.0;
    int j = 0;
    for (; captured < target; ++j) {
        if (j >= cap) {
            cap_exceeded(d, cap);
        }
        for (std::size_t i = 0; i < occupation.size(); ++i) {
            if (occupation[i] != 0.0) {
                const double f = displaced_overlap(j, static_cast<int>(i), d);
                captured += f * f * occupation[i];
            }
        }
    }
    return std::max(j, 1);
}

}  // namespace optoforce
