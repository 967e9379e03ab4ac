#pragma once

#include <span>
#include <vector>

namespace optoforce {

class MechanicalState;

/// Hard upper bound on any phonon-basis truncation.
inline constexpr int kTruncationCap = 512;

/// <m| D(d) |n> for a real displacement d, D(d) = exp[d (b^dag - b)].
///
/// Evaluated from the associated Laguerre closed form. The prefactor
/// sqrt(m!/n!) |d|^{|n-m|} exp(-d^2/2) is formed in log space and the Laguerre
/// polynomial is carried through a normalized three-term recurrence, so the
/// result stays finite for indices up to kTruncationCap.
double displaced_overlap(int m, int n, double d);

/// Square table entries[m][n] = <m|D(d)|n>, m, n < size.
class FranckCondonTable {
public:
    FranckCondonTable() = default;
    FranckCondonTable(double displacement, int size);

    double displacement() const { return displacement_; }
    int size() const { return size_; }

    double operator()(int m, int n) const { return entries_[static_cast<std::size_t>(m) * size_ + n]; }
    std::span<const double> row(int m) const {
        return {entries_.data() + static_cast<std::size_t>(m) * size_, static_cast<std::size_t>(size_)};
    }

private:
    double displacement_ = 0.0;
    int size_ = 0;
    std::vector<double> entries_;
};

FranckCondonTable fc_table(double d, int size);

/// Smallest N such that, for every component of `state` with weight above
/// weight_tol, the first N displaced-basis coefficients of D(d)|component>
/// hold at least 1 - weight_tol of its norm. Throws TruncationError above `cap`.
int adaptive_truncation(double d, const MechanicalState& state, double weight_tol, int cap = kTruncationCap);

/// Weighted coefficient vector, one term of a pure state or of a mixture.
struct StateComponent {
    double weight = 1.0;
    std::vector<double> coeffs;
};

/// Same criterion as above on explicit components (coherent projection per component).
int adaptive_truncation(double d, std::span<const StateComponent> components, double weight_tol,
                        int cap = kTruncationCap);

/// Incoherent reach of D(d): smallest M with
///   sum_c w_c sum_{j<M} sum_i |<j|D(d)|i>|^2 |v_c[i]|^2 >= (1 - weight_tol) sum_c w_c |v_c|^2.
/// Used for the final phonon sum of the spectra, where energy denominators
/// wash out interference between intermediate levels.
int incoherent_truncation(double d, std::span<const StateComponent> components, double weight_tol,
                          int cap = kTruncationCap);

}  // namespace optoforce
