#pragma once

#include <optional>
#include <string>
#include <vector>

#include "optoforce/franck_condon.hpp"

namespace optoforce {

enum class StateKind { number, coherent, thermal };

/// Cumulative weight kept when truncating coherent and thermal expansions.
inline constexpr double kStateWeightTol = 1e-8;

/// Initial state of the mirror, expanded in the bare phonon number basis.
///
/// Pure states (number, coherent with real amplitude) carry coefficients R[m0];
/// the thermal state carries populations P[m0]. Expansions are truncated once
/// the retained weight reaches 1 - kStateWeightTol.
class MechanicalState {
public:
    static MechanicalState number(int m0);
    static MechanicalState coherent(double alpha);
    static MechanicalState thermal(double nbar);

    StateKind kind() const { return kind_; }
    /// m0, alpha or nbar depending on kind.
    double value() const { return value_; }
    int truncation() const { return truncation_; }
    bool is_pure() const { return kind_ != StateKind::thermal; }

    const std::optional<std::vector<double>>& pure_coeffs() const { return pure_coeffs_; }
    const std::optional<std::vector<double>>& mixed_weights() const { return mixed_weights_; }

    /// One unit-weight component for pure states, one Fock component per
    /// population for the thermal state.
    std::vector<StateComponent> components() const;

    std::string describe() const;

private:
    MechanicalState() = default;

    StateKind kind_ = StateKind::number;
    double value_ = 0.0;
    int truncation_ = 1;
    std::optional<std::vector<double>> pure_coeffs_;
    std::optional<std::vector<double>> mixed_weights_;
};

const char* to_string(StateKind kind);
StateKind state_kind_from_string(const std::string& name);

struct FockExpansion {
    bool pure;
    std::vector<double> values;  // R[m0] when pure, P[m0] otherwise
};

FockExpansion fock_expansion(const MechanicalState& s);

/// Components of `s` re-expressed in the displaced basis of `fc`:
/// coefficient j of component c is sum_i <j|D(d)|i> v_c[i], for j < fc.size().
/// Throws InputError if fc's displacement differs from d or fc is smaller than
/// the state truncation.
std::vector<StateComponent> displaced_projection(const MechanicalState& s, double d, const FranckCondonTable& fc);

}  // namespace optoforce
