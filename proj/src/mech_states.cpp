#include "optoforce/mech_states.hpp"

#include <cmath>
#include <sstream>

#include "optoforce/errors.hpp"

namespace optoforce {

MechanicalState MechanicalState::number(int m0) {
    if (m0 < 0) {
        throw InputError("number state index must be non-negative");
    }
    if (m0 >= kTruncationCap) {
        throw TruncationError("number state index exceeds truncation cap");
    }
    MechanicalState s;
    s.kind_ = StateKind::number;
    s.value_ = m0;
    s.truncation_ = m0 + 1;
    std::vector<double> r(static_cast<std::size_t>(m0) + 1, 0.0);
    r[m0] = 1.0;
    s.pure_coeffs_ = std::move(r);
    return s;
}

MechanicalState MechanicalState::coherent(double alpha) {
    if (!std::isfinite(alpha)) {
        throw InputError("coherent amplitude must be finite");
    }
    MechanicalState s;
    s.kind_ = StateKind::coherent;
    s.value_ = alpha;
    std::vector<double> r;
    double cumulative = 0.0;
    // R[n] = exp(-alpha^2/2) alpha^n / sqrt(n!), built by ratio.
    double coeff = std::exp(-0.5 * alpha * alpha);
    for (int n = 0;; ++n) {
        if (n >= kTruncationCap) {
            throw TruncationError("coherent state expansion exceeds truncation cap");
        }
        if (n > 0) {
            coeff *= alpha / std::sqrt(static_cast<double>(n));
        }
        r.push_back(coeff);
        cumulative += coeff * coeff;
        if (cumulative >= 1.0 - kStateWeightTol) {
            break;
        }
    }
    s.truncation_ = static_cast<int>(r.size());
    s.pure_coeffs_ = std::move(r);
    return s;
}

MechanicalState MechanicalState::thermal(double nbar) {
    if (!(nbar >= 0.0) || !std::isfinite(nbar)) {
        throw InputError("thermal occupation must be non-negative");
    }
    MechanicalState s;
    s.kind_ = StateKind::thermal;
    s.value_ = nbar;
    std::vector<double> p;
    double cumulative = 0.0;
    // P[n] = nbar^n / (nbar+1)^(n+1)
    const double ratio = nbar / (nbar + 1.0);
    double weight = 1.0 / (nbar + 1.0);
    for (int n = 0;; ++n) {
        if (n >= kTruncationCap) {
            throw TruncationError("thermal state expansion exceeds truncation cap");
        }
        if (n > 0) {
            weight *= ratio;
        }
        p.push_back(weight);
        cumulative += weight;
        if (cumulative >= 1.0 - kStateWeightTol) {
            break;
        }
    }
    s.truncation_ = static_cast<int>(p.size());
    s.mixed_weights_ = std::move(p);
    return s;
}

std::vector<StateComponent> MechanicalState::components() const {
    std::vector<StateComponent> comps;
    if (pure_coeffs_) {
        comps.push_back({1.0, *pure_coeffs_});
        return comps;
    }
    const auto& weights = *mixed_weights_;
    comps.reserve(weights.size());
    for (std::size_t n = 0; n < weights.size(); ++n) {
        std::vector<double> unit(n + 1, 0.0);
        unit[n] = 1.0;
        comps.push_back({weights[n], std::move(unit)});
    }
    return comps;
}

std::string MechanicalState::describe() const {
    std::ostringstream out;
    out << to_string(kind_) << '(' << value_ << ')';
    return out.str();
}

const char* to_string(StateKind kind) {
    switch (kind) {
        case StateKind::number: return "number";
        case StateKind::coherent: return "coherent";
        case StateKind::thermal: return "thermal";
    }
    return "unknown";
}

StateKind state_kind_from_string(const std::string& name) {
    if (name == "number") return StateKind::number;
    if (name == "coherent") return StateKind::coherent;
    if (name == "thermal") return StateKind::thermal;
    throw InputError("unknown mechanical state kind '" + name + "'");
}

FockExpansion fock_expansion(const MechanicalState& s) {
    if (s.is_pure()) {
        return {true, *s.pure_coeffs()};
    }
    return {false, *s.mixed_weights()};
}

std::vector<StateComponent> displaced_projection(const MechanicalState& s, double d, const FranckCondonTable& fc) {
    if (fc.displacement() != d) {
        throw InputError("Franck-Condon table displacement does not match the requested projection");
    }
    if (fc.size() < s.truncation()) {
        throw InputError("Franck-Condon table smaller than the state truncation");
    }
    auto comps = s.components();
    const int size = fc.size();
    for (auto& comp : comps) {
        std::vector<double> projected(static_cast<std::size_t>(size), 0.0);
        for (int j = 0; j < size; ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < comp.coeffs.size(); ++i) {
                acc += fc(j, static_cast<int>(i)) * comp.coeffs[i];
            }
            projected[j] = acc;
        }
        comp.coeffs = std::move(projected);
    }
    return comps;
}

}  // namespace optoforce
