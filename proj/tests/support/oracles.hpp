#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>
#include <algorithm>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

/// <m|D(d)|n> by the finite double-factorial series
///   sqrt(m! n!) e^{-d^2/2} sum_k d^{m-k} (-d)^{n-k} / (k! (m-k)! (n-k)!).
inline double fc_series(int m, int n, double d) {
    long double sum = 0.0L;
    const int kmax = std::min(m, n);
    for (int k = 0; k <= kmax; ++k) {
        const long double log_mag = 0.5L * (std::lgamma(m + 1.0L) + std::lgamma(n + 1.0L)) - std::lgamma(k + 1.0L) -
                                    std::lgamma(m - k + 1.0L) - std::lgamma(n - k + 1.0L);
        long double term = std::exp(log_mag) * std::pow(static_cast<long double>(d), m - k) *
                           std::pow(static_cast<long double>(-d), n - k);
        sum += term;
    }
    return static_cast<double>(sum * std::exp(-0.5L * d * d));
}

/// exp[d (b^dag - b)] on a Fock space of dimension dim.
inline Eigen::MatrixXd displacement_expm(double d, int dim) {
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(dim, dim);
    for (int n = 0; n + 1 < dim; ++n) {
        const double s = std::sqrt(static_cast<double>(n + 1));
        gen(n + 1, n) = d * s;   // b^dag
        gen(n, n + 1) = -d * s;  // -b
    }
    return gen.exp();
}

/// Emission spectrum with no optomechanical coupling and no force.
inline double lorentzian_emission(double delta, double gamma_c, double gamma_d) {
    const double g = gamma_c + gamma_d;
    return gamma_c / (2.0 * std::numbers::pi) / (delta * delta + 0.25 * g * g);
}

/// Scattering densities at g0 = eta = 0: (detected, undetected).
inline std::pair<double, double> bare_scattering(double delta, double delta0, double eps, double gc, double gd) {
    using namespace std::complex_literals;
    const double g = 0.5 * (gc + gd);
    const std::complex<double> input = 1.0 / std::complex<double>(delta - delta0, eps);
    const std::complex<double> cavity = 1.0 / std::complex<double>(delta, g);
    const double pref = eps / std::numbers::pi;
    const auto b = input - 1i * gc * cavity * input;
    const auto c = -1i * std::sqrt(gc * gd) * cavity * input;
    return {pref * std::norm(b), pref * std::norm(c)};
}

/// Probability of ending in the undetected channel at g0 = eta = 0.
inline double bare_undetected_probability(double delta0, double eps, double gc, double gd) {
    const double g = 0.5 * (gc + gd);
    return gc * gd * (eps + g) / (g * (delta0 * delta0 + (eps + g) * (eps + g)));
}

inline double poisson(int n, double mean) { return std::exp(-mean + n * std::log(mean) - std::lgamma(n + 1.0)); }

/// Seeded source for property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

private:
    std::mt19937_64 rng_;
};

/// Grid positions of strict local maxima (plain three-point test) whose value
/// exceeds rel * max(values).
inline std::vector<double> local_maxima(const std::vector<double>& values, double x0, double step, double rel) {
    double top = 0.0;
    for (double v : values) {
        top = std::max(top, v);
    }
    std::vector<double> out;
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        if (values[i] > values[i - 1] && values[i] >= values[i + 1] && values[i] > rel * top) {
            out.push_back(x0 + static_cast<double>(i) * step);
        }
    }
    return out;
}

inline std::vector<double> local_minima(const std::vector<double>& values, double x0, double step) {
    std::vector<double> out;
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        if (values[i] < values[i - 1] && values[i] <= values[i + 1]) {
            out.push_back(x0 + static_cast<double>(i) * step);
        }
    }
    return out;
}

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("optoforce_" + tag + "_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace oracle
