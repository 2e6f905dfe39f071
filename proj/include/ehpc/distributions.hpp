#pragma once

#include "ehpc/quadrature.hpp"
#include "ehpc/rng.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace ehpc {

enum class Family { Bernoulli, FiniteDiscrete, Geometric, Poisson, Uniform, Exponential, Rayleigh };

/// Parses "geometric", "poisson", "uniform", "exponential", "rayleigh" (the families with a mean parameterisation).
Family parse_family(std::string_view name);
std::string family_name(Family f);

struct Atom {
    double x;
    double p;
};

/// Nonnegative energy-arrival law X.
///
/// rho(x) is always the strict CDF P(X < x). Discrete laws expose their atoms
/// by index so that infinite supports can be streamed without materialising
/// them; continuous laws expose a density.
class EnergyDistribution {
public:
    static EnergyDistribution bernoulli(double x_lo, double x_hi, double p);
    static EnergyDistribution finite_discrete(std::vector<Atom> atoms);
    static EnergyDistribution geometric(double p);
    static EnergyDistribution poisson(double lambda);
    static EnergyDistribution uniform(double omega);
    static EnergyDistribution exponential(double eta);
    static EnergyDistribution rayleigh(double theta);

    /// Member of a one-parameter family with the given mean.
    static EnergyDistribution from_mean(Family family, double mu);

    Family family() const { return family_; }
    bool is_discrete() const;
    /// Family parameter (p, lambda, omega, eta or theta); NaN for Bernoulli/FiniteDiscrete.
    double parameter() const { return param_; }

    double mean() const { return mean_; }
    double support_min() const { return x_lo_; }
    /// Essential supremum; +inf for unbounded supports.
    double support_max() const { return x_hi_; }
    /// support_max() when finite, else the (1 - 1e-12) quantile.
    double support_cap() const { return cap_; }

    /// P(X < x).
    double cdf_strict(double x) const;
    /// P(X >= x), computed without cancellation.
    double survival(double x) const;
    /// P(X = x).
    double point_mass(double x) const;
    /// Density for continuous laws; DomainError for discrete ones.
    double density(double x) const;

    /// Atom indices [atom_begin(), atom_end()) carry all but ~1e-14 of the mass (discrete only).
    std::uint64_t atom_begin() const;
    std::uint64_t atom_end() const;
    Atom atom(std::uint64_t k) const;

    /// E[g(X) 1{X < c}]. Requires c > 0.
    double truncated_expect(const std::function<double(double)>& g, double c,
                            const QuadratureOptions& opts = {}) const;
    /// E[g(X) 1{a <= X < b}]; empty when b <= a.
    double interval_expect(const std::function<double(double)>& g, double a, double b,
                           const QuadratureOptions& opts = {}) const;
    /// E[min(X, c)]. Requires c >= 0; c = inf gives the mean.
    double expected_min(double c) const;

    double sample(Rng& rng) const;

    std::string describe() const;

private:
    EnergyDistribution() = default;
    void finish();
    double quantile_upper(double tail) const;

    Family family_ = Family::Bernoulli;
    double param_ = 0.0;
    double bern_lo_ = 0.0;
    double bern_hi_ = 0.0;
    std::vector<Atom> atoms_;
    double mean_ = 0.0;
    double x_lo_ = 0.0;
    double x_hi_ = 0.0;
    double cap_ = 0.0;
    std::uint64_t begin_ = 0;
    std::uint64_t end_ = 0;
};

/// Parses the `name:key=value[,key=value]*` distribution grammar.
EnergyDistribution parse_distribution(std::string_view spec);

}  // namespace ehpc
