#include "ehpc/distributions.hpp"

#include "ehpc/errors.hpp"
#include "ehpc/spec_string.hpp"
#include "ehpc/summation.hpp"

#include <boost/math/distributions/poisson.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

namespace ehpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Infinite discrete supports are truncated once the remaining mass falls below this.
constexpr double kTailMass = 1e-14;
constexpr double kCapTail = 1e-12;
// Continuous integrals stop at the quantile with this upper-tail mass.
constexpr double kIntegrationTail = 1e-17;

using PoissonUp = boost::math::poisson_distribution<
    double, boost::math::policies::policy<boost::math::policies::discrete_quantile<
                boost::math::policies::integer_round_up>>>;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError(what);
}

// Number of nonnegative integers strictly below x.
double integers_below(double x) { return x <= 0.0 ? 0.0 : std::ceil(x); }

bool is_nonneg_integer(double x) { return x >= 0.0 && std::isfinite(x) && x == std::floor(x); }

}  // namespace

Family parse_family(std::string_view name) {
    if (name == "geometric") return Family::Geometric;
    if (name == "poisson") return Family::Poisson;
    if (name == "uniform") return Family::Uniform;
    if (name == "exponential") return Family::Exponential;
    if (name == "rayleigh") return Family::Rayleigh;
    throw DomainError("unknown family '" + std::string(name) +
                      "' (expected geometric, poisson, uniform, exponential, rayleigh)");
}

std::string family_name(Family f) {
    switch (f) {
        case Family::Bernoulli: return "bernoulli";
        case Family::FiniteDiscrete: return "discrete";
        case Family::Geometric: return "geometric";
        case Family::Poisson: return "poisson";
        case Family::Uniform: return "uniform";
        case Family::Exponential: return "exponential";
        case Family::Rayleigh: return "rayleigh";
    }
    return "?";
}

EnergyDistribution EnergyDistribution::bernoulli(double x_lo, double x_hi, double p) {
    require(x_lo >= 0.0 && x_lo < x_hi && std::isfinite(x_hi), "bernoulli needs 0 <= xlo < xhi < inf");
    require(p >= 0.0 && p <= 1.0, "bernoulli needs p in [0, 1]");
    EnergyDistribution d;
    d.family_ = Family::Bernoulli;
    d.param_ = p;
    d.bern_lo_ = x_lo;
    d.bern_hi_ = x_hi;
    if (p < 1.0) d.atoms_.push_back({x_lo, 1.0 - p});
    if (p > 0.0) d.atoms_.push_back({x_hi, p});
    d.finish();
    return d;
}

EnergyDistribution EnergyDistribution::finite_discrete(std::vector<Atom> atoms) {
    require(!atoms.empty(), "discrete distribution needs at least one atom");
    CompensatedSum total;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        require(std::isfinite(atoms[i].x) && atoms[i].x >= 0.0, "discrete atoms must be finite and >= 0");
        require(atoms[i].p >= 0.0 && atoms[i].p <= 1.0, "discrete probabilities must lie in [0, 1]");
        if (i > 0) require(atoms[i].x > atoms[i - 1].x, "discrete atoms must be strictly increasing");
        total.add(atoms[i].p);
    }
    require(std::abs(total.value() - 1.0) <= 1e-12, "discrete probabilities must sum to 1");
    atoms.erase(std::remove_if(atoms.begin(), atoms.end(), [](const Atom& a) { return a.p == 0.0; }),
                atoms.end());
    EnergyDistribution d;
    d.family_ = Family::FiniteDiscrete;
    d.param_ = std::numeric_limits<double>::quiet_NaN();
    d.atoms_ = std::move(atoms);
    d.finish();
    return d;
}

EnergyDistribution EnergyDistribution::geometric(double p) {
    require(p > 0.0 && p <= 1.0, "geometric needs p in (0, 1]");
    EnergyDistribution d;
    d.family_ = Family::Geometric;
    d.param_ = p;
    d.finish();
    return d;
}

EnergyDistribution EnergyDistribution::poisson(double lambda) {
    require(lambda > 0.0 && std::isfinite(lambda), "poisson needs lambda > 0");
    EnergyDistribution d;
    d.family_ = Family::Poisson;
    d.param_ = lambda;
    d.finish();
    return d;
}

EnergyDistribution EnergyDistribution::uniform(double omega) {
    require(omega > 0.0 && std::isfinite(omega), "uniform needs omega > 0");
    EnergyDistribution d;
    d.family_ = Family::Uniform;
    d.param_ = omega;
    d.finish();
    return d;
}

EnergyDistribution EnergyDistribution::exponential(double eta) {
    require(eta > 0.0 && std::isfinite(eta), "exponential needs eta > 0");
    EnergyDistribution d;
    d.family_ = Family::Exponential;
    d.param_ = eta;
    d.finish();
    return d;
}

EnergyDistribution EnergyDistribution::rayleigh(double theta) {
    require(theta > 0.0 && std::isfinite(theta), "rayleigh needs theta > 0");
    EnergyDistribution d;
    d.family_ = Family::Rayleigh;
    d.param_ = theta;
    d.finish();
    return d;
}

EnergyDistribution EnergyDistribution::from_mean(Family family, double mu) {
    require(mu > 0.0 && std::isfinite(mu), "mean must be finite and > 0");
    switch (family) {
        case Family::Geometric: return geometric(1.0 / (1.0 + mu));
        case Family::Poisson: return poisson(mu);
        case Family::Uniform: return uniform(2.0 * mu);
        case Family::Exponential: return exponential(1.0 / mu);
        case Family::Rayleigh: return rayleigh(2.0 * mu * mu / std::numbers::pi);
        default: break;
    }
    throw DomainError("family " + family_name(family) + " has no mean parameterisation");
}

void EnergyDistribution::finish() {
    const double a = param_;
    switch (family_) {
        case Family::Bernoulli:
        case Family::FiniteDiscrete: {
            CompensatedSum m;
            for (const auto& at : atoms_) m.add(at.x * at.p);
            mean_ = m.value();
            x_lo_ = atoms_.front().x;
            x_hi_ = atoms_.back().x;
            cap_ = x_hi_;
            begin_ = 0;
            end_ = atoms_.size();
            return;
        }
        case Family::Geometric: {
            mean_ = (1.0 - a) / a;
            x_lo_ = 0.0;
            x_hi_ = a == 1.0 ? 0.0 : kInf;
            begin_ = 0;
            if (a == 1.0) {
                cap_ = 0.0;
                end_ = 1;
                return;
            }
            const double log_q = std::log1p(-a);
            // P(X > k) = q^(k+1).
            end_ = static_cast<std::uint64_t>(std::ceil(std::log(kTailMass) / log_q));
            cap_ = std::max(1.0, std::ceil(std::log(kCapTail) / log_q) - 1.0);
            return;
        }
        case Family::Poisson: {
            mean_ = a;
            x_lo_ = 0.0;
            x_hi_ = kInf;
            const double lower = std::floor(a - 12.0 * std::sqrt(a) - 10.0);
            begin_ = lower > 0.0 ? static_cast<std::uint64_t>(lower) : 0;
            const PoissonUp dist(a);
            end_ = static_cast<std::uint64_t>(quantile(complement(dist, kTailMass))) + 1;
            cap_ = std::max(1.0, quantile(complement(dist, kCapTail)));
            return;
        }
        case Family::Uniform:
            mean_ = a / 2.0;
            x_lo_ = 0.0;
            x_hi_ = a;
            cap_ = a;
            return;
        case Family::Exponential:
            mean_ = 1.0 / a;
            x_lo_ = 0.0;
            x_hi_ = kInf;
            cap_ = quantile_upper(kCapTail);
            return;
        case Family::Rayleigh:
            mean_ = std::sqrt(std::numbers::pi * a / 2.0);
            x_lo_ = 0.0;
            x_hi_ = kInf;
            cap_ = quantile_upper(kCapTail);
            return;
    }
}

// Continuous families only: x with P(X >= x) = tail.
double EnergyDistribution::quantile_upper(double tail) const {
    switch (family_) {
        case Family::Uniform: return param_ * (1.0 - tail);
        case Family::Exponential: return -std::log(tail) / param_;
        case Family::Rayleigh: return std::sqrt(-2.0 * param_ * std::log(tail));
        default: break;
    }
    throw DomainError("quantile_upper: continuous family required");
}

bool EnergyDistribution::is_discrete() const {
    return family_ == Family::Bernoulli || family_ == Family::FiniteDiscrete || family_ == Family::Geometric ||
           family_ == Family::Poisson;
}

double EnergyDistribution::cdf_strict(double x) const {
    if (std::isnan(x)) throw DomainError("cdf_strict: NaN argument");
    switch (family_) {
        case Family::Bernoulli:
        case Family::FiniteDiscrete: {
            CompensatedSum s;
            for (const auto& at : atoms_) {
                if (at.x >= x) break;
                s.add(at.p);
            }
            return std::min(1.0, s.value());
        }
        case Family::Geometric: {
            const double n = integers_below(x);
            if (n == 0.0) return 0.0;
            if (param_ == 1.0) return 1.0;
            return -std::expm1(n * std::log1p(-param_));
        }
        case Family::Poisson: {
            const double n = integers_below(x);
            if (n == 0.0) return 0.0;
            if (std::isinf(n)) return 1.0;
            // P(X <= n-1) = Q(n, lambda).
            return boost::math::gamma_q(n, param_);
        }
        case Family::Uniform:
            return std::clamp(x / param_, 0.0, 1.0);
        case Family::Exponential:
            return x <= 0.0 ? 0.0 : -std::expm1(-param_ * x);
        case Family::Rayleigh:
            return x <= 0.0 ? 0.0 : -std::expm1(-x * x / (2.0 * param_));
    }
    return 0.0;
}

double EnergyDistribution::survival(double x) const {
    if (std::isnan(x)) throw DomainError("survival: NaN argument");
    switch (family_) {
        case Family::Bernoulli:
        case Family::FiniteDiscrete: {
            CompensatedSum s;
            for (auto it = atoms_.rbegin(); it != atoms_.rend() && it->x >= x; ++it) s.add(it->p);
            return std::min(1.0, s.value());
        }
        case Family::Geometric: {
            const double n = integers_below(x);
            if (n == 0.0) return 1.0;
            if (param_ == 1.0) return 0.0;
            return std::exp(n * std::log1p(-param_));
        }
        case Family::Poisson: {
            const double n = integers_below(x);
            if (n == 0.0) return 1.0;
            if (std::isinf(n)) return 0.0;
            return boost::math::gamma_p(n, param_);
        }
        case Family::Uniform:
            return std::clamp(1.0 - x / param_, 0.0, 1.0);
        case Family::Exponential:
            return x <= 0.0 ? 1.0 : std::exp(-param_ * x);
        case Family::Rayleigh:
            return x <= 0.0 ? 1.0 : std::exp(-x * x / (2.0 * param_));
    }
    return 0.0;
}

double EnergyDistribution::point_mass(double x) const {
    switch (family_) {
        case Family::Bernoulli:
        case Family::FiniteDiscrete:
            for (const auto& at : atoms_) {
                if (at.x == x) return at.p;
            }
            return 0.0;
        case Family::Geometric:
        case Family::Poisson:
            if (!is_nonneg_integer(x)) return 0.0;
            return atom(static_cast<std::uint64_t>(x)).p;
        default:
            return 0.0;
    }
}

double EnergyDistribution::density(double x) const {
    if (x < 0.0) return 0.0;
    switch (family_) {
        case Family::Uniform: return x <= param_ ? 1.0 / param_ : 0.0;
        case Family::Exponential: return param_ * std::exp(-param_ * x);
        case Family::Rayleigh: return x / param_ * std::exp(-x * x / (2.0 * param_));
        default: break;
    }
    throw DomainError("density: " + family_name(family_) + " is discrete");
}

std::uint64_t EnergyDistribution::atom_begin() const {
    if (!is_discrete()) throw DomainError("atom_begin: continuous law");
    return begin_;
}

std::uint64_t EnergyDistribution::atom_end() const {
    if (!is_discrete()) throw DomainError("atom_end: continuous law");
    return end_;
}

Atom EnergyDistribution::atom(std::uint64_t k) const {
    switch (family_) {
        case Family::Bernoulli:
        case Family::FiniteDiscrete:
            if (k >= atoms_.size()) throw DomainError("atom index out of range");
            return atoms_[k];
        case Family::Geometric: {
            const double x = static_cast<double>(k);
            if (param_ == 1.0) return {x, k == 0 ? 1.0 : 0.0};
            return {x, param_ * std::exp(x * std::log1p(-param_))};
        }
        case Family::Poisson: {
            const double x = static_cast<double>(k);
            return {x, boost::math::pdf(boost::math::poisson_distribution<double>(param_), x)};
        }
        default:
            break;
    }
    throw DomainError("atom: continuous law");
}

double EnergyDistribution::truncated_expect(const std::function<double(double)>& g, double c,
                                            const QuadratureOptions& opts) const {
    if (!(c > 0.0)) throw DomainError("truncated_expect: cutoff must be > 0");
    if (is_discrete()) {
        CompensatedSum s;
        for (std::uint64_t k = begin_; k < end_; ++k) {
            const Atom a = atom(k);
            if (a.x >= c) break;
            if (a.p > 0.0) s.add(g(a.x) * a.p);
        }
        return s.value();
    }
    const double upper = std::isinf(x_hi_) ? quantile_upper(kIntegrationTail) : x_hi_;
    const double b = std::min(c, upper);
    if (b <= x_lo_) return 0.0;
    return integrate_adaptive([&](double x) { return g(x) * density(x); }, x_lo_, b, opts).value;
}

double EnergyDistribution::interval_expect(const std::function<double(double)>& g, double a, double b,
                                           const QuadratureOptions& opts) const {
    if (std::isnan(a) || std::isnan(b)) throw DomainError("interval_expect: NaN bounds");
    if (!(b > a)) return 0.0;
    if (is_discrete()) {
        CompensatedSum s;
        for (std::uint64_t k = begin_; k < end_; ++k) {
            const Atom at = atom(k);
            if (at.x >= b) break;
            if (at.x >= a && at.p > 0.0) s.add(g(at.x) * at.p);
        }
        return s.value();
    }
    const double upper = std::isinf(x_hi_) ? quantile_upper(kIntegrationTail) : x_hi_;
    const double lo = std::max(a, x_lo_);
    const double hi = std::min(b, upper);
    if (hi <= lo) return 0.0;
    return integrate_adaptive([&](double x) { return g(x) * density(x); }, lo, hi, opts).value;
}

double EnergyDistribution::expected_min(double c) const {
    if (!(c >= 0.0)) throw DomainError("expected_min: c must be >= 0");
    if (c == 0.0) return 0.0;
    if (std::isinf(c)) return mean_;
    return truncated_expect([](double x) { return x; }, c) + c * survival(c);
}

double EnergyDistribution::sample(Rng& rng) const {
    const double u = rng.uniform();
    switch (family_) {
        case Family::Bernoulli:
        case Family::FiniteDiscrete: {
            double acc = 0.0;
            for (const auto& at : atoms_) {
                acc += at.p;
                if (u < acc) return at.x;
            }
            return atoms_.back().x;
        }
        case Family::Geometric: {
            if (param_ == 1.0) return 0.0;
            // X >= k iff 1-u <= q^k.
            return std::floor(std::log1p(-u) / std::log1p(-param_));
        }
        case Family::Poisson: {
            if (param_ < 30.0) {
                double p = std::exp(-param_);
                double cdf = p;
                double k = 0.0;
                while (u >= cdf && k < 1000.0) {
                    k += 1.0;
                    p *= param_ / k;
                    cdf += p;
                }
                return k;
            }
            return quantile(PoissonUp(param_), u);
        }
        case Family::Uniform:
            return param_ * u;
        case Family::Exponential:
            return -std::log1p(-u) / param_;
        case Family::Rayleigh:
            return std::sqrt(-2.0 * param_ * std::log1p(-u));
    }
    return 0.0;
}

std::string EnergyDistribution::describe() const {
    switch (family_) {
        case Family::Bernoulli:
            return "bernoulli:xlo=" + fmt(bern_lo_) + ",xhi=" + fmt(bern_hi_) + ",p=" + fmt(param_);
        case Family::FiniteDiscrete: {
            std::string s = "discrete:points=";
            for (std::size_t i = 0; i < atoms_.size(); ++i) {
                if (i) s += ';';
                s += fmt(atoms_[i].x) + ":" + fmt(atoms_[i].p);
            }
            return s;
        }
        case Family::Geometric: return "geometric:p=" + fmt(param_);
        case Family::Poisson: return "poisson:lambda=" + fmt(param_);
        case Family::Uniform: return "uniform:omega=" + fmt(param_);
        case Family::Exponential: return "exponential:eta=" + fmt(param_);
        case Family::Rayleigh: return "rayleigh:theta=" + fmt(param_);
    }
    return "?";
}

namespace {

void require_keys(const SpecString& s, std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : s.params) {
        bool known = false;
        for (const char* want : keys) known = known || k == want;
        if (!known) throw DomainError("unknown parameter '" + k + "' for " + s.name);
    }
}

}  // namespace

EnergyDistribution parse_distribution(std::string_view spec) {
    const SpecString s = parse_spec_string(spec);
    if (s.name == "bernoulli") {
        require_keys(s, {"xlo", "xhi", "p"});
        return EnergyDistribution::bernoulli(s.number("xlo"), s.number("xhi"), s.number("p"));
    }
    if (s.name == "discrete") {
        require_keys(s, {"points"});
        std::vector<Atom> atoms;
        std::string_view rest = s.text("points");
        while (true) {
            const auto semi = rest.find(';');
            const std::string_view row = rest.substr(0, semi);
            const auto colon = row.find(':');
            if (colon == std::string_view::npos) throw DomainError("discrete points must be x:p");
            atoms.push_back({parse_number(row.substr(0, colon), "atom x"),
                             parse_number(row.substr(colon + 1), "atom p")});
            if (semi == std::string_view::npos) break;
            rest = rest.substr(semi + 1);
        }
        return EnergyDistribution::finite_discrete(std::move(atoms));
    }
    if (s.name == "geometric") {
        require_keys(s, {"p"});
        return EnergyDistribution::geometric(s.number("p"));
    }
    if (s.name == "poisson") {
        require_keys(s, {"lambda"});
        return EnergyDistribution::poisson(s.number("lambda"));
    }
    if (s.name == "uniform") {
        require_keys(s, {"omega"});
        return EnergyDistribution::uniform(s.number("omega"));
    }
    if (s.name == "exponential") {
        require_keys(s, {"eta"});
        return EnergyDistribution::exponential(s.number("eta"));
    }
    if (s.name == "rayleigh") {
        require_keys(s, {"theta"});
        return EnergyDistribution::rayleigh(s.number("theta"));
    }
    throw DomainError("unknown distribution '" + s.name + "'");
}

}  // namespace ehpc
