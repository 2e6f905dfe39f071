#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ehpc {

enum class RewardKind { Awgn, Linear, Tabulated };

/// One row of a tabulated reward: r and r' at x.
struct RewardBreakpoint {
    double x;
    double value;
    double derivative;
};

/// Nondecreasing concave reward r with continuous derivative r'.
///
/// AWGN is r(x) = log(1+x)/2 in nats per slot. Tabulated rewards interpolate
/// both r and r' linearly between breakpoints and extend linearly past the
/// last one; construction rejects tables that are not nondecreasing and
/// concave.
class RewardFunction {
public:
    static RewardFunction awgn();
    static RewardFunction linear(double slope);
    static RewardFunction tabulated(std::vector<RewardBreakpoint> table);

    RewardKind kind() const { return kind_; }
    double slope() const { return slope_; }
    const std::vector<RewardBreakpoint>& table() const { return table_; }

    /// r(x); throws DomainError for x < 0.
    double value(double x) const;
    /// r'(x); throws DomainError for x < 0. Accepts +inf (the limit r'(inf)).
    double derivative(double x) const;

    double operator()(double x) const { return value(x); }

    std::string describe() const;

private:
    RewardFunction() = default;

    std::size_t segment(double x) const;

    RewardKind kind_ = RewardKind::Awgn;
    double slope_ = 0.0;
    std::vector<RewardBreakpoint> table_;
};

/// Parses `awgn`, `linear:slope=s` or `table:points=x:r:dr;x:r:dr;...`.
RewardFunction parse_reward(std::string_view spec);

inline constexpr std::size_t kDefaultEnvelopePoints = 4097;

enum class EnvelopeMethod {
    Auto,  ///< closed form where one exists (AWGN, Linear), hull otherwise
    Hull,  ///< always the sampled convex-hull construction
};

/// Concave or convex envelope of r' over [x_lo, c], built once and evaluated many times.
///
/// The hull path samples r' on a uniform grid (endpoints and any table breakpoints included) and
/// interpolates linearly between hull vertices.
class DerivativeEnvelope {
public:
    enum class Side { UpperConcave, LowerConvex };

    DerivativeEnvelope(const RewardFunction& r, double x_lo, double c, Side side,
                       EnvelopeMethod method = EnvelopeMethod::Auto,
                       std::size_t points = kDefaultEnvelopePoints);

    /// Envelope value at x in [x_lo, c]; DomainError outside.
    double operator()(double x) const;

    const std::vector<double>& vertex_x() const { return vx_; }

private:
    enum class Mode { AwgnChord, AwgnExact, Constant, Hull };

    const RewardFunction* reward_;
    double x_lo_;
    double c_;
    Mode mode_;
    double constant_ = 0.0;
    std::vector<double> vx_;
    std::vector<double> vy_;
};

double deriv_upper_concave_env(const RewardFunction& r, double x_lo, double c, double x,
                               EnvelopeMethod method = EnvelopeMethod::Auto);
double deriv_lower_convex_env(const RewardFunction& r, double x_lo, double c, double x,
                              EnvelopeMethod method = EnvelopeMethod::Auto);

}  // namespace ehpc
