#include "ehpc/reward.hpp"

#include "ehpc/errors.hpp"
#include "ehpc/spec_string.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ehpc {

namespace {

void require_nonnegative(double x, const char* op) {
    if (!(x >= 0.0)) {
        std::ostringstream msg;
        msg << op << ": energy must be >= 0, got " << x;
        throw DomainError(msg.str());
    }
}

}  // namespace

RewardFunction RewardFunction::awgn() {
    RewardFunction r;
    r.kind_ = RewardKind::Awgn;
    return r;
}

RewardFunction RewardFunction::linear(double slope) {
    if (!(slope >= 0.0) || !std::isfinite(slope)) throw DomainError("linear reward slope must be finite and >= 0");
    RewardFunction r;
    r.kind_ = RewardKind::Linear;
    r.slope_ = slope;
    return r;
}

RewardFunction RewardFunction::tabulated(std::vector<RewardBreakpoint> table) {
    if (table.size() < 2) throw DomainError("tabulated reward needs at least two breakpoints");
    if (table.front().x != 0.0) throw DomainError("tabulated reward must start at x = 0");
    if (table.front().value < 0.0) throw DomainError("tabulated reward requires r(0) >= 0");
    double prev_chord = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto& p = table[i];
        if (!std::isfinite(p.x) || !std::isfinite(p.value) || !std::isfinite(p.derivative)) {
            throw DomainError("tabulated reward entries must be finite");
        }
        if (p.derivative < 0.0) throw DomainError("tabulated reward must be nondecreasing (r' >= 0)");
        if (i == 0) continue;
        const auto& q = table[i - 1];
        if (!(p.x > q.x)) throw DomainError("tabulated reward breakpoints must be strictly increasing");
        if (p.value < q.value) throw DomainError("tabulated reward must be nondecreasing");
        if (p.derivative > q.derivative) throw DomainError("tabulated reward must be concave (r' nonincreasing)");
        const double chord = (p.value - q.value) / (p.x - q.x);
        if (chord > prev_chord * (1.0 + 1e-12) + 1e-15) {
            throw DomainError("tabulated reward must be concave (chord slopes nonincreasing)");
        }
        prev_chord = chord;
    }
    RewardFunction r;
    r.kind_ = RewardKind::Tabulated;
    r.table_ = std::move(table);
    return r;
}

std::size_t RewardFunction::segment(double x) const {
    // Index i with table_[i].x <= x < table_[i+1].x, clamped to the last segment.
    auto it = std::upper_bound(table_.begin(), table_.end(), x,
                               [](double v, const RewardBreakpoint& p) { return v < p.x; });
    const auto i = static_cast<std::size_t>(std::distance(table_.begin(), it));
    return std::min(i == 0 ? 0 : i - 1, table_.size() - 2);
}

double RewardFunction::value(double x) const {
    require_nonnegative(x, "reward_eval");
    switch (kind_) {
        case RewardKind::Awgn:
            return 0.5 * std::log1p(x);
        case RewardKind::Linear:
            return slope_ * x;
        case RewardKind::Tabulated: {
            const auto& last = table_.back();
            if (x >= last.x) return last.value + last.derivative * (x - last.x);
            const std::size_t i = segment(x);
            const auto& a = table_[i];
            const auto& b = table_[i + 1];
            const double t = (x - a.x) / (b.x - a.x);
            return a.value + t * (b.value - a.value);
        }
    }
    return 0.0;
}

double RewardFunction::derivative(double x) const {
    require_nonnegative(x, "reward_deriv");
    switch (kind_) {
        case RewardKind::Awgn:
            return std::isinf(x) ? 0.0 : 0.5 / (1.0 + x);
        case RewardKind::Linear:
            return slope_;
        case RewardKind::Tabulated: {
            const auto& last = table_.back();
            if (x >= last.x) return last.derivative;
            const std::size_t i = segment(x);
            const auto& a = table_[i];
            const auto& b = table_[i + 1];
            const double t = (x - a.x) / (b.x - a.x);
            return a.derivative + t * (b.derivative - a.derivative);
        }
    }
    return 0.0;
}

std::string RewardFunction::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case RewardKind::Awgn:
            os << "awgn";
            break;
        case RewardKind::Linear:
            os << "linear:slope=" << slope_;
            break;
        case RewardKind::Tabulated:
            os << "table:" << table_.size() << " breakpoints";
            break;
    }
    return os.str();
}

RewardFunction parse_reward(std::string_view spec) {
    const SpecString s = parse_spec_string(spec);
    if (s.name == "awgn") {
        if (!s.params.empty()) throw DomainError("awgn reward takes no parameters");
        return RewardFunction::awgn();
    }
    if (s.name == "linear") return RewardFunction::linear(s.number("slope"));
    if (s.name == "table") {
        std::vector<RewardBreakpoint> table;
        std::string_view rest = s.text("points");
        while (!rest.empty()) {
            const auto semi = rest.find(';');
            const std::string_view row = rest.substr(0, semi);
            const auto c1 = row.find(':');
            const auto c2 = c1 == std::string_view::npos ? c1 : row.find(':', c1 + 1);
            if (c2 == std::string_view::npos) throw DomainError("table reward rows must be x:r:dr");
            table.push_back({parse_number(row.substr(0, c1), "table x"),
                             parse_number(row.substr(c1 + 1, c2 - c1 - 1), "table r"),
                             parse_number(row.substr(c2 + 1), "table dr")});
            if (semi == std::string_view::npos) break;
            rest = rest.substr(semi + 1);
        }
        return RewardFunction::tabulated(std::move(table));
    }
    throw DomainError("unknown reward '" + s.name + "' (expected awgn, linear, table)");
}

DerivativeEnvelope::DerivativeEnvelope(const RewardFunction& r, double x_lo, double c, Side side,
                                       EnvelopeMethod method, std::size_t points)
    : reward_(&r), x_lo_(x_lo), c_(c) {
    if (!(x_lo >= 0.0) || !(x_lo < c) || !std::isfinite(c)) {
        throw DomainError("derivative envelope needs 0 <= x_lo < c < inf");
    }
    if (method == EnvelopeMethod::Auto && r.kind() == RewardKind::Awgn) {
        // r' = 1/(2(1+x)) is convex: the concave envelope is the chord, the convex one is r' itself.
        mode_ = side == Side::UpperConcave ? Mode::AwgnChord : Mode::AwgnExact;
        return;
    }
    if (method == EnvelopeMethod::Auto && r.kind() == RewardKind::Linear) {
        mode_ = Mode::Constant;
        constant_ = r.slope();
        return;
    }
    if (points < 2) throw DomainError("derivative envelope needs at least two sample points");

    mode_ = Mode::Hull;
    const double step = (c - x_lo) / static_cast<double>(points - 1);
    std::vector<double> xs;
    xs.reserve(points + r.table().size());
    for (std::size_t i = 0; i < points; ++i) xs.push_back(i + 1 == points ? c : x_lo + step * static_cast<double>(i));
    // Tabulated r' is piecewise linear: sampling its kinks makes the hull exact.
    for (const auto& p : r.table()) {
        if (p.x > x_lo && p.x < c) xs.push_back(p.x);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    // Upper hull keeps clockwise turns; lower hull keeps counter-clockwise ones.
    const double keep_sign = side == Side::UpperConcave ? -1.0 : 1.0;
    for (const double x : xs) {
        const double y = r.derivative(x);
        while (vx_.size() >= 2) {
            const std::size_t n = vx_.size();
            const double cross =
                (vx_[n - 1] - vx_[n - 2]) * (y - vy_[n - 2]) - (vy_[n - 1] - vy_[n - 2]) * (x - vx_[n - 2]);
            if (cross * keep_sign > 0.0) break;
            vx_.pop_back();
            vy_.pop_back();
        }
        vx_.push_back(x);
        vy_.push_back(y);
    }
}

double DerivativeEnvelope::operator()(double x) const {
    if (!(x >= x_lo_ && x <= c_)) {
        std::ostringstream msg;
        msg << "envelope evaluated at " << x << " outside [" << x_lo_ << ", " << c_ << "]";
        throw DomainError(msg.str());
    }
    switch (mode_) {
        case Mode::AwgnChord:
            return (1.0 + x_lo_ + c_ - x) / (2.0 * (1.0 + x_lo_) * (1.0 + c_));
        case Mode::AwgnExact:
            return reward_->derivative(x);
        case Mode::Constant:
            return constant_;
        case Mode::Hull:
            break;
    }
    auto it = std::upper_bound(vx_.begin(), vx_.end(), x);
    if (it == vx_.end()) return vy_.back();
    const auto j = static_cast<std::size_t>(std::distance(vx_.begin(), it));
    if (j == 0) return vy_.front();
    const double t = (x - vx_[j - 1]) / (vx_[j] - vx_[j - 1]);
    return vy_[j - 1] + t * (vy_[j] - vy_[j - 1]);
}

double deriv_upper_concave_env(const RewardFunction& r, double x_lo, double c, double x, EnvelopeMethod method) {
    return DerivativeEnvelope(r, x_lo, c, DerivativeEnvelope::Side::UpperConcave, method)(x);
}

double deriv_lower_convex_env(const RewardFunction& r, double x_lo, double c, double x, EnvelopeMethod method) {
    return DerivativeEnvelope(r, x_lo, c, DerivativeEnvelope::Side::LowerConvex, method)(x);
}

}  // namespace ehpc
