#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace rsmdp {

/// Raised when an operation would leave [0, inf] or has no agreed value.
class ExtRealDomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/**
 * A number in [0, inf].
 *
 * Arithmetic follows the conventions 0/0 = 0, 0*inf = 0, x/0 = inf for x > 0
 * and inf - inf = inf. Infinity is a proper element of the type; a finite
 * product or sum whose magnitude exceeds the double range saturates to it.
 * NaN and negative values cannot be constructed.
 */
class ExtReal {
public:
    constexpr ExtReal() noexcept = default;

    /// Throws ExtRealDomainError on NaN or negative input. -0.0 is stored as 0.
    explicit ExtReal(double v) : value_(checked(v)) {}

    static constexpr ExtReal infinity() noexcept {
        ExtReal r;
        r.value_ = std::numeric_limits<double>::infinity();
        return r;
    }
    static constexpr ExtReal zero() noexcept { return ExtReal(); }
    static ExtReal one() noexcept { return ExtReal(1.0); }

    constexpr bool is_infinite() const noexcept {
        return value_ == std::numeric_limits<double>::infinity();
    }
    constexpr bool is_finite() const noexcept { return !is_infinite(); }
    constexpr bool is_zero() const noexcept { return value_ == 0.0; }

    /// The stored double; +inf for the infinite element.
    constexpr double value() const noexcept { return value_; }

    /// The finite value. Throws ExtRealDomainError when infinite.
    double finite_value() const {
        if (is_infinite()) throw ExtRealDomainError("ExtReal: finite value requested from inf");
        return value_;
    }

    friend constexpr bool operator==(ExtReal a, ExtReal b) noexcept { return a.value_ == b.value_; }
    friend constexpr std::strong_ordering operator<=>(ExtReal a, ExtReal b) noexcept {
        // No NaN can be stored, so the partial order on doubles is total here.
        if (a.value_ < b.value_) return std::strong_ordering::less;
        if (a.value_ > b.value_) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    ExtReal& operator+=(ExtReal o) noexcept {
        value_ += o.value_;
        return *this;
    }
    ExtReal& operator*=(ExtReal o) noexcept;

private:
    static double checked(double v) {
        if (std::isnan(v)) throw ExtRealDomainError("ExtReal: NaN is not a value");
        if (v < 0.0) throw ExtRealDomainError("ExtReal: negative value " + std::to_string(v));
        return v == 0.0 ? 0.0 : v;
    }

    double value_ = 0.0;
};

/// Product with 0 * inf = inf * 0 = 0.
inline ExtReal ext_mul(ExtReal a, ExtReal b) noexcept {
    if (a.is_zero() || b.is_zero()) return ExtReal::zero();
    if (a.is_infinite() || b.is_infinite()) return ExtReal::infinity();
    return ExtReal(a.value() * b.value());
}

/// Quotient with 0/0 = 0, x/0 = inf (x > 0), x/inf = 0 (x finite). inf/inf throws.
inline ExtReal ext_div(ExtReal a, ExtReal b) {
    if (a.is_infinite() && b.is_infinite())
        throw ExtRealDomainError("ExtReal: inf/inf is undefined");
    if (a.is_zero()) return ExtReal::zero();
    if (b.is_zero()) return ExtReal::infinity();
    if (a.is_infinite()) return ExtReal::infinity();
    if (b.is_infinite()) return ExtReal::zero();
    return ExtReal(a.value() / b.value());
}

/// a - b for a >= b, with inf - x = inf including inf - inf = inf.
/// A finite a below a finite b throws.
inline ExtReal ext_sub_clamped(ExtReal a, ExtReal b) {
    if (a.is_infinite()) return ExtReal::infinity();
    if (b.is_infinite() || a < b)
        throw ExtRealDomainError("ExtReal: subtraction leaves [0, inf]: " + std::to_string(a.value()) +
                                 " - " + std::to_string(b.value()));
    return ExtReal(a.value() - b.value());
}

inline ExtReal ext_add(ExtReal a, ExtReal b) noexcept { return a += b; }

/// e^a, with e^inf = inf.
inline ExtReal ext_exp(ExtReal a) noexcept {
    if (a.is_infinite()) return ExtReal::infinity();
    return ExtReal(std::exp(a.value()));
}

inline ExtReal& ExtReal::operator*=(ExtReal o) noexcept { return *this = ext_mul(*this, o); }

inline ExtReal operator+(ExtReal a, ExtReal b) noexcept { return ext_add(a, b); }
inline ExtReal operator*(ExtReal a, ExtReal b) noexcept { return ext_mul(a, b); }
inline ExtReal operator/(ExtReal a, ExtReal b) { return ext_div(a, b); }

inline std::ostream& operator<<(std::ostream& os, ExtReal x) {
    if (x.is_infinite()) return os << "inf";
    return os << x.value();
}

}  // namespace rsmdp
