#pragma once

#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace polcascade {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = std::numbers::pi / 2.0;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Reduce an angle modulo pi into (-pi/2, pi/2]. Polarizer axes are lines,
/// so any deviation between them is only defined up to a half turn.
/// Throws std::invalid_argument for non-finite input.
double fold_deviation(double angle);

/// Reduce an angle modulo pi into [0, pi).
double canonical_axis(double angle);

/// A polarizer axis orientation, stored canonically in [0, pi) radians.
class Angle {
public:
    constexpr Angle() = default;

    static Angle radians(double value) { return Angle(canonical_axis(value)); }
    static Angle degrees(double value) { return radians(deg_to_rad(value)); }

    double rad() const { return value_; }
    double deg() const { return rad_to_deg(value_); }

    friend bool operator==(const Angle&, const Angle&) = default;

private:
    explicit Angle(double canonical) : value_(canonical) {}

    double value_ = 0.0;
};

/// Parameters of the steep hidden-variable response
///   p(l) = 1 - (1 - exp(-a|l|^e)) / (1 + c exp(-a|l|^e)).
struct HvResponseParams {
    double a = 1.95;  // steepness
    double e = 3.56;  // exponent
    double c = 500.0; // contrast

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;

    friend bool operator==(const HvResponseParams&, const HvResponseParams&) = default;
};

/// Generalized Malus law (1 - eps) cos^2(d) + eps, with d folded first.
double malus(double deviation, double epsilon);

/// Hidden-variable single-polarizer response evaluated at the folded deviation.
double hv_response(double deviation, const HvResponseParams& params);

struct IdealMalus {
    friend bool operator==(const IdealMalus&, const IdealMalus&) = default;
};

struct GeneralizedMalus {
    double epsilon = 0.0;
    friend bool operator==(const GeneralizedMalus&, const GeneralizedMalus&) = default;
};

struct HvStep {
    HvResponseParams params;
    friend bool operator==(const HvStep&, const HvStep&) = default;
};

/// Result of evaluating a response law. `clamped` is set when a tabulated law
/// was asked for a deviation outside its grid and the nearest endpoint was used.
struct Evaluation {
    double probability = 0.0;
    bool clamped = false;
};

/// A measured response given as (|deviation|, probability) pairs on [0, pi/2],
/// linearly interpolated.
class TabulatedResponse {
public:
    using Point = std::pair<double, double>;

    /// Throws std::invalid_argument unless the grid has at least two points,
    /// strictly increasing deviations within [0, pi/2], and probabilities in [0, 1].
    explicit TabulatedResponse(std::vector<Point> grid);

    Evaluation evaluate(double deviation) const;
    const std::vector<Point>& grid() const { return grid_; }

    friend bool operator==(const TabulatedResponse&, const TabulatedResponse&) = default;

private:
    std::vector<Point> grid_;
};

using ResponseLaw = std::variant<IdealMalus, GeneralizedMalus, HvStep, TabulatedResponse>;

/// Throws std::invalid_argument if the law's parameters violate their invariants.
void validate(const ResponseLaw& law);

Evaluation evaluate_detailed(const ResponseLaw& law, double deviation);

inline double evaluate(const ResponseLaw& law, double deviation) {
    return evaluate_detailed(law, deviation).probability;
}

/// Short human-readable tag, e.g. "malus(eps=0.02)".
std::string describe(const ResponseLaw& law);

/// Constant response k on the whole period, as a two-point table.
TabulatedResponse constant_response(double k);

}  // namespace polcascade
