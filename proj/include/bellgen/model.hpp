#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "bellgen/angles.hpp"
#include "bellgen/errors.hpp"

namespace bellgen {

enum class Sign : signed char { minus = -1, plus = +1 };

constexpr int as_int(Sign s) { return static_cast<int>(s); }

inline Sign sign_from_int(int v) {
    if (v != -1 && v != 1) {
        throw error("sign must be -1 or +1, got " + std::to_string(v));
    }
    return static_cast<Sign>(v);
}

inline constexpr Sign kSigns[2] = {Sign::plus, Sign::minus};

// Canonical atom order used throughout: setting pairs (1,1),(1,2),(2,1),(2,2),
// and within each pair the outcomes (+,+),(+,-),(-,+),(-,-). Every 16-cell
// table (measure weights, pair probabilities, counts) shares this layout.
inline constexpr int kAtomCount = 16;

constexpr int pair_index(Setting i, Setting j) {
    return (as_int(i) - 1) * 2 + (as_int(j) - 1);
}

constexpr int outcome_index(Sign eps, Sign epsp) {
    return (eps == Sign::plus ? 0 : 2) + (epsp == Sign::plus ? 0 : 1);
}

constexpr int atom_index(Setting i, Setting j, Sign eps, Sign epsp) {
    return pair_index(i, j) * 4 + outcome_index(eps, epsp);
}

/// An elementary event: a point of the 16-element sample space.
///
/// Coordinates (x1, x2, x3, x4) take values in {-1, 0, +1} with exactly one
/// of (x1, x2) and exactly one of (x3, x4) nonzero. The position of the
/// nonzero left (right) coordinate encodes which setting the left (right)
/// side used; the value is the measured outcome.
class OmegaPoint {
public:
    OmegaPoint(int x1, int x2, int x3, int x4)
        : x_{static_cast<int8_t>(x1), static_cast<int8_t>(x2),
             static_cast<int8_t>(x3), static_cast<int8_t>(x4)} {
        for (int v : {x1, x2, x3, x4}) {
            if (v < -1 || v > 1) {
                throw error("omega coordinate out of {-1,0,+1}");
            }
        }
        if ((x1 != 0) == (x2 != 0) || (x3 != 0) == (x4 != 0)) {
            throw error("omega point must have exactly one nonzero left and "
                        "one nonzero right coordinate");
        }
    }

    int x1() const { return x_[0]; }
    int x2() const { return x_[1]; }
    int x3() const { return x_[2]; }
    int x4() const { return x_[3]; }

    Setting eta_l() const { return x_[0] != 0 ? Setting::one : Setting::two; }
    Setting eta_r() const { return x_[2] != 0 ? Setting::one : Setting::two; }

    /// Left outcome: the nonzero one of (x1, x2).
    Sign outcome_a() const { return sign_from_int(x_[0] != 0 ? x_[0] : x_[1]); }
    /// Right outcome: the nonzero one of (x3, x4).
    Sign outcome_b() const { return sign_from_int(x_[2] != 0 ? x_[2] : x_[3]); }

    int atom() const { return atom_index(eta_l(), eta_r(), outcome_a(), outcome_b()); }

    static OmegaPoint from_atom(int index) {
        if (index < 0 || index >= kAtomCount) {
            throw error("atom index out of range");
        }
        const Setting i = kSettings[index / 8];
        const Setting j = kSettings[(index / 4) % 2];
        const Sign eps = kSigns[(index / 2) % 2];
        const Sign epsp = kSigns[index % 2];
        const int a = as_int(eps);
        const int b = as_int(epsp);
        return OmegaPoint(i == Setting::one ? a : 0, i == Setting::one ? 0 : a,
                          j == Setting::one ? b : 0, j == Setting::one ? 0 : b);
    }

    bool operator==(const OmegaPoint&) const = default;

private:
    std::array<int8_t, 4> x_;
};

/// All 16 elementary events in canonical atom order.
inline const std::array<OmegaPoint, kAtomCount>& all_omega_points() {
    static const std::array<OmegaPoint, kAtomCount> points = [] {
        return std::array<OmegaPoint, kAtomCount>{
            OmegaPoint::from_atom(0),  OmegaPoint::from_atom(1),
            OmegaPoint::from_atom(2),  OmegaPoint::from_atom(3),
            OmegaPoint::from_atom(4),  OmegaPoint::from_atom(5),
            OmegaPoint::from_atom(6),  OmegaPoint::from_atom(7),
            OmegaPoint::from_atom(8),  OmegaPoint::from_atom(9),
            OmegaPoint::from_atom(10), OmegaPoint::from_atom(11),
            OmegaPoint::from_atom(12), OmegaPoint::from_atom(13),
            OmegaPoint::from_atom(14), OmegaPoint::from_atom(15)};
    }();
    return points;
}

/// Outcome-pair probabilities p_ij(eps, eps') for the four setting pairs.
class PairProbTable {
public:
    double operator()(Setting i, Setting j, Sign eps, Sign epsp) const {
        return p_[atom_index(i, j, eps, epsp)];
    }
    double at(int atom) const { return p_[static_cast<size_t>(atom)]; }
    void set(Setting i, Setting j, Sign eps, Sign epsp, double v) {
        p_[atom_index(i, j, eps, epsp)] = v;
    }

    /// Sum over the four outcomes of one setting pair; 1 for a valid table.
    double block_sum(Setting i, Setting j) const {
        const int base = pair_index(i, j) * 4;
        return p_[base] + p_[base + 1] + p_[base + 2] + p_[base + 3];
    }

private:
    std::array<double, kAtomCount> p_{};
};

/// Probability weights over the 16 elementary events.
class Measure {
public:
    Measure() = default;
    explicit Measure(const std::array<double, kAtomCount>& weights) : w_(weights) {}

    double weight(const OmegaPoint& omega) const { return w_[static_cast<size_t>(omega.atom())]; }
    double weight_at(int atom) const { return w_[static_cast<size_t>(atom)]; }
    void set_weight_at(int atom, double v) { w_[static_cast<size_t>(atom)] = v; }

    double total_mass() const {
        double s = 0.0;
        for (double w : w_) s += w;
        return s;
    }

    /// Mass of one setting-pair context; 1/4 for any angle configuration.
    double setting_pair_mass(Setting i, Setting j) const {
        const int base = pair_index(i, j) * 4;
        return w_[base] + w_[base + 1] + w_[base + 2] + w_[base + 3];
    }

private:
    std::array<double, kAtomCount> w_{};
};

/// Values of the four outcome variables and the two setting selectors at one
/// elementary event. Each outcome variable equals the matching coordinate on
/// its support and zero elsewhere.
struct VariableValues {
    int a1, a2, b1, b2;
    Setting eta_l, eta_r;
};

/// Which of the four correlation terms carries the minus sign in the CHSH
/// combination. Default: the (2,2) term.
struct SignPattern {
    Setting i = Setting::two;
    Setting j = Setting::two;
    bool operator==(const SignPattern&) const = default;
};

/// Exact CHSH analytics: the correlation matrix, the signed combination for
/// one sign pattern, and the maximum over the four single-minus patterns.
struct ExactChsh {
    std::array<std::array<double, 2>, 2> correlation{}; // [i-1][j-1]
    double s = 0.0;
    SignPattern pattern{};
    double s_max = 0.0;
};

/// Probability of outcomes (eps, eps') under setting pair (i, j):
/// (1/2)cos^2((theta_i - theta'_j)/2) for equal signs,
/// (1/2)sin^2((theta_i - theta'_j)/2) for opposite signs.
inline double pair_prob(const AngleConfig& angles, Setting i, Setting j, Sign eps, Sign epsp) {
    const double half = 0.5 * (angles.left(i) - angles.right(j));
    if (eps == epsp) {
        const double c = std::cos(half);
        return 0.5 * c * c;
    }
    const double s = std::sin(half);
    return 0.5 * s * s;
}

inline PairProbTable build_pair_table(const AngleConfig& angles) {
    PairProbTable table;
    for (Setting i : kSettings)
        for (Setting j : kSettings)
            for (Sign e : kSigns)
                for (Sign ep : kSigns) table.set(i, j, e, ep, pair_prob(angles, i, j, e, ep));
    return table;
}

/// The measure assigns each elementary event one quarter of the matching
/// outcome-pair probability, so each of the four setting contexts carries
/// total mass 1/4 and the whole space carries mass 1.
inline Measure build_measure(const AngleConfig& angles) {
    Measure m;
    for (const OmegaPoint& omega : all_omega_points()) {
        const double p =
            pair_prob(angles, omega.eta_l(), omega.eta_r(), omega.outcome_a(), omega.outcome_b());
        m.set_weight_at(omega.atom(), 0.25 * p);
    }
    return m;
}

inline VariableValues evaluate_variables(const OmegaPoint& omega) {
    return VariableValues{omega.x1(), omega.x2(), omega.x3(), omega.x4(),
                          omega.eta_l(), omega.eta_r()};
}

inline constexpr double kSettingMassTolerance = 1e-9;

/// Conditional outcome probabilities given each setting pair:
/// weight(atom) / setting-pair mass. Rejects measures whose setting-pair
/// mass deviates from 1/4 by more than kSettingMassTolerance.
inline PairProbTable conditional_table(const Measure& measure) {
    PairProbTable table;
    for (Setting i : kSettings) {
        for (Setting j : kSettings) {
            const double mass = measure.setting_pair_mass(i, j);
            if (std::fabs(mass - 0.25) > kSettingMassTolerance) {
                throw degenerate_measure_error(
                    "setting pair (" + std::to_string(as_int(i)) + "," + std::to_string(as_int(j)) +
                    ") has mass " + std::to_string(mass) + ", expected 1/4");
            }
            for (Sign e : kSigns)
                for (Sign ep : kSigns)
                    table.set(i, j, e, ep,
                              measure.weight_at(atom_index(i, j, e, ep)) / mass);
        }
    }
    return table;
}

/// Correlation E_ij = sum over outcomes of eps*eps'*p_ij(eps,eps'), which for
/// this family reduces to cos(theta_i - theta'_j).
inline double correlation(const AngleConfig& angles, Setting i, Setting j) {
    double e = 0.0;
    for (Sign eps : kSigns)
        for (Sign epsp : kSigns)
            e += as_int(eps) * as_int(epsp) * pair_prob(angles, i, j, eps, epsp);
    return e;
}

/// CHSH combination with exactly one negated term:
/// S = sum_{ij} E_ij - 2*E_{pattern}. Also reports the maximum of S over the
/// four single-minus placements.
inline ExactChsh chsh_value(const AngleConfig& angles, SignPattern pattern = {}) {
    ExactChsh result;
    result.pattern = pattern;
    double total = 0.0;
    for (Setting i : kSettings) {
        for (Setting j : kSettings) {
            const double e = correlation(angles, i, j);
            result.correlation[as_int(i) - 1][as_int(j) - 1] = e;
            total += e;
        }
    }
    result.s = total - 2.0 * result.correlation[as_int(pattern.i) - 1][as_int(pattern.j) - 1];
    result.s_max = result.s;
    for (Setting i : kSettings)
        for (Setting j : kSettings)
            result.s_max =
                std::max(result.s_max, total - 2.0 * result.correlation[as_int(i) - 1][as_int(j) - 1]);
    return result;
}

} // namespace bellgen
