#pragma once

// Test-only brute-force evaluation over the 16-point sample space. Every
// quantity is computed by direct enumeration with long double arithmetic,
// independent of the library's closed forms: weights come straight from the
// half-angle trig formula, and expectations sum variable values over atoms.

#include <array>
#include <cmath>

#include "bellgen/angles.hpp"

namespace oracle {

struct Atom {
    int x[4];           // coordinates, exactly one nonzero per side
    long double weight; // probability mass
};

inline std::array<Atom, 16> enumerate_atoms(const bellgen::AngleConfig& angles) {
    const long double thetas_left[2] = {angles.theta1, angles.theta2};
    const long double thetas_right[2] = {angles.theta1p, angles.theta2p};
    std::array<Atom, 16> atoms{};
    int idx = 0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            for (int eps : {+1, -1}) {
                for (int epsp : {+1, -1}) {
                    const long double half = (thetas_left[i] - thetas_right[j]) / 2.0L;
                    const long double p = eps == epsp
                                              ? 0.5L * std::cos(half) * std::cos(half)
                                              : 0.5L * std::sin(half) * std::sin(half);
                    Atom atom{};
                    atom.x[0] = i == 0 ? eps : 0;
                    atom.x[1] = i == 0 ? 0 : eps;
                    atom.x[2] = j == 0 ? epsp : 0;
                    atom.x[3] = j == 0 ? 0 : epsp;
                    atom.weight = 0.25L * p;
                    atoms[idx++] = atom;
                }
            }
        }
    }
    return atoms;
}

inline long double total_mass(const std::array<Atom, 16>& atoms) {
    long double s = 0.0L;
    for (const Atom& a : atoms) s += a.weight;
    return s;
}

inline int selector_left(const Atom& a) { return a.x[0] != 0 ? 1 : 2; }
inline int selector_right(const Atom& a) { return a.x[2] != 0 ? 1 : 2; }

// Variable values at an atom: A^(i) is the i-th left coordinate, B^(j) the
// j-th right coordinate (zero off its support).
inline int var_a(const Atom& a, int i) { return a.x[i - 1]; }
inline int var_b(const Atom& a, int j) { return a.x[2 + j - 1]; }

inline long double pair_mass(const std::array<Atom, 16>& atoms, int i, int j) {
    long double s = 0.0L;
    for (const Atom& a : atoms)
        if (selector_left(a) == i && selector_right(a) == j) s += a.weight;
    return s;
}

inline long double conditional(const std::array<Atom, 16>& atoms, int i, int j, int eps,
                               int epsp) {
    long double s = 0.0L;
    for (const Atom& a : atoms)
        if (selector_left(a) == i && selector_right(a) == j && var_a(a, i) == eps &&
            var_b(a, j) == epsp)
            s += a.weight;
    return s / pair_mass(atoms, i, j);
}

inline long double correlation(const std::array<Atom, 16>& atoms, int i, int j) {
    long double s = 0.0L;
    for (const Atom& a : atoms)
        if (selector_left(a) == i && selector_right(a) == j)
            s += static_cast<long double>(var_a(a, i) * var_b(a, j)) * a.weight;
    return s / pair_mass(atoms, i, j);
}

inline long double chsh(const std::array<Atom, 16>& atoms, int minus_i, int minus_j) {
    long double s = 0.0L;
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j) {
            const long double e = correlation(atoms, i, j);
            s += (i == minus_i && j == minus_j) ? -e : e;
        }
    return s;
}

} // namespace oracle
