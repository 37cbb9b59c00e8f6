#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bellgen/model.hpp"
#include "bellgen/sampler.hpp"

namespace bellgen {

/// Per-cell record tallies, 16 cells in canonical atom order. Accumulation
/// is a commutative monoid: order never matters and two Counts merge by
/// cellwise addition.
class Counts {
public:
    void add(const Record& r) { ++n_[static_cast<size_t>(atom_index(r.i, r.j, r.a, r.b))]; }

    Counts& operator+=(const Counts& other) {
        for (size_t k = 0; k < n_.size(); ++k) n_[k] += other.n_[k];
        return *this;
    }
    friend Counts operator+(Counts a, const Counts& b) { return a += b; }

    uint64_t cell(Setting i, Setting j, Sign eps, Sign epsp) const {
        return n_[static_cast<size_t>(atom_index(i, j, eps, epsp))];
    }
    uint64_t cell_at(int atom) const { return n_[static_cast<size_t>(atom)]; }

    uint64_t block_total(Setting i, Setting j) const {
        const size_t base = static_cast<size_t>(pair_index(i, j)) * 4;
        return n_[base] + n_[base + 1] + n_[base + 2] + n_[base + 3];
    }

    uint64_t total() const {
        uint64_t t = 0;
        for (uint64_t c : n_) t += c;
        return t;
    }

    bool operator==(const Counts&) const = default;

private:
    std::array<uint64_t, kAtomCount> n_{};
};

inline Counts count_records(std::span<const Record> records) {
    Counts c;
    for (const Record& r : records) c.add(r);
    return c;
}

struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

namespace detail {

inline void require_nonempty_blocks(const Counts& counts) {
    for (Setting i : kSettings)
        for (Setting j : kSettings)
            if (counts.block_total(i, j) == 0)
                throw insufficient_data_error("no records for setting pair (" +
                                              std::to_string(as_int(i)) + "," +
                                              std::to_string(as_int(j)) + ")");
}

} // namespace detail

/// Conditional outcome estimates p̂_ij(eps,eps') = n_cell/n_block with the
/// binomial standard error sqrt(p̂(1-p̂)/n_block). Zero-count cells give
/// estimate 0 with se 0; a fully empty block is an error.
class ConditionalEstimates {
public:
    explicit ConditionalEstimates(const Counts& counts) {
        detail::require_nonempty_blocks(counts);
        for (Setting i : kSettings) {
            for (Setting j : kSettings) {
                const auto n_block = static_cast<double>(counts.block_total(i, j));
                block_n_[static_cast<size_t>(pair_index(i, j))] = counts.block_total(i, j);
                for (Sign e : kSigns) {
                    for (Sign ep : kSigns) {
                        const int k = atom_index(i, j, e, ep);
                        const double p = static_cast<double>(counts.cell(i, j, e, ep)) / n_block;
                        cells_[static_cast<size_t>(k)] = {p, std::sqrt(p * (1.0 - p) / n_block)};
                    }
                }
            }
        }
    }

    const Estimate& at(Setting i, Setting j, Sign eps, Sign epsp) const {
        return cells_[static_cast<size_t>(atom_index(i, j, eps, epsp))];
    }
    const Estimate& at_atom(int atom) const { return cells_[static_cast<size_t>(atom)]; }
    uint64_t block_n(Setting i, Setting j) const {
        return block_n_[static_cast<size_t>(pair_index(i, j))];
    }

private:
    std::array<Estimate, kAtomCount> cells_{};
    std::array<uint64_t, 4> block_n_{};
};

inline ConditionalEstimates empirical_conditionals(const Counts& counts) {
    return ConditionalEstimates(counts);
}

/// Empirical CHSH: correlation estimates per setting pair, their standard
/// errors, and the signed combination for one sign pattern. Setting-pair
/// blocks are disjoint subsamples of an i.i.d. stream, so
/// se_S = sqrt(sum of se_E^2).
struct ChshEstimate {
    std::array<std::array<double, 2>, 2> e_hat{};  // [i-1][j-1]
    std::array<std::array<double, 2>, 2> se_e{};
    std::array<std::array<uint64_t, 2>, 2> n_cells{};
    double s_hat = 0.0;
    double se_s = 0.0;
    SignPattern pattern{};
};

inline ChshEstimate empirical_chsh(const Counts& counts, SignPattern pattern = {}) {
    detail::require_nonempty_blocks(counts);
    ChshEstimate est;
    est.pattern = pattern;
    double total = 0.0;
    double var_s = 0.0;
    for (Setting i : kSettings) {
        for (Setting j : kSettings) {
            const uint64_t n_block = counts.block_total(i, j);
            // Integer arithmetic first: |agree - disagree| <= n_block exactly.
            const int64_t agree = static_cast<int64_t>(counts.cell(i, j, Sign::plus, Sign::plus)) +
                                  static_cast<int64_t>(counts.cell(i, j, Sign::minus, Sign::minus));
            const int64_t disagree =
                static_cast<int64_t>(counts.cell(i, j, Sign::plus, Sign::minus)) +
                static_cast<int64_t>(counts.cell(i, j, Sign::minus, Sign::plus));
            const double e = static_cast<double>(agree - disagree) / static_cast<double>(n_block);
            const double se = std::sqrt(std::max(0.0, 1.0 - e * e) / static_cast<double>(n_block));
            est.e_hat[as_int(i) - 1][as_int(j) - 1] = e;
            est.se_e[as_int(i) - 1][as_int(j) - 1] = se;
            est.n_cells[as_int(i) - 1][as_int(j) - 1] = n_block;
            total += e;
            var_s += se * se;
        }
    }
    est.s_hat = total - 2.0 * est.e_hat[as_int(pattern.i) - 1][as_int(pattern.j) - 1];
    est.se_s = std::sqrt(var_s);
    return est;
}

enum class Verdict { violates_classical, no_violation };

inline const char* verdict_name(Verdict v) {
    return v == Verdict::violates_classical ? "VIOLATES_CLASSICAL" : "NO_VIOLATION";
}

inline constexpr double kDefaultViolationThreshold = 4.0;

/// The classical bound is 2; the estimate violates it decisively when
/// S_hat - 2 exceeds threshold standard errors.
inline Verdict classify_chsh(const ChshEstimate& est,
                             double threshold = kDefaultViolationThreshold) {
    return est.s_hat - 2.0 > threshold * est.se_s ? Verdict::violates_classical
                                                  : Verdict::no_violation;
}

struct ComparisonReport {
    std::array<double, kAtomCount> conditional_z{};    // (est - exact)/se per cell
    std::array<std::array<double, 2>, 2> correlation_z{};
    std::vector<int> flagged_atoms;                    // cells with |z| > flag threshold
    bool consistent_with_exact = true;
    double s_exact = 0.0;
    double s_hat = 0.0;
    double se_s = 0.0;
    Verdict verdict = Verdict::no_violation;
};

namespace detail {

inline double z_score(double est, double exact, double se) {
    if (se > 0.0) return (est - exact) / se;
    if (est == exact) return 0.0;
    return est > exact ? std::numeric_limits<double>::infinity()
                       : -std::numeric_limits<double>::infinity();
}

} // namespace detail

/// Exact-vs-empirical report: per-cell z-scores for the conditionals and
/// correlations, cells flagged beyond flag_z, and the violation verdict.
inline ComparisonReport compare(const ExactChsh& exact, const PairProbTable& exact_table,
                                const ChshEstimate& est, const ConditionalEstimates& cond,
                                double flag_z = 4.0,
                                double violation_threshold = kDefaultViolationThreshold) {
    ComparisonReport report;
    for (Setting i : kSettings) {
        for (Setting j : kSettings) {
            for (Sign e : kSigns) {
                for (Sign ep : kSigns) {
                    const int k = atom_index(i, j, e, ep);
                    const Estimate& c = cond.at_atom(k);
                    const double z = detail::z_score(c.value, exact_table.at(k), c.se);
                    report.conditional_z[static_cast<size_t>(k)] = z;
                    if (std::fabs(z) > flag_z) {
                        report.flagged_atoms.push_back(k);
                        report.consistent_with_exact = false;
                    }
                }
            }
            const double ze = detail::z_score(est.e_hat[as_int(i) - 1][as_int(j) - 1],
                                              exact.correlation[as_int(i) - 1][as_int(j) - 1],
                                              est.se_e[as_int(i) - 1][as_int(j) - 1]);
            report.correlation_z[as_int(i) - 1][as_int(j) - 1] = ze;
            if (std::fabs(ze) > flag_z) report.consistent_with_exact = false;
        }
    }
    report.s_exact = exact.s;
    report.s_hat = est.s_hat;
    report.se_s = est.se_s;
    report.verdict = classify_chsh(est, violation_threshold);
    return report;
}

} // namespace bellgen
