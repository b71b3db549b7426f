#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace opbmo {

/// Truncation parameters for the dyadic tree on the unit circle [0,1).
/// Haar coefficients live on intervals at levels 0..depth-1; the finest
/// resolution is 2^depth equal cells.
struct TreeConfig {
    int depth = 0;  // number of refinement levels kept
    int dim = 1;    // dimension n of the coefficient space C^n

    int cells() const { return 1 << depth; }
    int coeff_count() const { return (1 << depth) - 1; }
    double cell_measure() const { return 1.0 / static_cast<double>(cells()); }

    bool operator==(const TreeConfig&) const = default;
};

inline void check_config(const TreeConfig& cfg) {
    if (cfg.depth < 0 || cfg.depth > 24)
        throw std::invalid_argument("tree depth out of range: " + std::to_string(cfg.depth));
    if (cfg.dim < 1)
        throw std::invalid_argument("coefficient dimension must be positive");
}

/// Dyadic interval [pos*2^-level, (pos+1)*2^-level).
struct DyadicIndex {
    int level = 0;
    int pos = 0;

    bool operator==(const DyadicIndex&) const = default;
};

inline void check_index(const TreeConfig& cfg, const DyadicIndex& I) {
    if (I.level < 0 || I.level >= cfg.depth)
        throw std::invalid_argument("interval level " + std::to_string(I.level) +
                                    " not in [0," + std::to_string(cfg.depth) + ")");
    if (I.pos < 0 || I.pos >= (1 << I.level))
        throw std::invalid_argument("interval position " + std::to_string(I.pos) +
                                    " out of range at level " + std::to_string(I.level));
}

inline double measure(const DyadicIndex& I) { return 1.0 / static_cast<double>(1 << I.level); }

/// Breadth-first rank of I among all intervals: root=0, then level by level.
inline int interval_rank(const DyadicIndex& I) { return (1 << I.level) - 1 + I.pos; }

inline DyadicIndex rank_to_interval(int rank) {
    int level = 0;
    while ((2 << level) - 1 <= rank) ++level;
    return {level, rank - ((1 << level) - 1)};
}

inline DyadicIndex left_child(const DyadicIndex& I) { return {I.level + 1, 2 * I.pos}; }
inline DyadicIndex right_child(const DyadicIndex& I) { return {I.level + 1, 2 * I.pos + 1}; }

inline DyadicIndex parent(const DyadicIndex& I) {
    if (I.level == 0) throw std::invalid_argument("root interval has no parent");
    return {I.level - 1, I.pos / 2};
}

/// True iff J is contained in I (as sets; equality counts).
inline bool contains(const DyadicIndex& I, const DyadicIndex& J) {
    return J.level >= I.level && (J.pos >> (J.level - I.level)) == I.pos;
}

/// First and one-past-last cell index covered by I at resolution depth.
inline int first_cell(const TreeConfig& cfg, const DyadicIndex& I) {
    return I.pos << (cfg.depth - I.level);
}
inline int cell_span(const TreeConfig& cfg, const DyadicIndex& I) {
    return 1 << (cfg.depth - I.level);
}

/// Value of the Haar function h_I on cell c. Convention: the left half of I
/// carries the positive sign. Zero off I; +-|I|^{-1/2} on the two halves.
inline double haar_on_cell(const TreeConfig& cfg, const DyadicIndex& I, int cell) {
    const int lo = first_cell(cfg, I);
    const int span = cell_span(cfg, I);
    if (cell < lo || cell >= lo + span) return 0.0;
    const double amp = std::sqrt(static_cast<double>(1 << I.level));
    return (cell - lo < span / 2) ? amp : -amp;
}

/// Constant value of h_I on a strictly smaller interval J (requires J inside
/// one half of I, which holds for any dyadic J strictly inside I).
inline double haar_on_interval(const DyadicIndex& I, const DyadicIndex& J) {
    if (!contains(I, J) || I == J)
        throw std::invalid_argument("haar_on_interval needs J strictly inside I");
    const double amp = std::sqrt(static_cast<double>(1 << I.level));
    const int half = J.pos >> (J.level - I.level - 1);  // 2*I.pos or 2*I.pos+1
    return (half == 2 * I.pos) ? amp : -amp;
}

/// All intervals at levels 0..depth-1 in breadth-first order.
inline std::vector<DyadicIndex> enumerate_intervals(const TreeConfig& cfg) {
    std::vector<DyadicIndex> out;
    out.reserve(cfg.coeff_count());
    for (int level = 0; level < cfg.depth; ++level)
        for (int pos = 0; pos < (1 << level); ++pos) out.push_back({level, pos});
    return out;
}

/// Step values of h_I over all cells.
std::vector<double> haar_step(const TreeConfig& cfg, const DyadicIndex& I);

}  // namespace opbmo
