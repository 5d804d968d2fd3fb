#pragma once

#include <string>
#include <vector>

#include "cem/trajectory.hpp"

namespace cem {

// Pointwise squared difference between an approximate and the reference
// trajectory for one observable. Points run over grid indices 1..M (the
// initial point is shared by construction).
struct ErrorSeries {
    std::vector<double> grid;
    std::vector<double> values;
    std::string observable;  // "22", "z", "x"
    int site = 0;            // 0 = mean over sites
    int order = 0;
    std::size_t total_points = 0;  // M
    std::size_t valid_points = 0;  // <= M; shorter when approx diverged
    bool truncated = false;
};

struct ErrorSummary {
    double total = 0.0;  // plain sum over the valid points
    std::size_t total_points = 0;
    std::size_t valid_points = 0;
    bool truncated = false;
    std::string observable;
    int site = 0;
    int order = 0;

    // cap reported alongside the prefix sum for diverged runs
    double saturated(double divergence_bound) const;
};

// site = 0 compares the site means (chain convention); site >= 1 compares a
// single site (annealer convention). Grids must match exactly.
ErrorSeries squared_difference(const Trajectory& approx, const Trajectory& exact,
                               const std::string& observable, int site, int n_sites);

ErrorSummary cumulative_error(const ErrorSeries& series);

// Final-time bit read-out for the annealer.
struct BitReadout {
    bool refused = false;
    std::string reason;
    std::vector<int> bits;  // a_1..a_k then b_1..b_l
    long long a = 0, b = 0;
    bool valid = false;
};

BitReadout read_bits(const Trajectory& traj, int k, int l, long long omega);

}  // namespace cem
