#include "cem/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace cem {

ErrorSeries squared_difference(const Trajectory& approx, const Trajectory& exact,
                               const std::string& observable, int site, int n_sites) {
    if (approx.grid.size() != exact.grid.size())
        throw std::invalid_argument("trajectories have different grid lengths");
    for (std::size_t i = 0; i < approx.grid.size(); ++i)
        if (approx.grid[i] != exact.grid[i])
            throw std::invalid_argument("trajectory grids differ; no resampling is done");
    if (!exact.completed())
        throw std::invalid_argument("reference trajectory did not complete");

    const auto a = approx.real_observable(observable, site, n_sites);
    const auto e = exact.real_observable(observable, site, n_sites);

    ErrorSeries s;
    s.observable = observable;
    s.site = site;
    s.total_points = approx.grid.size() - 1;
    const std::size_t valid =
        approx.completed() ? approx.grid.size() : approx.valid_points;
    s.valid_points = valid > 0 ? valid - 1 : 0;
    s.truncated = s.valid_points < s.total_points;
    s.grid.reserve(s.valid_points);
    s.values.reserve(s.valid_points);
    for (std::size_t i = 1; i < valid; ++i) {
        const double d = a[i] - e[i];
        s.grid.push_back(approx.grid[i]);
        s.values.push_back(d * d);
    }
    return s;
}

ErrorSummary cumulative_error(const ErrorSeries& series) {
    ErrorSummary out;
    out.observable = series.observable;
    out.site = series.site;
    out.order = series.order;
    out.total_points = series.total_points;
    out.valid_points = series.valid_points;
    out.truncated = series.truncated;
    for (double v : series.values) out.total += v;
    return out;
}

double ErrorSummary::saturated(double divergence_bound) const {
    if (!truncated) return total;
    return divergence_bound * divergence_bound * static_cast<double>(total_points);
}

BitReadout read_bits(const Trajectory& traj, int k, int l, long long omega) {
    BitReadout out;
    if (!traj.completed()) {
        out.refused = true;
        out.reason = "trajectory status is " + status_name(traj.status) +
                     "; bit read-out requires a completed sweep";
        return out;
    }
    const int n = k + l;
    out.bits.reserve(n);
    bool within_band = true;
    for (int m = 1; m <= n; ++m) {
        const double p = traj.at("s22[" + std::to_string(m) + "]").back().real();
        const int bit = p >= 0.5 ? 1 : 0;
        if (std::abs(p - bit) > 0.25) within_band = false;
        out.bits.push_back(bit);
    }
    out.a = 1;
    for (int i = 1; i <= k; ++i) out.a += (1LL << i) * out.bits[i - 1];
    out.b = 1;
    for (int j = 1; j <= l; ++j) out.b += (1LL << j) * out.bits[k + j - 1];
    out.valid = within_band && out.a * out.b == omega;
    return out;
}

}  // namespace cem
