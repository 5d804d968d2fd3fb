#include "cem/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cem {

namespace {

// Dormand-Prince 5(4) tableau with the classic dense-output weights.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

bool out_of_bounds(const std::vector<double>& y, double bound) {
    for (double v : y)
        if (!std::isfinite(v) || std::abs(v) > bound) return true;
    return false;
}

struct Dense5 {
    // contiguous blocks: r1..r5, each dim entries
    std::vector<double> r;
    double t = 0, h = 0;

    void resize(std::size_t dim) { r.assign(5 * dim, 0.0); }

    double eval(std::size_t dim, std::size_t i, double tq) const {
        const double theta = (tq - t) / h;
        const double theta1 = 1.0 - theta;
        const double* r1 = r.data();
        const double* r2 = r1 + dim;
        const double* r3 = r2 + dim;
        const double* r4 = r3 + dim;
        const double* r5 = r4 + dim;
        return r1[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])));
    }
};

OdeStatus run_dopri5(const OdeRhs& rhs, std::vector<double>& y, double t0, double t1,
                     std::span<const double> output_times, const OdeEmit& emit,
                     const OdeOptions& opt) {
    const std::size_t dim = y.size();
    const double hmax = opt.max_step > 0 ? opt.max_step : (t1 - t0);
    const double uround = std::numeric_limits<double>::epsilon();

    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim);
    std::vector<double> ytmp(dim), ynew(dim), yerr(dim);
    Dense5 dense;
    dense.resize(dim);

    OdeStatus st;
    double t = t0;
    std::size_t next_out = 0;
    auto emit_upto = [&](double t_reached) {
        while (next_out < output_times.size() && output_times[next_out] <= t_reached + 1e-14 * std::max(1.0, std::abs(t_reached))) {
            const double tq = output_times[next_out];
            for (std::size_t i = 0; i < dim; ++i) ytmp[i] = dense.eval(dim, i, tq);
            emit(next_out, ytmp.data());
            ++next_out;
        }
    };

    // endpoints coincide: emit initial grid points at t0 directly
    while (next_out < output_times.size() && output_times[next_out] <= t0) {
        emit(next_out, y.data());
        ++next_out;
    }

    rhs(t, y.data(), k1.data());

    // initial step size guess
    double h;
    {
        double dnf = 0, dny = 0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double sk = opt.abs_tol + opt.rel_tol * std::abs(y[i]);
            dnf += (k1[i] / sk) * (k1[i] / sk);
            dny += (y[i] / sk) * (y[i] / sk);
        }
        h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
        h = std::min(h, hmax);
        for (std::size_t i = 0; i < dim; ++i) ytmp[i] = y[i] + h * k1[i];
        rhs(t + h, ytmp.data(), k2.data());
        double der2 = 0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double sk = opt.abs_tol + opt.rel_tol * std::abs(y[i]);
            der2 += ((k2[i] - k1[i]) / sk) * ((k2[i] - k1[i]) / sk);
        }
        der2 = std::sqrt(der2) / h;
        const double der12 = std::max(std::sqrt(dnf), der2);
        const double h1 = (der12 <= 1e-15) ? std::max(1e-6, h * 1e-3)
                                           : std::pow(0.01 / der12, 0.2);
        h = std::min({100.0 * h, h1, hmax});
        if (!std::isfinite(h) || h <= 0) h = 1e-6;
    }

    constexpr double safe = 0.9, beta = 0.04;
    constexpr double facc1 = 1.0 / 0.2, facc2 = 1.0 / 10.0;
    const double expo1 = 0.2 - beta * 0.75;
    double facold = 1e-4;
    bool last = false;

    while (true) {
        if (st.n_steps > opt.max_steps) {
            st.kind = OdeStatus::Kind::Failed;
            st.reason = "step limit exceeded";
            st.t_last = t;
            return st;
        }
        if (0.1 * std::abs(h) <= std::abs(t) * uround) {
            st.kind = OdeStatus::Kind::Diverged;
            st.reason = "step size underflow";
            st.t_last = t;
            return st;
        }
        if (t + 1.01 * h - t1 > 0.0) {
            h = t1 - t;
            last = true;
        }
        ++st.n_steps;

        for (std::size_t i = 0; i < dim; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        rhs(t + c2 * h, ytmp.data(), k2.data());
        for (std::size_t i = 0; i < dim; ++i)
            ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * h, ytmp.data(), k3.data());
        for (std::size_t i = 0; i < dim; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * h, ytmp.data(), k4.data());
        for (std::size_t i = 0; i < dim; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * h, ytmp.data(), k5.data());
        for (std::size_t i = 0; i < dim; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                  a65 * k5[i]);
        rhs(t + h, ytmp.data(), k6.data());
        for (std::size_t i = 0; i < dim; ++i)
            ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] +
                                  a76 * k6[i]);
        rhs(t + h, ynew.data(), k7.data());

        double err = 0;
        for (std::size_t i = 0; i < dim; ++i) {
            yerr[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                           e7 * k7[i]);
            const double sk =
                opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (yerr[i] / sk) * (yerr[i] / sk);
        }
        err = std::sqrt(err / static_cast<double>(dim));
        if (!std::isfinite(err)) err = 1e10;  // force rejection; underflow guard terminates

        const double fac11 = std::pow(err, expo1);
        double fac = fac11 / std::pow(facold, beta);
        fac = std::max(facc2, std::min(facc1, fac / safe));
        double hnew = h / fac;

        if (err <= 1.0) {
            facold = std::max(err, 1e-4);
            if (out_of_bounds(ynew, opt.divergence_bound)) {
                st.kind = OdeStatus::Kind::Diverged;
                st.reason = "state magnitude exceeded divergence bound";
                st.t_last = t;  // y still holds the last valid state
                return st;
            }
            // dense coefficients for [t, t+h]
            {
                double* r1 = dense.r.data();
                double* r2 = r1 + dim;
                double* r3 = r2 + dim;
                double* r4 = r3 + dim;
                double* r5 = r4 + dim;
                for (std::size_t i = 0; i < dim; ++i) {
                    const double ydiff = ynew[i] - y[i];
                    const double bspl = h * k1[i] - ydiff;
                    r1[i] = y[i];
                    r2[i] = ydiff;
                    r3[i] = bspl;
                    r4[i] = ydiff - h * k7[i] - bspl;
                    r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                 d6 * k6[i] + d7 * k7[i]);
                }
                dense.t = t;
                dense.h = h;
            }
            t += h;
            y.swap(ynew);
            k1.swap(k7);  // FSAL
            emit_upto(t);
            if (last) {
                st.t_last = t;
                return st;
            }
            if (std::abs(hnew) > hmax) hnew = hmax;
            h = hnew;
        } else {
            ++st.n_rejected;
            h = h / std::min(facc1, fac11 / safe);
            last = false;
        }
    }
}

OdeStatus run_rk4(const OdeRhs& rhs, std::vector<double>& y, double t0, double t1,
                  std::span<const double> output_times, const OdeEmit& emit,
                  const OdeOptions& opt) {
    if (opt.max_step <= 0.0)
        throw std::invalid_argument("rk4 needs max_step > 0");
    const std::size_t dim = y.size();
    const long n = std::max(1L, static_cast<long>(std::ceil((t1 - t0) / opt.max_step)));
    const double h = (t1 - t0) / static_cast<double>(n);

    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), ytmp(dim), ynew(dim), f_new(dim);
    OdeStatus st;
    std::size_t next_out = 0;
    while (next_out < output_times.size() && output_times[next_out] <= t0) {
        emit(next_out, y.data());
        ++next_out;
    }

    double t = t0;
    rhs(t, y.data(), k1.data());
    for (long step = 0; step < n; ++step) {
        ++st.n_steps;
        for (std::size_t i = 0; i < dim; ++i) ytmp[i] = y[i] + 0.5 * h * k1[i];
        rhs(t + 0.5 * h, ytmp.data(), k2.data());
        for (std::size_t i = 0; i < dim; ++i) ytmp[i] = y[i] + 0.5 * h * k2[i];
        rhs(t + 0.5 * h, ytmp.data(), k3.data());
        for (std::size_t i = 0; i < dim; ++i) ytmp[i] = y[i] + h * k3[i];
        rhs(t + h, ytmp.data(), k4.data());
        for (std::size_t i = 0; i < dim; ++i)
            ynew[i] = y[i] + h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);

        const double t_new = t0 + (step + 1) * (t1 - t0) / static_cast<double>(n);
        if (out_of_bounds(ynew, opt.divergence_bound)) {
            st.kind = OdeStatus::Kind::Diverged;
            st.reason = "state magnitude exceeded divergence bound";
            st.t_last = t;
            return st;
        }
        rhs(t_new, ynew.data(), f_new.data());
        // cubic Hermite dense output on [t, t_new]
        while (next_out < output_times.size() && output_times[next_out] <= t_new + 1e-14) {
            const double tq = output_times[next_out];
            const double th = (tq - t) / (t_new - t);
            const double h00 = (1 + 2 * th) * (1 - th) * (1 - th);
            const double h10 = th * (1 - th) * (1 - th);
            const double h01 = th * th * (3 - 2 * th);
            const double h11 = th * th * (th - 1);
            for (std::size_t i = 0; i < dim; ++i)
                ytmp[i] = h00 * y[i] + h10 * (t_new - t) * k1[i] + h01 * ynew[i] +
                          h11 * (t_new - t) * f_new[i];
            emit(next_out, ytmp.data());
            ++next_out;
        }
        t = t_new;
        y.swap(ynew);
        k1.swap(f_new);
    }
    st.t_last = t;
    return st;
}

}  // namespace

OdeStatus integrate_ode(const OdeRhs& rhs, std::vector<double>& y, double t0, double t1,
                        std::span<const double> output_times, const OdeEmit& emit,
                        const OdeOptions& opt) {
    if (!(t1 > t0)) throw std::invalid_argument("integration interval must be forward");
    for (std::size_t i = 1; i < output_times.size(); ++i)
        if (output_times[i] < output_times[i - 1])
            throw std::invalid_argument("output grid must be monotone");
    if (opt.rel_tol <= 0 || opt.abs_tol <= 0)
        throw std::invalid_argument("tolerances must be positive");
    if (opt.divergence_bound <= 1.0)
        throw std::invalid_argument("divergence bound must exceed 1");

    if (opt.method == "dopri5") return run_dopri5(rhs, y, t0, t1, output_times, emit, opt);
    if (opt.method == "rk4") return run_rk4(rhs, y, t0, t1, output_times, emit, opt);
    throw std::invalid_argument("unknown integrator method: " + opt.method);
}

}  // namespace cem
