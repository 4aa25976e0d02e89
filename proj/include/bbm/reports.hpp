#pragma once

#include <charconv>
#include <ostream>
#include <string>
#include <vector>

#include "bbm/grid.hpp"

namespace bbm {

namespace detail {

// Shortest round-trip decimal form; keeps emitted tables byte-stable.
inline std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string format_int(long long v) {
    char buf[24];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace detail

struct QuotientSample {
    int member_id = 0;
    double t = 0.0;
    double quotient = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
};

struct QuotientReport {
    std::string kind;
    std::vector<QuotientSample> samples; // sorted by (member_id, t)
    double sup_quotient = 0.0;
    double refinement_drift = 0.0; // relative change of sup under grid doubling
    double window_drift = 0.0;     // relative change of sup under window doubling
    bool window_drift_applicable = false;
};

inline void write_quotient_csv(std::ostream& out, const QuotientReport& rep) {
    out << "kind,member_id,t,quotient,numerator,denominator\n";
    for (const auto& s : rep.samples) {
        out << rep.kind << ',' << detail::format_int(s.member_id) << ','
            << detail::format_double(s.t) << ',' << detail::format_double(s.quotient) << ','
            << detail::format_double(s.numerator) << ',' << detail::format_double(s.denominator)
            << '\n';
    }
}

struct DecayFit {
    double t_min = 0.0, t_max = 0.0; // fitting window
    double slope = 0.0;              // log-log least squares
    double intercept = 0.0;
    double residual = 0.0;           // rms residual in log space
    double target_exponent = 0.0;
};

// Solution snapshots at every stride-th sampled time (the final time always
// included), one row per grid node.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj, int stride = 1) {
    if (stride < 1) stride = 1;
    out << "t,x,u\n";
    for (std::size_t j = 0; j < traj.size(); ++j) {
        if (j % static_cast<std::size_t>(stride) != 0 && j + 1 != traj.size()) continue;
        const Field& f = traj.states[j];
        for (int m = 0; m < f.size(); ++m) {
            out << detail::format_double(traj.times[j]) << ','
                << detail::format_double(f.grid.x(m)) << ','
                << detail::format_double(f.values[m].real()) << '\n';
        }
    }
}

} // namespace bbm
