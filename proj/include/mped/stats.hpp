#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "mped/errors.hpp"

namespace mped {

struct Summary {
    double mean = 0.0;
    double sd = 0.0;
    std::size_t n = 0;
};

inline Summary summarize(const std::vector<double> &v) {
    Summary s;
    s.n = v.size();
    if (v.empty()) return s;
    for (double x : v) s.mean += x;
    s.mean /= static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return s;
}

/// One-sided paired t-test of H1: mean(a - b) > 0. Returns the p-value.
/// Identical samples give 1; zero-spread positive differences give 0.
inline double paired_t_greater(const std::vector<double> &a, const std::vector<double> &b) {
    if (a.size() != b.size()) throw InvalidArgument("paired samples differ in length");
    if (a.size() < 2) throw InvalidArgument("paired test needs at least two pairs");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    const Summary s = summarize(d);
    if (s.sd == 0.0) return s.mean > 0.0 ? 0.0 : 1.0;
    const double t = s.mean / (s.sd / std::sqrt(static_cast<double>(s.n)));
    boost::math::students_t dist(static_cast<double>(s.n - 1));
    return boost::math::cdf(boost::math::complement(dist, t));
}

} // namespace mped
