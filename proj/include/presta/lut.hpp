#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "presta/common.hpp"

namespace presta {

// NLDM lookup table: index1 = input slew, index2 = output load,
// values[i][j] stored row-major.
struct Lut {
    std::vector<double> index1;
    std::vector<double> index2;
    std::vector<double> values;  // rows() * cols()

    size_t rows() const { return index1.size(); }
    size_t cols() const { return index2.size(); }
    double at(size_t i, size_t j) const { return values[i * cols() + j]; }
    double& at(size_t i, size_t j) { return values[i * cols() + j]; }

    bool operator==(const Lut&) const = default;

    bool valid() const {
        if (index1.empty() || index2.empty()) return false;
        if (values.size() != rows() * cols()) return false;
        for (size_t i = 1; i < index1.size(); ++i)
            if (!(index1[i] > index1[i - 1])) return false;
        for (size_t j = 1; j < index2.size(); ++j)
            if (!(index2[j] > index2[j - 1])) return false;
        return true;
    }
};

namespace detail {

// Position of x along the breakpoint axis: cell index i and fractional t
// so that value = (1-t)*f[i] + t*f[i+1]. Outside the grid the fraction
// extrapolates linearly from the outermost cell, clamped to 10x the edge
// cell span so degenerate tables cannot run away.
struct AxisPos {
    size_t i = 0;
    double t = 0.0;
};

inline AxisPos axis_position(const std::vector<double>& bp, double x) {
    AxisPos p;
    if (bp.size() == 1) return p;  // constant axis
    size_t n = bp.size();
    size_t i;
    if (x <= bp[0]) {
        i = 0;
    } else if (x >= bp[n - 1]) {
        i = n - 2;
    } else {
        i = static_cast<size_t>(std::upper_bound(bp.begin(), bp.end(), x) - bp.begin()) - 1;
        if (i > n - 2) i = n - 2;
    }
    double span = bp[i + 1] - bp[i];
    double t = (x - bp[i]) / span;
    t = std::clamp(t, -10.0, 11.0);
    p.i = i;
    p.t = t;
    return p;
}

}  // namespace detail

inline double lut_lookup(const Lut& lut, double x1, double x2) {
    if (!std::isfinite(x1) || !std::isfinite(x2))
        throw ArgError("lut_lookup: non-finite input");
    auto a = detail::axis_position(lut.index1, x1);
    auto b = detail::axis_position(lut.index2, x2);
    size_t i1 = lut.rows() == 1 ? 0 : a.i + 1;
    size_t j1 = lut.cols() == 1 ? 0 : b.i + 1;
    double f00 = lut.at(a.i, b.i);
    double f01 = lut.at(a.i, j1);
    double f10 = lut.at(i1, b.i);
    double f11 = lut.at(i1, j1);
    double lo = f00 * (1.0 - b.t) + f01 * b.t;
    double hi = f10 * (1.0 - b.t) + f11 * b.t;
    return lo * (1.0 - a.t) + hi * a.t;
}

namespace detail {

inline bool uniform_breakpoints(const std::vector<double>& bp) {
    if (bp.size() < 3) return true;
    double lo = bp.front(), hi = bp.back();
    double n = static_cast<double>(bp.size() - 1);
    for (size_t i = 1; i + 1 < bp.size(); ++i) {
        double expect = lo + (hi - lo) * (static_cast<double>(i) / n);
        double tol = 1e-12 * std::max(std::abs(lo), std::abs(hi));
        if (std::abs(bp[i] - expect) > tol) return false;
    }
    return true;
}

inline std::vector<double> uniform_axis(const std::vector<double>& src, size_t n) {
    std::vector<double> out(n);
    if (src.size() == 1 || n == 1) {
        // replicate a 1-long axis; a 1-long target takes the low endpoint
        for (size_t i = 0; i < n; ++i) out[i] = src.front();
        if (n > 1) {
            // cannot replicate a single breakpoint into a strictly
            // increasing axis; spread by unit steps
            for (size_t i = 0; i < n; ++i) out[i] = src.front() + static_cast<double>(i);
        }
        return out;
    }
    double lo = src.front(), hi = src.back();
    for (size_t i = 0; i < n; ++i)
        out[i] = lo + (hi - lo) * (static_cast<double>(i) / static_cast<double>(n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

}  // namespace detail

// Resample to target_rows x target_cols over the source index ranges,
// endpoints preserved, values bilinearly interpolated. A table already at
// the target shape with uniform breakpoints is returned unchanged.
inline Lut interpolate_lut(const Lut& lut, size_t target_rows, size_t target_cols) {
    if (!lut.valid()) throw ArgError("interpolate_lut: invalid source table");
    if (target_rows < 1 || target_cols < 1)
        throw ArgError("interpolate_lut: target shape must be positive");
    if (target_rows == lut.rows() && target_cols == lut.cols() &&
        detail::uniform_breakpoints(lut.index1) && detail::uniform_breakpoints(lut.index2))
        return lut;

    Lut out;
    out.index1 = detail::uniform_axis(lut.index1, target_rows);
    out.index2 = detail::uniform_axis(lut.index2, target_cols);
    out.values.resize(target_rows * target_cols);
    for (size_t i = 0; i < target_rows; ++i)
        for (size_t j = 0; j < target_cols; ++j)
            out.at(i, j) = lut_lookup(lut, out.index1[i], out.index2[j]);
    return out;
}

}  // namespace presta
