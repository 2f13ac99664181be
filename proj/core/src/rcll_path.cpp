#include "tclab/rcll_path.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tclab/errors.hpp"

namespace tclab {

RcllPath::RcllPath(std::vector<double> breakpoints, std::vector<double> values, double horizon,
                   PathKind kind)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)), horizon_(horizon), kind_(kind) {
    if (breakpoints_.empty()) throw InvalidArgument("RcllPath: no breakpoints");
    if (breakpoints_.size() != values_.size())
        throw InvalidArgument("RcllPath: breakpoint/value count mismatch");
    if (breakpoints_.front() != 0.0) throw InvalidArgument("RcllPath: first breakpoint must be 0");
    if (!(horizon_ >= breakpoints_.back()))
        throw InvalidArgument("RcllPath: last breakpoint exceeds horizon");
    for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
        if (!(breakpoints_[i] > breakpoints_[i - 1]))
            throw InvalidArgument("RcllPath: breakpoints not strictly increasing at index " +
                                  std::to_string(i));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw InvalidArgument("RcllPath: non-finite value");
    }
}

std::size_t RcllPath::segment_index(double t) const {
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    return static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
}

double RcllPath::evaluate(double t) const {
    if (!(t >= 0.0) || !(t <= horizon_))
        throw OutOfRange("RcllPath::evaluate: t=" + std::to_string(t) + " outside [0, " +
                         std::to_string(horizon_) + "]");
    return values_[segment_index(t)];
}

double RcllPath::evaluate_snapped(double t, double snap_eps) const {
    if (t < 0.0 && t >= -snap_eps) t = 0.0;
    if (t > horizon_ && t <= horizon_ + snap_eps) t = horizon_;
    if (!(t >= 0.0) || !(t <= horizon_))
        throw OutOfRange("RcllPath::evaluate_snapped: t outside [0, horizon]");
    std::size_t idx = segment_index(t);
    if (idx + 1 < breakpoints_.size() && breakpoints_[idx + 1] - t <= snap_eps) ++idx;
    return values_[idx];
}

double RcllPath::occupation_time(double center, double radius, double upto) const {
    if (!(upto <= horizon_)) throw OutOfRange("occupation_time: upto exceeds horizon");
    if (upto < 0.0) throw OutOfRange("occupation_time: negative upto");
    double total = 0.0;
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
        const double start = breakpoints_[i];
        if (start >= upto) break;
        const double end = (i + 1 < breakpoints_.size()) ? std::min(breakpoints_[i + 1], upto) : upto;
        if (std::fabs(values_[i] - center) < radius) total += end - start;
    }
    return total;
}

}  // namespace tclab
