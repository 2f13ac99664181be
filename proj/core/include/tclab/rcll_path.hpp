#pragma once

#include <vector>

namespace tclab {

enum class PathKind {
    PiecewiseConstant,  // jump processes, breakpoints are exact event times
    MeshSampled,        // diffusions sampled on a mesh, step-evaluated between points
};

// A right-continuous path with left limits on [0, horizon], stored as
// breakpoints plus values. Evaluation anywhere is the value at the greatest
// breakpoint <= t. Immutable after construction; safe to share across
// threads.
class RcllPath {
public:
    RcllPath(std::vector<double> breakpoints, std::vector<double> values, double horizon,
             PathKind kind);

    // Right-continuous step evaluation; throws OutOfRange outside [0, horizon].
    double evaluate(double t) const;

    // As evaluate, but times within snap_eps of a breakpoint resolve to that
    // breakpoint first. Used where t carries quadrature rounding.
    double evaluate_snapped(double t, double snap_eps) const;

    // Lebesgue time in [0, upto] the step path spends at distance < radius
    // from center.
    double occupation_time(double center, double radius, double upto) const;

    // Index of the greatest breakpoint <= t.
    std::size_t segment_index(double t) const;

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& values() const { return values_; }
    double horizon() const { return horizon_; }
    PathKind kind() const { return kind_; }
    std::size_t size() const { return breakpoints_.size(); }

private:
    std::vector<double> breakpoints_;
    std::vector<double> values_;
    double horizon_;
    PathKind kind_;
};

}  // namespace tclab
