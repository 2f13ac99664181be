#include "tclab/test_functions.hpp"

#include <cmath>
#include <cstdio>

#include "tclab/errors.hpp"

namespace tclab {

namespace {

struct Eval {
    double f;
    double df;
    double d2f;
};

Eval eval_bump(const TestFunction::Bump& b, double x) {
    const double u = (x - b.center) / b.radius;
    if (!(std::fabs(u) < 1.0)) return {0.0, 0.0, 0.0};
    const double w = 1.0 - u * u;
    const double phi = std::exp(-1.0 / w);
    const double g1 = -2.0 * u / (w * w);                       // d/du of -1/w
    const double g2 = -2.0 / (w * w) - 8.0 * u * u / (w * w * w);
    const double r = b.radius;
    return {phi, phi * g1 / r, phi * (g1 * g1 + g2) / (r * r)};
}

Eval eval_gauss_poly(const TestFunction::GaussPoly& g, double x) {
    const double a = -2.0 / (g.scale * g.scale);
    const double e = std::exp(0.5 * a * x * x);  // exp(-(x/s)^2)
    double p = 1.0, dp = 0.0, d2p = 0.0;
    const int d = g.degree;
    if (d >= 1) {
        p = std::pow(x, d);
        dp = d * std::pow(x, d - 1);
        d2p = (d >= 2) ? d * (d - 1) * std::pow(x, d - 2) : 0.0;
    }
    const double f = p * e;
    const double df = (dp + a * x * p) * e;
    const double d2f = (d2p + a * p + 2.0 * a * x * dp + a * a * x * x * p) * e;
    return {f, df, d2f};
}

Eval eval_term(const TestFunction::Term& term, double x) {
    Eval out = std::visit(
        [&](const auto& shape) {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, TestFunction::Bump>) return eval_bump(shape, x);
            else return eval_gauss_poly(shape, x);
        },
        term.shape);
    out.f *= term.weight;
    out.df *= term.weight;
    out.d2f *= term.weight;
    return out;
}

std::string format_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace

TestFunction TestFunction::bump(double center, double radius) {
    if (!(radius > 0.0)) throw InvalidArgument("TestFunction::bump: radius must be positive");
    TestFunction f;
    f.terms_.push_back({1.0, Bump{center, radius}});
    f.label_ = "bump(c=" + format_num(center) + ",r=" + format_num(radius) + ")";
    return f;
}

TestFunction TestFunction::gauss_poly(int degree, double scale) {
    if (degree < 0 || degree > 4) throw InvalidArgument("TestFunction::gauss_poly: degree must be in [0, 4]");
    if (!(scale > 0.0)) throw InvalidArgument("TestFunction::gauss_poly: scale must be positive");
    TestFunction f;
    f.terms_.push_back({1.0, GaussPoly{degree, scale}});
    f.label_ = "gauss_poly(d=" + std::to_string(degree) + ",s=" + format_num(scale) + ")";
    return f;
}

double TestFunction::value(double x) const {
    double acc = 0.0;
    for (const auto& t : terms_) acc += eval_term(t, x).f;
    return acc;
}

double TestFunction::d1(double x) const {
    double acc = 0.0;
    for (const auto& t : terms_) acc += eval_term(t, x).df;
    return acc;
}

double TestFunction::d2(double x) const {
    double acc = 0.0;
    for (const auto& t : terms_) acc += eval_term(t, x).d2f;
    return acc;
}

std::optional<std::pair<double, double>> TestFunction::compact_support() const {
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto& t : terms_) {
        const auto* b = std::get_if<Bump>(&t.shape);
        if (b == nullptr) return std::nullopt;
        const double l = b->center - b->radius;
        const double h = b->center + b->radius;
        if (first) {
            lo = l;
            hi = h;
            first = false;
        } else {
            lo = std::min(lo, l);
            hi = std::max(hi, h);
        }
    }
    if (first) return std::nullopt;
    return std::make_pair(lo, hi);
}

TestFunction TestFunction::operator+(const TestFunction& other) const {
    TestFunction out = *this;
    out.terms_.insert(out.terms_.end(), other.terms_.begin(), other.terms_.end());
    out.label_ = label_ + "+" + other.label_;
    return out;
}

TestFunction TestFunction::operator*(double a) const {
    TestFunction out = *this;
    for (auto& t : out.terms_) t.weight *= a;
    out.label_ = format_num(a) + "*" + label_;
    return out;
}

CutoffFunction::CutoffFunction(double t_on, double t_plateau_end, double t_off)
    : t_on_(t_on), t_plateau_end_(t_plateau_end), t_off_(t_off) {
    if (!(t_on >= 0.0)) throw InvalidArgument("CutoffFunction: t_on must be >= 0");
    if (!(t_plateau_end < t_off)) throw InvalidArgument("CutoffFunction: need t_plateau_end < t_off");
    ramp_ = t_off - t_plateau_end;
    plateau_start_ = (t_on == 0.0) ? 0.0 : t_on + ramp_;
    if (!(plateau_start_ <= t_plateau_end_))
        throw InvalidArgument("CutoffFunction: plateau would be empty (widen t_plateau_end)");
}

double CutoffFunction::value(double t) const {
    if (t < t_on_ || t > t_off_) return 0.0;
    if (t >= plateau_start_ && t <= t_plateau_end_) return 1.0;
    if (t > t_plateau_end_) {
        const double u = (t - t_plateau_end_) / ramp_;
        return (2.0 * u - 3.0) * u * u + 1.0;
    }
    const double v = (plateau_start_ - t) / ramp_;  // up-ramp, mirrored cubic
    return (2.0 * v - 3.0) * v * v + 1.0;
}

double CutoffFunction::derivative(double t) const {
    if (t < t_on_ || t > t_off_) return 0.0;
    if (t >= plateau_start_ && t <= t_plateau_end_) return 0.0;
    if (t > t_plateau_end_) {
        const double u = (t - t_plateau_end_) / ramp_;
        return (6.0 * u * u - 6.0 * u) / ramp_;
    }
    const double v = (plateau_start_ - t) / ramp_;
    return -(6.0 * v * v - 6.0 * v) / ramp_;
}

std::vector<TestFunction> default_dictionary() {
    std::vector<TestFunction> d;
    d.push_back(TestFunction::bump(0.0, 3.0));
    d.push_back(TestFunction::bump(-1.5, 2.0));
    d.push_back(TestFunction::bump(1.5, 2.0));
    d.push_back(TestFunction::bump(-3.0, 2.0));
    d.push_back(TestFunction::bump(3.0, 2.0));
    d.push_back(TestFunction::gauss_poly(0, 2.0));
    d.push_back(TestFunction::gauss_poly(1, 2.0));
    d.push_back(TestFunction::gauss_poly(2, 2.0));
    return d;
}

}  // namespace tclab
