#pragma once
// Closed interval [lo, hi] used for certified enclosures of scalar quantities.
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gapkit {

struct Bound {
    double lo = 0.0;
    double hi = 0.0;

    Bound() = default;
    Bound(double l, double h) : lo(l), hi(h) {
        if (!(l <= h)) throw std::invalid_argument("Bound: lo > hi");
    }

    static Bound point(double v) { return Bound(v, v); }
    static Bound pad(double v, double eps) { return Bound(v - eps, v + eps); }

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double v) const { return lo <= v && v <= hi; }
    bool contains(const Bound& o) const { return lo <= o.lo && o.hi <= hi; }

    Bound clamp(double a, double b) const {
        return Bound(std::min(std::max(lo, a), b), std::min(std::max(hi, a), b));
    }

    Bound operator+(const Bound& o) const { return Bound(lo + o.lo, hi + o.hi); }
    Bound operator-(const Bound& o) const { return Bound(lo - o.hi, hi - o.lo); }
    Bound operator*(double s) const {
        return s >= 0 ? Bound(lo * s, hi * s) : Bound(hi * s, lo * s);
    }
};

inline Bound bmax(const Bound& a, const Bound& b) {
    return Bound(std::max(a.lo, b.lo), std::max(a.hi, b.hi));
}

inline Bound bmin(const Bound& a, const Bound& b) {
    return Bound(std::min(a.lo, b.lo), std::min(a.hi, b.hi));
}

// 1/x for an interval known to be strictly positive.
inline Bound binv_pos(const Bound& a) {
    if (a.lo <= 0) throw std::domain_error("binv_pos: interval not strictly positive");
    return Bound(1.0 / a.hi, 1.0 / a.lo);
}

}  // namespace gapkit
