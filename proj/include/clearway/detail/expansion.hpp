#pragma once

// Floating-point expansion arithmetic (sums of non-overlapping doubles) used as the
// exact fallback of the filtered orientation and in-circle predicates.

#include <cmath>
#include <limits>
#include <vector>

namespace clearway::detail {

inline void fast_two_sum(double a, double b, double& x, double& y)
{
    x = a + b;
    const double bvirt = x - a;
    y = b - bvirt;
}

inline void two_sum(double a, double b, double& x, double& y)
{
    x = a + b;
    const double bvirt = x - a;
    const double avirt = x - bvirt;
    y = (a - avirt) + (b - bvirt);
}

inline void two_diff(double a, double b, double& x, double& y)
{
    x = a - b;
    const double bvirt = a - x;
    const double avirt = x + bvirt;
    y = (a - avirt) + (bvirt - b);
}

inline void two_product(double a, double b, double& x, double& y)
{
    x = a * b;
    y = std::fma(a, b, -x);
}

/// Exact value held as a sum of non-overlapping components, least significant first.
/// Never empty; zero is represented as {0.0}.
class Expansion {
public:
    Expansion() : terms_{0.0} {}
    explicit Expansion(double v) : terms_{v} {}

    static Expansion difference(double a, double b)
    {
        double x, y;
        two_diff(a, b, x, y);
        Expansion e;
        e.terms_.clear();
        if(y != 0.0)
            e.terms_.push_back(y);
        e.terms_.push_back(x);
        return e;
    }

    int sign() const
    {
        const double top = terms_.back();
        return (top > 0.0) - (top < 0.0);
    }

    double estimate() const
    {
        double s = 0.0;
        for(double t : terms_)
            s += t;
        return s;
    }

    friend Expansion operator+(const Expansion& e, const Expansion& f) { return sum(e, f); }

    friend Expansion operator-(const Expansion& e, const Expansion& f)
    {
        Expansion neg = f;
        for(double& t : neg.terms_)
            t = -t;
        return sum(e, neg);
    }

    friend Expansion operator*(const Expansion& e, const Expansion& f)
    {
        Expansion acc = scale(e, f.terms_[0]);
        for(std::size_t i = 1; i < f.terms_.size(); ++i)
            acc = sum(acc, scale(e, f.terms_[i]));
        return acc;
    }

private:
    // Shewchuk's fast_expansion_sum_zeroelim.
    static Expansion sum(const Expansion& e, const Expansion& f)
    {
        const auto& a = e.terms_;
        const auto& b = f.terms_;
        Expansion out;
        auto& h = out.terms_;
        h.clear();
        h.reserve(a.size() + b.size());

        std::size_t ia = 0, ib = 0;
        double q, qnew, hh;
        auto take_a = [&] {
            const double bn = b[ib];
            const double an = a[ia];
            return (bn > an) == (bn > -an);
        };
        if(take_a())
            q = a[ia++];
        else
            q = b[ib++];

        if(ia < a.size() && ib < b.size()) {
            if(take_a())
                fast_two_sum(a[ia++], q, qnew, hh);
            else
                fast_two_sum(b[ib++], q, qnew, hh);
            q = qnew;
            if(hh != 0.0)
                h.push_back(hh);
            while(ia < a.size() && ib < b.size()) {
                if(take_a())
                    two_sum(q, a[ia++], qnew, hh);
                else
                    two_sum(q, b[ib++], qnew, hh);
                q = qnew;
                if(hh != 0.0)
                    h.push_back(hh);
            }
        }
        while(ia < a.size()) {
            two_sum(q, a[ia++], qnew, hh);
            q = qnew;
            if(hh != 0.0)
                h.push_back(hh);
        }
        while(ib < b.size()) {
            two_sum(q, b[ib++], qnew, hh);
            q = qnew;
            if(hh != 0.0)
                h.push_back(hh);
        }
        if(q != 0.0 || h.empty())
            h.push_back(q);
        return out;
    }

    // Shewchuk's scale_expansion_zeroelim.
    static Expansion scale(const Expansion& e, double b)
    {
        const auto& a = e.terms_;
        Expansion out;
        auto& h = out.terms_;
        h.clear();
        h.reserve(2 * a.size());

        double q, hh;
        two_product(a[0], b, q, hh);
        if(hh != 0.0)
            h.push_back(hh);
        for(std::size_t i = 1; i < a.size(); ++i) {
            double p1, p0, s;
            two_product(a[i], b, p1, p0);
            two_sum(q, p0, s, hh);
            if(hh != 0.0)
                h.push_back(hh);
            fast_two_sum(p1, s, q, hh);
            if(hh != 0.0)
                h.push_back(hh);
        }
        if(q != 0.0 || h.empty())
            h.push_back(q);
        return out;
    }

    std::vector<double> terms_;
};

inline constexpr double kEpsilon = std::numeric_limits<double>::epsilon() / 2; // 2^-53
inline constexpr double kOrientErrBound = (3.0 + 16.0 * kEpsilon) * kEpsilon;
inline constexpr double kInCircleErrBound = (10.0 + 96.0 * kEpsilon) * kEpsilon;

} // namespace clearway::detail
