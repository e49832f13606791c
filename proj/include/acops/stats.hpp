#ifndef ACOPS_STATS_HPP
#define ACOPS_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>

namespace acops {

/// Streaming mean/variance (Welford) with an order-dependent but deterministic merge.
class RunningStats {
public:
    void push(double x)
    {
        ++n_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_);
    }

    void merge(const RunningStats& other)
    {
        if (other.n_ == 0)
            return;
        if (n_ == 0) {
            *this = other;
            return;
        }
        const double n = static_cast<double>(n_ + other.n_);
        const double delta = other.mean_ - mean_;
        mean_ += delta * static_cast<double>(other.n_) / n;
        m2_ += other.m2_ + delta * delta * static_cast<double>(n_) * static_cast<double>(other.n_) / n;
        n_ += other.n_;
    }

    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double stddev() const { return std::sqrt(variance()); }
    double stderr_of_mean() const { return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

template <class Range>
RunningStats merge_all(const Range& parts)
{
    RunningStats total;
    for (const auto& p : parts)
        total.merge(p);
    return total;
}

struct Proportion {
    std::uint64_t successes = 0;
    std::uint64_t trials = 0;

    double value() const { return trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0; }
    /// Binomial standard error sqrt(p(1-p)/n) at a known reference probability.
    double sigma_at(double p) const { return trials ? std::sqrt(p * (1.0 - p) / static_cast<double>(trials)) : 0.0; }
};

struct Interval {
    double low;
    double high;
};

/// 95% Wilson score interval.
inline Interval wilson_interval(const Proportion& p, double z = 1.959963984540054)
{
    if (p.trials == 0)
        return {0.0, 1.0};
    const double n = static_cast<double>(p.trials);
    const double phat = p.value();
    const double denom = 1.0 + z * z / n;
    const double centre = (phat + z * z / (2.0 * n)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

} // namespace acops

#endif
