#ifndef ACOPS_BUNDLE_AUCTION_HPP
#define ACOPS_BUNDLE_AUCTION_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "acops/auction_core.hpp"
#include "acops/errors.hpp"
#include "acops/random.hpp"
#include "acops/stats.hpp"
#include "acops/valuation.hpp"

namespace acops {

/// Dense row-major matrix; rows are bidders, columns are objects.
class ValueMatrix {
public:
    ValueMatrix() = default;
    ValueMatrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill)
    {
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    bool operator==(const ValueMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Grouping of K~ subcarriers into K disjoint bundles.
struct BundlePartition {
    std::vector<std::vector<std::size_t>> bundles;
    std::size_t total_subcarriers = 0;

    std::size_t num_bundles() const { return bundles.size(); }

    std::vector<std::size_t> cardinalities() const
    {
        std::vector<std::size_t> c;
        c.reserve(bundles.size());
        for (const auto& b : bundles)
            c.push_back(b.size());
        return c;
    }

    /// Every subcarrier in exactly one non-empty bundle.
    void validate() const
    {
        std::vector<char> seen(total_subcarriers, 0);
        std::size_t count = 0;
        for (const auto& b : bundles) {
            detail::require(!b.empty(), "bundle must not be empty");
            for (std::size_t k : b) {
                detail::require(k < total_subcarriers, "subcarrier index out of range");
                detail::require(!seen[k], "bundles must be disjoint");
                seen[k] = 1;
                ++count;
            }
        }
        detail::require(count == total_subcarriers, "bundle cardinalities must sum to K~");
    }
};

/// N_a contiguous bundles of size K~/N_a; the first (K~ mod N_a) bundles take
/// one extra subcarrier.
inline BundlePartition partition_uniform(std::size_t num_subcarriers, std::size_t num_bidders)
{
    detail::require(num_bidders >= 1, "need at least one bundle");
    detail::require(num_bidders <= num_subcarriers, "more bundles than subcarriers");
    BundlePartition p;
    p.total_subcarriers = num_subcarriers;
    p.bundles.resize(num_bidders);
    const std::size_t base = num_subcarriers / num_bidders;
    const std::size_t extra = num_subcarriers % num_bidders;
    std::size_t next = 0;
    for (std::size_t k = 0; k < num_bidders; ++k) {
        const std::size_t size = base + (k < extra ? 1 : 0);
        p.bundles[k].resize(size);
        std::iota(p.bundles[k].begin(), p.bundles[k].end(), next);
        next += size;
    }
    return p;
}

/// Same cardinalities as partition_uniform, with subcarriers drawn at random
/// instead of contiguously.
template <class Rng>
BundlePartition partition_shuffled(std::size_t num_subcarriers, std::size_t num_bidders, Rng& rng)
{
    auto p = partition_uniform(num_subcarriers, num_bidders);
    std::vector<std::size_t> order(num_subcarriers);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t next = 0;
    for (auto& b : p.bundles) {
        for (auto& k : b)
            k = order[next++];
        std::sort(b.begin(), b.end());
    }
    return p;
}

/// Comparison baseline (not an auction format): greedy value balancing that
/// hands each subcarrier, highest column-max value first, to the bundle whose
/// best-bidder value is currently lowest.
inline BundlePartition partition_value_balanced(const ValueMatrix& values, std::size_t num_bundles)
{
    const std::size_t k_total = values.cols();
    detail::require(num_bundles >= 1 && num_bundles <= k_total, "invalid bundle count");
    std::vector<double> best(k_total, 0.0);
    for (std::size_t j = 0; j < k_total; ++j)
        for (std::size_t i = 0; i < values.rows(); ++i)
            best[j] = std::max(best[j], values(i, j));
    std::vector<std::size_t> order(k_total);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return best[a] > best[b]; });

    BundlePartition p;
    p.total_subcarriers = k_total;
    p.bundles.resize(num_bundles);
    std::vector<double> load(num_bundles, 0.0);
    for (std::size_t n = 0; n < k_total; ++n) {
        std::size_t target = 0;
        // Fill empty bundles first so none stays empty.
        const std::size_t remaining = k_total - n;
        const auto empty = static_cast<std::size_t>(
            std::count_if(p.bundles.begin(), p.bundles.end(), [](const auto& b) { return b.empty(); }));
        if (empty == remaining) {
            target = static_cast<std::size_t>(
                std::find_if(p.bundles.begin(), p.bundles.end(), [](const auto& b) { return b.empty(); }) -
                p.bundles.begin());
        } else {
            target = static_cast<std::size_t>(std::min_element(load.begin(), load.end()) - load.begin());
        }
        p.bundles[target].push_back(order[n]);
        load[target] += best[order[n]];
    }
    for (auto& b : p.bundles)
        std::sort(b.begin(), b.end());
    return p;
}

/// Y[i][k] = sum of bidder i's per-subcarrier values over bundle k.
inline ValueMatrix bundle_values(const ValueMatrix& per_subcarrier, const BundlePartition& partition)
{
    detail::require(per_subcarrier.cols() == partition.total_subcarriers, "value matrix width differs from K~");
    ValueMatrix y(per_subcarrier.rows(), partition.num_bundles());
    for (std::size_t i = 0; i < per_subcarrier.rows(); ++i)
        for (std::size_t k = 0; k < partition.num_bundles(); ++k) {
            double s = 0.0;
            for (std::size_t j : partition.bundles[k])
                s += per_subcarrier(i, j);
            y(i, k) = s;
        }
    return y;
}

struct ObjectAward {
    std::optional<std::size_t> winner;
    double payment = 0.0;
};

struct MultiObjectOutcome {
    std::vector<ObjectAward> awards;
    std::vector<double> payoffs;
    double revenue = 0.0;

    std::size_t distinct_winners() const
    {
        std::vector<std::size_t> w;
        for (const auto& a : awards)
            if (a.winner)
                w.push_back(*a.winner);
        std::sort(w.begin(), w.end());
        return static_cast<std::size_t>(std::unique(w.begin(), w.end()) - w.begin());
    }
};

struct BundleAuctionOptions {
    /// Bidders that already won leave the remaining bundles; bundles are
    /// processed in index order and priced among the still-eligible bidders.
    bool one_bundle_per_bidder = false;
};

/// Simultaneous second-price auction of each column of `bids` as one object.
template <class Rng>
MultiObjectOutcome run_bundle_auction(const ValueMatrix& bids, const ValueMatrix& values, Rng& rng,
                                      const BundleAuctionOptions& options = {})
{
    detail::require(bids.rows() >= 1, "need at least one bidder");
    detail::require(bids.rows() == values.rows() && bids.cols() == values.cols(), "bid/value shapes differ");
    const std::size_t n = bids.rows();
    const std::size_t k_total = bids.cols();

    MultiObjectOutcome out;
    out.awards.resize(k_total);
    out.payoffs.assign(n, 0.0);
    std::vector<double> column(n);
    std::vector<char> eligible(options.one_bundle_per_bidder ? n : 0, 1);
    for (std::size_t k = 0; k < k_total; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            column[i] = bids(i, k);
            detail::require_non_negative(column[i], "bid");
        }
        const auto a = detail::award(std::span<const double>(column), rng, std::span<const char>(eligible));
        if (!a.winner)
            continue;
        out.awards[k] = {a.winner, a.second};
        out.payoffs[*a.winner] += values(*a.winner, k) - a.second;
        out.revenue += a.second;
        if (options.one_bundle_per_bidder)
            eligible[*a.winner] = 0;
    }
    return out;
}

/// Every subcarrier sold as its own object in one simultaneous auction.
template <class Rng>
MultiObjectOutcome run_naive_auction(const ValueMatrix& bids, const ValueMatrix& values, Rng& rng)
{
    return run_bundle_auction(bids, values, rng);
}

inline ValueMatrix truthful_bids(const ValueMatrix& values)
{
    ValueMatrix b = values;
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (double& x : b.row(i))
            x = best_response(x);
    return b;
}

struct FormatRevenue {
    RevenueEstimate naive;
    RevenueEstimate pure_bundle;
    RevenueEstimate mixed_bundle;
};

/// Revenue of naive, pure-bundle and uniform mixed-bundle second-price auctions
/// on identical per-subcarrier value draws (i.i.d. across subcarriers).
inline FormatRevenue compare_formats(const PrivateValueModel& model, std::size_t num_subcarriers, std::size_t num_bidders,
                                     std::size_t trials, std::uint64_t seed, unsigned threads = 0)
{
    model.validate();
    detail::require(num_bidders >= 1 && num_bidders <= num_subcarriers, "need 1 <= N_a <= K~");
    const auto mixed = partition_uniform(num_subcarriers, num_bidders);
    const auto pure = partition_uniform(num_subcarriers, 1);

    struct Acc {
        RunningStats naive, pure, mixed;
    };
    auto parts = run_blocks<Acc>(seed, trials, threads, [&](Engine& rng, std::size_t first, std::size_t last) {
        Acc acc;
        ValueMatrix x(num_bidders, num_subcarriers);
        for (std::size_t t = first; t < last; ++t) {
            for (std::size_t i = 0; i < num_bidders; ++i)
                for (double& v : x.row(i))
                    v = sample_private_value(model, rng);
            acc.naive.push(run_naive_auction(truthful_bids(x), x, rng).revenue);
            const auto yp = bundle_values(x, pure);
            acc.pure.push(run_bundle_auction(truthful_bids(yp), yp, rng).revenue);
            const auto ym = bundle_values(x, mixed);
            acc.mixed.push(run_bundle_auction(truthful_bids(ym), ym, rng).revenue);
        }
        return acc;
    });
    RunningStats naive, pure_s, mixed_s;
    for (const auto& p : parts) {
        naive.merge(p.naive);
        pure_s.merge(p.pure);
        mixed_s.merge(p.mixed);
    }
    auto est = [](const RunningStats& s) { return RevenueEstimate{s.mean(), s.stderr_of_mean(), s.count()}; };
    return {est(naive), est(pure_s), est(mixed_s)};
}

} // namespace acops

#endif
