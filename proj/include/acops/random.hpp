#ifndef ACOPS_RANDOM_HPP
#define ACOPS_RANDOM_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

namespace acops {

using Engine = std::mt19937_64;

/// Seed used when neither `--seed` nor ACOPS_SEED is given.
inline constexpr std::uint64_t kDefaultSeed = 20091102ULL;

/// Trials are grouped into fixed-size blocks; each block owns one substream.
inline constexpr std::size_t kBlockSize = 4096;

/// Independent engine for stream `stream` of the master `seed`.
inline Engine substream(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x41434f50U};
    return Engine(seq);
}

inline unsigned resolve_threads(unsigned requested)
{
    if (requested != 0)
        return requested;
    return std::max(1U, std::thread::hardware_concurrency());
}

/// Runs `fn(engine, first, last)` over `trials` split into blocks of
/// `block_size` and returns the per-block partial results in block order. The
/// engine for block b is substream(seed, b), so the result is independent of
/// `threads`.
template <class Partial, class Fn>
std::vector<Partial> run_blocks(std::uint64_t seed, std::size_t trials, unsigned threads, Fn&& fn,
                                std::size_t block_size = kBlockSize)
{
    const std::size_t blocks = (trials + block_size - 1) / block_size;
    std::vector<Partial> out(blocks);
    auto work = [&](std::size_t b) {
        Engine rng = substream(seed, b);
        const std::size_t first = b * block_size;
        const std::size_t last = std::min(trials, first + block_size);
        out[b] = fn(rng, first, last);
    };

    const unsigned n_threads = std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(blocks, 1));
    if (n_threads <= 1) {
        for (std::size_t b = 0; b < blocks; ++b)
            work(b);
        return out;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t b = next++; b < blocks; b = next++)
                work(b);
        });
    pool.clear();
    return out;
}

} // namespace acops

#endif
