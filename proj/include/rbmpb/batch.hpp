#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "rbmpb/errors.hpp"
#include "rbmpb/rng.hpp"

namespace rbmpb {

// Random partition of particle indices into batches of size p, renewed at
// every time step. Stored as a shuffled permutation chunked into consecutive
// groups of p.
struct BatchPartition {
    std::vector<std::uint32_t> order;
    int batch_size = 2;
    std::uint64_t step_index = 0;

    std::size_t n_batches() const { return order.size() / static_cast<std::size_t>(batch_size); }

    const std::uint32_t* batch(std::size_t b) const {
        return order.data() + b * static_cast<std::size_t>(batch_size);
    }
};

// Uniform partition via a Fisher-Yates shuffle keyed by (seed, step), so the
// same step always produces the same batches regardless of worker count.
inline BatchPartition shuffle_batches(std::size_t n, int p, const RngSpec& rng,
                                      std::uint64_t step) {
    if (p < 2 || n % static_cast<std::size_t>(p) != 0)
        throw InvalidBatchSize("shuffle_batches: batch size must be >= 2 and divide N");
    BatchPartition part;
    part.batch_size = p;
    part.step_index = step;
    part.order.resize(n);
    std::iota(part.order.begin(), part.order.end(), 0u);
    const RngSpec shuffle_rng = rng.with_stream(kShuffleStream);
    for (std::size_t i = n - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(
            uniform_below(shuffle_rng, step, static_cast<std::uint32_t>(i), i + 1));
        std::swap(part.order[i], part.order[j]);
    }
    return part;
}

}
