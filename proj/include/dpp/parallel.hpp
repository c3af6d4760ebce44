#pragma once

#include <cstdint>
#include <thread>
#include <vector>

#include "dpp/errors.hpp"
#include "dpp/rng.hpp"

namespace dpp {

// Monte Carlo map-reduce: n samples split across workers, one seeded stream
// per worker, accumulators merged in worker order. The result depends on
// (seed, workers) only, never on scheduling. Worker 0 runs on the calling
// thread when workers == 1.
//
// Work:    Accum work(int worker, std::int64_t count, Rng& rng)
// Combine: void combine(Accum& into, Accum&& part)
template <class Accum, class Work, class Combine>
Accum parallel_map_reduce(std::int64_t n, int workers, std::uint64_t seed,
                          Work work, Combine combine) {
    if (n < 0) throw PreconditionError("parallel_map_reduce: negative sample count");
    if (workers < 1) workers = 1;
    if (workers == 1 || n == 0) {
        Rng rng = make_stream(seed, 0);
        return work(0, n, rng);
    }
    std::vector<Accum> parts(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::int64_t base = n / workers, extra = n % workers;
    for (int wkr = 0; wkr < workers; ++wkr) {
        const std::int64_t count = base + (wkr < extra ? 1 : 0);
        pool.emplace_back([&, wkr, count] {
            Rng rng = make_stream(seed, static_cast<std::uint64_t>(wkr));
            parts[wkr] = work(wkr, count, rng);
        });
    }
    for (auto& t : pool) t.join();
    Accum result = std::move(parts[0]);
    for (int wkr = 1; wkr < workers; ++wkr) combine(result, std::move(parts[wkr]));
    return result;
}

} // namespace dpp
