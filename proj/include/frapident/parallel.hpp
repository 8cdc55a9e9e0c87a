#ifndef FRAPIDENT_PARALLEL_HPP
#define FRAPIDENT_PARALLEL_HPP

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace frapident {

// Hardware thread count, at least 1.
inline int default_threads() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

// Runs fn(chunk_index, begin, end) over [0, n) split into fixed-size chunks.
// The chunk layout depends only on (n, chunk_size), never on the thread
// count, so per-chunk partial results reduce deterministically.
inline void parallel_chunks(std::size_t n, std::size_t chunk_size, int n_threads,
                            const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    if (chunk_size == 0) chunk_size = 1;
    const std::size_t n_chunks = (n + chunk_size - 1) / chunk_size;
    if (n_threads <= 1 || n_chunks == 1) {
        for (std::size_t c = 0; c < n_chunks; ++c)
            fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
        }
    };
    std::vector<std::thread> threads;
    const int n_workers = std::min<std::size_t>(n_threads, n_chunks);
    threads.reserve(n_workers - 1);
    for (int i = 1; i < n_workers; ++i) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();
}

// Element-wise parallel map: fn(i) for i in [0, n). Each call must write only
// its own slot.
inline void parallel_for(std::size_t n, int n_threads,
                         const std::function<void(std::size_t)>& fn) {
    const std::size_t chunk = (n_threads <= 1) ? n : std::max<std::size_t>(1, n / (4 * n_threads));
    parallel_chunks(n, chunk, n_threads,
                    [&](std::size_t, std::size_t b, std::size_t e) {
                        for (std::size_t i = b; i < e; ++i) fn(i);
                    });
}

inline std::size_t chunk_count(std::size_t n, std::size_t chunk_size) {
    return chunk_size == 0 ? n : (n + chunk_size - 1) / chunk_size;
}

}  // namespace frapident

#endif
