#include "fracns/util.hpp"

#include <cstdlib>
#include <thread>
#include <vector>

namespace fracns {

int thread_count() {
    static int cached = [] {
        const char* env = std::getenv("FRACNS_THREADS");
        if (!env) return 1;
        int t = std::atoi(env);
        if (t < 1) t = 1;
        int hw = int(std::thread::hardware_concurrency());
        if (hw > 0 && t > hw) t = hw;
        return t;
    }();
    return cached;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    int nt = thread_count();
    if (nt <= 1 || count < 1024) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    std::size_t chunk = (count + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
        std::size_t lo = t * chunk, hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 step
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace fracns
