#pragma once

// Chunked Monte Carlo: every chunk owns an RNG seeded from (seed, chunk index) and
// chunk results are reduced in index order, so results do not depend on the thread count.

#include "hyperform/core.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <random>
#include <thread>
#include <vector>

namespace hyperform {

inline int worker_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    int n = static_cast<int>(hw);
    if (const char* env = std::getenv("HYPERFORM_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1) n = std::min(n, cap);
    }
    return std::max(1, n);
}

inline std::mt19937_64 chunk_rng(std::uint64_t seed, std::uint64_t chunk) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32), 0x9e3779b9u};
    return std::mt19937_64(seq);
}

/// Runs body(i) for i in [0, count) on up to worker_count() threads.
template <class Body>
void parallel_for(int count, Body&& body) {
    int workers = std::min(worker_count(), count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) body(i);
        });
    for (auto& t : pool) t.join();
}

struct MCResult {
    CVec mean;
    CVec stderr_; // componentwise, real and imaginary parts combined in quadrature
    long samples = 0;
};

/// Mean of sample(rng) over `samples` draws; sample returns a CVec of fixed size.
template <class Sample>
MCResult monte_carlo(long samples, std::uint64_t seed, int dim, Sample&& sample, long chunk = 4096) {
    if (samples <= 0) throw ValidationError("monte_carlo: sample count must be positive");
    long chunks = (samples + chunk - 1) / chunk;
    std::vector<CVec> sums(chunks, CVec::Zero(dim));
    std::vector<Vec> sq_re(chunks, Vec::Zero(dim)), sq_im(chunks, Vec::Zero(dim));
    parallel_for(static_cast<int>(chunks), [&](int c) {
        auto rng = chunk_rng(seed, static_cast<std::uint64_t>(c));
        long lo = c * chunk, hi = std::min(samples, lo + chunk);
        for (long s = lo; s < hi; ++s) {
            CVec v = sample(rng);
            sums[c] += v;
            sq_re[c] += v.real().cwiseAbs2();
            sq_im[c] += v.imag().cwiseAbs2();
        }
    });
    CVec sum = CVec::Zero(dim);
    Vec s2r = Vec::Zero(dim), s2i = Vec::Zero(dim);
    for (long c = 0; c < chunks; ++c) {
        sum += sums[c];
        s2r += sq_re[c];
        s2i += sq_im[c];
    }
    double N = static_cast<double>(samples);
    MCResult r;
    r.samples = samples;
    r.mean = sum / N;
    r.stderr_ = CVec::Zero(dim);
    for (int i = 0; i < dim; ++i) {
        double vr = std::max(0.0, s2r(i) / N - std::pow(r.mean(i).real(), 2));
        double vi = std::max(0.0, s2i(i) / N - std::pow(r.mean(i).imag(), 2));
        r.stderr_(i) = std::sqrt((vr + vi) / std::max(1.0, N - 1.0));
    }
    return r;
}

} // namespace hyperform
