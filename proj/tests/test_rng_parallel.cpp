#include <doctest.h>

#include <cstdlib>
#include <set>
#include <stdexcept>
#include <vector>

#include "agcm/parallel.hpp"
#include "agcm/rng.hpp"

using namespace agcm;

TEST_CASE("substream seeds are deterministic and collision-free in practice") {
    CHECK(substream_seed(1, 2) == substream_seed(1, 2));
    CHECK(substream_seed(1, 2) != substream_seed(1, 3));
    CHECK(substream_seed(1, 2) != substream_seed(2, 2));

    std::set<std::uint64_t> seen;
    for (std::uint64_t master = 0; master < 10; ++master)
        for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(substream_seed(master, i));
    CHECK(seen.size() == 10000);

    // compile-time evaluable
    static_assert(substream_seed(42, 0) != substream_seed(42, 1));
}

TEST_CASE("engines from equal seeds produce equal streams") {
    Engine a = make_engine(substream_seed(7, 3));
    Engine b = make_engine(substream_seed(7, 3));
    for (int i = 0; i < 100; ++i) CHECK(a() == b());
}

TEST_CASE("AGCM_THREADS overrides the worker count") {
    setenv("AGCM_THREADS", "3", 1);
    CHECK(worker_count() == 3);
    setenv("AGCM_THREADS", "not a number", 1);
    CHECK(worker_count() >= 1);  // falls back to hardware concurrency
    setenv("AGCM_THREADS", "0", 1);
    CHECK(worker_count() >= 1);
    unsetenv("AGCM_THREADS");
    CHECK(worker_count() >= 1);
}

TEST_CASE("parallel_for_index covers every index exactly once") {
    for (const char* threads : {"1", "4"}) {
        setenv("AGCM_THREADS", threads, 1);
        std::vector<int> hits(1000, 0);
        parallel_for_index(hits.size(), [&](std::size_t i) { hits[i] += 1; });
        for (int h : hits) CHECK(h == 1);
    }
    unsetenv("AGCM_THREADS");
    parallel_for_index(0, [](std::size_t) { throw std::logic_error("must not run"); });
}

TEST_CASE("parallel_for_index rethrows the worker exception") {
    for (const char* threads : {"1", "4"}) {
        setenv("AGCM_THREADS", threads, 1);
        CHECK_THROWS_AS(parallel_for_index(64,
                                           [](std::size_t i) {
                                               if (i == 7) throw std::out_of_range("boom");
                                           }),
                        std::out_of_range);
    }
    unsetenv("AGCM_THREADS");
}
