#include <doctest.h>

#include <atomic>
#include <stdexcept>
#include <vector>

#include "flexneedlet/needlet_frame.hpp"
#include "flexneedlet/parallel.hpp"
#include "generators.hpp"

using namespace flexneedlet;

TEST_SUITE("parallel") {

TEST_CASE("every index runs once") {
  set_thread_count(4);
  std::vector<std::atomic<int>> hits(1001);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) CHECK(h.load() == 1);
  set_thread_count(0);
}

TEST_CASE("exceptions propagate") {
  set_thread_count(3);
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                    if (i == 7) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
  set_thread_count(0);
}

TEST_CASE("results do not depend on the thread count") {
  const NeedletSystem sys(WindowSystem(build_scales(ShiftModel::standard_geometric(2.0), 6)));
  gen::Rng rng(61);
  const auto f = gen::function(rng, 30);
  set_thread_count(1);
  const auto a = analyze(sys, f);
  const auto fa = synthesize(sys, a);
  set_thread_count(5);
  const auto b = analyze(sys, f);
  const auto fb = synthesize(sys, b);
  set_thread_count(0);
  CHECK(a.beta == b.beta);
  CHECK(fa.coeffs == fb.coeffs);
}

}
