#include "rankbench/common.hpp"

#include <numeric>

#include "rankbench/parallel.hpp"

namespace rankbench {

namespace {
std::atomic<int> g_workers{1};
}  // namespace

int worker_count() { return g_workers.load(); }

void set_worker_count(int workers) { g_workers = std::max(1, workers); }

std::vector<Index> random_permutation(Index n, Rng& rng) {
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  for (Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Index>(uniform_index(rng, static_cast<std::uint64_t>(i + 1)));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  return perm;
}

}  // namespace rankbench
