#include "mpeig/rcm.hpp"

#include <algorithm>
#include <numeric>

namespace mpeig {

std::vector<index_t> rcm_ordering_pattern(std::size_t n,
                                          const std::vector<index_t>& row_ptr,
                                          const std::vector<index_t>& col_idx) {
  // degree excludes the diagonal
  std::vector<index_t> degree(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (index_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p)
      if (col_idx[p] != static_cast<index_t>(i)) ++degree[i];

  // Visiting candidate starts by ascending (degree, index) makes the first
  // unvisited one the minimum-degree vertex of its own component.
  std::vector<index_t> starts(n);
  std::iota(starts.begin(), starts.end(), index_t{0});
  std::sort(starts.begin(), starts.end(), [&](index_t a, index_t b) {
    return degree[a] != degree[b] ? degree[a] < degree[b] : a < b;
  });

  std::vector<char> visited(n, 0);
  std::vector<index_t> order;
  order.reserve(n);
  std::vector<index_t> queue;
  std::vector<index_t> nbrs;

  for (const index_t start : starts) {
    if (visited[start]) continue;
    const std::size_t comp_begin = order.size();
    queue.clear();
    queue.push_back(start);
    visited[start] = 1;
    for (std::size_t qh = 0; qh < queue.size(); ++qh) {
      const index_t u = queue[qh];
      order.push_back(u);
      nbrs.clear();
      for (index_t p = row_ptr[u]; p < row_ptr[u + 1]; ++p) {
        const index_t v = col_idx[p];
        if (v == u || visited[v]) continue;
        visited[v] = 1;
        nbrs.push_back(v);
      }
      std::sort(nbrs.begin(), nbrs.end(), [&](index_t a, index_t b) {
        return degree[a] != degree[b] ? degree[a] < degree[b] : a < b;
      });
      for (const index_t v : nbrs) queue.push_back(v);
    }
    // Cuthill-McKee reversed within the component; isolated vertices and
    // component order are unaffected, so diagonal matrices stay identity.
    std::reverse(order.begin() + comp_begin, order.end());
  }
  return order;
}

}  // namespace mpeig
