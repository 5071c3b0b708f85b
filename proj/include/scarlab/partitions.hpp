#pragma once

// Non-crossing set partitions of {0, ..., q-1}. Blocks are kept sorted by
// smallest element, elements ascending; the list is ordered by the lexicographic
// restricted-growth string of the partition.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace scarlab {

using SetPartition = std::vector<std::vector<int>>;

inline std::uint64_t catalan(int q) {
  std::uint64_t c = 1;
  for (int k = 0; k < q; ++k) c = c * 2 * (2 * k + 1) / (k + 2);
  return c;
}

// A partition crosses when p < r < s < t with {p, s} in one block and
// {r, t} in another.
inline bool is_noncrossing(const SetPartition& blocks) {
  const int nb = static_cast<int>(blocks.size());
  for (int x = 0; x < nb; ++x)
    for (int y = 0; y < nb; ++y) {
      if (x == y) continue;
      for (int p : blocks[x])
        for (int s : blocks[x]) {
          if (s <= p) continue;
          for (int r : blocks[y])
            if (p < r && r < s)
              for (int t : blocks[y])
                if (t > s) return false;
        }
    }
  return true;
}

inline std::vector<SetPartition> noncrossing_partitions(int q) {
  if (q < 1 || q > 8)
    throw std::invalid_argument("partition order must lie in [1, 8]");
  std::vector<SetPartition> out;
  std::vector<int> rgs(static_cast<std::size_t>(q), 0);
  // Enumerate restricted growth strings: rgs[i] <= 1 + max(rgs[0..i-1]).
  while (true) {
    int nb = 0;
    for (int v : rgs) nb = std::max(nb, v + 1);
    SetPartition blocks(static_cast<std::size_t>(nb));
    for (int i = 0; i < q; ++i)
      blocks[static_cast<std::size_t>(rgs[static_cast<std::size_t>(i)])]
          .push_back(i);
    if (is_noncrossing(blocks)) out.push_back(std::move(blocks));

    int i = q - 1;
    for (; i > 0; --i) {
      int mx = 0;
      for (int j = 0; j < i; ++j)
        mx = std::max(mx, rgs[static_cast<std::size_t>(j)]);
      if (rgs[static_cast<std::size_t>(i)] < mx + 1) break;
    }
    if (i == 0) break;
    ++rgs[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < q; ++j) rgs[static_cast<std::size_t>(j)] = 0;
  }
  return out;
}

}  // namespace scarlab
