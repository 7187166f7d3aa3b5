// Minimal tour: build a dynamic index over a few URLs, query it, update it.

#include <iostream>
#include <string>
#include <vector>

#include "wtrie/wtrie.hpp"

int main() {
  using namespace wtrie;

  std::vector<std::string> log = {
      "http://example.com/a", "http://example.com/b", "http://example.org/", "http://example.com/a",
      "ftp://files.example.com/x",
  };
  auto idx = string_index::build(log, variant_kind::dynamic_trie);

  std::cout << "access(2)                      = " << idx.access(2) << '\n';
  std::cout << "rank(example.com/a, 5)         = " << idx.rank("http://example.com/a", 5) << '\n';
  std::cout << "rank_prefix(http://example.com, 5) = " << idx.rank_prefix("http://example.com", 5) << '\n';
  std::cout << "select_prefix(http, 2)         = " << idx.select_prefix("http", 2) << '\n';

  idx.insert("http://example.com/c", 1);
  idx.erase(0);
  std::cout << "after insert/erase, access(0)  = " << idx.access(0) << '\n';

  for (const auto& e : idx.distinct(0, idx.size(), 7))
    std::cout << "  " << e.count << "  " << e.value << (e.complete ? "" : "...") << '\n';

  const auto rep = idx.report();
  std::cout << "n=" << rep.n << " distinct=" << rep.distinct << " H0=" << rep.h0 << " avg_height=" << rep.avg_height
            << '\n';

  // Raw bit strings work too, as long as the distinct values are prefix-free.
  std::vector<bit_string> bits;
  for (const char* s : {"0001", "0011", "0100", "00100", "0100"}) bits.push_back(bit_string::from_string(s));
  const auto wt = static_wavelet_trie::build(bits);
  std::cout << "root bitvector size = " << wt.bits(wt.root_node()).size() << '\n';
  return 0;
}
