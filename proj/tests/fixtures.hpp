#ifndef MIXSEM_TEST_FIXTURES_HPP
#define MIXSEM_TEST_FIXTURES_HPP

#include "mixsem/graph_io.hpp"

namespace fixtures {

inline mixsem::MixedGraph g(const char* text) { return mixsem::parse_graph_text(text); }

inline mixsem::MixedGraph worked_example() { return g("nodes: a b c d\na -> b\na <-> c\na <-> d\nb <-> c\nb -> d\n"); }
inline mixsem::MixedGraph instrumental() { return g("nodes: a b c\na -> b\nb -> c\nb <-> c\n"); }
inline mixsem::MixedGraph triangle_dag() { return g("nodes: a b c\na -> b\nb -> c\na -> c\n"); }
inline mixsem::MixedGraph inconclusive_a() {
  return g("nodes: a b c d\na -> b\na <-> b\na -> c\na <-> c\na -> d\na <-> d\n");
}
inline mixsem::MixedGraph inconclusive_b() {
  return g("nodes: a b c d\na -> b\na <-> b\na -> c\na <-> c\na <-> d\nc -> d\n");
}
inline mixsem::MixedGraph inconclusive_c() {
  return g("nodes: a b c d\na -> b\na <-> b\na <-> c\nb -> c\na <-> d\nc -> d\n");
}
inline mixsem::MixedGraph inconclusive_d() {
  return g("nodes: a b c d\na -> c\na <-> c\na <-> b\nc -> b\na <-> d\nc -> d\n");
}
inline mixsem::MixedGraph two_bow_tetrad() {
  return g("nodes: a b c d\nb -> a\na <-> b\nb <-> c\nc -> d\nc <-> d\n");
}
// One member each of the clusters drawn with bows into a, b, a, a.
inline mixsem::MixedGraph bow_merge_a() { return g("nodes: a b c d\na -> b\na <-> b\nc -> a\nd -> a\n"); }
inline mixsem::MixedGraph bow_merge_b() { return g("nodes: a b c d\nb -> a\na <-> b\nc -> b\nd -> b\n"); }
inline mixsem::MixedGraph bow_merge_c() {
  return g("nodes: a b c d\nb -> a\na -> c\na <-> c\na -> d\na <-> d\n");
}
inline mixsem::MixedGraph bow_merge_d() {
  return g("nodes: a b c d\na -> c\nd -> a\na <-> d\nb -> d\nc <-> d\n");
}
inline mixsem::MixedGraph bow_merge_e() {
  return g("nodes: a b c d\na -> d\nc -> a\na <-> c\nb -> c\nc <-> d\n");
}
inline mixsem::MixedGraph saturated_dag(int n) {
  mixsem::MixedGraph s(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) s.add_directed(i, j);
  }
  return s;
}

}  // namespace fixtures

#endif
