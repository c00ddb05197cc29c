#ifndef MIXSEM_GRAPH_IO_HPP
#define MIXSEM_GRAPH_IO_HPP

#include "mixsem/graph.hpp"

#include <json.hpp>

#include <string>

namespace mixsem {

// Text format, one item per line, '#' starts a comment:
//   nodes: a b c d
//   a -> b
//   a <-> c
// Errors are DataError with a "line N:" prefix.
MixedGraph parse_graph_text(const std::string& text);
std::string format_graph_text(const MixedGraph& g);

// {"nodes":[...],"directed":[["a","b"],...],"bidirected":[["a","c"],...]}
MixedGraph graph_from_json(const nlohmann::json& j);
nlohmann::json graph_to_json(const MixedGraph& g);

/// Reads either format; JSON is detected by a leading '{'.
MixedGraph parse_graph(const std::string& text);
MixedGraph read_graph_file(const std::string& path);

/// "a -> b" or "a <-> b".
std::string format_edge(const MixedGraph& g, const EdgeRef& e);

}  // namespace mixsem

#endif  // MIXSEM_GRAPH_IO_HPP
