#include "mixsem/graph_io.hpp"

#include "mixsem/scalar.hpp"

#include <fstream>
#include <sstream>

namespace mixsem {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw DataError("line " + std::to_string(line) + ": " + msg);
}

NodeId lookup(const MixedGraph& g, const std::string& name, int line) {
  const NodeId v = g.find(name);
  if (v < 0) fail(line, "unknown node '" + name + "'");
  return v;
}

void add_edge_checked(MixedGraph& g, NodeId u, NodeId v, bool bidirected, int line) {
  if (u == v) fail(line, "self-loop on '" + g.name(u) + "'");
  if (bidirected ? g.has_bidirected(u, v) : g.has_directed(u, v)) {
    fail(line, "duplicate edge " + g.name(u) + (bidirected ? " <-> " : " -> ") + g.name(v));
  }
  if (bidirected) {
    g.add_bidirected(u, v);
  } else {
    g.add_directed(u, v);
  }
}

}  // namespace

MixedGraph parse_graph_text(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  bool have_nodes = false;
  MixedGraph g;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    if (s.rfind("nodes:", 0) == 0) {
      if (have_nodes) fail(line, "repeated nodes declaration");
      std::istringstream ns(s.substr(6));
      std::vector<std::string> names;
      for (std::string name; ns >> name;) {
        if (std::find(names.begin(), names.end(), name) != names.end()) {
          fail(line, "duplicate node '" + name + "'");
        }
        names.push_back(name);
      }
      if (names.empty()) fail(line, "empty nodes declaration");
      g = MixedGraph(std::move(names));
      have_nodes = true;
      continue;
    }
    if (!have_nodes) fail(line, "edge before nodes declaration");
    std::istringstream es(s);
    std::string a, op, b, extra;
    if (!(es >> a >> op >> b) || (es >> extra)) fail(line, "expected 'x -> y' or 'x <-> y'");
    if (op != "->" && op != "<->") fail(line, "unknown edge operator '" + op + "'");
    add_edge_checked(g, lookup(g, a, line), lookup(g, b, line), op == "<->", line);
  }
  if (!have_nodes) fail(line, "missing nodes declaration");
  return g;
}

std::string format_edge(const MixedGraph& g, const EdgeRef& e) {
  return g.name(e.u) + (e.kind == EdgeRef::Kind::Directed ? " -> " : " <-> ") + g.name(e.v);
}

std::string format_graph_text(const MixedGraph& g) {
  std::string out = "nodes:";
  for (const auto& n : g.names()) out += " " + n;
  out += "\n";
  for (const auto& e : g.edges()) out += format_edge(g, e) + "\n";
  return out;
}

MixedGraph graph_from_json(const nlohmann::json& j) {
  try {
    std::vector<std::string> names = j.at("nodes").get<std::vector<std::string>>();
    for (std::size_t i = 0; i < names.size(); ++i) {
      for (std::size_t k = 0; k < i; ++k) {
        if (names[i] == names[k]) throw DataError("duplicate node '" + names[i] + "'");
      }
    }
    MixedGraph g(std::move(names));
    auto edges = [&](const char* key, bool bidirected) {
      if (!j.contains(key)) return;
      int idx = 0;
      for (const auto& e : j.at(key)) {
        ++idx;
        const auto pair = e.get<std::vector<std::string>>();
        if (pair.size() != 2) throw DataError(std::string(key) + " entry must have two nodes");
        // JSON has no lines; report the entry index instead.
        auto where = [&](const std::string& m) {
          return DataError(std::string(key) + " entry " + std::to_string(idx) + ": " + m);
        };
        const NodeId u = g.find(pair[0]);
        const NodeId v = g.find(pair[1]);
        if (u < 0 || v < 0) throw where("unknown node");
        if (u == v) throw where("self-loop on '" + pair[0] + "'");
        if (bidirected ? g.has_bidirected(u, v) : g.has_directed(u, v)) throw where("duplicate edge");
        if (bidirected) {
          g.add_bidirected(u, v);
        } else {
          g.add_directed(u, v);
        }
      }
    };
    edges("directed", false);
    edges("bidirected", true);
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed graph JSON: ") + e.what());
  }
}

nlohmann::json graph_to_json(const MixedGraph& g) {
  nlohmann::json j;
  j["nodes"] = g.names();
  j["directed"] = nlohmann::json::array();
  j["bidirected"] = nlohmann::json::array();
  for (const auto& e : g.directed()) j["directed"].push_back({g.name(e.tail), g.name(e.head)});
  for (const auto& e : g.bidirected()) j["bidirected"].push_back({g.name(e.a), g.name(e.b)});
  return j;
}

MixedGraph parse_graph(const std::string& text) {
  const std::string t = trim(text);
  if (!t.empty() && t.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(t);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(std::string("malformed graph JSON: ") + e.what());
    }
    return graph_from_json(j);
  }
  return parse_graph_text(text);
}

MixedGraph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open graph file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_graph(buf.str());
}

}  // namespace mixsem
