#include "mixsem/simulate.hpp"

#include <algorithm>
#include <numeric>

namespace mixsem {

namespace {

double signed_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> mag(lo, hi);
  std::bernoulli_distribution sign(0.5);
  const double x = mag(rng);
  return sign(rng) ? x : -x;
}

void fill_params(SemModel& m, std::mt19937_64& rng, const GeneratorOptions& opts) {
  m.params.lambda = Eigen::MatrixXd::Zero(m.p, m.p);
  m.params.omega = Eigen::MatrixXd::Zero(m.p, m.p);
  for (const auto& e : m.directed) {
    m.params.lambda(e.tail, e.head) = signed_uniform(rng, opts.lambda_min, opts.lambda_max);
  }
  for (const auto& e : m.bidirected) {
    m.params.omega(e.a, e.b) = m.params.omega(e.b, e.a) = signed_uniform(rng, opts.omega_min, opts.omega_max);
  }
  for (int v = 0; v < m.p; ++v) m.params.omega(v, v) = 1 + m.params.omega.row(v).cwiseAbs().sum();
}

}  // namespace

std::vector<std::string> numbered_names(int p) {
  std::vector<std::string> names;
  for (int i = 1; i <= p; ++i) names.push_back("x" + std::to_string(i));
  return names;
}

SemModel random_sem(int p, std::mt19937_64& rng, const GeneratorOptions& opts) {
  if (p < 1) throw std::invalid_argument("random_sem: p must be positive");
  SemModel m;
  m.p = p;
  m.names = numbered_names(p);
  std::vector<NodeId> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution dir(opts.p_directed);
  std::bernoulli_distribution bi(opts.p_bidirected);
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      const NodeId u = order[static_cast<std::size_t>(i)];
      const NodeId v = order[static_cast<std::size_t>(j)];
      if (dir(rng)) m.directed.push_back({u, v});
      if (bi(rng)) m.bidirected.push_back({std::min(u, v), std::max(u, v)});
    }
  }
  std::sort(m.directed.begin(), m.directed.end());
  std::sort(m.bidirected.begin(), m.bidirected.end());
  fill_params(m, rng, opts);
  return m;
}

SemModel random_params(const MixedGraph& g, std::mt19937_64& rng, const GeneratorOptions& opts) {
  if (!is_acyclic(g)) throw std::invalid_argument("random_params: graph is cyclic");
  SemModel m;
  m.p = g.size();
  m.names = g.names();
  m.directed = g.directed();
  m.bidirected = g.bidirected();
  fill_params(m, rng, opts);
  return m;
}

Eigen::MatrixXd sample(const SemModel& m, long n_samples, std::mt19937_64& rng) {
  Eigen::LLT<Eigen::MatrixXd> llt(m.params.omega);
  if (llt.info() != Eigen::Success) throw InvariantViolation("Omega is not positive definite");
  const Eigen::MatrixXd l = llt.matrixL();
  const Eigen::MatrixXd b = Eigen::MatrixXd::Identity(m.p, m.p) - m.params.lambda;
  // X^T = (I - Lambda)^{-T} eps^T
  const Eigen::MatrixXd mix = b.transpose().inverse() * l;
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd z(n_samples, m.p);
  for (long r = 0; r < n_samples; ++r) {
    for (int c = 0; c < m.p; ++c) z(r, c) = normal(rng);
  }
  return z * mix.transpose();
}

MixedGraph latent_projection(const SemModel& m, std::span<const NodeId> keep) {
  const auto p = static_cast<std::size_t>(m.p);
  std::vector<int> pos(p, -1);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const NodeId v = keep[i];
    if (v < 0 || static_cast<std::size_t>(v) >= p || pos[static_cast<std::size_t>(v)] >= 0) {
      throw std::invalid_argument("latent_projection: bad node list");
    }
    pos[static_cast<std::size_t>(v)] = static_cast<int>(i);
    names.push_back(m.names[static_cast<std::size_t>(v)]);
  }
  std::vector<std::vector<NodeId>> children(p);
  for (const auto& e : m.directed) children[static_cast<std::size_t>(e.tail)].push_back(e.head);

  // kept nodes reachable by a nonempty directed path through latent nodes only
  std::vector<std::vector<int>> reach(p);
  for (std::size_t x = 0; x < p; ++x) {
    std::vector<char> seen(p, 0);
    std::vector<NodeId> stack(children[x].begin(), children[x].end());
    while (!stack.empty()) {
      const auto y = static_cast<std::size_t>(stack.back());
      stack.pop_back();
      if (seen[y]) continue;
      seen[y] = 1;
      if (pos[y] >= 0) {
        reach[x].push_back(pos[y]);
      } else {
        stack.insert(stack.end(), children[y].begin(), children[y].end());
      }
    }
  }
  auto anchor = [&](std::size_t x) {
    return pos[x] >= 0 ? std::vector<int>{pos[x]} : reach[x];
  };

  MixedGraph g(names);
  auto add_bi = [&](int u, int v) {
    if (u != v && !g.has_bidirected(u, v)) g.add_bidirected(u, v);
  };
  for (std::size_t x = 0; x < p; ++x) {
    if (pos[x] >= 0) {
      for (int v : reach[x]) {
        if (!g.has_directed(pos[x], v)) g.add_directed(pos[x], v);
      }
    } else {
      for (int u : reach[x]) {
        for (int v : reach[x]) add_bi(u, v);
      }
    }
  }
  for (const auto& e : m.bidirected) {
    for (int u : anchor(static_cast<std::size_t>(e.a))) {
      for (int v : anchor(static_cast<std::size_t>(e.b))) add_bi(u, v);
    }
  }
  return g;
}

nlohmann::json sem_graph_to_json(const SemModel& m) {
  nlohmann::json j;
  j["nodes"] = m.names;
  j["directed"] = nlohmann::json::array();
  j["bidirected"] = nlohmann::json::array();
  for (const auto& e : m.directed) {
    j["directed"].push_back({m.names[static_cast<std::size_t>(e.tail)], m.names[static_cast<std::size_t>(e.head)]});
  }
  for (const auto& e : m.bidirected) {
    j["bidirected"].push_back({m.names[static_cast<std::size_t>(e.a)], m.names[static_cast<std::size_t>(e.b)]});
  }
  return j;
}

nlohmann::json sem_params_to_json(const SemModel& m) {
  nlohmann::json j;
  j["nodes"] = m.names;
  j["lambda"] = nlohmann::json::array();
  j["omega"] = nlohmann::json::array();
  for (const auto& e : m.directed) {
    j["lambda"].push_back({{"from", m.names[static_cast<std::size_t>(e.tail)]},
                           {"to", m.names[static_cast<std::size_t>(e.head)]},
                           {"value", m.params.lambda(e.tail, e.head)}});
  }
  for (int v = 0; v < m.p; ++v) {
    j["omega"].push_back({{"a", m.names[static_cast<std::size_t>(v)]},
                          {"b", m.names[static_cast<std::size_t>(v)]},
                          {"value", m.params.omega(v, v)}});
  }
  for (const auto& e : m.bidirected) {
    j["omega"].push_back({{"a", m.names[static_cast<std::size_t>(e.a)]},
                          {"b", m.names[static_cast<std::size_t>(e.b)]},
                          {"value", m.params.omega(e.a, e.b)}});
  }
  return j;
}

}  // namespace mixsem
