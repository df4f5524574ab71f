#include "cgas/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "cgas/common.hpp"

namespace cgas {

namespace {

using Node = std::int32_t;
using Arc = std::int64_t;

// Primal network simplex for the uncapacitated transportation problem, after the
// LEMON implementation: an artificial root joined to every node gives the initial
// strongly feasible tree; the tree is kept as parent/thread/successor-count arrays.
class NetworkSimplex {
 public:
  NetworkSimplex(std::span<const double> supply, std::span<const double> demand, const CostMatrix& cost)
      : m_(static_cast<Node>(supply.size())),
        n_(static_cast<Node>(demand.size())),
        node_num_(m_ + n_),
        arc_num_(static_cast<Arc>(m_) * n_),
        cost_(cost.data.data()) {
    const Node all_nodes = node_num_ + 1;
    supply_.assign(all_nodes, 0.0);
    pi_.assign(all_nodes, 0.0);
    parent_.assign(all_nodes, -1);
    pred_.assign(all_nodes, -1);
    thread_.assign(all_nodes, 0);
    rev_thread_.assign(all_nodes, 0);
    succ_num_.assign(all_nodes, 0);
    last_succ_.assign(all_nodes, 0);
    forward_.assign(all_nodes, 0);
    art_src_.assign(node_num_, 0);
    art_tgt_.assign(node_num_, 0);
    art_cost_.assign(node_num_, 0.0);
    flow_.assign(static_cast<std::size_t>(arc_num_ + node_num_), 0.0);
    state_.assign(static_cast<std::size_t>(arc_num_ + node_num_), kLower);
    for (Node i = 0; i < m_; ++i) supply_[i] = supply[i];
    for (Node j = 0; j < n_; ++j) supply_[m_ + j] = -demand[j];
  }

  std::size_t run() {
    KahanSum total;
    for (Node u = 0; u < node_num_; ++u) total += supply_[u];
    const double imbalance = total.value();
    if (std::fabs(imbalance) > 1e-12) throw std::invalid_argument("supply and demand totals differ");

    double max_cost = 0.0;
    for (Arc a = 0; a < arc_num_; ++a) max_cost = std::max(max_cost, cost_[a]);
    const double art_cost = (max_cost + 1.0) * node_num_;

    const Node root = node_num_;
    parent_[root] = -1;
    pred_[root] = -1;
    thread_[root] = 0;
    rev_thread_[0] = root;
    succ_num_[root] = node_num_ + 1;
    last_succ_[root] = root - 1;
    supply_[root] = -imbalance;
    pi_[root] = 0.0;

    for (Node u = 0; u < node_num_; ++u) {
      const Arc e = arc_num_ + u;
      parent_[u] = root;
      pred_[u] = e;
      thread_[u] = u + 1;
      rev_thread_[u + 1] = u;
      succ_num_[u] = 1;
      last_succ_[u] = u;
      state_[e] = kTree;
      if (supply_[u] >= 0.0) {
        forward_[u] = 1;
        pi_[u] = 0.0;
        art_src_[u] = u;
        art_tgt_[u] = root;
        flow_[e] = supply_[u];
        art_cost_[u] = 0.0;
      } else {
        forward_[u] = 0;
        pi_[u] = art_cost;
        art_src_[u] = root;
        art_tgt_[u] = u;
        flow_[e] = -supply_[u];
        art_cost_[u] = art_cost;
      }
    }

    next_arc_ = 0;
    block_size_ = std::max<Arc>(static_cast<Arc>(std::sqrt(static_cast<double>(arc_num_))), 10);

    initial_pivots();
    std::size_t pivots = 0;
    while (find_entering_arc()) {
      ++pivots;
      find_join_node();
      const bool change = find_leaving_arc();
      if (delta_ >= kInf) throw std::runtime_error("transport problem is unbounded");
      change_flow(change);
      if (change) {
        update_tree();
        update_potential();
      }
    }
    for (Node u = 0; u < node_num_; ++u) {
      const Arc e = arc_num_ + u;
      if (std::fabs(flow_[e]) > 1e-11) throw std::runtime_error("transport problem is infeasible");
      flow_[e] = 0.0;
    }
    return pivots;
  }

  double flow(Arc a) const { return flow_[a]; }
  double potential(Node u) const { return pi_[u]; }

 private:
  static constexpr signed char kUpper = -1;
  static constexpr signed char kTree = 0;
  static constexpr signed char kLower = 1;

  Node src(Arc a) const { return a < arc_num_ ? static_cast<Node>(a / n_) : art_src_[a - arc_num_]; }
  Node tgt(Arc a) const {
    return a < arc_num_ ? static_cast<Node>(m_ + a % n_) : art_tgt_[a - arc_num_];
  }
  double cost(Arc a) const { return a < arc_num_ ? cost_[a] : art_cost_[a - arc_num_]; }

  bool pivot_found(double best) const {
    const double scale = std::max({std::fabs(pi_[src(in_arc_)]), std::fabs(pi_[tgt(in_arc_)]),
                                   std::fabs(cost(in_arc_))});
    return best < -kEpsSmall * scale;
  }

  bool find_entering_arc() {
    double best = 0.0;
    Arc e = next_arc_;
    Arc count = block_size_;
    for (Arc k = 0; k < arc_num_; ++k, ++e) {
      if (e == arc_num_) e = 0;
      const Node i = static_cast<Node>(e / n_);
      const Node j = static_cast<Node>(m_ + e % n_);
      const double c = state_[e] * (cost_[e] + pi_[i] - pi_[j]);
      if (c < best) {
        best = c;
        in_arc_ = e;
      }
      if (--count == 0) {
        if (best < 0.0 && pivot_found(best)) {
          next_arc_ = e;
          return true;
        }
        count = block_size_;
      }
    }
    if (best < 0.0 && pivot_found(best)) {
      next_arc_ = e;
      return true;
    }
    return false;
  }

  void initial_pivots() {
    // Cheapest incoming arc of each demand node.
    std::vector<Arc> arcs;
    arcs.reserve(n_);
    for (Node j = 0; j < n_; ++j) {
      double best = std::numeric_limits<double>::max();
      Arc best_arc = -1;
      for (Node i = 0; i < m_; ++i) {
        const Arc a = static_cast<Arc>(i) * n_ + j;
        if (cost_[a] < best) {
          best = cost_[a];
          best_arc = a;
        }
      }
      if (best_arc >= 0) arcs.push_back(best_arc);
    }
    for (Arc a : arcs) {
      in_arc_ = a;
      if (state_[a] * (cost_[a] + pi_[src(a)] - pi_[tgt(a)]) >= 0.0) continue;
      find_join_node();
      const bool change = find_leaving_arc();
      if (delta_ >= kInf) throw std::runtime_error("transport problem is unbounded");
      change_flow(change);
      if (change) {
        update_tree();
        update_potential();
      }
    }
  }

  void find_join_node() {
    Node u = src(in_arc_), v = tgt(in_arc_);
    while (u != v) {
      if (succ_num_[u] < succ_num_[v])
        u = parent_[u];
      else
        v = parent_[v];
    }
    join_ = u;
  }

  bool find_leaving_arc() {
    if (state_[in_arc_] == kLower) {
      first_ = src(in_arc_);
      second_ = tgt(in_arc_);
    } else {
      first_ = tgt(in_arc_);
      second_ = src(in_arc_);
    }
    delta_ = kInf;
    int result = 0;
    for (Node u = first_; u != join_; u = parent_[u]) {
      const double d = forward_[u] ? flow_[pred_[u]] : kInf;
      if (d < delta_) {
        delta_ = d;
        u_out_ = u;
        result = 1;
      }
    }
    for (Node u = second_; u != join_; u = parent_[u]) {
      const double d = forward_[u] ? kInf : flow_[pred_[u]];
      if (d <= delta_) {
        delta_ = d;
        u_out_ = u;
        result = 2;
      }
    }
    if (result == 1) {
      u_in_ = first_;
      v_in_ = second_;
    } else {
      u_in_ = second_;
      v_in_ = first_;
    }
    return result != 0;
  }

  void change_flow(bool change) {
    if (delta_ > 0.0) {
      const double val = state_[in_arc_] * delta_;
      flow_[in_arc_] += val;
      for (Node u = src(in_arc_); u != join_; u = parent_[u]) flow_[pred_[u]] += forward_[u] ? -val : val;
      for (Node u = tgt(in_arc_); u != join_; u = parent_[u]) flow_[pred_[u]] += forward_[u] ? val : -val;
    }
    if (change) {
      state_[in_arc_] = kTree;
      state_[pred_[u_out_]] = flow_[pred_[u_out_]] == 0.0 ? kLower : kUpper;
    } else {
      state_[in_arc_] = static_cast<signed char>(-state_[in_arc_]);
    }
  }

  void update_tree() {
    Node u = last_succ_[u_in_];
    const Node old_rev_thread = rev_thread_[u_out_];
    const Node old_succ_num = succ_num_[u_out_];
    const Node old_last_succ = last_succ_[u_out_];
    v_out_ = parent_[u_out_];
    Node right = thread_[u];
    Node last = (old_rev_thread == v_in_) ? thread_[last_succ_[u_out_]] : thread_[v_in_];

    Node stem = u_in_;
    thread_[v_in_] = stem;
    dirty_revs_.clear();
    dirty_revs_.push_back(v_in_);
    Node par_stem = v_in_;
    while (stem != u_out_) {
      const Node new_stem = parent_[stem];
      thread_[u] = new_stem;
      dirty_revs_.push_back(u);
      const Node w = rev_thread_[stem];
      thread_[w] = right;
      rev_thread_[right] = w;
      parent_[stem] = par_stem;
      par_stem = stem;
      stem = new_stem;
      u = last_succ_[stem] == last_succ_[par_stem] ? rev_thread_[par_stem] : last_succ_[stem];
      right = thread_[u];
    }
    parent_[u_out_] = par_stem;
    thread_[u] = last;
    rev_thread_[last] = u;
    last_succ_[u_out_] = u;

    if (old_rev_thread != v_in_) {
      thread_[old_rev_thread] = right;
      rev_thread_[right] = old_rev_thread;
    }
    for (Node x : dirty_revs_) rev_thread_[thread_[x]] = x;

    Node tmp_sc = 0;
    const Node tmp_ls = last_succ_[u_out_];
    u = u_out_;
    while (u != u_in_) {
      const Node w = parent_[u];
      pred_[u] = pred_[w];
      forward_[u] = !forward_[w];
      tmp_sc += succ_num_[u] - succ_num_[w];
      succ_num_[u] = tmp_sc;
      last_succ_[w] = tmp_ls;
      u = w;
    }
    pred_[u_in_] = in_arc_;
    forward_[u_in_] = (u_in_ == src(in_arc_));
    succ_num_[u_in_] = old_succ_num;

    Node up_limit_in = -1, up_limit_out = -1;
    if (last_succ_[join_] == v_in_)
      up_limit_out = join_;
    else
      up_limit_in = join_;

    for (u = v_in_; u != up_limit_in && last_succ_[u] == v_in_; u = parent_[u])
      last_succ_[u] = last_succ_[u_out_];

    if (join_ != old_rev_thread && v_in_ != old_rev_thread) {
      for (u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u])
        last_succ_[u] = old_rev_thread;
    } else {
      for (u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u])
        last_succ_[u] = last_succ_[u_out_];
    }

    for (u = v_in_; u != join_; u = parent_[u]) succ_num_[u] += old_succ_num;
    for (u = v_out_; u != join_; u = parent_[u]) succ_num_[u] -= old_succ_num;
  }

  void update_potential() {
    const double sigma = forward_[u_in_] ? pi_[v_in_] - pi_[u_in_] - cost(pred_[u_in_])
                                         : pi_[v_in_] - pi_[u_in_] + cost(pred_[u_in_]);
    const Node end = thread_[last_succ_[u_in_]];
    for (Node u = u_in_; u != end; u = thread_[u]) pi_[u] += sigma;
  }

  static constexpr double kEpsSmall = 1e3 * std::numeric_limits<double>::epsilon();

  Node m_, n_, node_num_;
  Arc arc_num_;
  const double* cost_;

  std::vector<double> supply_, pi_, flow_, art_cost_;
  std::vector<Node> parent_, thread_, rev_thread_, succ_num_, last_succ_, dirty_revs_, art_src_, art_tgt_;
  std::vector<Arc> pred_;
  std::vector<signed char> forward_, state_;

  Arc next_arc_ = 0, block_size_ = 10, in_arc_ = 0;
  Node join_ = 0, u_in_ = 0, v_in_ = 0, u_out_ = 0, v_out_ = 0, first_ = 0, second_ = 0;
  double delta_ = 0.0;
};

}  // namespace

TransportSolution solve_transport(std::span<const double> supply, std::span<const double> demand,
                                  const CostMatrix& cost) {
  const std::size_t m = supply.size(), n = demand.size();
  if (m == 0 || n == 0) throw std::invalid_argument("empty transport problem");
  if (cost.rows != m || cost.cols != n || cost.data.size() != m * n)
    throw std::invalid_argument("cost matrix shape mismatch");
  if (m + n > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max() / 2))
    throw std::invalid_argument("transport problem too large");
  for (double a : supply)
    if (!(a > 0.0)) throw std::invalid_argument("supplies must be positive");
  for (double b : demand)
    if (!(b > 0.0)) throw std::invalid_argument("demands must be positive");

  NetworkSimplex ns(supply, demand, cost);
  TransportSolution sol;
  sol.pivots = ns.run();

  KahanSum primal;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double f = ns.flow(static_cast<Arc>(i * n + j));
      if (f > 0.0) {
        sol.flows.push_back({i, j, f});
        primal += f * cost(i, j);
      }
    }
  sol.cost = primal.value();

  // Reduced costs c_ij + pi_i - pi_j >= 0 at optimality, hence u_i = -pi_i and the
  // c-transform v_j = min_i (c_ij - u_i) form a feasible dual pair.
  sol.source_potential.resize(m);
  for (std::size_t i = 0; i < m; ++i) sol.source_potential[i] = -ns.potential(static_cast<Node>(i));
  sol.target_potential.assign(n, kInf);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      sol.target_potential[j] = std::min(sol.target_potential[j], cost(i, j) - sol.source_potential[i]);
  KahanSum dual;
  for (std::size_t i = 0; i < m; ++i) dual += supply[i] * sol.source_potential[i];
  for (std::size_t j = 0; j < n; ++j) dual += demand[j] * sol.target_potential[j];
  sol.dual_value = dual.value();
  return sol;
}

}  // namespace cgas
