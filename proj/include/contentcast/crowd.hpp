#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "contentcast/errors.hpp"

namespace contentcast::crowd {

// An OCP distribution subtask: one object, its resource demand, the budget
// for it and the management interfaces the OCP insists on.
struct TaskProfile {
  std::uint32_t task_id = 0;
  std::uint32_t object_id = 0;
  double resource_needed = 0.0;
  double budget = 0.0;
  std::set<std::string> preferred_mgmt;

  friend bool operator==(const TaskProfile&, const TaskProfile&) = default;
};

// An NSP's SLA: resources it would allocate, the expense it charges and the
// management functionality it exposes. object_id == nullopt offers to carry
// any object.
struct SlaOffer {
  std::uint32_t offer_id = 0;
  std::uint32_t nsp_id = 0;
  std::optional<std::uint32_t> object_id;
  double resources = 0.0;
  double expense = 0.0;
  std::set<std::string> mgmt;

  friend bool operator==(const SlaOffer&, const SlaOffer&) = default;
};

struct Assignment {
  struct Pair {
    std::uint32_t task_id = 0;
    std::uint32_t offer_id = 0;

    friend bool operator==(const Pair&, const Pair&) = default;
  };
  std::vector<Pair> pairs;  // sorted by task_id
  double total_expense = 0.0;

  std::size_t coverage() const { return pairs.size(); }
};

inline bool compatible(const TaskProfile& task, const SlaOffer& offer) {
  if (offer.resources < task.resource_needed) return false;
  if (offer.expense > task.budget) return false;
  if (offer.object_id && *offer.object_id != task.object_id) return false;
  return std::includes(offer.mgmt.begin(), offer.mgmt.end(), task.preferred_mgmt.begin(),
                       task.preferred_mgmt.end());
}

namespace detail {

inline void validate_inputs(const std::vector<TaskProfile>& tasks, const std::vector<SlaOffer>& offers) {
  std::set<std::uint32_t> task_ids;
  for (const auto& t : tasks) {
    if (!(t.resource_needed > 0.0))
      throw Error(ErrorCode::InvalidArgument, "task resource_needed must be positive");
    if (t.budget < 0.0) throw Error(ErrorCode::InvalidArgument, "task budget must be non-negative");
    if (!task_ids.insert(t.task_id).second)
      throw Error(ErrorCode::InvalidArgument, "duplicate task id " + std::to_string(t.task_id));
  }
  std::set<std::uint32_t> offer_ids;
  for (const auto& o : offers) {
    if (!(o.resources > 0.0))
      throw Error(ErrorCode::InvalidArgument, "offer resources must be positive");
    if (o.expense < 0.0) throw Error(ErrorCode::InvalidArgument, "offer expense must be non-negative");
    if (!offer_ids.insert(o.offer_id).second)
      throw Error(ErrorCode::InvalidArgument, "duplicate offer id " + std::to_string(o.offer_id));
  }
}

}  // namespace detail

// Re-derives every matching constraint; solvers are never trusted blindly.
inline bool validate_assignment(const Assignment& assignment, const std::vector<TaskProfile>& tasks,
                                const std::vector<SlaOffer>& offers) {
  std::map<std::uint32_t, const TaskProfile*> task_by_id;
  std::map<std::uint32_t, const SlaOffer*> offer_by_id;
  for (const auto& t : tasks) task_by_id[t.task_id] = &t;
  for (const auto& o : offers) offer_by_id[o.offer_id] = &o;

  std::set<std::uint32_t> used_tasks;
  std::set<std::uint32_t> used_offers;
  double expense = 0.0;
  for (const auto& pair : assignment.pairs) {
    auto t = task_by_id.find(pair.task_id);
    auto o = offer_by_id.find(pair.offer_id);
    if (t == task_by_id.end() || o == offer_by_id.end()) return false;
    if (!used_tasks.insert(pair.task_id).second) return false;
    if (!used_offers.insert(pair.offer_id).second) return false;
    if (!compatible(*t->second, *o->second)) return false;
    expense += o->second->expense;
  }
  return std::abs(expense - assignment.total_expense) <= 1e-9 * std::max(1.0, std::abs(expense));
}

// Optimal one-to-one matching under the lexicographic objective: first
// maximize the number of assigned tasks, then minimize total expense.
// Successive shortest augmenting paths on the compatibility graph; each
// augmentation is the cheapest, so every intermediate flow value is
// expense-minimal. Intended for modest instance sizes.
inline Assignment match_exact(std::vector<TaskProfile> tasks, std::vector<SlaOffer> offers) {
  detail::validate_inputs(tasks, offers);
  std::sort(tasks.begin(), tasks.end(),
            [](const TaskProfile& a, const TaskProfile& b) { return a.task_id < b.task_id; });
  std::sort(offers.begin(), offers.end(),
            [](const SlaOffer& a, const SlaOffer& b) { return a.offer_id < b.offer_id; });

  const std::size_t n_tasks = tasks.size();
  const std::size_t n_offers = offers.size();
  const std::size_t source = n_tasks + n_offers;
  const std::size_t sink = source + 1;
  const std::size_t n_nodes = sink + 1;

  struct Edge {
    std::size_t to;
    std::int32_t cap;
    double cost;
    std::size_t rev;
  };
  std::vector<std::vector<Edge>> graph(n_nodes);
  const auto add_edge = [&](std::size_t from, std::size_t to, double cost) {
    graph[from].push_back({to, 1, cost, graph[to].size()});
    graph[to].push_back({from, 0, -cost, graph[from].size() - 1});
  };
  for (std::size_t t = 0; t < n_tasks; ++t) add_edge(source, t, 0.0);
  for (std::size_t o = 0; o < n_offers; ++o) add_edge(n_tasks + o, sink, offers[o].expense);
  for (std::size_t t = 0; t < n_tasks; ++t)
    for (std::size_t o = 0; o < n_offers; ++o)
      if (compatible(tasks[t], offers[o])) add_edge(t, n_tasks + o, 0.0);

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> match_of_task(n_tasks, n_offers);
  while (true) {
    // Bellman-Ford shortest path in the residual graph (residual arcs carry
    // negative costs, so Dijkstra alone would not do).
    std::vector<double> dist(n_nodes, inf);
    std::vector<std::pair<std::size_t, std::size_t>> parent(n_nodes, {n_nodes, 0});
    dist[source] = 0.0;
    for (std::size_t round = 0; round + 1 < n_nodes; ++round) {
      bool changed = false;
      for (std::size_t u = 0; u < n_nodes; ++u) {
        if (dist[u] == inf) continue;
        for (std::size_t e = 0; e < graph[u].size(); ++e) {
          const Edge& edge = graph[u][e];
          if (edge.cap <= 0) continue;
          if (dist[u] + edge.cost < dist[edge.to] - 1e-12) {
            dist[edge.to] = dist[u] + edge.cost;
            parent[edge.to] = {u, e};
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    if (dist[sink] == inf) break;
    for (std::size_t v = sink; v != source;) {
      auto [u, e] = parent[v];
      graph[u][e].cap -= 1;
      graph[graph[u][e].to][graph[u][e].rev].cap += 1;
      v = u;
    }
  }

  Assignment result;
  for (std::size_t t = 0; t < n_tasks; ++t) {
    for (const Edge& edge : graph[t]) {
      if (edge.to < n_tasks || edge.to >= n_tasks + n_offers) continue;
      if (edge.cap == 0) {  // saturated task->offer arc = assigned
        match_of_task[t] = edge.to - n_tasks;
        break;
      }
    }
  }
  for (std::size_t t = 0; t < n_tasks; ++t) {
    if (match_of_task[t] == n_offers) continue;
    result.pairs.push_back({tasks[t].task_id, offers[match_of_task[t]].offer_id});
    result.total_expense += offers[match_of_task[t]].expense;
  }
  return result;
}

// Scalable heuristic: tasks by descending resource demand, each taking the
// cheapest compatible unused offer. The result is a maximal matching, hence
// covers at least half of what match_exact can.
inline Assignment match_greedy(std::vector<TaskProfile> tasks, std::vector<SlaOffer> offers) {
  detail::validate_inputs(tasks, offers);
  std::sort(tasks.begin(), tasks.end(), [](const TaskProfile& a, const TaskProfile& b) {
    if (a.resource_needed != b.resource_needed) return a.resource_needed > b.resource_needed;
    return a.task_id < b.task_id;
  });
  std::sort(offers.begin(), offers.end(),
            [](const SlaOffer& a, const SlaOffer& b) { return a.offer_id < b.offer_id; });

  std::vector<std::uint8_t> used(offers.size(), 0);
  Assignment result;
  for (const auto& task : tasks) {
    std::size_t best = offers.size();
    for (std::size_t o = 0; o < offers.size(); ++o) {
      if (used[o] || !compatible(task, offers[o])) continue;
      if (best == offers.size() || offers[o].expense < offers[best].expense) best = o;
    }
    if (best == offers.size()) continue;
    used[best] = 1;
    result.pairs.push_back({task.task_id, offers[best].offer_id});
    result.total_expense += offers[best].expense;
  }
  std::sort(result.pairs.begin(), result.pairs.end(),
            [](const Assignment::Pair& a, const Assignment::Pair& b) { return a.task_id < b.task_id; });
  return result;
}

// ---------------------------------------------------------------------------
// Negotiation: an offline fold over the OCP/NSP message log.

struct TaskMessage {
  TaskProfile task;
};
struct OfferMessage {
  SlaOffer offer;
};
struct WithdrawMessage {
  std::uint32_t offer_id = 0;
};
using Message = std::variant<TaskMessage, OfferMessage, WithdrawMessage>;

struct Snapshot {
  std::vector<TaskProfile> tasks;   // sorted by task_id
  std::vector<SlaOffer> offers;     // sorted by offer_id

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

// Folds announcements, offer submissions and withdrawals into the current
// task/offer sets; last write per id wins, withdrawing an absent offer is a
// no-op.
inline Snapshot negotiate(const std::vector<Message>& log) {
  std::map<std::uint32_t, TaskProfile> tasks;
  std::map<std::uint32_t, SlaOffer> offers;
  for (const auto& message : log) {
    if (const auto* t = std::get_if<TaskMessage>(&message))
      tasks[t->task.task_id] = t->task;
    else if (const auto* o = std::get_if<OfferMessage>(&message))
      offers[o->offer.offer_id] = o->offer;
    else
      offers.erase(std::get<WithdrawMessage>(message).offer_id);
  }
  Snapshot snapshot;
  for (auto& [id, task] : tasks) snapshot.tasks.push_back(std::move(task));
  for (auto& [id, offer] : offers) snapshot.offers.push_back(std::move(offer));
  return snapshot;
}

}  // namespace contentcast::crowd
