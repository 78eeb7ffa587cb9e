#pragma once
// Brute-force reference computations. They read only raw state fields and
// never call the library's derived queries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sfcqa/netmodel.hpp"

namespace oracle {

using namespace sfcqa::netmodel;

inline std::size_t idle_count(const NetworkState& s, DcId dc, std::optional<VnfType> type = std::nullopt) {
  std::size_t n = 0;
  for (const VnfInstance& inst : s.instances) {
    if (inst.dc.value != dc.value) continue;
    if (type && inst.type != *type) continue;
    bool used = false;
    for (const SfcRequest& r : s.requests) {
      for (InstanceId id : r.path) used = used || id.value == inst.id.value;
    }
    if (!used) ++n;
  }
  return n;
}

struct Free {
  std::int64_t compute = 0;
  std::int64_t storage = 0;
};

inline Free free_resources(const NetworkState& s, DcId dc) {
  Free f{s.dcs[dc.value].compute_capacity, s.dcs[dc.value].storage_capacity};
  for (const VnfInstance& inst : s.instances) {
    if (inst.dc.value != dc.value) continue;
    f.compute -= s.profiles[static_cast<std::size_t>(inst.type)].compute_demand;
    f.storage -= s.profiles[static_cast<std::size_t>(inst.type)].storage_demand;
  }
  return f;
}

inline std::size_t received(const NetworkState& s, DcId dc, SfcType type) {
  std::size_t n = 0;
  for (const SfcRequest& r : s.requests) n += (r.ingress.value == dc.value && r.sfc_type == type) ? 1 : 0;
  return n;
}

inline std::int64_t link_free_kbps(const NetworkState& s, const Link& link) {
  std::int64_t used = 0;
  for (const SfcRequest& r : s.requests) {
    for (LinkId l : r.links) used += l.value == link.id.value ? r.bandwidth_kbps : 0;
  }
  return link.capacity_kbps - used;
}

// Pending demand summed over every VNF of every chain, then compared.
inline bool sufficient(const NetworkState& s, DcId dc) {
  std::int64_t demand = 0;
  for (const SfcRequest& r : s.requests) {
    if (r.ingress.value != dc.value || r.status != RequestStatus::Pending) continue;
    for (VnfType t : s.catalog[static_cast<std::size_t>(r.sfc_type)].vnf_sequence) {
      demand += s.profiles[static_cast<std::size_t>(t)].compute_demand;
    }
  }
  return demand <= free_resources(s, dc).compute;
}

inline std::optional<std::uint32_t> widest_neighbor(const NetworkState& s, DcId dc) {
  std::map<std::uint32_t, std::int64_t> by_dc;
  for (const Link& l : s.links) {
    if (l.a.value == dc.value) by_dc[l.b.value] = link_free_kbps(s, l);
    if (l.b.value == dc.value) by_dc[l.a.value] = link_free_kbps(s, l);
  }
  std::optional<std::uint32_t> best;
  std::int64_t best_bw = -1;
  for (const auto& [id, bw] : by_dc) {
    if (bw > best_bw) {
      best = id;
      best_bw = bw;
    }
  }
  return best;
}

inline bool connected(std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
  if (n == 0) return true;
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<bool> seen(n, false);
  std::queue<std::uint32_t> q;
  q.push(0);
  seen[0] = true;
  std::size_t count = 1;
  while (!q.empty()) {
    const auto u = q.front();
    q.pop();
    for (auto v : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        q.push(v);
      }
    }
  }
  return count == n;
}

struct SpanIdx {
  std::size_t i = 0;
  std::size_t j = 0;
  double score = -1.0;
};

// Enumerates all pairs, keeps the max score with the lexicographically smallest (i, j).
inline SpanIdx exhaustive_span(const std::vector<double>& ps, const std::vector<double>& pe,
                               const std::vector<bool>& special, std::size_t max_len) {
  SpanIdx best;
  bool found = false;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t j = 0; j < pe.size(); ++j) {
      if (j < i || j - i > max_len || special[i] || special[j]) continue;
      const double sc = ps[i] * pe[j];
      if (!found || sc > best.score || (sc == best.score && (i < best.i || (i == best.i && j < best.j)))) {
        best = {i, j, sc};
        found = true;
      }
    }
  }
  return best;
}

inline std::vector<double> naive_softmax(const std::vector<double>& x) {
  long double sum = 0;
  for (double v : x) sum += std::exp(static_cast<long double>(v));
  std::vector<double> out;
  for (double v : x) out.push_back(static_cast<double>(std::exp(static_cast<long double>(v)) / sum));
  return out;
}

inline std::vector<std::string> words(const std::string& text) {
  std::string clean;
  for (char c : text) {
    if (std::ispunct(static_cast<unsigned char>(c))) continue;
    clean += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  std::istringstream in(clean);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

// Multiset overlap via sorted intersection.
inline double f1(const std::string& pred, const std::string& gold) {
  auto p = words(pred);
  auto g = words(gold);
  if (p.empty() || g.empty()) return p.empty() && g.empty() ? 1.0 : 0.0;
  std::sort(p.begin(), p.end());
  std::sort(g.begin(), g.end());
  std::vector<std::string> common;
  std::set_intersection(p.begin(), p.end(), g.begin(), g.end(), std::back_inserter(common));
  if (common.empty()) return 0.0;
  const double prec = double(common.size()) / double(p.size());
  const double rec = double(common.size()) / double(g.size());
  return 2 * prec * rec / (prec + rec);
}

}  // namespace oracle
