#include "geospot/optimizer.hpp"

#include "geospot/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

namespace geospot::optimizer {

namespace {

std::vector<int> entry_counts(const SearchEntry& e) {
  if (!e.allowed_counts.empty()) {
    std::vector<int> counts = e.allowed_counts;
    std::sort(counts.begin(), counts.end());
    counts.erase(std::unique(counts.begin(), counts.end()), counts.end());
    for (int c : counts) {
      if (c < 0) {
        raise(ErrorKind::Validation, "allowed_counts",
              "allowed counts must be >= 0");
      }
    }
    return counts;
  }
  int capacity = 0;
  for (const auto& s : e.sites) {
    if (!s.fill_limit) {
      raise(ErrorKind::Validation, s.site_id,
            "open-ended search entries need fill limits");
    }
    capacity += *s.fill_limit;
  }
  std::vector<int> counts(capacity + 1);
  for (int c = 0; c <= capacity; ++c) {
    counts[c] = c;
  }
  return counts;
}

/* Better-than comparison with the documented tie-breaks. */
bool better(double value_a, int vms_a, const std::vector<int>& counts_a,
            double value_b, int vms_b, const std::vector<int>& counts_b) {
  if (value_a > value_b + 1e-9) {
    return true;
  }
  if (value_b > value_a + 1e-9) {
    return false;
  }
  if (vms_a != vms_b) {
    return vms_a < vms_b;
  }
  return counts_a < counts_b;
}

}  // namespace

std::vector<std::vector<int>> enumerate_counts(const SearchSpec& spec) {
  if (spec.entries.empty()) {
    raise(ErrorKind::Validation, "search.entries", "search spec has no entries");
  }
  std::vector<std::vector<int>> per_entry;
  long long space = 1;
  bool saturated = false;
  for (const auto& e : spec.entries) {
    per_entry.push_back(entry_counts(e));
    auto width = static_cast<long long>(per_entry.back().size());
    if (space > std::numeric_limits<long long>::max() / std::max(1LL, width)) {
      saturated = true;
    } else {
      space *= width;
    }
  }
  if (saturated || space > spec.enumeration_cap) {
    std::string size = saturated ? "more than " + std::to_string(space)
                                 : std::to_string(space);
    raise(ErrorKind::SpaceTooLarge, "search.entries",
          "candidate space of " + size + " exceeds the enumeration cap of " +
              std::to_string(spec.enumeration_cap));
  }
  std::vector<std::vector<int>> out;
  std::vector<int> current(per_entry.size(), 0);
  std::vector<size_t> pos(per_entry.size(), 0);
  while (true) {
    int total = 0;
    for (size_t i = 0; i < per_entry.size(); ++i) {
      current[i] = per_entry[i][pos[i]];
      total += current[i];
    }
    bool ok = total >= spec.min_total_vms &&
              (spec.max_total_vms <= 0 || total <= spec.max_total_vms);
    if (ok) {
      out.push_back(current);
    }
    size_t level = 0;
    while (level < pos.size() && ++pos[level] == per_entry[level].size()) {
      pos[level] = 0;
      ++level;
    }
    if (level == pos.size()) {
      break;
    }
  }
  return out;
}

Scenario realize(const Scenario& base, const std::vector<int>& counts) {
  if (!base.search) {
    raise(ErrorKind::Validation, "search", "scenario has no search spec");
  }
  const SearchSpec& spec = *base.search;
  if (counts.size() != spec.entries.size()) {
    raise(ErrorKind::Validation, "counts",
          "count vector does not match the search entries");
  }
  Scenario out = base;
  out.placement.clear();
  for (size_t i = 0; i < counts.size(); ++i) {
    int remaining = counts[i];
    for (const auto& site : spec.entries[i].sites) {
      if (remaining <= 0) {
        break;
      }
      int take = site.fill_limit ? std::min(remaining, *site.fill_limit)
                                 : remaining;
      if (take > 0) {
        PlacementEntry pe;
        pe.site_id = site.site_id;
        pe.vm_count = take;
        pe.fill_limit = site.fill_limit;
        out.placement.push_back(pe);
        remaining -= take;
      }
    }
    if (remaining > 0) {
      raise(ErrorKind::Validation, "counts",
            "entry capacity too small for requested count");
    }
  }
  return out;
}

double objective_value(Objective obj, const protocol::EpochReport& rep,
                       const costing::CostReport& cost) {
  switch (obj) {
    case Objective::MaxSps:
    case Objective::MaxSpsUnderBudget:
      return rep.sps_global;
    case Objective::MinUsdPerMillion:
      return -cost.usd_per_million;
  }
  return 0.0;
}

bool within_budget(Objective obj, std::optional<double> budget,
                   const costing::CostReport& cost) {
  if (obj != Objective::MaxSpsUnderBudget) {
    return true;
  }
  if (!budget) {
    raise(ErrorKind::Validation, "budget",
          "max_sps_under_budget needs a budget");
  }
  return cost.fleet_total_usd_h <= *budget;
}

namespace {

struct Evaluated {
  Candidate cand;
  int total_vms = 0;
  bool feasible = false;
};

Evaluated evaluate(const Scenario& base, const std::vector<int>& counts,
                   Objective obj, std::optional<double> budget) {
  Evaluated ev;
  Scenario sc = realize(base, counts);
  ev.cand.counts = counts;
  ev.cand.epoch = protocol::simulate_epoch(sc);
  ev.cand.cost = costing::cost_epoch(sc, ev.cand.epoch);
  ev.cand.objective_value = objective_value(obj, ev.cand.epoch, ev.cand.cost);
  ev.total_vms = sc.total_vms();
  ev.feasible = within_budget(obj, budget, ev.cand.cost);
  return ev;
}

SearchResult search_exhaustive(const Scenario& base, Objective obj,
                               std::optional<double> budget, int top_k) {
  SearchResult result;
  auto space = enumerate_counts(*base.search);
  std::vector<Evaluated> feasible;
  for (const auto& counts : space) {
    Evaluated ev = evaluate(base, counts, obj, budget);
    ++result.evaluated;
    if (ev.feasible) {
      feasible.push_back(std::move(ev));
    }
  }
  if (feasible.empty()) {
    result.note = "no placement satisfies the constraints (" +
                  std::to_string(space.size()) + " candidates examined)";
    return result;
  }
  std::sort(feasible.begin(), feasible.end(),
            [](const Evaluated& a, const Evaluated& b) {
              return better(a.cand.objective_value, a.total_vms, a.cand.counts,
                            b.cand.objective_value, b.total_vms, b.cand.counts);
            });
  result.feasible = true;
  for (int i = 0; i < top_k && i < static_cast<int>(feasible.size()); ++i) {
    result.ranked.push_back(std::move(feasible[i].cand));
  }
  return result;
}

/* Greedy construction plus steepest-ascent local moves for spaces beyond the
   enumeration cap. Each move steps one entry to a neighboring allowed count.
   With pruning on, additions whose optimistic projection cannot beat the
   incumbent are skipped (admissible for MaxSps: throughput can grow at most
   by the scaling projection of the added compute). */
SearchResult search_local(const Scenario& base, Objective obj,
                          std::optional<double> budget, int top_k,
                          bool prune) {
  const SearchSpec& spec = *base.search;
  std::vector<std::vector<int>> options;
  options.reserve(spec.entries.size());
  for (const auto& e : spec.entries) {
    options.push_back(entry_counts(e));
  }

  auto total_of = [](const std::vector<int>& v) {
    int t = 0;
    for (int c : v) {
      t += c;
    }
    return t;
  };
  auto admissible = [&](const std::vector<int>& v) {
    int t = total_of(v);
    return t >= spec.min_total_vms &&
           (spec.max_total_vms <= 0 || t <= spec.max_total_vms);
  };

  SearchResult result;
  std::set<std::vector<int>> seen;
  std::deque<Evaluated> pool;  // stable addresses for best/cur pointers
  auto try_eval = [&](const std::vector<int>& v) -> const Evaluated* {
    if (!admissible(v) || !seen.insert(v).second) {
      return nullptr;
    }
    pool.push_back(evaluate(base, v, obj, budget));
    ++result.evaluated;
    return &pool.back();
  };

  // Seeds: per entry, the smallest admissible single-entry placement.
  std::vector<std::vector<int>> seeds;
  for (size_t i = 0; i < options.size(); ++i) {
    for (int c : options[i]) {
      std::vector<int> v(options.size(), 0);
      for (size_t j = 0; j < options.size(); ++j) {
        v[j] = options[j].front();
      }
      v[i] = c;
      if (admissible(v)) {
        seeds.push_back(v);
        break;
      }
    }
  }
  if (seeds.empty()) {
    result.note = "no admissible seed placement";
    return result;
  }

  const Evaluated* best = nullptr;
  for (const auto& seed : seeds) {
    const Evaluated* cur = try_eval(seed);
    if (!cur) {
      continue;
    }
    bool improved = true;
    while (improved) {
      improved = false;
      std::vector<int> cur_counts = cur->cand.counts;
      for (size_t i = 0; i < options.size(); ++i) {
        auto it = std::find(options[i].begin(), options[i].end(),
                            cur_counts[i]);
        for (int dir : {-1, +1}) {
          auto jt = it;
          if (dir < 0 && jt == options[i].begin()) {
            continue;
          }
          jt += dir;
          if (jt == options[i].end() || jt < options[i].begin()) {
            continue;
          }
          std::vector<int> next = cur_counts;
          next[i] = *jt;
          if (prune && dir > 0 && cur->feasible &&
              (obj == Objective::MaxSps ||
               obj == Objective::MaxSpsUnderBudget)) {
            // Optimistic bound: added VMs can at most scale compute by
            // next_total/cur_total at unchanged communication cost.
            auto g = analytics::granularity(cur->cand.epoch);
            if (g && best) {
              double factor = static_cast<double>(total_of(next)) /
                              std::max(1, total_of(cur_counts));
              double bound = cur->cand.epoch.sps_global *
                             analytics::project_scaling(*g, factor);
              if (bound <= best->cand.objective_value + 1e-9) {
                continue;
              }
            }
          }
          const Evaluated* cand = try_eval(next);
          if (cand && cand->feasible &&
              (!cur->feasible ||
               better(cand->cand.objective_value, cand->total_vms,
                      cand->cand.counts, cur->cand.objective_value,
                      cur->total_vms, cur->cand.counts))) {
            cur = cand;
            improved = true;
          }
        }
        if (improved) {
          break;
        }
      }
      if (cur->feasible &&
          (!best || better(cur->cand.objective_value, cur->total_vms,
                           cur->cand.counts, best->cand.objective_value,
                           best->total_vms, best->cand.counts))) {
        best = cur;
      }
    }
  }

  std::vector<const Evaluated*> feasible;
  for (const auto& ev : pool) {
    if (ev.feasible) {
      feasible.push_back(&ev);
    }
  }
  if (feasible.empty()) {
    result.note = "no placement satisfies the constraints (" +
                  std::to_string(result.evaluated) + " candidates examined)";
    return result;
  }
  std::sort(feasible.begin(), feasible.end(),
            [](const Evaluated* a, const Evaluated* b) {
              return better(a->cand.objective_value, a->total_vms,
                            a->cand.counts, b->cand.objective_value,
                            b->total_vms, b->cand.counts);
            });
  result.feasible = true;
  for (int i = 0; i < top_k && i < static_cast<int>(feasible.size()); ++i) {
    result.ranked.push_back(feasible[i]->cand);
  }
  return result;
}

}  // namespace

SearchResult search(const Scenario& base, Objective obj,
                    std::optional<double> budget, int top_k, bool prune) {
  if (!base.search) {
    raise(ErrorKind::Validation, "search", "scenario has no search spec");
  }
  long long space = 1;
  bool too_large = false;
  for (const auto& e : base.search->entries) {
    auto width =
        static_cast<long long>(std::max<size_t>(1, entry_counts(e).size()));
    if (space > base.search->enumeration_cap / width) {
      too_large = true;
      break;
    }
    space *= width;
  }
  if (!too_large) {
    return search_exhaustive(base, obj, budget, top_k);
  }
  return search_local(base, obj, budget, top_k, prune);
}

}  // namespace geospot::optimizer
