#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "gammoid/extensions.hpp"
#include "gammoid/kb.hpp"
#include "gammoid/tableau.hpp"

namespace gammoid {

struct EngineConfig {
  int worker_count = 1;
  int extension_batch = 8;
  std::string goal_selection = "small-first";
  struct Budget {
    long max_step_visits = 50000;
    // Extension enumeration cap for the exhaustion step and the case-(iii)
    // check; class counts explode with the ground size.
    int max_extension_ground = 7;
  } budget;
  std::uint64_t seed = 0;
};

enum class Outcome { gammoid, not_gammoid, resource_exhausted };

struct TraceStep {
  enum class Kind { checked, selected, pass, update, fired, decisive, reset, capped };
  int step = 0;  // 1..13
  int worker = 0;
  Kind kind = Kind::pass;
  std::optional<CanonicalKey> intermediate;
  std::optional<CanonicalKey> produced;  // e.g. a deflate found in steps 11/12
  std::optional<CanonicalKey> source;    // the matroid it was produced from
  std::string detail;
};

struct Trace {
  std::vector<TraceStep> steps;
};

struct DecideResult {
  Outcome outcome = Outcome::resource_exhausted;
  std::optional<Verdict> verdict;
  Trace trace;
  Tableau tableau;
};

// Chooses the next intermediate goal: a registered minor of the goal or an
// intermediate that is not yet resolved, preferring matroids equivalent to
// the goal, then small ground sets and ranks.
inline std::optional<CanonicalKey> select_intermediate_goal(
    const Tableau& t, const EngineConfig& cfg,
    const std::set<CanonicalKey>* avoid = nullptr, int offset = 0) {
  (void)cfg;
  std::vector<CanonicalKey> candidates;
  for (const auto& [k, e] : t.entries()) {
    if (!(e.minor_of_goal || (e.families & family_bit(Family::intermediates))))
      continue;
    if (e.families & (family_bit(Family::gammoids) | family_bit(Family::excluded)))
      continue;
    if (avoid && avoid->count(k)) continue;
    candidates.push_back(k);
  }
  if (candidates.empty()) return std::nullopt;
  auto rank_of = [&](const CanonicalKey& k) {
    const TableauEntry& e = t.entry(k);
    return std::tuple<int, int, int, CanonicalKey>(
        t.same_class(k, t.goal_key()) ? 0 : 1, e.matroid.size(),
        e.matroid.rank(), k);
  };
  std::sort(candidates.begin(), candidates.end(),
            [&](const CanonicalKey& a, const CanonicalKey& b) {
              return rank_of(a) < rank_of(b);
            });
  return candidates[static_cast<std::size_t>(offset) % candidates.size()];
}

namespace detail {

struct IdentifyOp {
  Matroid small;
  Matroid big;
  DeflationCertificate cert;
};

struct StepDelta {
  bool fired = false;  // return to the decisiveness check
  std::vector<Tableau> seeds;
  std::vector<IdentifyOp> identifies;
  std::string detail;
  std::optional<CanonicalKey> produced;
  std::optional<CanonicalKey> source;
};

// Serialized tableau plus trace; workers read snapshots and commit merges.
class TableauStore {
 public:
  explicit TableauStore(Tableau t) : current_(std::move(t)) {}

  Tableau snapshot() const {
    std::lock_guard<std::mutex> lk(mu_);
    return current_;
  }

  void record(TraceStep step) {
    std::lock_guard<std::mutex> lk(mu_);
    trace_.steps.push_back(std::move(step));
  }

  // Join the seeds, apply verified identifications, then close under the
  // extended and expansion derivations.
  void commit(const StepDelta& delta, TraceStep step) {
    std::lock_guard<std::mutex> lk(mu_);
    if (!delta.seeds.empty()) {
      std::vector<Tableau> all;
      all.reserve(delta.seeds.size() + 1);
      all.push_back(std::move(current_));
      for (const Tableau& s : delta.seeds) all.push_back(s);
      current_ = join(all);
    }
    for (const IdentifyOp& op : delta.identifies) {
      const CanonicalKey ks = current_.register_matroid(op.small);
      const CanonicalKey kb = current_.register_matroid(op.big);
      current_ = identify(current_, ks, kb, op.cert);
    }
    current_ = expansion(extended(current_));
    trace_.steps.push_back(std::move(step));
    commits_.fetch_add(1, std::memory_order_release);
  }

  long commit_count() const { return commits_.load(std::memory_order_acquire); }

  Trace trace() const {
    std::lock_guard<std::mutex> lk(mu_);
    return trace_;
  }

 private:
  mutable std::mutex mu_;
  Tableau current_;
  Trace trace_;
  std::atomic<long> commits_{0};
};

inline Certificate dual_cert(const CanonicalKey& of) {
  return Certificate{Certificate::Kind::dual_of, 0, 0, of, ""};
}

// One step of the procedure on intermediate M (canonical form), computed on
// a snapshot. Steps 3..12; step 13 lives in exhaust_step.
inline StepDelta run_step(const Tableau& snap, const CanonicalKey& mkey,
                          int step, DecisivenessLimits limits = {}) {
  StepDelta delta;
  const Matroid& m = snap.entry(mkey).matroid;
  const CanonicalKey dk = dual_canonical_key(m);
  auto dual_form = [&]() { return matroid_from_key(dk, Matroid::Validation::trusted); };
  switch (step) {
    case 3: {
      const auto v = is_decisive_for(snap, mkey, limits);
      if (!v) break;
      delta.fired = true;
      if (v->decision == Verdict::Decision::gammoid) {
        delta.seeds.push_back(make_seed(
            m,
            {{m, Family::gammoids,
              Certificate{Certificate::Kind::equivalent_to, 0, 0, v->witness_key, ""}}},
            "intermediate decisive, case i", /*goal_all_minors=*/true));
        delta.detail = "intermediate concluded: gammoid (case i)";
      } else if (v->decisive_case == 2) {
        Certificate c;
        c.kind = Certificate::Kind::excluded_minor;
        c.ref = v->witness_key;
        c.x = v->witness_minor ? v->witness_minor->contract : 0;
        c.y = v->witness_minor ? v->witness_minor->remove : 0;
        delta.seeds.push_back(
            make_seed(m, {{m, Family::excluded, c}}, "intermediate decisive, case ii"));
        delta.detail = "intermediate concluded: not a gammoid (case ii)";
      } else {
        Certificate c;
        c.kind = Certificate::Kind::exhaustion;
        c.text = "classes=" + std::to_string(v->exhausted_classes) +
                 ",size=" + std::to_string(v->exhausted_size);
        delta.seeds.push_back(
            make_seed(m, {{m, Family::excluded, c}}, "intermediate decisive, case iii"));
        delta.detail = "intermediate concluded: not a gammoid (case iii)";
      }
      break;
    }
    case 4: {
      if (auto spec = find_minor_isomorphic(m, mk4())) {
        Certificate c;
        c.kind = Certificate::Kind::excluded_minor;
        c.ref = canonical_key(mk4());
        c.x = spec->contract;
        c.y = spec->remove;
        delta.seeds.push_back(make_seed(
            m, {{m, Family::excluded, c}, {dual_form(), Family::excluded, dual_cert(mkey)}},
            "M(K4) minor"));
        delta.fired = true;
        delta.detail = "M(K4) minor found";
      }
      break;
    }
    case 5: {
      if (!find_minor_isomorphic(m, u24())) {
        delta.seeds.push_back(make_seed(
            m,
            {{m, Family::gammoids,
              Certificate{Certificate::Kind::no_excluded_minors, 0, 0, {}, ""}},
             {dual_form(), Family::gammoids, dual_cert(mkey)}},
            "binary without M(K4) minor"));
        delta.fired = true;
        delta.detail = "no U(2,4) minor: binary series-parallel";
      }
      break;
    }
    case 6: {
      if (snap.in_family(mkey, Family::intermediates)) break;
      if (!alpha_non_negative(m)) {
        delta.seeds.push_back(make_seed(
            m,
            {{m, Family::gammoids, Certificate{Certificate::Kind::strict_alpha, 0, 0, {}, ""}},
             {dual_form(), Family::gammoids, dual_cert(mkey)}},
            "alpha >= 0"));
        delta.fired = true;
        delta.detail = "alpha nonnegative: strict gammoid";
      } else {
        const Mask witness = *alpha_non_negative(m);
        delta.seeds.push_back(make_seed(
            m,
            {{m, Family::intermediates,
              Certificate{Certificate::Kind::alpha_negative, witness, 0, {}, ""}}},
            "alpha < 0"));
        delta.detail = "alpha negative: recorded intermediate";
      }
      break;
    }
    case 7: {
      if (snap.in_family(dk, Family::intermediates)) break;
      const Matroid dm = dual_form();
      if (!alpha_non_negative(dm)) {
        delta.seeds.push_back(make_seed(
            dm,
            {{dm, Family::gammoids, Certificate{Certificate::Kind::strict_alpha, 0, 0, {}, ""}},
             {m, Family::gammoids, dual_cert(dk)}},
            "alpha of dual >= 0"));
        delta.fired = true;
        delta.detail = "dual has nonnegative alpha: strict gammoid";
      } else {
        const Mask witness = *alpha_non_negative(dm);
        delta.seeds.push_back(make_seed(
            dm,
            {{dm, Family::intermediates,
              Certificate{Certificate::Kind::alpha_negative, witness, 0, {}, ""}}},
            "alpha of dual < 0"));
        delta.detail = "dual alpha negative: recorded intermediate";
      }
      break;
    }
    case 8: {
      const SboWitness w = strongly_base_orderable(m);
      if (!w.orderable) {
        Certificate c;
        c.kind = Certificate::Kind::sbo_failure;
        c.x = w.basis_pair.first;
        c.y = w.basis_pair.second;
        delta.seeds.push_back(make_seed(
            m, {{m, Family::excluded, c}, {dual_form(), Family::excluded, dual_cert(mkey)}},
            "not strongly base-orderable"));
        delta.fired = true;
        delta.detail = "strong base-orderability fails";
      }
      break;
    }
    case 9:
    case 10: {
      const Matroid subject = (step == 9) ? m : dual_form();
      const CanonicalKey subject_key = (step == 9) ? mkey : dk;
      if (subject.rank() < 3) break;
      const auto witness = rank3_contraction_witness(subject);
      if (!witness) break;
      Certificate c;
      c.kind = Certificate::Kind::excluded_minor;
      c.ref = canonical_key(subject.minor(MinorSpec{witness->first, 0}));
      c.x = witness->first;
      c.y = 0;
      const Matroid other = (step == 9) ? dual_form() : m;
      delta.seeds.push_back(make_seed(
          subject,
          {{subject, Family::excluded, c}, {other, Family::excluded, dual_cert(subject_key)}},
          "rank-3 contraction with negative alpha"));
      delta.fired = true;
      delta.detail = "non-strict rank-3 contraction found";
      break;
    }
    case 11:
    case 12: {
      const Matroid subject = (step == 11) ? m : dual_form();
      const CanonicalKey subject_key = (step == 11) ? mkey : dk;
      auto [deflate, cert] = minimal_deflate(subject);
      if (cert.trivial()) break;
      const CanonicalKey nk = canonical_key(deflate);
      if (snap.contains(nk) && snap.contains(subject_key) &&
          snap.same_class(nk, subject_key))
        break;  // already identified in an earlier visit
      const Matroid n_canon = matroid_from_key(nk, Matroid::Validation::trusted);
      Tableau seed = [&] {
        if (!alpha_non_negative(n_canon)) {
          return make_seed(
              n_canon,
              {{n_canon, Family::gammoids,
                Certificate{Certificate::Kind::strict_alpha, 0, 0, {}, ""}},
               {n_canon.dual(), Family::gammoids, dual_cert(nk)}},
              "deflate with alpha >= 0");
        }
        const Mask witness = *alpha_non_negative(n_canon);
        return make_seed(n_canon,
                         {{n_canon, Family::intermediates,
                           Certificate{Certificate::Kind::alpha_negative, witness, 0, {}, ""}}},
                         "deflate with alpha < 0");
      }();
      delta.seeds.push_back(std::move(seed));
      delta.identifies.push_back(IdentifyOp{deflate, subject, cert});
      delta.fired = true;
      delta.produced = nk;
      delta.source = subject_key;
      delta.detail = "identified with a minimal deflate on " +
                     std::to_string(deflate.size()) + " elements";
      break;
    }
    default:
      break;
  }
  return delta;
}

}  // namespace detail

// Incremental extension enumeration state for the exhaustion step, per
// intermediate goal.
class ExhaustState {
 public:
  struct PerGoal {
    std::optional<ExtensionEnumerator> enumerator;
    int size = 0;
    std::size_t pos = 0;
  };
  std::map<CanonicalKey, PerGoal> per_goal;
};

struct ExhaustOutcome {
  std::vector<Tableau> seeds;
  int added = 0;
  bool exhausted = false;  // every class up to the bound has been seen
  bool capped = false;     // the bound exceeds the enumeration cap
  // Classes visited but already isomorphic to a known family member.
  std::vector<CanonicalKey> skipped_known;
};

// The exhaustion step: pull up to cfg.extension_batch unseen extension
// classes of the intermediate (sizes up to the goal's bound), classify each
// by its alpha invariant, and return the seeds to join.
inline ExhaustOutcome exhaust_step(const Tableau& snap, const CanonicalKey& mkey,
                                   const EngineConfig& cfg, ExhaustState& state) {
  ExhaustOutcome out;
  const Matroid& m = snap.entry(mkey).matroid;
  const int bound = size_bound(snap.goal());
  auto& pg = state.per_goal[mkey];
  if (!pg.enumerator) {
    pg.enumerator.emplace(m);
    pg.size = m.size();
    pg.pos = 0;
  }
  if (m.size() > bound) {
    out.exhausted = true;
    return out;
  }
  while (out.added < cfg.extension_batch) {
    if (pg.size > bound) {
      out.exhausted = true;
      break;
    }
    if (pg.size > cfg.budget.max_extension_ground) {
      out.capped = true;
      break;
    }
    const std::map<CanonicalKey, Matroid>* level = nullptr;
    try {
      level = &pg.enumerator->level(pg.size);
    } catch (const SizeExceeded&) {
      out.capped = true;
      break;
    } catch (const FlatLatticeTooLarge&) {
      out.capped = true;
      break;
    }
    if (pg.pos >= level->size()) {
      ++pg.size;
      pg.pos = 0;
      continue;
    }
    auto it = level->begin();
    std::advance(it, static_cast<long>(pg.pos));
    ++pg.pos;
    const CanonicalKey& key = it->first;
    if (snap.contains(key) && snap.entry(key).families != 0) {
      out.skipped_known.push_back(key);  // already in one of the families
      continue;
    }
    const Matroid n_canon = matroid_from_key(key, Matroid::Validation::trusted);
    if (!alpha_non_negative(n_canon)) {
      out.seeds.push_back(make_seed(
          n_canon,
          {{n_canon, Family::gammoids,
            Certificate{Certificate::Kind::strict_alpha, 0, 0, {}, ""}},
           {n_canon.dual(), Family::gammoids,
            detail::dual_cert(key)}},
          "extension with alpha >= 0"));
    } else {
      const Mask witness = *alpha_non_negative(n_canon);
      out.seeds.push_back(make_seed(
          n_canon,
          {{n_canon, Family::intermediates,
            Certificate{Certificate::Kind::alpha_negative, witness, 0, {}, ""}}},
          "extension with alpha < 0"));
    }
    ++out.added;
  }
  return out;
}

namespace detail {

struct SharedRun {
  TableauStore store;
  EngineConfig cfg;
  std::atomic<bool> done{false};
  std::atomic<long> visits{0};
  std::atomic<bool> budget_hit{false};
  std::mutex result_mu;
  std::optional<Verdict> verdict;
  std::optional<Tableau> final_tableau;

  explicit SharedRun(Tableau t, EngineConfig c) : store(std::move(t)), cfg(c) {}

  bool spend(long n = 1) {
    if (visits.fetch_add(n) + n > cfg.budget.max_step_visits) {
      budget_hit.store(true);
      return false;
    }
    return true;
  }
};

inline void worker_loop(SharedRun& run, int worker_id) {
  const EngineConfig& cfg = run.cfg;
  std::set<CanonicalKey> visited;
  ExhaustState exhaust;  // only the designated worker exhausts
  const bool designated = worker_id == 0;
  int revisit_round = 0;
  int stagnant_loops = 0;
  long last_commits = -1;
  while (!run.done.load()) {
    if (!run.spend()) break;
    // A worker that keeps looping without anyone committing anything cannot
    // make progress anymore; give up quietly.
    const long commits = run.store.commit_count();
    if (commits != last_commits) {
      last_commits = commits;
      stagnant_loops = 0;
    } else if (++stagnant_loops > 50) {
      run.budget_hit.store(true);
      return;
    }
    Tableau snap = run.store.snapshot();
    const auto verdict =
        is_decisive(snap, DecisivenessLimits{cfg.budget.max_extension_ground});
    if (verdict) {
      std::lock_guard<std::mutex> lk(run.result_mu);
      if (!run.verdict) {
        run.verdict = verdict;
        Tableau concluded = snap;
        try {
          concluded = expansion(extended(
              conclusion(snap, DecisivenessLimits{cfg.budget.max_extension_ground})));
        } catch (const NotDecisive&) {
        }
        run.final_tableau = concluded;
        run.store.record(TraceStep{1, worker_id, TraceStep::Kind::decisive,
                                   std::nullopt, std::nullopt, std::nullopt,
                                   verdict->decision == Verdict::Decision::gammoid
                                       ? "decisive: gammoid (case " +
                                             std::to_string(verdict->decisive_case) + ")"
                                       : "decisive: not a gammoid (case " +
                                             std::to_string(verdict->decisive_case) + ")"});
      }
      run.done.store(true);
      return;
    }
    run.store.record(TraceStep{1, worker_id, TraceStep::Kind::checked, std::nullopt,
                               std::nullopt, std::nullopt, "not decisive"});
    const int offset = worker_id + static_cast<int>(cfg.seed % 7);
    auto pick = select_intermediate_goal(snap, cfg, &visited, offset);
    bool fresh = pick.has_value();
    // Rotate revisits so every exhaustable intermediate gets its turn.
    if (!pick)
      pick = select_intermediate_goal(snap, cfg, nullptr, offset + revisit_round++);
    if (!pick) return;  // nothing left to try
    const CanonicalKey mkey = *pick;
    run.store.record(TraceStep{2, worker_id, TraceStep::Kind::selected, mkey,
                               std::nullopt, std::nullopt,
                               fresh ? "selected intermediate" : "revisiting intermediate"});
    bool fired = false;
    if (fresh) {
      for (int step = 3; step <= 12 && !run.done.load(); ++step) {
        if (!run.spend()) return;
        StepDelta delta = run_step(snap, mkey, step,
                                   DecisivenessLimits{cfg.budget.max_extension_ground});
        TraceStep ts{step, worker_id,
                     delta.fired ? TraceStep::Kind::fired
                                 : (delta.seeds.empty() && delta.identifies.empty()
                                        ? TraceStep::Kind::pass
                                        : TraceStep::Kind::update),
                     mkey, delta.produced, delta.source, delta.detail};
        if (!delta.seeds.empty() || !delta.identifies.empty()) {
          run.store.commit(delta, std::move(ts));
          snap = run.store.snapshot();
        } else {
          run.store.record(std::move(ts));
        }
        if (delta.fired) {
          fired = true;
          break;
        }
      }
      visited.insert(mkey);
      if (fired) continue;
    }
    if (!designated && !fresh) {
      // Nothing new for this worker; let the designated worker exhaust.
      std::this_thread::yield();
      continue;
    }
    if (!designated) continue;
    if (!run.spend()) return;
    ExhaustOutcome out = exhaust_step(snap, mkey, cfg, exhaust);
    if (!out.seeds.empty()) {
      StepDelta delta;
      delta.seeds = out.seeds;
      run.store.commit(delta, TraceStep{13, worker_id, TraceStep::Kind::update, mkey,
                                        std::nullopt, std::nullopt,
                                        "classified " + std::to_string(out.added) +
                                            " extension classes"});
      continue;
    }
    if (out.exhausted) {
      run.store.record(TraceStep{13, worker_id, TraceStep::Kind::reset, mkey,
                                 std::nullopt, std::nullopt,
                                 "extension classes exhausted; resetting to the goal"});
      visited.erase(snap.goal_key());
      continue;
    }
    if (out.capped) {
      // No further progress through this intermediate; keep checking for
      // decisiveness until the verdict arrives or the budget runs out.
      run.store.record(TraceStep{13, worker_id, TraceStep::Kind::capped, mkey,
                                 std::nullopt, std::nullopt,
                                 "extension bound exceeds the enumeration cap"});
      continue;
    }
  }
}

}  // namespace detail

// Runs the decision procedure to a verdict or resource exhaustion. The
// initial tableau is the bare goal tableau, joined with the knowledge base
// when one is given.
inline DecideResult decide(const Matroid& goal, const EngineConfig& cfg = {},
                           const std::optional<Tableau>& kb = std::nullopt) {
  if (cfg.worker_count < 1) throw Error("worker count must be at least 1");
  if (cfg.goal_selection != "small-first")
    throw Error("unknown goal-selection heuristic '" + cfg.goal_selection + "'");
  Tableau initial(goal);
  if (kb) initial = expansion(extended(join(initial, *kb)));
  detail::SharedRun run(std::move(initial), cfg);
  if (cfg.worker_count == 1) {
    detail::worker_loop(run, 0);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(cfg.worker_count);
    for (int w = 0; w < cfg.worker_count; ++w)
      workers.emplace_back([&run, w] { detail::worker_loop(run, w); });
    for (auto& th : workers) th.join();
  }
  DecideResult result{Outcome::resource_exhausted, std::nullopt, run.store.trace(),
                      run.final_tableau ? *run.final_tableau : run.store.snapshot()};
  if (run.verdict) {
    result.verdict = run.verdict;
    result.outcome = run.verdict->decision == Verdict::Decision::gammoid
                         ? Outcome::gammoid
                         : Outcome::not_gammoid;
  }
  return result;
}

// Parallel front end; with one worker this degenerates to decide.
inline DecideResult run_parallel(const Matroid& goal, const EngineConfig& cfg,
                                 const std::optional<Tableau>& kb = std::nullopt) {
  return decide(goal, cfg, kb);
}

}  // namespace gammoid
