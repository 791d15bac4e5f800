#include "trustsched/simulator.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>
#include <random>
#include <stdexcept>
#include <thread>

namespace trustsched {

void SimConfig::validate() const {
  if (job_count == 0) throw std::invalid_argument("job count must be positive");
  if (replications == 0) throw std::invalid_argument("replication count must be positive");
  if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) {
    throw ModelError(ErrorCode::BadProbability, "warmup fraction must lie in [0, 1)");
  }
  if (!(probe_probability >= 0.0 && probe_probability < 1.0)) {
    throw ModelError(ErrorCode::BadProbability, "probe probability must lie in [0, 1)");
  }
}

Rank initial_rank(const SizeGrid& grid, PolicyKind kind, std::size_t declared) {
  switch (kind) {
    case PolicyKind::Fcfs:
    case PolicyKind::Scf: return 1;
    case PolicyKind::MeasuredTrust:
    case PolicyKind::BlindTrust:
      if (declared >= grid.size()) throw ModelError(ErrorCode::BadIndex, "declared class out of range");
      return declared + 1;
  }
  throw std::logic_error("unhandled policy kind");
}

std::vector<RankStep> rank_boundaries(const SizeGrid& grid, PolicyKind kind, std::size_t declared,
                                      bool punished) {
  const std::size_t n = grid.size();
  std::vector<RankStep> steps;
  switch (kind) {
    case PolicyKind::Fcfs: break;
    case PolicyKind::Scf:
      for (std::size_t c = 0; c + 1 < n; ++c) steps.push_back({grid[c], c + 2});
      break;
    case PolicyKind::MeasuredTrust:
    case PolicyKind::BlindTrust: {
      if (declared >= n) throw ModelError(ErrorCode::BadIndex, "declared class out of range");
      // No job is larger than z_n, so boundaries at z_n are never reached.
      if (declared + 1 >= n) break;
      if (punished) {
        steps.push_back({grid[declared], n + 1});
      } else if (kind == PolicyKind::MeasuredTrust) {
        for (std::size_t c = declared; c + 1 < n; ++c) steps.push_back({grid[c], c + 2});
      }
      break;
    }
  }
  return steps;
}

std::uint64_t replication_seed(std::uint64_t base, std::size_t replication) {
  std::uint64_t x = base + static_cast<std::uint64_t>(replication);
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

SimEstimate combine_replications(const std::vector<double>& means, std::uint64_t count) {
  SimEstimate out;
  out.count = count;
  if (means.empty()) {
    out.mean = std::numeric_limits<double>::quiet_NaN();
    out.half_width95 = std::numeric_limits<double>::infinity();
    return out;
  }
  double sum = 0.0;
  for (double m : means) sum += m;
  out.mean = sum / static_cast<double>(means.size());
  if (means.size() < 2) {
    out.half_width95 = std::numeric_limits<double>::infinity();
    return out;
  }
  double ss = 0.0;
  for (double m : means) ss += (m - out.mean) * (m - out.mean);
  const double df = static_cast<double>(means.size() - 1);
  const double sd = std::sqrt(ss / df);
  const boost::math::students_t dist(df);
  out.half_width95 = boost::math::quantile(dist, 0.975) * sd / std::sqrt(df + 1.0);
  return out;
}

namespace {

struct Accumulator {
  double sum = 0.0;
  std::uint64_t count = 0;
  void add(double v) {
    sum += v;
    ++count;
  }
};

struct ReplicationStats {
  Accumulator overall;
  std::vector<Accumulator> cells;   // n * n, [true][declared]
  std::vector<Accumulator> honest;  // n, by estimate
  Accumulator all_jobs;
  double area = 0.0;
  double horizon = 0.0;
};

struct Job {
  JobRecord record;
  double size = 0.0;
  double age = 0.0;
  Rank rank = 0;
  const std::vector<RankStep>* steps = nullptr;
  std::size_t next_step = 0;
  std::uint64_t seq = 0;
};

struct QueueKey {
  Rank rank;
  std::uint64_t seq;
  std::size_t slot;
  // Min-heap on (rank, arrival order).
  bool operator<(const QueueKey& o) const {
    return rank != o.rank ? rank > o.rank : seq > o.seq;
  }
};

void write_trace_row(std::ostream& os, const JobRecord& r) {
  os << r.arrival_time << ',' << r.true_class + 1 << ',' << r.estimate + 1 << ','
     << r.declared + 1 << ',' << (r.punish_coin ? 1 : 0) << ',' << (r.is_probe ? 1 : 0) << ','
     << r.response_time() << '\n';
}

ReplicationStats run_replication(const SystemConfig& config, const PolicySpec& policy,
                                 const SimConfig& sim, std::uint64_t seed, std::ostream* trace) {
  const std::size_t n = config.n();
  const auto& grid = config.grid();
  const auto& matrix = config.matrix();

  // Precomputed boundary tables indexed [declared][punished].
  std::vector<std::vector<RankStep>> step_tables(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    step_tables[2 * k] = rank_boundaries(grid, policy.kind, k, false);
    step_tables[2 * k + 1] = rank_boundaries(grid, policy.kind, k, true);
  }

  std::vector<double> cell_weights(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) cell_weights[i * n + j] = matrix(i, j);
  }

  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> cell_dist(cell_weights.begin(), cell_weights.end());
  std::exponential_distribution<double> interarrival(config.lambda());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> any_class(0, n - 1);
  const double punish_p = policy.is_trust() ? policy.punishment : 0.0;

  ReplicationStats stats;
  stats.cells.resize(n * n);
  stats.honest.resize(n);

  const auto warmup = static_cast<std::uint64_t>(sim.warmup_fraction * static_cast<double>(sim.job_count));

  std::vector<Job> slots;
  std::vector<std::size_t> free_slots;
  std::priority_queue<QueueKey> queue;

  double now = 0.0;
  double next_arrival = interarrival(rng);
  std::uint64_t admitted = 0;
  double busy_time = 0.0;
  double completed_work = 0.0;

  auto admit = [&] {
    Job job;
    const std::size_t cell = cell_dist(rng);
    job.record.arrival_time = next_arrival;
    job.record.true_class = cell / n;
    job.record.estimate = cell % n;
    job.record.punish_coin = unit(rng) < punish_p;
    job.record.is_probe = sim.probe_probability > 0.0 && unit(rng) < sim.probe_probability;
    job.record.declared = job.record.is_probe ? any_class(rng) : job.record.estimate;
    job.size = grid[job.record.true_class];
    job.rank = initial_rank(grid, policy.kind, job.record.declared);
    job.steps = &step_tables[2 * job.record.declared + (job.record.punish_coin ? 1 : 0)];
    job.seq = admitted++;

    std::size_t slot;
    if (free_slots.empty()) {
      slot = slots.size();
      slots.push_back(job);
    } else {
      slot = free_slots.back();
      free_slots.pop_back();
      slots[slot] = job;
    }
    queue.push({job.rank, job.seq, slot});
    next_arrival += interarrival(rng);
  };

  auto advance = [&](double dt) {
    stats.area += static_cast<double>(queue.size()) * dt;
    if (!queue.empty()) busy_time += dt;
    now += dt;
  };

  // Arrivals continue past job_count so the last counted jobs see a loaded
  // system instead of a draining one; the extra jobs are never recorded.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::uint64_t counted_left = sim.job_count;
  while (counted_left > 0) {
    const double to_arrival = next_arrival - now;
    if (queue.empty()) {
      advance(to_arrival);
      now = next_arrival;
      admit();
      continue;
    }

    const QueueKey head = queue.top();
    Job& job = slots[head.slot];
    const double to_completion = job.size - job.age;
    const double to_step =
        job.next_step < job.steps->size() ? (*job.steps)[job.next_step].age - job.age : kInf;

    // Same-instant order: completion, then arrival, then rank crossing.
    if (to_completion <= to_arrival && to_completion <= to_step) {
      advance(to_completion);
      queue.pop();
      job.age = job.size;
      job.record.completion_time = now;
      completed_work += job.size;
      free_slots.push_back(head.slot);
      if (job.seq >= sim.job_count) continue;
      --counted_left;
      const double response = job.record.response_time();
      stats.all_jobs.add(response);
      if (job.seq >= warmup) {
        if (job.record.is_probe) {
          stats.cells[job.record.true_class * n + job.record.declared].add(response);
        } else {
          stats.overall.add(response);
          stats.honest[job.record.estimate].add(response);
        }
      }
      if (trace != nullptr) write_trace_row(*trace, job.record);
    } else if (to_arrival <= to_step) {
      advance(to_arrival);
      now = next_arrival;
      job.age += to_arrival;
      admit();
    } else {
      advance(to_step);
      const RankStep step = (*job.steps)[job.next_step++];
      job.age = step.age;
      job.rank = step.rank;
      queue.pop();
      queue.push({job.rank, job.seq, head.slot});
    }
  }
  stats.horizon = now;

  // Work conservation: the server was busy exactly as long as the work it
  // did, including partial service of uncounted jobs still queued.
  while (!queue.empty()) {
    completed_work += slots[queue.top().slot].age;
    queue.pop();
  }
  if (std::abs(busy_time - completed_work) > 1e-7 * std::max(1.0, completed_work)) {
    throw std::logic_error("simulation violated work conservation");
  }
  return stats;
}

}  // namespace

SimResult simulate(const SystemConfig& config, const PolicySpec& policy, const SimConfig& sim,
                   std::ostream* trace) {
  sim.validate();
  check_probability(policy.punishment, "punishment probability");
  const std::size_t n = config.n();
  const std::size_t reps = sim.replications;

  if (trace != nullptr) {
    *trace << "arrival_time,i,j,k,punish_coin,is_probe,response_time\n";
  }

  std::vector<ReplicationStats> results(reps);
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(reps, std::thread::hardware_concurrency()));
  if (workers == 1) {
    for (std::size_t r = 0; r < reps; ++r) {
      results[r] = run_replication(config, policy, sim, replication_seed(sim.seed, r),
                                   r == 0 ? trace : nullptr);
    }
  } else {
    std::vector<std::exception_ptr> errors(workers);
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t r = w; r < reps; r += workers) {
              results[r] = run_replication(config, policy, sim, replication_seed(sim.seed, r),
                                           r == 0 ? trace : nullptr);
            }
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  auto gather = [&](auto pick) {
    std::vector<double> means;
    std::uint64_t count = 0;
    for (const auto& rep : results) {
      const Accumulator& acc = pick(rep);
      if (acc.count == 0) continue;
      means.push_back(acc.sum / static_cast<double>(acc.count));
      count += acc.count;
    }
    return combine_replications(means, count);
  };

  SimResult out;
  out.overall = gather([](const ReplicationStats& r) -> const Accumulator& { return r.overall; });
  out.all_jobs_response =
      gather([](const ReplicationStats& r) -> const Accumulator& { return r.all_jobs; });
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      auto est = gather([&](const ReplicationStats& r) -> const Accumulator& {
        return r.cells[i * n + k];
      });
      if (est.count > 0) out.per_cell[{i, k}] = est;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    auto est = gather([&](const ReplicationStats& r) -> const Accumulator& { return r.honest[j]; });
    if (est.count > 0) out.per_honest_class[j] = est;
  }
  {
    std::vector<double> means;
    for (const auto& rep : results) means.push_back(rep.area / rep.horizon);
    out.number_in_system = combine_replications(means, reps);
  }

  if (config.load() >= 0.98 && sim.job_count < 10'000'000) {
    out.warnings.push_back("NotStabilized: load " + std::to_string(config.load()) +
                           " >= 0.98 with fewer than 1e7 jobs per replication");
  }
  return out;
}

}  // namespace trustsched
