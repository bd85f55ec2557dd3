// Copyright 2026 The chillopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "chillopt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "chillopt/csv.hpp"
#include "chillopt/rng.hpp"

namespace chillopt {

namespace {

struct Candidate {
  std::vector<double> slots;
  double fitness = std::numeric_limits<double>::infinity();
  PlantOutput predicted;
};

double clamp(double v, double lo, double hi) {
  return std::min(std::max(v, lo), hi);
}

// Reflect v into [lo, hi]; collapsed boxes pin the slot.
double reflect(double v, double lo, double hi) {
  if (hi <= lo) return lo;
  const double span = hi - lo;
  while (v < lo || v > hi) {
    if (v < lo) v = lo + (lo - v);
    if (v > hi) v = hi - (v - hi);
    // A huge excursion can oscillate; clamp once it is within one span.
    if (std::abs(v - lo) > 2.0 * span) return clamp(v, lo, hi);
  }
  return v;
}

void check_problem(const OptProblem& problem) {
  if (!problem.map) throw std::invalid_argument("problem has no plant map");
  const auto n_slots = SetpointVector::all_off(problem.cfg).flatten().size();
  if (problem.bounds.size() != n_slots)
    throw std::invalid_argument("bounds do not match the slot layout");
  if (problem.target_cooling_kw < 0.0)
    throw std::invalid_argument("negative cooling target");
  if (problem.penalty_weight <= 1.0)
    throw std::invalid_argument("penalty weight must exceed 1");
}

double evaluate(const OptProblem& problem, const std::vector<double>& slots,
                PlantOutput& out) {
  const auto sp = SetpointVector::unflatten(problem.cfg, slots);
  out = problem.map(sp, problem.weather);
  return out.power_kw +
         problem.penalty_weight *
             std::max(0.0, problem.target_cooling_kw - out.cooling_kw);
}

bool is_feasible(const OptProblem& problem, const PlantOutput& out) {
  return out.cooling_kw >=
         (1.0 - problem.shortfall_tolerance) * problem.target_cooling_kw;
}

OptResult finish(const OptProblem& problem, const Candidate& best,
                 std::size_t evaluations, std::vector<double> trace) {
  OptResult r;
  r.best_setpoints = SetpointVector::unflatten(problem.cfg, best.slots);
  r.predicted = best.predicted;
  r.fitness = best.fitness;
  r.feasible = is_feasible(problem, best.predicted);
  r.evaluations = evaluations;
  r.trace = std::move(trace);
  return r;
}

std::vector<double> random_candidate(const OptProblem& problem, Rng& rng) {
  std::vector<double> slots(problem.bounds.size());
  for (std::size_t j = 0; j < slots.size(); ++j) {
    const auto& b = problem.bounds[j];
    slots[j] = b.discrete ? (rng.bernoulli(0.5) ? 1.0 : 0.0)
                          : rng.uniform(b.lo, b.hi);
  }
  return slots;
}

}  // namespace

std::vector<SlotBounds> default_bounds(const PlantConfig& cfg) {
  std::vector<SlotBounds> bounds;
  bounds.reserve(SetpointVector::all_off(cfg).flatten().size());
  for (std::size_t i = 0; i < cfg.chillers.size(); ++i)
    bounds.push_back({0.0, 1.0, true});
  for (std::size_t i = 0; i < cfg.chillers.size(); ++i)
    bounds.push_back({5.0, 11.0, false});
  for (std::size_t i = 0; i < cfg.pumps.size(); ++i)
    bounds.push_back({0.0, 1.0, true});
  for (std::size_t i = 0; i < cfg.pumps.size(); ++i)
    bounds.push_back({0.3, 1.0, false});
  for (std::size_t i = 0; i < cfg.towers.size(); ++i)
    bounds.push_back({0.0, 1.0, true});
  for (std::size_t i = 0; i < cfg.towers.size(); ++i)
    bounds.push_back({0.2, 1.0, false});
  return bounds;
}

OptProblem make_surrogate_problem(const SurrogateModel& model,
                                  const PlantConfig& cfg,
                                  const WeatherRecord& weather,
                                  double target_cooling_kw) {
  OptProblem p;
  p.map = [&model](const SetpointVector& sp, const WeatherRecord& w) {
    return predict(model, sp, w);
  };
  p.cfg = cfg;
  p.weather = weather;
  p.target_cooling_kw = target_cooling_kw;
  p.bounds = default_bounds(cfg);
  return p;
}

OptProblem make_plant_problem(const PlantConfig& cfg,
                              const WeatherRecord& weather,
                              double target_cooling_kw) {
  OptProblem p;
  const PlantConfig plant = cfg;
  const double demand = target_cooling_kw;
  p.map = [plant, demand](const SetpointVector& sp, const WeatherRecord& w) {
    return plant_step(plant, w, sp, demand);
  };
  p.cfg = cfg;
  p.weather = weather;
  p.target_cooling_kw = target_cooling_kw;
  p.bounds = default_bounds(cfg);
  return p;
}

OptProblem default_benchmark_problem() {
  return make_plant_problem(PlantConfig::default_config(),
                            make_weather(30.0, 60.0), 3000.0);
}

double fitness(const OptProblem& problem, const SetpointVector& candidate) {
  check_problem(problem);
  const auto slots = candidate.flatten();
  if (slots.size() != problem.bounds.size())
    throw std::invalid_argument("candidate does not match the slot layout");
  for (std::size_t j = 0; j < slots.size(); ++j) {
    const auto& b = problem.bounds[j];
    const double v = slots[j];
    if (b.discrete) {
      if (v != 0.0 && v != 1.0)
        throw std::invalid_argument("candidate out of bounds");
    } else if ((v < b.lo || v > b.hi) && v != 0.0) {
      throw std::invalid_argument("candidate out of bounds");
    }
  }
  PlantOutput out;
  return evaluate(problem, slots, out);
}

namespace {

OptResult ga_run(const OptProblem& problem, const GAConfig& config,
                 const std::vector<double>* warm_start) {
  check_problem(problem);
  if (config.population == 0 || config.population % 2 != 0)
    throw std::invalid_argument("population must be positive and even");
  if (config.elitism >= config.population)
    throw std::invalid_argument("elitism must be smaller than population");
  if (config.generations <= 0)
    throw std::invalid_argument("generations must be positive");
  if (config.tournament == 0)
    throw std::invalid_argument("tournament size must be positive");

  const std::size_t dim = problem.bounds.size();
  const double mut_rate = config.mutation_rate > 0.0
                              ? config.mutation_rate
                              : 1.0 / static_cast<double>(dim);
  Rng rng(config.seed);

  std::vector<Candidate> pop(config.population), next(config.population);
  for (auto& c : pop) c.slots = random_candidate(problem, rng);
  if (warm_start) {
    if (warm_start->size() != dim)
      throw std::invalid_argument("warm start does not match the slot layout");
    auto& w = pop[0].slots;
    w = *warm_start;
    for (std::size_t j = 0; j < dim; ++j) {
      const auto& b = problem.bounds[j];
      if (b.discrete)
        w[j] = w[j] >= 0.5 ? 1.0 : 0.0;
      else if (w[j] != 0.0)
        w[j] = clamp(w[j], b.lo, b.hi);
    }
  }

  Candidate best;
  std::size_t evaluations = 0;
  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(config.generations));

  const auto tournament_pick = [&]() -> const Candidate& {
    std::size_t winner = rng.uniform_int(config.population);
    for (std::size_t t = 1; t < config.tournament; ++t) {
      const std::size_t rival = rng.uniform_int(config.population);
      if (pop[rival].fitness < pop[winner].fitness) winner = rival;
    }
    return pop[winner];
  };

  for (int gen = 0; gen < config.generations; ++gen) {
    for (auto& c : pop) {
      c.fitness = evaluate(problem, c.slots, c.predicted);
      ++evaluations;
      if (c.fitness < best.fitness) best = c;
    }
    trace.push_back(best.fitness);
    if (gen + 1 == config.generations) break;

    // Elites carry over untouched; the rest are bred fresh.
    std::vector<std::size_t> order(config.population);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::partial_sort(order.begin(), order.begin() + config.elitism,
                      order.end(), [&](std::size_t a, std::size_t b) {
                        return pop[a].fitness < pop[b].fitness;
                      });
    for (std::size_t e = 0; e < config.elitism; ++e) next[e] = pop[order[e]];

    for (std::size_t i = config.elitism; i < config.population; i += 2) {
      auto a = tournament_pick().slots;
      auto b = tournament_pick().slots;
      if (rng.uniform01() < config.crossover_rate) {
        for (std::size_t j = 0; j < dim; ++j) {
          if (rng.bernoulli(0.5)) std::swap(a[j], b[j]);
        }
      }
      for (auto* child : {&a, &b}) {
        for (std::size_t j = 0; j < dim; ++j) {
          if (rng.uniform01() >= mut_rate) continue;
          const auto& bx = problem.bounds[j];
          if (bx.discrete) {
            (*child)[j] = (*child)[j] == 0.0 ? 1.0 : 0.0;
          } else {
            const double step =
                rng.normal(0.0, config.mutation_scale * (bx.hi - bx.lo));
            (*child)[j] = reflect((*child)[j] + step, bx.lo, bx.hi);
          }
        }
      }
      next[i].slots = std::move(a);
      if (i + 1 < config.population) next[i + 1].slots = std::move(b);
    }
    pop.swap(next);
  }
  return finish(problem, best, evaluations, std::move(trace));
}

}  // namespace

OptResult ga_optimize(const OptProblem& problem, const GAConfig& config) {
  return ga_run(problem, config, nullptr);
}

OptResult ga_optimize(const OptProblem& problem, const GAConfig& config,
                      std::span<const double> warm_start) {
  const std::vector<double> w(warm_start.begin(), warm_start.end());
  return ga_run(problem, config, &w);
}

OptResult pso_optimize(const OptProblem& problem, const PSOConfig& config) {
  check_problem(problem);
  if (config.swarm == 0) throw std::invalid_argument("empty swarm");
  if (config.iterations <= 0)
    throw std::invalid_argument("iterations must be positive");
  if (config.inertia <= 0.0 || config.cognitive <= 0.0 || config.social <= 0.0)
    throw std::invalid_argument("coefficients must be positive");

  const std::size_t dim = problem.bounds.size();
  Rng rng(config.seed);

  // Discrete slots fly in a continuous [0, 1] box; a candidate bit is the
  // sigmoid of the centered position thresholded at one half.
  const auto slot_lo = [&](std::size_t j) {
    return problem.bounds[j].discrete ? 0.0 : problem.bounds[j].lo;
  };
  const auto slot_hi = [&](std::size_t j) {
    return problem.bounds[j].discrete ? 1.0 : problem.bounds[j].hi;
  };
  const auto to_candidate = [&](const std::vector<double>& x) {
    std::vector<double> slots(x);
    for (std::size_t j = 0; j < dim; ++j) {
      if (!problem.bounds[j].discrete) continue;
      const double s = 1.0 / (1.0 + std::exp(-8.0 * (x[j] - 0.5)));
      slots[j] = s >= 0.5 ? 1.0 : 0.0;
    }
    return slots;
  };

  struct Particle {
    std::vector<double> x, v, best_x;
    double best_fitness = std::numeric_limits<double>::infinity();
  };
  std::vector<Particle> swarm(config.swarm);
  for (auto& p : swarm) {
    p.x.resize(dim);
    p.v.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      const double lo = slot_lo(j), hi = slot_hi(j);
      p.x[j] = rng.uniform(lo, hi);
      const double vmax = 0.5 * (hi - lo);
      p.v[j] = rng.uniform(-vmax, vmax);
    }
    p.best_x = p.x;
  }

  Candidate best;
  std::vector<double> best_x;
  std::size_t evaluations = 0;
  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(config.iterations));

  for (int iter = 0; iter < config.iterations; ++iter) {
    for (auto& p : swarm) {
      PlantOutput out;
      const auto slots = to_candidate(p.x);
      const double f = evaluate(problem, slots, out);
      ++evaluations;
      if (f < p.best_fitness) {
        p.best_fitness = f;
        p.best_x = p.x;
      }
      if (f < best.fitness) {
        best.fitness = f;
        best.slots = slots;
        best.predicted = out;
        best_x = p.x;
      }
    }
    trace.push_back(best.fitness);
    if (iter + 1 == config.iterations) break;

    for (auto& p : swarm) {
      for (std::size_t j = 0; j < dim; ++j) {
        const double lo = slot_lo(j), hi = slot_hi(j);
        const double vmax = 0.5 * (hi - lo);
        const double r1 = rng.uniform01(), r2 = rng.uniform01();
        p.v[j] = config.inertia * p.v[j] +
                 config.cognitive * r1 * (p.best_x[j] - p.x[j]) +
                 config.social * r2 * (best_x[j] - p.x[j]);
        p.v[j] = clamp(p.v[j], -vmax, vmax);
        p.x[j] = clamp(p.x[j] + p.v[j], lo, hi);
      }
    }
  }
  return finish(problem, best, evaluations, std::move(trace));
}

StabilityReport stability_report(const OptProblem& problem, const GAConfig& ga,
                                 const PSOConfig& pso, int n_seeds) {
  if (n_seeds < 10) throw std::invalid_argument("need at least 10 seeds");
  if (ga.population * static_cast<std::size_t>(ga.generations) !=
      pso.swarm * static_cast<std::size_t>(pso.iterations))
    throw std::invalid_argument("unequal evaluation budgets");

  const auto summarize = [](std::vector<StabilityRow> rows) {
    StabilitySummary s;
    s.rows = std::move(rows);
    const double n = static_cast<double>(s.rows.size());
    for (const auto& r : s.rows) {
      s.mean_fitness += r.best_fitness;
      s.mean_evals_to_5pct += static_cast<double>(r.evals_to_5pct);
    }
    s.mean_fitness /= n;
    s.mean_evals_to_5pct /= n;
    double ss = 0.0;
    for (const auto& r : s.rows) {
      const double d = r.best_fitness - s.mean_fitness;
      ss += d * d;
    }
    s.std_fitness = n > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    s.cv_fitness = s.mean_fitness != 0.0 ? s.std_fitness / s.mean_fitness : 0.0;
    return s;
  };

  const auto evals_to_5pct = [](const OptResult& r,
                                std::size_t per_round) -> std::size_t {
    const double goal = r.fitness * 1.05 + 1e-12;
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
      if (r.trace[i] <= goal) return (i + 1) * per_round;
    }
    return r.evaluations;
  };

  StabilityReport report;
  std::vector<StabilityRow> ga_rows, pso_rows;
  for (int s = 0; s < n_seeds; ++s) {
    GAConfig g = ga;
    g.seed = ga.seed + static_cast<std::uint64_t>(s);
    const auto gr = ga_optimize(problem, g);
    ga_rows.push_back({g.seed, gr.fitness, evals_to_5pct(gr, g.population)});

    PSOConfig p = pso;
    p.seed = pso.seed + static_cast<std::uint64_t>(s);
    const auto pr = pso_optimize(problem, p);
    pso_rows.push_back({p.seed, pr.fitness, evals_to_5pct(pr, p.swarm)});
  }
  report.ga = summarize(std::move(ga_rows));
  report.pso = summarize(std::move(pso_rows));
  return report;
}

std::vector<OptResult> optimize_profile(const SurrogateModel& model,
                                        const PlantConfig& cfg,
                                        const WeatherSeries& weather,
                                        const CoolingProfile& profile,
                                        const ProfileOptConfig& config) {
  const TargetAwareMap map = [&model](const SetpointVector& sp,
                                      const WeatherRecord& w, double) {
    return predict(model, sp, w);
  };
  return optimize_profile(map, cfg, weather, profile, config);
}

std::vector<OptResult> optimize_profile(const TargetAwareMap& map,
                                        const PlantConfig& cfg,
                                        const WeatherSeries& weather,
                                        const CoolingProfile& profile,
                                        const ProfileOptConfig& config) {
  if (!map) throw std::invalid_argument("problem has no plant map");
  validate_series(weather);
  validate_series(profile);
  if (!aligned(weather, profile))
    throw std::invalid_argument("misaligned series");

  OptProblem problem;
  problem.cfg = cfg;
  problem.bounds = default_bounds(cfg);

  std::vector<OptResult> results;
  results.reserve(weather.size());
  std::vector<double> warm;
  for (std::size_t i = 0; i < weather.size(); ++i) {
    if (!weather.records[i]) throw std::invalid_argument("weather has gaps");
    if (!profile.records[i]) throw std::invalid_argument("profile has gaps");
    problem.weather = *weather.records[i];
    problem.target_cooling_kw = *profile.records[i];
    const double target = problem.target_cooling_kw;
    problem.map = [&map, target](const SetpointVector& sp,
                                 const WeatherRecord& w) {
      return map(sp, w, target);
    };
    OptResult r = (config.warm_start && !warm.empty())
                      ? ga_optimize(problem, config.ga, warm)
                      : ga_optimize(problem, config.ga);
    if (config.warm_start) warm = r.best_setpoints.flatten();
    results.push_back(std::move(r));
  }
  return results;
}

void write_recommendations_csv(const std::string& path, const PlantConfig& cfg,
                               const Timestamp& start, int step_minutes,
                               const std::vector<OptResult>& results) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "timestamp";
  for (const auto& name : setpoint_slot_names(cfg)) out << ',' << name;
  out << ",predicted_power_kw,predicted_cooling_kw,feasible\n";
  Timestamp t = start;
  for (const auto& r : results) {
    out << t.to_string();
    for (const double v : r.best_setpoints.canonicalized().flatten())
      out << ',' << format_double(v);
    out << ',' << format_double(r.predicted.power_kw) << ','
        << format_double(r.predicted.cooling_kw) << ','
        << (r.feasible ? 1 : 0) << '\n';
    t = t.plus_minutes(step_minutes);
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace chillopt
