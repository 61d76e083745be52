// Copyright 2026 The RoLin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rolin/robust_cv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <utility>

#include "rolin/core.hpp"
#include "rolin/error.hpp"
#include "rolin/format.hpp"
#include "rolin/parallel.hpp"
#include "rolin/random.hpp"

namespace rolin {

void CVConfig::validate() const {
  const auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!finite_nonneg(theta_ratio) || !finite_nonneg(theta_slack) || !(theta_gain >= 0.0) ||
      std::isnan(theta_gain)) {
    throw InvalidArgument("cv: thresholds must be nonnegative");
  }
  if (fold_count < 2) throw InvalidArgument("cv: fold_count must be at least 2");
  if (instance_count < 1) throw InvalidArgument("cv: instance_count must be at least 1");
  if (sigma_grid.empty() || bmax_grid.empty()) throw InvalidArgument("cv: empty grid");
  for (double s : sigma_grid) {
    if (!finite_nonneg(s)) throw InvalidArgument("cv: sigma_ratio values must be nonnegative");
  }
  for (double b : bmax_grid) {
    if (!finite_nonneg(b)) throw InvalidArgument("cv: b_max values must be nonnegative");
  }
  if (normalize_options.empty()) throw InvalidArgument("cv: no normalize option");
  if (threads < 1) throw InvalidArgument("cv: threads must be at least 1");
}

std::vector<double> CVConfig::bmax_values(std::size_t n) const {
  std::vector<double> out = bmax_grid;
  if (scale_bmax_with_n) {
    const double factor = std::sqrt(static_cast<double>(n) / 15.0);
    for (double& b : out) b *= factor;
  }
  return out;
}

std::vector<Split> make_splits(std::size_t n, std::size_t fold_count, std::size_t instance_count,
                               std::uint64_t seed) {
  if (fold_count < 2) throw InvalidArgument("make_splits: fold_count must be at least 2");
  if (n < fold_count) {
    throw InvalidArgument("make_splits: need at least " + std::to_string(fold_count) +
                          " samples, got " + std::to_string(n));
  }
  std::vector<Split> splits;
  splits.reserve(fold_count * instance_count);
  const std::size_t base = n / fold_count;
  const std::size_t extra = n % fold_count;
  for (std::size_t t = 0; t < instance_count; ++t) {
    Rng rng(derive_seed(seed, t));
    const std::vector<std::size_t> perm = rng.permutation(n);
    std::size_t start = 0;
    for (std::size_t f = 0; f < fold_count; ++f) {
      const std::size_t size = base + (f < extra ? 1 : 0);
      Split s;
      s.holdout.assign(perm.begin() + start, perm.begin() + start + size);
      s.train.assign(perm.begin(), perm.begin() + start);
      s.train.insert(s.train.end(), perm.begin() + start + size, perm.end());
      std::sort(s.holdout.begin(), s.holdout.end());
      std::sort(s.train.begin(), s.train.end());
      splits.push_back(std::move(s));
      start += size;
    }
  }
  return splits;
}

double loss_ratio_term(double train_loss, double holdout_loss) noexcept {
  if (train_loss == 0.0) {
    return holdout_loss == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  }
  return holdout_loss / train_loss;
}

CandidateScore score_from_losses(const HyperParams& psi, std::span<const double> train_losses,
                                 std::span<const double> holdout_losses, double theta_ratio) {
  if (train_losses.size() != holdout_losses.size() || train_losses.empty()) {
    throw InvalidArgument("score_from_losses: need matching, nonempty loss lists");
  }
  CandidateScore s;
  s.psi = psi;
  double sum = 0.0;
  double ratio_sum = 0.0;
  s.loss_max = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < train_losses.size(); ++j) {
    sum += holdout_losses[j];
    s.loss_max = std::max(s.loss_max, holdout_losses[j]);
    ratio_sum += loss_ratio_term(train_losses[j], holdout_losses[j]);
  }
  const double count = static_cast<double>(train_losses.size());
  s.loss_avg = sum / count;
  s.loss_ratio = ratio_sum / count;
  s.cost = s.loss_ratio <= theta_ratio ? s.loss_avg : s.loss_max;
  return s;
}

std::size_t max_reliable_pcs(const std::function<double(std::size_t)>& ratio_of,
                             std::size_t k_cap, double theta_ratio, std::size_t* stopped_at) {
  std::size_t k_max = 0;
  std::size_t stop = 0;
  for (std::size_t k = 1; k <= k_cap; ++k) {
    if (!(ratio_of(k) <= theta_ratio)) {
      stop = k;
      break;
    }
    k_max = k;
  }
  if (stopped_at != nullptr) *stopped_at = stop;
  return std::max<std::size_t>(k_max, 1);
}

std::size_t robust_params_index(std::span<const CandidateScore> candidates, double theta_slack) {
  if (candidates.empty()) throw InvalidArgument("robust_params: no candidates");
  double best_cost = std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) best_cost = std::min(best_cost, c.cost);
  const double limit = (1.0 + theta_slack) * best_cost;
  std::size_t chosen = candidates.size();
  double chosen_key = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!(candidates[i].cost <= limit)) continue;
    const double key = candidates[i].cost + candidates[i].loss_max;
    if (chosen == candidates.size() || key < chosen_key) {
      chosen = i;
      chosen_key = key;
    }
  }
  if (chosen == candidates.size()) {
    // Only reachable when every cost is infinite or NaN.
    throw NumericalError("robust_params: no candidate has a finite cost");
  }
  return chosen;
}

HyperParams robust_params(std::span<const CandidateScore> candidates, double theta_slack) {
  return candidates[robust_params_index(candidates, theta_slack)].psi;
}

bool gain_rule_prefers_general(const CandidateScore& s0_robust, const CandidateScore& general,
                               double theta_gain) noexcept {
  return !(general.cost >= (1.0 - theta_gain) * s0_robust.cost);
}

std::size_t RobustCVDiagnostics::k_max(bool normalize) const {
  for (const auto& t : reliable_pcs) {
    if (t.normalize == normalize) return t.k_max;
  }
  throw InvalidArgument("diagnostics: normalize setting was not searched");
}

namespace {

/// Per-split training contexts for one normalize setting plus a cache of S0
/// fits keyed by k.
struct NormalizeContext {
  bool normalize = false;
  std::vector<PreparedData> prepared;
  std::map<std::size_t, std::vector<SubspaceFit>> s0_fits;
  std::size_t min_rank = 0;
};

class Evaluator {
 public:
  Evaluator(const LabeledDataset& data, std::span<const Split> splits, LossKind loss,
            LossKind objective, double theta_ratio, const SolverConfig& cfg,
            const std::vector<bool>& normalize_options, std::size_t threads)
      : loss_(loss), objective_(objective), theta_ratio_(theta_ratio), cfg_(cfg),
        threads_(threads) {
    for (const auto& s : splits) {
      train_.push_back(data.subset(s.train));
      holdout_.push_back(data.subset(s.holdout));
    }
    for (bool norm : normalize_options) {
      if (context_index(norm) != contexts_.size()) continue;
      NormalizeContext ctx;
      ctx.normalize = norm;
      ctx.prepared.resize(train_.size());
      parallel_for(train_.size(), threads_,
                   [&](std::size_t j) { ctx.prepared[j] = prepare(train_[j], norm); });
      ctx.min_rank = std::numeric_limits<std::size_t>::max();
      for (const auto& p : ctx.prepared) ctx.min_rank = std::min(ctx.min_rank, p.rank());
      contexts_.push_back(std::move(ctx));
    }
  }

  std::size_t k_cap(bool normalize) const { return context(normalize).min_rank; }

  /// Scores the candidates in order; results are independent of `threads`.
  std::vector<CandidateScore> score_all(std::span<const HyperParams> candidates) {
    ensure_fits(candidates);
    std::vector<CandidateScore> out(candidates.size());
    parallel_for(candidates.size(), threads_,
                 [&](std::size_t i) { out[i] = score_one(candidates[i]); });
    return out;
  }

  CandidateScore score(const HyperParams& psi) {
    return score_all(std::span<const HyperParams>(&psi, 1)).front();
  }

 private:
  std::size_t context_index(bool normalize) const {
    for (std::size_t i = 0; i < contexts_.size(); ++i) {
      if (contexts_[i].normalize == normalize) return i;
    }
    return contexts_.size();
  }
  const NormalizeContext& context(bool normalize) const {
    const std::size_t i = context_index(normalize);
    if (i == contexts_.size()) throw InvalidArgument("cv: normalize setting was not prepared");
    return contexts_[i];
  }
  NormalizeContext& context(bool normalize) {
    return const_cast<NormalizeContext&>(std::as_const(*this).context(normalize));
  }

  void ensure_fits(std::span<const HyperParams> candidates) {
    std::vector<std::pair<NormalizeContext*, std::size_t>> missing;
    for (const auto& psi : candidates) {
      NormalizeContext& ctx = context(psi.normalize);
      if (psi.k > ctx.min_rank) {
        throw InvalidArgument("cv: k = " + std::to_string(psi.k) +
                              " exceeds the smallest training-fold rank " +
                              std::to_string(ctx.min_rank));
      }
      if (ctx.s0_fits.count(psi.k) == 0) {
        ctx.s0_fits[psi.k].resize(train_.size());
        missing.emplace_back(&ctx, psi.k);
      }
    }
    const std::size_t splits = train_.size();
    parallel_for(missing.size() * splits, threads_, [&](std::size_t task) {
      auto [ctx, k] = missing[task / splits];
      const std::size_t j = task % splits;
      ctx->s0_fits.at(k)[j] = fit_subspace_classifier(ctx->prepared[j], k, loss_, cfg_);
    });
  }

  CandidateScore score_one(const HyperParams& psi) const {
    const NormalizeContext& ctx = context(psi.normalize);
    const auto& fits = ctx.s0_fits.at(psi.k);
    std::vector<double> tr(train_.size());
    std::vector<double> ho(train_.size());
    for (std::size_t j = 0; j < train_.size(); ++j) {
      const LinearModel model = complete_model(ctx.prepared[j], fits[j], psi, loss_);
      tr[j] = mean_loss(model, train_[j], objective_);
      ho[j] = mean_loss(model, holdout_[j], objective_);
    }
    return score_from_losses(psi, tr, ho, theta_ratio_);
  }

  LossKind loss_;
  LossKind objective_;
  double theta_ratio_;
  SolverConfig cfg_;
  std::size_t threads_;
  std::vector<LabeledDataset> train_;
  std::vector<LabeledDataset> holdout_;
  std::vector<NormalizeContext> contexts_;
};

std::vector<bool> distinct_options(const std::vector<bool>& options) {
  std::vector<bool> out;
  for (bool v : {false, true}) {
    if (std::find(options.begin(), options.end(), v) != options.end()) out.push_back(v);
  }
  return out;
}

void sort_canonical(std::vector<CandidateScore>& scores) {
  std::stable_sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) {
    return canonical_less(a.psi, b.psi);
  });
}

}  // namespace

CandidateScore calc_cost(const LabeledDataset& data, std::span<const Split> splits,
                         const HyperParams& psi, LossKind loss, LossKind cv_objective,
                         double theta_ratio, const SolverConfig& cfg) {
  psi.validate();
  require_fittable(loss);
  if (splits.empty()) throw InvalidArgument("calc_cost: no splits");
  Evaluator eval(data, splits, loss, cv_objective, theta_ratio, cfg, {psi.normalize}, 1);
  return eval.score(psi);
}

RobustCVResult robust_cv(const LabeledDataset& data, LossKind loss, const CVConfig& config,
                         const SolverConfig& solver_cfg) {
  config.validate();
  solver_cfg.validate();
  require_fittable(loss);
  data.validate();
  const std::vector<Split> splits =
      make_splits(data.size(), config.fold_count, config.instance_count, config.seed);
  const std::vector<bool> norms = distinct_options(config.normalize_options);
  Evaluator eval(data, splits, loss, config.objective_for(loss), config.theta_ratio, solver_cfg,
                 norms, config.threads);

  RobustCVResult result;
  RobustCVDiagnostics& diag = result.diagnostics;
  diag.split_count = splits.size();
  diag.bmax_values = config.bmax_values(data.size());
  const bool robust = config.selection == Selection::robust;

  for (bool norm : norms) {
    ReliablePcsTrace trace;
    trace.normalize = norm;
    trace.k_cap = eval.k_cap(norm);
    if (trace.k_cap == 0) {
      throw InvalidArgument("cv: a training fold has rank 0 (all-zero features)");
    }
    if (robust) {
      std::vector<CandidateScore> scanned;
      trace.k_max = max_reliable_pcs(
          [&](std::size_t k) {
            scanned.push_back(eval.score(HyperParams{k, 0.0, 0.0, norm}));
            trace.ratios.push_back(scanned.back().loss_ratio);
            return scanned.back().loss_ratio;
          },
          trace.k_cap, config.theta_ratio, &trace.stopped_at);
      if (scanned.size() > trace.k_max) scanned.resize(trace.k_max);
      diag.s0_candidates.insert(diag.s0_candidates.end(), scanned.begin(), scanned.end());
    } else {
      trace.k_max = trace.k_cap;
      std::vector<HyperParams> s0;
      for (std::size_t k = 1; k <= trace.k_cap; ++k) s0.push_back({k, 0.0, 0.0, norm});
      const auto scores = eval.score_all(s0);
      diag.s0_candidates.insert(diag.s0_candidates.end(), scores.begin(), scores.end());
      for (const auto& s : scores) trace.ratios.push_back(s.loss_ratio);
    }
    diag.reliable_pcs.push_back(std::move(trace));
  }

  std::vector<HyperParams> grid;
  for (const auto& trace : diag.reliable_pcs) {
    for (std::size_t k = 1; k <= trace.k_max; ++k) {
      for (double sigma : config.sigma_grid) {
        for (double b : diag.bmax_values) grid.push_back({k, sigma, b, trace.normalize});
      }
    }
  }
  std::stable_sort(grid.begin(), grid.end(), canonical_less);
  diag.candidates = eval.score_all(grid);
  sort_canonical(diag.s0_candidates);

  if (robust) {
    diag.s0_robust =
        diag.s0_candidates[robust_params_index(diag.s0_candidates, config.theta_slack)];
    diag.general_robust =
        diag.candidates[robust_params_index(diag.candidates, config.theta_slack)];
    diag.best = gain_rule_prefers_general(*diag.s0_robust, *diag.general_robust,
                                          config.theta_gain)
                    ? diag.general_robust->psi
                    : diag.s0_robust->psi;
  } else {
    std::vector<CandidateScore> all = diag.s0_candidates;
    all.insert(all.end(), diag.candidates.begin(), diag.candidates.end());
    sort_canonical(all);
    const auto best = std::min_element(all.begin(), all.end(), [](const auto& a, const auto& b) {
      return a.loss_avg < b.loss_avg;
    });
    diag.best = best->psi;
  }
  result.best = diag.best;
  return result;
}

void write_diagnostics_csv(std::ostream& out, const RobustCVDiagnostics& diagnostics) {
  out << "set,k,sigma_ratio,b_max,normalize,loss_avg,loss_max,loss_ratio,cost\n";
  const auto rows = [&](std::string_view set, const std::vector<CandidateScore>& scores) {
    for (const auto& s : scores) {
      out << set << ',' << s.psi.k << ',' << format_double(s.psi.sigma_ratio) << ','
          << format_double(s.psi.b_max) << ',' << (s.psi.normalize ? "true" : "false") << ','
          << format_double(s.loss_avg) << ',' << format_double(s.loss_max) << ','
          << format_double(s.loss_ratio) << ',' << format_double(s.cost) << '\n';
    }
  };
  rows("top_pcs", diagnostics.s0_candidates);
  rows("full", diagnostics.candidates);
}

LinearModel fit_rolin(const LabeledDataset& data, LossKind loss, const CVConfig& config,
                      const SolverConfig& solver_cfg, RobustCVResult* selection) {
  RobustCVResult cv = robust_cv(data, loss, config, solver_cfg);
  LinearModel model = calc_beta(data, cv.best, loss, solver_cfg);
  if (selection != nullptr) *selection = std::move(cv);
  return model;
}

}  // namespace rolin
