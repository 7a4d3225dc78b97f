#include "adr/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <memory>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "adr/constants.hpp"
#include "adr/util.hpp"

namespace adr {

namespace {

constexpr double kMaskSentinel = -1e9;
constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEpsilon = 1e-8;
constexpr double kAdvantageEpsilon = 1e-8;
constexpr int kFormatVersion = 1;

double gaussian(SplitMix64& rng) {
  const double u1 = 1.0 - rng.next_double();  // (0, 1], keeps the log finite
  const double u2 = rng.next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

/// Row-major [rows][cols] matrix with orthonormal rows (or columns when
/// rows > cols), scaled by gain. Modified Gram-Schmidt on Gaussian draws.
std::vector<double> orthogonal_matrix(int rows, int cols, double gain, SplitMix64& rng) {
  const int k = std::min(rows, cols);
  const int m = std::max(rows, cols);

  std::vector<std::vector<double>> basis;
  basis.reserve(k);
  while (static_cast<int>(basis.size()) < k) {
    std::vector<double> v(m);
    for (double& x : v) x = gaussian(rng);
    for (const std::vector<double>& q : basis) {
      double dot = 0.0;
      for (int i = 0; i < m; ++i) dot += q[i] * v[i];
      for (int i = 0; i < m; ++i) v[i] -= dot * q[i];
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm < 1e-8) continue;  // essentially impossible; redraw
    for (double& x : v) x /= norm;
    basis.push_back(std::move(v));
  }

  std::vector<double> w(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double q = rows <= cols ? basis[r][c] : basis[c][r];
      w[static_cast<std::size_t>(r) * cols + c] = gain * q;
    }
  }
  return w;
}

}  // namespace

PolicyParameters init_policy(int n_debris, int hidden_size, std::uint64_t seed) {
  if (n_debris < 1 || hidden_size < 1) {
    throw std::invalid_argument("init_policy requires positive sizes");
  }
  PolicyParameters p;
  p.n_debris = n_debris;
  p.input_size = 8 * n_debris + 5;
  p.hidden_size = hidden_size;
  p.action_count = 3 * n_debris + 1;

  SplitMix64 rng(seed);
  p.w1 = orthogonal_matrix(hidden_size, p.input_size, kInitGainHidden, rng);
  p.b1.assign(hidden_size, 0.0);
  p.w2 = orthogonal_matrix(hidden_size, hidden_size, kInitGainHidden, rng);
  p.b2.assign(hidden_size, 0.0);
  p.wp = orthogonal_matrix(p.action_count, hidden_size, kInitGainPolicy, rng);
  p.bp.assign(p.action_count, 0.0);
  p.wv = orthogonal_matrix(1, hidden_size, kInitGainValue, rng);
  p.bv = 0.0;
  return p;
}

std::vector<double> masked_logits(std::span<const double> logits,
                                  std::span<const std::uint8_t> mask) {
  if (logits.size() != mask.size()) {
    throw std::logic_error("masked_logits: length mismatch");
  }
  std::vector<double> out(logits.size());
  bool any_valid = false;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (mask[i]) {
      out[i] = logits[i];
      any_valid = true;
    } else {
      out[i] = kMaskSentinel;
    }
  }
  if (!any_valid) {
    throw std::logic_error("masked_logits: mask has no valid action");
  }
  return out;
}

std::vector<double> softmax(std::span<const double> logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    total += out[i];
  }
  for (double& x : out) x /= total;
  return out;
}

double clipped_surrogate(double ratio, double advantage, double epsilon) {
  const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  return std::min(ratio * advantage, clipped * advantage);
}

ForwardCache policy_forward(const PolicyParameters& params,
                            std::span<const double> observation,
                            std::span<const std::uint8_t> mask) {
  if (static_cast<int>(observation.size()) != params.input_size ||
      static_cast<int>(mask.size()) != params.action_count) {
    throw std::logic_error("policy_forward: shape mismatch");
  }
  const int in = params.input_size;
  const int h = params.hidden_size;
  const int actions = params.action_count;

  ForwardCache fc;
  fc.z1.resize(h);
  for (int r = 0; r < h; ++r) {
    double acc = params.b1[r];
    const double* row = params.w1.data() + static_cast<std::size_t>(r) * in;
    for (int c = 0; c < in; ++c) acc += row[c] * observation[c];
    fc.z1[r] = std::tanh(acc);
  }
  fc.z2.resize(h);
  for (int r = 0; r < h; ++r) {
    double acc = params.b2[r];
    const double* row = params.w2.data() + static_cast<std::size_t>(r) * h;
    for (int c = 0; c < h; ++c) acc += row[c] * fc.z1[c];
    fc.z2[r] = std::tanh(acc);
  }
  fc.logits.resize(actions);
  for (int r = 0; r < actions; ++r) {
    double acc = params.bp[r];
    const double* row = params.wp.data() + static_cast<std::size_t>(r) * h;
    for (int c = 0; c < h; ++c) acc += row[c] * fc.z2[c];
    fc.logits[r] = acc;
  }
  double value = params.bv;
  for (int c = 0; c < h; ++c) value += params.wv[c] * fc.z2[c];
  fc.value = value;
  fc.probs = softmax(masked_logits(fc.logits, mask));
  return fc;
}

void compute_gae(std::span<const double> rewards, std::span<const double> values,
                 std::span<const std::uint8_t> dones, double gamma, double lambda,
                 double bootstrap_value, std::vector<double>& advantages,
                 std::vector<double>& returns) {
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n) {
    throw std::logic_error("compute_gae: length mismatch");
  }
  advantages.assign(n, 0.0);
  returns.assign(n, 0.0);
  double carry = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double next_value = i + 1 < n ? values[i + 1] : bootstrap_value;
    const double not_done = dones[i] ? 0.0 : 1.0;
    const double delta = rewards[i] + gamma * next_value * not_done - values[i];
    carry = delta + gamma * lambda * not_done * carry;
    advantages[i] = carry;
    returns[i] = carry + values[i];
  }
}

void PPOHyperparams::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("learning_rate must be finite and positive");
  }
  if (!(clip_epsilon > 0.0 && clip_epsilon < 1.0)) {
    throw std::invalid_argument("clip_epsilon must lie in (0, 1)");
  }
  if (!(gamma > 0.0 && gamma <= 1.0) || !(gae_lambda > 0.0 && gae_lambda <= 1.0)) {
    throw std::invalid_argument("gamma and gae_lambda must lie in (0, 1]");
  }
  if (batch_size < 1 || minibatch_size < 1 || minibatch_size > batch_size) {
    throw std::invalid_argument("need 1 <= minibatch_size <= batch_size");
  }
  if (batch_size % minibatch_size != 0) {
    throw std::invalid_argument("batch_size must be a multiple of minibatch_size");
  }
  if (num_workers < 1 || batch_size % num_workers != 0) {
    throw std::invalid_argument("batch_size must be a multiple of num_workers");
  }
  if (epochs_per_batch < 1) {
    throw std::invalid_argument("epochs_per_batch must be positive");
  }
  if (total_steps < batch_size) {
    throw std::invalid_argument("total_steps must cover at least one batch");
  }
  if (!(entropy_coefficient >= 0.0) || !(value_loss_coefficient >= 0.0)) {
    throw std::invalid_argument("loss coefficients must be non-negative");
  }
  if (!(max_gradient_norm > 0.0)) {
    throw std::invalid_argument("max_gradient_norm must be positive");
  }
}

namespace {

struct LossParts {
  double total = 0.0;
  double policy = 0.0;
  double value = 0.0;
  double entropy = 0.0;
};

void zero_like(const PolicyParameters& p, PolicyGradients& g) {
  g.w1.assign(p.w1.size(), 0.0);
  g.b1.assign(p.b1.size(), 0.0);
  g.w2.assign(p.w2.size(), 0.0);
  g.b2.assign(p.b2.size(), 0.0);
  g.wp.assign(p.wp.size(), 0.0);
  g.bp.assign(p.bp.size(), 0.0);
  g.wv.assign(p.wv.size(), 0.0);
  g.bv = 0.0;
}

/// Loss (and, when grads != nullptr, its analytic gradient) over the batch
/// entries named by `indices`.
LossParts loss_and_gradients(const PolicyParameters& params, const SampleBatch& batch,
                             std::span<const int> indices, const PPOHyperparams& hyper,
                             PolicyGradients* grads) {
  const int in = params.input_size;
  const int h = params.hidden_size;
  const int actions = params.action_count;
  const double inv_n = 1.0 / static_cast<double>(indices.size());

  if (grads) zero_like(params, *grads);

  LossParts parts;
  std::vector<double> log_probs(actions);
  std::vector<double> dlogits(actions);
  std::vector<double> dz2(h), da2(h), dz1(h), da1(h);

  for (const int sample : indices) {
    const std::vector<double>& obs = batch.observations[sample];
    const std::vector<std::uint8_t>& mask = batch.masks[sample];
    const int action = batch.actions[sample];
    const double advantage = batch.advantages[sample];

    const ForwardCache fc = policy_forward(params, obs, mask);

    // Stable masked log-probabilities.
    const std::vector<double> masked = masked_logits(fc.logits, mask);
    const double peak = *std::max_element(masked.begin(), masked.end());
    double lse = 0.0;
    for (int j = 0; j < actions; ++j) lse += std::exp(masked[j] - peak);
    lse = std::log(lse);
    for (int j = 0; j < actions; ++j) log_probs[j] = masked[j] - peak - lse;

    double entropy = 0.0;
    for (int j = 0; j < actions; ++j) {
      if (mask[j] && fc.probs[j] > 0.0) entropy -= fc.probs[j] * log_probs[j];
    }

    const double ratio = std::exp(log_probs[action] - batch.old_log_probs[sample]);
    const double unclipped = ratio * advantage;
    const double clipped =
        std::clamp(ratio, 1.0 - hyper.clip_epsilon, 1.0 + hyper.clip_epsilon) *
        advantage;
    const double objective = std::min(unclipped, clipped);
    const double value_error = fc.value - batch.returns[sample];

    parts.policy += -objective;
    parts.value += value_error * value_error;
    parts.entropy += entropy;

    if (!grads) continue;

    // d(objective)/d(logp_action): ratio*advantage when the unclipped branch
    // is active, zero when the clip saturates.
    const double g_logp = unclipped <= clipped ? unclipped : 0.0;
    const double dvalue = 2.0 * hyper.value_loss_coefficient * value_error * inv_n;

    for (int j = 0; j < actions; ++j) {
      if (!mask[j]) {
        dlogits[j] = 0.0;  // sentinel construction: exactly zero gradient
        continue;
      }
      const double indicator = j == action ? 1.0 : 0.0;
      const double d_policy = -g_logp * (indicator - fc.probs[j]);
      const double d_entropy =
          hyper.entropy_coefficient * fc.probs[j] * (log_probs[j] + entropy);
      dlogits[j] = (d_policy + d_entropy) * inv_n;
    }

    // Heads.
    std::fill(dz2.begin(), dz2.end(), 0.0);
    for (int j = 0; j < actions; ++j) {
      const double d = dlogits[j];
      if (d == 0.0) continue;
      double* wrow = grads->wp.data() + static_cast<std::size_t>(j) * h;
      const double* prow = params.wp.data() + static_cast<std::size_t>(j) * h;
      for (int c = 0; c < h; ++c) {
        wrow[c] += d * fc.z2[c];
        dz2[c] += d * prow[c];
      }
      grads->bp[j] += d;
    }
    for (int c = 0; c < h; ++c) {
      grads->wv[c] += dvalue * fc.z2[c];
      dz2[c] += dvalue * params.wv[c];
    }
    grads->bv += dvalue;

    // Trunk.
    for (int r = 0; r < h; ++r) da2[r] = dz2[r] * (1.0 - fc.z2[r] * fc.z2[r]);
    std::fill(dz1.begin(), dz1.end(), 0.0);
    for (int r = 0; r < h; ++r) {
      const double d = da2[r];
      double* wrow = grads->w2.data() + static_cast<std::size_t>(r) * h;
      const double* prow = params.w2.data() + static_cast<std::size_t>(r) * h;
      for (int c = 0; c < h; ++c) {
        wrow[c] += d * fc.z1[c];
        dz1[c] += d * prow[c];
      }
      grads->b2[r] += d;
    }
    for (int r = 0; r < h; ++r) da1[r] = dz1[r] * (1.0 - fc.z1[r] * fc.z1[r]);
    for (int r = 0; r < h; ++r) {
      const double d = da1[r];
      double* wrow = grads->w1.data() + static_cast<std::size_t>(r) * in;
      for (int c = 0; c < in; ++c) wrow[c] += d * obs[c];
      grads->b1[r] += d;
    }
  }

  parts.policy *= inv_n;
  parts.value *= inv_n;
  parts.entropy *= inv_n;
  parts.total = parts.policy + hyper.value_loss_coefficient * parts.value -
                hyper.entropy_coefficient * parts.entropy;
  return parts;
}

std::vector<int> all_indices(std::size_t n) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

}  // namespace

double ppo_loss(const PolicyParameters& params, const SampleBatch& batch,
                const PPOHyperparams& hyper) {
  return loss_and_gradients(params, batch, all_indices(batch.size()), hyper, nullptr)
      .total;
}

PolicyGradients ppo_gradients(const PolicyParameters& params, const SampleBatch& batch,
                              const PPOHyperparams& hyper) {
  PolicyGradients grads;
  loss_and_gradients(params, batch, all_indices(batch.size()), hyper, &grads);
  return grads;
}

std::vector<double> flatten_parameters(const PolicyParameters& params) {
  std::vector<double> flat;
  flat.reserve(params.w1.size() + params.b1.size() + params.w2.size() +
               params.b2.size() + params.wp.size() + params.bp.size() +
               params.wv.size() + 1);
  for (const std::vector<double>* v :
       {&params.w1, &params.b1, &params.w2, &params.b2, &params.wp, &params.bp,
        &params.wv}) {
    flat.insert(flat.end(), v->begin(), v->end());
  }
  flat.push_back(params.bv);
  return flat;
}

void set_flat_parameters(PolicyParameters& params, std::span<const double> flat) {
  std::size_t offset = 0;
  for (std::vector<double>* v : {&params.w1, &params.b1, &params.w2, &params.b2,
                                 &params.wp, &params.bp, &params.wv}) {
    if (offset + v->size() > flat.size()) {
      throw std::logic_error("set_flat_parameters: size mismatch");
    }
    std::copy(flat.begin() + offset, flat.begin() + offset + v->size(), v->begin());
    offset += v->size();
  }
  if (offset + 1 != flat.size()) {
    throw std::logic_error("set_flat_parameters: size mismatch");
  }
  params.bv = flat[offset];
}

std::vector<double> flatten_gradients(const PolicyGradients& grads) {
  std::vector<double> flat;
  for (const std::vector<double>* v : {&grads.w1, &grads.b1, &grads.w2, &grads.b2,
                                       &grads.wp, &grads.bp, &grads.wv}) {
    flat.insert(flat.end(), v->begin(), v->end());
  }
  flat.push_back(grads.bv);
  return flat;
}

namespace {

/// One independent rollout stream: its own scenario, env, and action RNG.
struct Worker {
  std::unique_ptr<Scenario> scenario;
  std::unique_ptr<Environment> env;
  MissionState state;
  SplitMix64 action_rng;
  std::uint64_t episode_counter = 0;
  double episode_return = 0.0;
  int episode_length = 0;
};

void start_episode(Worker& worker, const TrainConfig& config, int worker_index) {
  worker.scenario = std::make_unique<Scenario>(generate_scenario(
      derive_seed(config.seed, 2, worker_index, worker.episode_counter),
      config.mission));
  worker.env = std::make_unique<Environment>(*worker.scenario);
  worker.state = worker.env->reset(
      derive_seed(config.seed, 3, worker_index, worker.episode_counter));
  worker.episode_counter += 1;
  worker.episode_return = 0.0;
  worker.episode_length = 0;
}

int sample_from_probs(const std::vector<double>& probs,
                      const std::vector<std::uint8_t>& mask, SplitMix64& rng) {
  const double u = rng.next_double();
  double cumulative = 0.0;
  int last_valid = -1;
  for (int i = 0; i < static_cast<int>(probs.size()); ++i) {
    if (!mask[i]) continue;
    cumulative += probs[i];
    last_valid = i;
    if (u < cumulative) return i;
  }
  return last_valid;  // rounding slack lands on the final valid action
}

struct AdamState {
  std::vector<double> m, v;
  long long t = 0;
};

}  // namespace

TrainResult train(const TrainConfig& config) {
  config.hyper.validate();
  config.mission.validate();
  const PPOHyperparams& hyper = config.hyper;
  const int n = config.mission.n_debris;
  const int workers_n = hyper.num_workers;
  const int steps_per_worker = hyper.batch_size / workers_n;
  const long long num_batches = hyper.total_steps / hyper.batch_size;

  TrainResult result;
  result.policy = init_policy(n, config.hidden_size, derive_seed(config.seed, 1));
  PolicyParameters& policy = result.policy;

  std::vector<Worker> workers(workers_n);
  for (int w = 0; w < workers_n; ++w) {
    workers[w].action_rng = SplitMix64(derive_seed(config.seed, 4, w));
    start_episode(workers[w], config, w);
  }

  std::vector<double> flat_params = flatten_parameters(policy);
  AdamState adam;
  adam.m.assign(flat_params.size(), 0.0);
  adam.v.assign(flat_params.size(), 0.0);

  const int batch_size = hyper.batch_size;
  SampleBatch batch;
  batch.observations.resize(batch_size);
  batch.masks.resize(batch_size);
  batch.actions.resize(batch_size);
  batch.old_log_probs.resize(batch_size);
  batch.advantages.resize(batch_size);
  batch.returns.resize(batch_size);
  std::vector<double> rewards(batch_size), values(batch_size);
  std::vector<std::uint8_t> dones(batch_size);
  std::vector<double> bootstrap(workers_n);

  long long steps_done = 0;
  for (long long batch_index = 0; batch_index < num_batches; ++batch_index) {
    double completed_return_sum = 0.0;
    long long completed_length_sum = 0;
    int completed_episodes = 0;

    // ---- Rollout collection, [t][w] assembly order.
    for (int t = 0; t < steps_per_worker; ++t) {
      for (int w = 0; w < workers_n; ++w) {
        Worker& worker = workers[w];
        const int slot = t * workers_n + w;
        batch.observations[slot] = worker.env->observe(worker.state);
        batch.masks[slot] = worker.env->action_mask(worker.state);
        const ForwardCache fc =
            policy_forward(policy, batch.observations[slot], batch.masks[slot]);
        const int action =
            sample_from_probs(fc.probs, batch.masks[slot], worker.action_rng);

        batch.actions[slot] = action;
        batch.old_log_probs[slot] = std::log(fc.probs[action]);
        values[slot] = fc.value;

        const StepOutcome outcome =
            worker.env->step(worker.state, Action::decode(action, n));
        rewards[slot] = outcome.reward;
        dones[slot] = outcome.terminal ? 1 : 0;
        worker.episode_return += outcome.reward;
        worker.episode_length += 1;

        if (outcome.terminal) {
          completed_return_sum += worker.episode_return;
          completed_length_sum += worker.episode_length;
          completed_episodes += 1;
          start_episode(worker, config, w);
        }
      }
    }
    for (int w = 0; w < workers_n; ++w) {
      const Worker& worker = workers[w];
      bootstrap[w] =
          policy_forward(policy, worker.env->observe(worker.state),
                         worker.env->action_mask(worker.state))
              .value;
    }
    steps_done += batch_size;

    // ---- Per-worker GAE over the strided sequences.
    std::vector<double> seq_rewards(steps_per_worker), seq_values(steps_per_worker);
    std::vector<std::uint8_t> seq_dones(steps_per_worker);
    std::vector<double> seq_adv, seq_ret;
    for (int w = 0; w < workers_n; ++w) {
      for (int t = 0; t < steps_per_worker; ++t) {
        const int slot = t * workers_n + w;
        seq_rewards[t] = rewards[slot];
        seq_values[t] = values[slot];
        seq_dones[t] = dones[slot];
      }
      compute_gae(seq_rewards, seq_values, seq_dones, hyper.gamma, hyper.gae_lambda,
                  bootstrap[w], seq_adv, seq_ret);
      for (int t = 0; t < steps_per_worker; ++t) {
        const int slot = t * workers_n + w;
        batch.advantages[slot] = seq_adv[t];
        batch.returns[slot] = seq_ret[t];
      }
    }

    // ---- Batch-level advantage normalization.
    double mean = 0.0;
    for (double a : batch.advantages) mean += a;
    mean /= batch_size;
    double variance = 0.0;
    for (double a : batch.advantages) variance += (a - mean) * (a - mean);
    variance /= batch_size;
    const double scale = 1.0 / (std::sqrt(variance) + kAdvantageEpsilon);
    for (double& a : batch.advantages) a = (a - mean) * scale;

    // ---- Optimization epochs.
    SplitMix64 shuffle_rng(derive_seed(config.seed, 5, batch_index));
    std::vector<int> order = all_indices(batch_size);
    PolicyGradients grads;
    LossParts accumulated;
    int updates = 0;

    for (int epoch = 0; epoch < hyper.epochs_per_batch; ++epoch) {
      for (int i = batch_size - 1; i > 0; --i) {
        std::swap(order[i], order[shuffle_rng.uniform_index(i + 1)]);
      }
      for (int start = 0; start < batch_size; start += hyper.minibatch_size) {
        const std::span<const int> minibatch(order.data() + start,
                                             hyper.minibatch_size);
        const LossParts parts =
            loss_and_gradients(policy, batch, minibatch, hyper, &grads);
        if (!std::isfinite(parts.total)) {
          if (!config.diagnostic_checkpoint_path.empty()) {
            save_policy(policy, hyper, config.seed, config.diagnostic_checkpoint_path);
          }
          throw std::runtime_error("training aborted: non-finite loss at batch " +
                                   std::to_string(batch_index));
        }
        accumulated.total += parts.total;
        accumulated.policy += parts.policy;
        accumulated.value += parts.value;
        accumulated.entropy += parts.entropy;
        updates += 1;

        // Global gradient-norm clip, then the adaptive-moment update.
        std::vector<double> flat_grads = flatten_gradients(grads);
        double norm_sq = 0.0;
        for (double g : flat_grads) norm_sq += g * g;
        const double norm = std::sqrt(norm_sq);
        if (norm > hyper.max_gradient_norm) {
          const double shrink = hyper.max_gradient_norm / norm;
          for (double& g : flat_grads) g *= shrink;
        }
        adam.t += 1;
        const double bias1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(adam.t));
        const double bias2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(adam.t));
        for (std::size_t i = 0; i < flat_params.size(); ++i) {
          adam.m[i] = kAdamBeta1 * adam.m[i] + (1.0 - kAdamBeta1) * flat_grads[i];
          adam.v[i] = kAdamBeta2 * adam.v[i] +
                      (1.0 - kAdamBeta2) * flat_grads[i] * flat_grads[i];
          flat_params[i] -= hyper.learning_rate * (adam.m[i] / bias1) /
                            (std::sqrt(adam.v[i] / bias2) + kAdamEpsilon);
        }
        set_flat_parameters(policy, flat_params);
      }
    }

    TrainLogRow row;
    row.batch_index = static_cast<int>(batch_index);
    row.steps = steps_done;
    row.mean_return =
        completed_episodes > 0 ? completed_return_sum / completed_episodes : 0.0;
    row.mean_ep_len = completed_episodes > 0
                          ? static_cast<double>(completed_length_sum) / completed_episodes
                          : 0.0;
    row.policy_loss = accumulated.policy / updates;
    row.value_loss = accumulated.value / updates;
    row.entropy = accumulated.entropy / updates;
    result.log.push_back(row);
    if (config.on_batch) config.on_batch(row);
  }
  return result;
}

Action policy_greedy_action(const PolicyParameters& params, const Environment& env,
                            const MissionState& state) {
  ensure_compatible(params, env);
  const std::vector<double> obs = env.observe(state);
  const std::vector<std::uint8_t> mask = env.action_mask(state);
  const ForwardCache fc = policy_forward(params, obs, mask);
  int best = -1;
  double best_prob = -1.0;
  for (int i = 0; i < params.action_count; ++i) {
    if (mask[i] && fc.probs[i] > best_prob) {
      best_prob = fc.probs[i];
      best = i;
    }
  }
  return Action::decode(best, params.n_debris);
}

Action policy_sample_action(const PolicyParameters& params, const Environment& env,
                            const MissionState& state, SplitMix64& rng) {
  ensure_compatible(params, env);
  const std::vector<double> obs = env.observe(state);
  const std::vector<std::uint8_t> mask = env.action_mask(state);
  const ForwardCache fc = policy_forward(params, obs, mask);
  return Action::decode(sample_from_probs(fc.probs, mask, rng), params.n_debris);
}

void ensure_compatible(const PolicyParameters& params, const Environment& env) {
  if (params.n_debris != env.n_debris() ||
      params.input_size != env.observation_size() ||
      params.action_count != env.action_count()) {
    throw std::invalid_argument(
        "policy network shapes do not match the environment (n_debris " +
        std::to_string(params.n_debris) + " vs " + std::to_string(env.n_debris()) +
        ")");
  }
}

namespace {

nlohmann::json hyperparams_to_json(const PPOHyperparams& hyper) {
  return nlohmann::json{{"learning_rate", hyper.learning_rate},
                        {"total_steps", hyper.total_steps},
                        {"batch_size", hyper.batch_size},
                        {"gamma", hyper.gamma},
                        {"clip_epsilon", hyper.clip_epsilon},
                        {"gae_lambda", hyper.gae_lambda},
                        {"entropy_coefficient", hyper.entropy_coefficient},
                        {"epochs_per_batch", hyper.epochs_per_batch},
                        {"minibatch_size", hyper.minibatch_size},
                        {"value_loss_coefficient", hyper.value_loss_coefficient},
                        {"max_gradient_norm", hyper.max_gradient_norm},
                        {"num_workers", hyper.num_workers}};
}

PPOHyperparams hyperparams_from_json(const nlohmann::json& j) {
  PPOHyperparams hyper;
  hyper.learning_rate = j.at("learning_rate").get<double>();
  hyper.total_steps = j.at("total_steps").get<long long>();
  hyper.batch_size = j.at("batch_size").get<int>();
  hyper.gamma = j.at("gamma").get<double>();
  hyper.clip_epsilon = j.at("clip_epsilon").get<double>();
  hyper.gae_lambda = j.at("gae_lambda").get<double>();
  hyper.entropy_coefficient = j.at("entropy_coefficient").get<double>();
  hyper.epochs_per_batch = j.at("epochs_per_batch").get<int>();
  hyper.minibatch_size = j.at("minibatch_size").get<int>();
  hyper.value_loss_coefficient = j.at("value_loss_coefficient").get<double>();
  hyper.max_gradient_norm = j.at("max_gradient_norm").get<double>();
  hyper.num_workers = j.at("num_workers").get<int>();
  return hyper;
}

}  // namespace

void save_policy(const PolicyParameters& params, const PPOHyperparams& hyper,
                 std::uint64_t seed, const std::filesystem::path& path) {
  nlohmann::json j;
  j["format_version"] = kFormatVersion;
  j["observation_layout_version"] = Environment::kObservationLayoutVersion;
  j["n_debris"] = params.n_debris;
  j["input_size"] = params.input_size;
  j["hidden_size"] = params.hidden_size;
  j["action_count"] = params.action_count;
  j["init_scheme"] = kInitScheme;
  j["init_gains"] = {{"hidden", kInitGainHidden},
                     {"policy", kInitGainPolicy},
                     {"value", kInitGainValue}};
  j["seed"] = seed;
  j["hyperparams"] = hyperparams_to_json(hyper);
  j["weights"] = {{"w1", params.w1}, {"b1", params.b1}, {"w2", params.w2},
                  {"b2", params.b2}, {"wp", params.wp}, {"bp", params.bp},
                  {"wv", params.wv}, {"bv", params.bv}};

  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write checkpoint: " + path.string());
  }
  out << j.dump(1) << '\n';
}

LoadedPolicy load_policy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read checkpoint: " + path.string());
  }
  nlohmann::json j;
  in >> j;

  if (!j.contains("format_version") || j["format_version"].get<int>() != kFormatVersion) {
    throw std::runtime_error("checkpoint format version mismatch in " + path.string());
  }
  if (j.at("observation_layout_version").get<int>() !=
      Environment::kObservationLayoutVersion) {
    throw std::runtime_error("checkpoint observation layout mismatch in " +
                             path.string());
  }

  LoadedPolicy loaded;
  PolicyParameters& p = loaded.policy;
  p.n_debris = j.at("n_debris").get<int>();
  p.input_size = j.at("input_size").get<int>();
  p.hidden_size = j.at("hidden_size").get<int>();
  p.action_count = j.at("action_count").get<int>();
  if (p.n_debris < 1 || p.input_size != 8 * p.n_debris + 5 ||
      p.action_count != 3 * p.n_debris + 1 || p.hidden_size < 1) {
    throw std::runtime_error("checkpoint shape header is inconsistent in " +
                             path.string());
  }
  const nlohmann::json& w = j.at("weights");
  p.w1 = w.at("w1").get<std::vector<double>>();
  p.b1 = w.at("b1").get<std::vector<double>>();
  p.w2 = w.at("w2").get<std::vector<double>>();
  p.b2 = w.at("b2").get<std::vector<double>>();
  p.wp = w.at("wp").get<std::vector<double>>();
  p.bp = w.at("bp").get<std::vector<double>>();
  p.wv = w.at("wv").get<std::vector<double>>();
  p.bv = w.at("bv").get<double>();

  const std::size_t h = p.hidden_size;
  const std::size_t in_w = p.input_size;
  const std::size_t a = p.action_count;
  if (p.w1.size() != h * in_w || p.b1.size() != h || p.w2.size() != h * h ||
      p.b2.size() != h || p.wp.size() != a * h || p.bp.size() != a ||
      p.wv.size() != h) {
    throw std::runtime_error("checkpoint weight shapes are inconsistent in " +
                             path.string());
  }
  loaded.hyper = hyperparams_from_json(j.at("hyperparams"));
  loaded.seed = j.at("seed").get<std::uint64_t>();
  return loaded;
}

std::vector<TrainLogRow> read_training_log(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      line !=
          "batch_index,steps,mean_return,mean_ep_len,policy_loss,value_loss,"
          "entropy") {
    throw std::invalid_argument("training log line 1: missing or unexpected header");
  }
  std::vector<TrainLogRow> log;
  long long line_no = 1;
  while (std::getline(in, line)) {
    line_no += 1;
    if (line.empty()) continue;
    const std::vector<std::string_view> fields = split(line, ',');
    if (fields.size() != 7) {
      throw std::invalid_argument("training log line " + std::to_string(line_no) +
                                  ": expected 7 fields");
    }
    try {
      TrainLogRow row;
      row.batch_index = static_cast<int>(parse_int(fields[0]));
      row.steps = parse_int(fields[1]);
      row.mean_return = parse_double(fields[2]);
      row.mean_ep_len = parse_double(fields[3]);
      row.policy_loss = parse_double(fields[4]);
      row.value_loss = parse_double(fields[5]);
      row.entropy = parse_double(fields[6]);
      log.push_back(row);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("training log line " + std::to_string(line_no) +
                                  ": " + e.what());
    }
  }
  return log;
}

void write_training_log(const std::vector<TrainLogRow>& log, std::ostream& out) {
  out << "batch_index,steps,mean_return,mean_ep_len,policy_loss,value_loss,entropy\n";
  for (const TrainLogRow& row : log) {
    out << row.batch_index << ',' << row.steps << ',' << format_double(row.mean_return)
        << ',' << format_double(row.mean_ep_len) << ','
        << format_double(row.policy_loss) << ',' << format_double(row.value_loss)
        << ',' << format_double(row.entropy) << '\n';
  }
}

}  // namespace adr
