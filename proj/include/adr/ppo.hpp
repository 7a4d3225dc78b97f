#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "adr/env.hpp"
#include "adr/rng.hpp"
#include "adr/scenario.hpp"

namespace adr {

/// MLP policy/value network: shared trunk of two tanh hidden layers, a logit
/// head of width 3n+1 and a scalar value head. Weights are row-major.
struct PolicyParameters {
  int n_debris = 0;
  int input_size = 0;   // 8n + 5, observation layout v1
  int hidden_size = 0;  // both hidden layers
  int action_count = 0; // 3n + 1

  std::vector<double> w1, b1;  // [hidden][input], [hidden]
  std::vector<double> w2, b2;  // [hidden][hidden], [hidden]
  std::vector<double> wp, bp;  // [action][hidden], [action]
  std::vector<double> wv;      // [hidden]
  double bv = 0.0;

  bool operator==(const PolicyParameters& o) const = default;
};

/// Gains of the orthogonal initialization, recorded in checkpoints.
inline constexpr double kInitGainHidden = 1.4142135623730951;  // sqrt(2)
inline constexpr double kInitGainPolicy = 0.01;
inline constexpr double kInitGainValue = 1.0;
inline constexpr const char* kInitScheme = "orthogonal-gram-schmidt";

/// Orthogonally initialized network for the given debris count.
PolicyParameters init_policy(int n_debris, int hidden_size, std::uint64_t seed);

/// Invalid entries replaced by the -1e9 sentinel (effectively -inf; its
/// exp underflows to exactly zero), valid entries unchanged. Throws
/// std::logic_error on length mismatch or an all-zero mask.
std::vector<double> masked_logits(std::span<const double> logits,
                                  std::span<const std::uint8_t> mask);

/// Numerically stable softmax; entries at the sentinel come out exactly 0.
std::vector<double> softmax(std::span<const double> logits);

/// Per-sample clipped PPO objective term (to be maximized).
double clipped_surrogate(double ratio, double advantage, double epsilon);

/// Forward pass intermediates kept for backprop and inference.
struct ForwardCache {
  std::vector<double> z1, z2;   // post-tanh activations
  std::vector<double> logits;   // unmasked
  std::vector<double> probs;    // masked softmax
  double value = 0.0;
};

ForwardCache policy_forward(const PolicyParameters& params,
                            std::span<const double> observation,
                            std::span<const std::uint8_t> mask);

/// Generalized advantage estimation over one worker's step sequence.
/// dones[t] marks that the step ended its episode (the next stored state is
/// a fresh reset); bootstrap_value estimates the state after the final step.
void compute_gae(std::span<const double> rewards, std::span<const double> values,
                 std::span<const std::uint8_t> dones, double gamma, double lambda,
                 double bootstrap_value, std::vector<double>& advantages,
                 std::vector<double>& returns);

struct PPOHyperparams {
  double learning_rate = 5e-6;
  long long total_steps = 10'000'000;
  int batch_size = 2048;
  double gamma = 0.99;
  double clip_epsilon = 0.2;
  double gae_lambda = 0.95;
  double entropy_coefficient = 0.01;
  int epochs_per_batch = 10;
  int minibatch_size = 256;
  double value_loss_coefficient = 0.5;
  double max_gradient_norm = 0.5;
  int num_workers = 8;

  void validate() const;
  bool operator==(const PPOHyperparams& o) const = default;
};

/// A flat batch of stored transitions (assembled across workers).
struct SampleBatch {
  std::vector<std::vector<double>> observations;
  std::vector<std::vector<std::uint8_t>> masks;
  std::vector<int> actions;
  std::vector<double> old_log_probs;
  std::vector<double> advantages;  // normalized at update time
  std::vector<double> returns;

  std::size_t size() const { return actions.size(); }
};

/// Gradient accumulator with the same shape as PolicyParameters.
struct PolicyGradients {
  std::vector<double> w1, b1, w2, b2, wp, bp, wv;
  double bv = 0.0;
};

/// Mean total loss over the batch: -clipped surrogate
/// + value_coef * squared value error - entropy_coef * entropy.
double ppo_loss(const PolicyParameters& params, const SampleBatch& batch,
                const PPOHyperparams& hyper);

/// Analytic gradient of ppo_loss (validated against finite differences).
PolicyGradients ppo_gradients(const PolicyParameters& params, const SampleBatch& batch,
                              const PPOHyperparams& hyper);

/// Flat views used by the optimizer and by gradient tests. The parameter
/// order is fixed: w1, b1, w2, b2, wp, bp, wv, bv.
std::vector<double> flatten_parameters(const PolicyParameters& params);
void set_flat_parameters(PolicyParameters& params, std::span<const double> flat);
std::vector<double> flatten_gradients(const PolicyGradients& grads);

/// One row of the training log CSV.
struct TrainLogRow {
  int batch_index = 0;
  long long steps = 0;
  double mean_return = 0.0;
  double mean_ep_len = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;

  bool operator==(const TrainLogRow& o) const = default;
};

struct TrainConfig {
  MissionParams mission;  // scenario template; a fresh scenario per episode
  PPOHyperparams hyper;
  int hidden_size = 256;
  std::uint64_t seed = 0;
  /// Written before aborting when a loss turns non-finite (optional).
  std::filesystem::path diagnostic_checkpoint_path;
  /// Progress callback, invoked once per completed batch (optional).
  std::function<void(const TrainLogRow&)> on_batch;
};

struct TrainResult {
  PolicyParameters policy;
  std::vector<TrainLogRow> log;
};

/// Masked PPO training loop: alternates rollout collection across
/// `num_workers` independent env streams (fresh random scenario each
/// episode) with clipped-surrogate updates. Fully reproducible from
/// config.seed. Throws std::runtime_error on non-finite losses after
/// writing the diagnostic checkpoint.
TrainResult train(const TrainConfig& config);

/// Deterministic evaluation policy: highest masked probability, ties to the
/// lowest action index.
Action policy_greedy_action(const PolicyParameters& params, const Environment& env,
                            const MissionState& state);

/// Stochastic behavior policy used during training rollouts.
Action policy_sample_action(const PolicyParameters& params, const Environment& env,
                            const MissionState& state, SplitMix64& rng);

/// Throws std::invalid_argument when the network does not fit the
/// environment's observation/action widths.
void ensure_compatible(const PolicyParameters& params, const Environment& env);

/// JSON checkpoint with version header, shapes, init scheme, hyperparams,
/// seed, and row-major weights; weights round-trip bitwise.
void save_policy(const PolicyParameters& params, const PPOHyperparams& hyper,
                 std::uint64_t seed, const std::filesystem::path& path);

struct LoadedPolicy {
  PolicyParameters policy;
  PPOHyperparams hyper;
  std::uint64_t seed = 0;
};

LoadedPolicy load_policy(const std::filesystem::path& path);

/// CSV: batch_index,steps,mean_return,mean_ep_len,policy_loss,value_loss,entropy
void write_training_log(const std::vector<TrainLogRow>& log, std::ostream& out);

/// Parses write_training_log output; errors carry the 1-based line number.
std::vector<TrainLogRow> read_training_log(std::istream& in);

}  // namespace adr
