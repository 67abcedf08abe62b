#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "budgetrl/rng.hpp"
#include "budgetrl/vocab.hpp"

namespace budgetrl::policy {

// Everything the policy conditions on besides the tokens it has generated so
// far: a dense task-feature block plus the sampling-time budget and cap.
struct GenContext {
  std::vector<double> task_features;
  int budget = 1;   // current schedule value L
  int max_len = 2;  // hard sampling cap (2L under the trainer)
};

// Immutable structural description of the model: vocabulary plus feature
// layout. The per-step feature vector is
//   [ prev-token one-hot | prev-prev-token one-hot | bias |
//     position fraction t/max_len | remaining-budget fraction (L-t)/L |
//     tag-state flags (think opened/closed, answer opened/closed) |
//     task features | task features gated on "inside the answer span" ]
// and the parameters form a (feature_dim x vocab_size) matrix applied as a
// linear-softmax next-token model.
//
// The tag-state flags summarize structural progress that a 2-token window
// cannot see; without them the policy cannot represent "emit each tag
// exactly once". The gated task copy is active only between <answer> and
// </answer>, which lets answer-content credit accumulate without fighting
// the unconditional token priors.
class PolicyModel {
 public:
  // Arithmetic vocabulary + the task feature block produced by env.
  static PolicyModel standard();

  PolicyModel(Vocabulary vocab, std::string feature_name, int task_dim);

  const Vocabulary& vocab() const { return vocab_; }
  const std::string& feature_name() const { return feature_name_; }
  int vocab_size() const { return vocab_.size(); }
  int task_dim() const { return task_dim_; }
  static constexpr int kTagStateDim = 4;
  // Feature value of the gated task copy. Larger values speed up learning of
  // answer-content weights under plain gradient ascent (the effective step
  // size on a weight scales with the square of its feature value).
  static constexpr double kGatedTaskScale = 3.0;
  int scalar_base() const { return 2 * vocab_.size(); }  // bias, pos, budget
  int tag_state_base() const { return scalar_base() + 3; }
  int task_base() const { return tag_state_base() + kTagStateDim; }
  int gated_task_base() const { return task_base() + task_dim_; }
  int feature_dim() const { return gated_task_base() + task_dim_; }
  int param_count() const { return feature_dim() * vocab_.size(); }

  // Sparse feature vector for the state (ctx, prefix[0..t)). prefix may be
  // longer than t; only entries before t are consulted.
  struct Feature {
    int index;
    double value;
  };
  void state_features(const GenContext& ctx, std::span<const int> prefix,
                      int t, std::vector<Feature>& out) const;

 private:
  Vocabulary vocab_;
  std::string feature_name_;
  int task_dim_;
  int tag_ids_[kTagStateDim];  // -1 when the vocabulary lacks a tag token
};

// Dense parameter matrix, row-major (feature_dim x vocab_size), plus the
// training step it was captured at. Immutable once handed to samplers;
// updates produce a fresh value.
struct PolicyParams {
  std::vector<double> weights;
  int step = 0;

  static PolicyParams zeros(const PolicyModel& model);
};

// One sampled completion: the context it was generated under, the emitted
// tokens (including the end-of-sequence token when one was drawn), and the
// summed log-probability under the sampling parameters.
struct Trajectory {
  GenContext ctx;
  std::vector<int> tokens;
  double logprob_old = 0.0;

  long long length() const { return static_cast<long long>(tokens.size()); }
};

// A single next-token decision point, for KL evaluation.
struct StateRef {
  const GenContext* ctx;
  std::span<const int> prefix;
};

// Log-probabilities (and optionally probabilities) of the next token at one
// state. Exposed primarily so tests can probe full distributions.
void token_distribution(const PolicyModel& model, const PolicyParams& params,
                        const GenContext& ctx, std::span<const int> prefix,
                        int t, std::vector<double>& logprobs);

// Sum over positions of log softmax(theta . features)[token]; 0 for the
// empty sequence. Unknown token ids are a contract violation (throws).
double logprob(const PolicyModel& model, const PolicyParams& params,
               const GenContext& ctx, std::span<const int> tokens);

// Ancestral sampling until end-of-sequence or ctx.max_len tokens; the
// recorded logprob_old matches logprob() on the result bit-for-bit.
Trajectory sample(const PolicyModel& model, const PolicyParams& params,
                  const GenContext& ctx, Rng& rng);

// Argmax decoding (lowest id wins ties); same stopping rule as sample().
Trajectory sample_greedy(const PolicyModel& model, const PolicyParams& params,
                         const GenContext& ctx);

// grad += coef * d logprob(tokens) / d theta, the exact analytic gradient
// sum_t features_t (x) (onehot(token_t) - softmax(logits_t)).
void add_grad_logprob(const PolicyModel& model, const PolicyParams& params,
                      const GenContext& ctx, std::span<const int> tokens,
                      double coef, std::span<double> grad);

std::vector<double> grad_logprob(const PolicyModel& model,
                                 const PolicyParams& params,
                                 const GenContext& ctx,
                                 std::span<const int> tokens);

// Mean over states of the exact full-vocabulary KL(p_theta || p_ref); each
// per-state value is clamped at zero against floating-point residue.
double kl_reference(const PolicyModel& model, const PolicyParams& params,
                    const PolicyParams& ref_params,
                    std::span<const StateRef> states);

// grad += coef * d kl_reference / d theta (exact, differentiating the
// closed-form per-state KL; the mean over states is folded in).
void add_kl_gradient(const PolicyModel& model, const PolicyParams& params,
                     const PolicyParams& ref_params,
                     std::span<const StateRef> states, double coef,
                     std::span<double> grad);

// Plain-text checkpoint: header lines naming the vocabulary spec, feature
// spec, and step index, followed by one decimal parameter per line. Values
// round-trip exactly.
void save_checkpoint(std::ostream& os, const PolicyModel& model,
                     const PolicyParams& params);
PolicyParams load_checkpoint(std::istream& is, const PolicyModel& model);

}  // namespace budgetrl::policy
