#include "budgetrl/policy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace budgetrl::policy {

namespace {

constexpr int kStandardTaskDim = 25;  // keep in sync with env::kTaskFeatureDim

void check_tokens(const Vocabulary& vocab, std::span<const int> tokens) {
  for (int id : tokens) {
    if (id < 0 || id >= vocab.size()) {
      throw std::invalid_argument("token id outside vocabulary");
    }
  }
}

// Shared by logprob/sample/gradients so every caller sees bit-identical
// numerics: logits from the sparse features, then a max-shifted log-softmax.
struct StepDist {
  std::vector<double> logits;
  std::vector<double> logp;
  std::vector<double> p;
};

void compute_step(const PolicyModel& model, const PolicyParams& params,
                  const GenContext& ctx, std::span<const int> prefix, int t,
                  std::vector<PolicyModel::Feature>& feats, StepDist& dist) {
  const int v_count = model.vocab_size();
  model.state_features(ctx, prefix, t, feats);

  dist.logits.assign(v_count, 0.0);
  for (const auto& f : feats) {
    const double* row = params.weights.data() +
                        static_cast<std::size_t>(f.index) * v_count;
    for (int v = 0; v < v_count; ++v) {
      dist.logits[v] += f.value * row[v];
    }
  }

  double max_logit = dist.logits[0];
  for (int v = 1; v < v_count; ++v) max_logit = std::max(max_logit, dist.logits[v]);
  double sum = 0.0;
  dist.p.assign(v_count, 0.0);
  for (int v = 0; v < v_count; ++v) {
    dist.p[v] = std::exp(dist.logits[v] - max_logit);
    sum += dist.p[v];
  }
  const double log_sum = std::log(sum);
  dist.logp.assign(v_count, 0.0);
  for (int v = 0; v < v_count; ++v) {
    dist.logp[v] = dist.logits[v] - max_logit - log_sum;
    dist.p[v] /= sum;
  }
}

}  // namespace

PolicyModel PolicyModel::standard() {
  return PolicyModel(Vocabulary::arithmetic(), "ctx-v1", kStandardTaskDim);
}

PolicyModel::PolicyModel(Vocabulary vocab, std::string feature_name,
                         int task_dim)
    : vocab_(std::move(vocab)),
      feature_name_(std::move(feature_name)),
      task_dim_(task_dim) {
  if (task_dim_ < 0) throw std::invalid_argument("task_dim must be >= 0");
  const char* tag_tokens[kTagStateDim] = {"<think>", "</think>", "<answer>",
                                          "</answer>"};
  for (int k = 0; k < kTagStateDim; ++k) {
    tag_ids_[k] = vocab_.id_of(tag_tokens[k]).value_or(-1);
  }
}

void PolicyModel::state_features(const GenContext& ctx,
                                 std::span<const int> prefix, int t,
                                 std::vector<Feature>& out) const {
  if (static_cast<int>(ctx.task_features.size()) != task_dim_) {
    throw std::invalid_argument("context task feature size mismatch");
  }
  const int v_count = vocab_.size();
  out.clear();
  if (t >= 1) out.push_back({prefix[t - 1], 1.0});
  if (t >= 2) out.push_back({v_count + prefix[t - 2], 1.0});
  out.push_back({scalar_base(), 1.0});  // bias
  out.push_back({scalar_base() + 1,
                 static_cast<double>(t) / static_cast<double>(ctx.max_len)});
  out.push_back({scalar_base() + 2,
                 static_cast<double>(ctx.budget - t) /
                     static_cast<double>(ctx.budget)});
  bool seen[kTagStateDim] = {false, false, false, false};
  for (int k = 0; k < kTagStateDim; ++k) {
    if (tag_ids_[k] < 0) continue;
    for (int i = 0; i < t; ++i) {
      if (prefix[i] == tag_ids_[k]) {
        seen[k] = true;
        break;
      }
    }
    if (seen[k]) out.push_back({tag_state_base() + k, 1.0});
  }
  for (int j = 0; j < task_dim_; ++j) {
    const double v = ctx.task_features[j];
    if (v != 0.0) out.push_back({task_base() + j, v});
  }
  const bool in_answer = seen[2] && !seen[3];  // <answer> open, not yet closed
  if (in_answer) {
    for (int j = 0; j < task_dim_; ++j) {
      const double v = ctx.task_features[j];
      if (v != 0.0) out.push_back({gated_task_base() + j, kGatedTaskScale * v});
    }
  }
}

PolicyParams PolicyParams::zeros(const PolicyModel& model) {
  PolicyParams p;
  p.weights.assign(model.param_count(), 0.0);
  return p;
}

void token_distribution(const PolicyModel& model, const PolicyParams& params,
                        const GenContext& ctx, std::span<const int> prefix,
                        int t, std::vector<double>& logprobs) {
  std::vector<PolicyModel::Feature> feats;
  StepDist dist;
  compute_step(model, params, ctx, prefix, t, feats, dist);
  logprobs = dist.logp;
}

double logprob(const PolicyModel& model, const PolicyParams& params,
               const GenContext& ctx, std::span<const int> tokens) {
  check_tokens(model.vocab(), tokens);
  std::vector<PolicyModel::Feature> feats;
  StepDist dist;
  double total = 0.0;
  for (int t = 0; t < static_cast<int>(tokens.size()); ++t) {
    compute_step(model, params, ctx, tokens, t, feats, dist);
    total += dist.logp[tokens[t]];
  }
  return total;
}

Trajectory sample(const PolicyModel& model, const PolicyParams& params,
                  const GenContext& ctx, Rng& rng) {
  if (ctx.max_len < 1) throw std::invalid_argument("max_len must be >= 1");
  Trajectory traj;
  traj.ctx = ctx;
  std::vector<PolicyModel::Feature> feats;
  StepDist dist;
  for (int t = 0; t < ctx.max_len; ++t) {
    compute_step(model, params, ctx, traj.tokens, t, feats, dist);
    const int tok = rng.categorical(dist.p);
    traj.logprob_old += dist.logp[tok];
    traj.tokens.push_back(tok);
    if (tok == model.vocab().eos_id()) break;
  }
  return traj;
}

Trajectory sample_greedy(const PolicyModel& model, const PolicyParams& params,
                         const GenContext& ctx) {
  if (ctx.max_len < 1) throw std::invalid_argument("max_len must be >= 1");
  Trajectory traj;
  traj.ctx = ctx;
  std::vector<PolicyModel::Feature> feats;
  StepDist dist;
  for (int t = 0; t < ctx.max_len; ++t) {
    compute_step(model, params, ctx, traj.tokens, t, feats, dist);
    int tok = 0;
    for (int v = 1; v < model.vocab_size(); ++v) {
      if (dist.logits[v] > dist.logits[tok]) tok = v;
    }
    traj.logprob_old += dist.logp[tok];
    traj.tokens.push_back(tok);
    if (tok == model.vocab().eos_id()) break;
  }
  return traj;
}

void add_grad_logprob(const PolicyModel& model, const PolicyParams& params,
                      const GenContext& ctx, std::span<const int> tokens,
                      double coef, std::span<double> grad) {
  check_tokens(model.vocab(), tokens);
  if (static_cast<int>(grad.size()) != model.param_count()) {
    throw std::invalid_argument("gradient buffer size mismatch");
  }
  const int v_count = model.vocab_size();
  std::vector<PolicyModel::Feature> feats;
  StepDist dist;
  for (int t = 0; t < static_cast<int>(tokens.size()); ++t) {
    compute_step(model, params, ctx, tokens, t, feats, dist);
    for (const auto& f : feats) {
      double* row = grad.data() + static_cast<std::size_t>(f.index) * v_count;
      const double scale = coef * f.value;
      for (int v = 0; v < v_count; ++v) {
        const double indicator = (v == tokens[t]) ? 1.0 : 0.0;
        row[v] += scale * (indicator - dist.p[v]);
      }
    }
  }
}

std::vector<double> grad_logprob(const PolicyModel& model,
                                 const PolicyParams& params,
                                 const GenContext& ctx,
                                 std::span<const int> tokens) {
  std::vector<double> grad(model.param_count(), 0.0);
  add_grad_logprob(model, params, ctx, tokens, 1.0, grad);
  return grad;
}

double kl_reference(const PolicyModel& model, const PolicyParams& params,
                    const PolicyParams& ref_params,
                    std::span<const StateRef> states) {
  if (states.empty()) throw std::invalid_argument("kl needs >= 1 state");
  std::vector<PolicyModel::Feature> feats;
  StepDist dist_p, dist_q;
  double total = 0.0;
  for (const StateRef& s : states) {
    const int t = static_cast<int>(s.prefix.size());
    compute_step(model, params, *s.ctx, s.prefix, t, feats, dist_p);
    compute_step(model, ref_params, *s.ctx, s.prefix, t, feats, dist_q);
    double kl = 0.0;
    for (int v = 0; v < model.vocab_size(); ++v) {
      kl += dist_p.p[v] * (dist_p.logp[v] - dist_q.logp[v]);
    }
    total += std::max(0.0, kl);
  }
  return total / static_cast<double>(states.size());
}

void add_kl_gradient(const PolicyModel& model, const PolicyParams& params,
                     const PolicyParams& ref_params,
                     std::span<const StateRef> states, double coef,
                     std::span<double> grad) {
  if (states.empty()) return;
  if (static_cast<int>(grad.size()) != model.param_count()) {
    throw std::invalid_argument("gradient buffer size mismatch");
  }
  const int v_count = model.vocab_size();
  const double inv_n = 1.0 / static_cast<double>(states.size());
  std::vector<PolicyModel::Feature> feats;
  StepDist dist_p, dist_q;
  std::vector<double> dkl_dz(v_count);
  for (const StateRef& s : states) {
    const int t = static_cast<int>(s.prefix.size());
    compute_step(model, params, *s.ctx, s.prefix, t, feats, dist_p);
    compute_step(model, ref_params, *s.ctx, s.prefix, t, feats, dist_q);
    double kl = 0.0;
    for (int v = 0; v < v_count; ++v) {
      kl += dist_p.p[v] * (dist_p.logp[v] - dist_q.logp[v]);
    }
    // d KL / d logits_v = p_v * (log p_v - log q_v - KL)
    for (int v = 0; v < v_count; ++v) {
      dkl_dz[v] = dist_p.p[v] * (dist_p.logp[v] - dist_q.logp[v] - kl);
    }
    for (const auto& f : feats) {
      double* row = grad.data() + static_cast<std::size_t>(f.index) * v_count;
      const double scale = coef * inv_n * f.value;
      for (int v = 0; v < v_count; ++v) {
        row[v] += scale * dkl_dz[v];
      }
    }
  }
}

namespace {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace

void save_checkpoint(std::ostream& os, const PolicyModel& model,
                     const PolicyParams& params) {
  os << "budgetrl-checkpoint v1\n";
  os << "vocab " << model.vocab().name() << " " << model.vocab_size() << "\n";
  os << "features " << model.feature_name() << " " << model.feature_dim()
     << "\n";
  os << "step " << params.step << "\n";
  os << "params " << params.weights.size() << "\n";
  for (double w : params.weights) {
    os << format_double(w) << "\n";
  }
}

PolicyParams load_checkpoint(std::istream& is, const PolicyModel& model) {
  std::string line;
  auto fail = [](const std::string& why) -> PolicyParams {
    throw std::runtime_error("checkpoint: " + why);
  };
  if (!std::getline(is, line) || line != "budgetrl-checkpoint v1") {
    return fail("bad magic line");
  }
  std::string word, vocab_name, feature_name;
  int vocab_size = 0, feature_dim = 0;
  std::size_t n_params = 0;
  PolicyParams params;

  if (!std::getline(is, line)) return fail("missing vocab line");
  {
    std::istringstream ls(line);
    if (!(ls >> word >> vocab_name >> vocab_size) || word != "vocab") {
      return fail("bad vocab line");
    }
  }
  if (!std::getline(is, line)) return fail("missing features line");
  {
    std::istringstream ls(line);
    if (!(ls >> word >> feature_name >> feature_dim) || word != "features") {
      return fail("bad features line");
    }
  }
  if (!std::getline(is, line)) return fail("missing step line");
  {
    std::istringstream ls(line);
    if (!(ls >> word >> params.step) || word != "step") {
      return fail("bad step line");
    }
  }
  if (!std::getline(is, line)) return fail("missing params line");
  {
    std::istringstream ls(line);
    if (!(ls >> word >> n_params) || word != "params") {
      return fail("bad params line");
    }
  }
  if (vocab_name != model.vocab().name() || vocab_size != model.vocab_size()) {
    return fail("vocabulary spec mismatch");
  }
  if (feature_name != model.feature_name() ||
      feature_dim != model.feature_dim()) {
    return fail("feature spec mismatch");
  }
  if (n_params != static_cast<std::size_t>(model.param_count())) {
    return fail("parameter count mismatch");
  }
  params.weights.resize(n_params);
  for (std::size_t i = 0; i < n_params; ++i) {
    if (!std::getline(is, line)) return fail("truncated parameter list");
    double value = 0.0;
    const auto res =
        std::from_chars(line.data(), line.data() + line.size(), value);
    if (res.ec != std::errc() || res.ptr != line.data() + line.size()) {
      return fail("bad parameter value");
    }
    params.weights[i] = value;
  }
  return params;
}

}  // namespace budgetrl::policy
