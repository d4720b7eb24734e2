#include "cogroute/hmm.hpp"

#include <cmath>
#include <string>

#include "cogroute/rng.hpp"

namespace cogroute::hmm {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw InputError("ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

namespace {

void check_distribution(std::span<const double> row, const std::string& what) {
  double sum = 0.0;
  for (double p : row) {
    if (!(p >= 0.0 && p <= 1.0)) throw InputError(what + " has an entry outside [0,1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kStochasticTolerance) {
    throw InputError(what + " sums to " + std::to_string(sum) + ", expected 1");
  }
}

void normalize(std::span<double> row) {
  double sum = 0.0;
  for (double v : row) sum += v;
  for (double& v : row) v /= sum;
}

// Re-estimated row: counts / total, then floor added and renormalized.
void reestimate(std::span<const double> counts, double total, std::span<double> out) {
  const double scale = 1.0 + kSmoothingFloor * static_cast<double>(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) {
    out[k] = (counts[k] / total + kSmoothingFloor) / scale;
  }
  normalize(out);
}

// Sufficient statistics gathered by one E-step over all sequences.
struct ExpectedCounts {
  explicit ExpectedCounts(std::size_t n, std::size_t m)
      : initial(n, 0.0), transition(n, n), transition_total(n, 0.0), emission(n, m),
        emission_total(n, 0.0) {}

  std::vector<double> initial;
  Matrix transition;
  std::vector<double> transition_total;
  Matrix emission;
  std::vector<double> emission_total;
  std::size_t used_sequences = 0;
  double log_likelihood = 0.0;
};

ExpectedCounts expectation(const HmmModel& model, std::span<const ObservationSequence> sequences) {
  const std::size_t n = model.n_states();
  const auto& a = model.transition();
  const auto& b = model.emission();
  ExpectedCounts counts(n, model.n_symbols());

  for (const auto& obs : sequences) {
    const std::size_t len = obs.size();
    // Forward pass, keeping the scaling constants for the backward pass.
    Matrix alpha(len, n);
    std::vector<double> scale(len, 0.0);
    bool dead = false;
    for (std::size_t t = 0; t < len && !dead; ++t) {
      double c = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        if (t == 0) {
          s = model.initial()[j];
        } else {
          for (std::size_t i = 0; i < n; ++i) s += alpha(t - 1, i) * a(i, j);
        }
        alpha(t, j) = s * b(j, obs[t]);
        c += alpha(t, j);
      }
      if (c <= 0.0) {
        dead = true;
        break;
      }
      scale[t] = c;
      for (std::size_t j = 0; j < n; ++j) alpha(t, j) /= c;
    }
    if (dead) {
      counts.log_likelihood = kNegInf;
      continue;
    }
    for (double c : scale) counts.log_likelihood += std::log(c);

    Matrix beta(len, n, 0.0);
    for (std::size_t j = 0; j < n; ++j) beta(len - 1, j) = 1.0;
    for (std::size_t t = len - 1; t-- > 0;) {
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += a(i, j) * b(j, obs[t + 1]) * beta(t + 1, j);
        beta(t, i) = s / scale[t + 1];
      }
    }

    ++counts.used_sequences;
    for (std::size_t t = 0; t < len; ++t) {
      for (std::size_t i = 0; i < n; ++i) {
        const double gamma = alpha(t, i) * beta(t, i);
        if (t == 0) counts.initial[i] += gamma;
        counts.emission(i, obs[t]) += gamma;
        counts.emission_total[i] += gamma;
        if (t + 1 < len) {
          counts.transition_total[i] += gamma;
          for (std::size_t j = 0; j < n; ++j) {
            counts.transition(i, j) +=
                alpha(t, i) * a(i, j) * b(j, obs[t + 1]) * beta(t + 1, j) / scale[t + 1];
          }
        }
      }
    }
  }
  if (counts.used_sequences == 0) counts.log_likelihood = kNegInf;
  return counts;
}

HmmModel maximization(const HmmModel& model, const ExpectedCounts& counts) {
  Matrix a = model.transition();
  Matrix b = model.emission();
  std::vector<double> p = model.initial();
  for (std::size_t i = 0; i < model.n_states(); ++i) {
    if (counts.transition_total[i] > 0.0) {
      reestimate(counts.transition.row(i), counts.transition_total[i], a.row(i));
    }
    if (counts.emission_total[i] > 0.0) {
      reestimate(counts.emission.row(i), counts.emission_total[i], b.row(i));
    }
  }
  reestimate(counts.initial, static_cast<double>(counts.used_sequences), p);
  return HmmModel(std::move(a), std::move(b), std::move(p));
}

}  // namespace

HmmModel::HmmModel(Matrix transition, Matrix emission, std::vector<double> initial)
    : transition_(std::move(transition)), emission_(std::move(emission)), initial_(std::move(initial)) {
  const std::size_t n = transition_.rows();
  if (n == 0) throw InputError("model needs at least one state");
  if (transition_.cols() != n) throw InputError("transition matrix must be square");
  if (emission_.rows() != n) throw InputError("emission matrix needs one row per state");
  if (emission_.cols() == 0) throw InputError("emission matrix needs at least one symbol");
  if (initial_.size() != n) throw InputError("initial distribution needs one entry per state");
  for (std::size_t i = 0; i < n; ++i) {
    check_distribution(transition_.row(i), "transition row " + std::to_string(i));
    check_distribution(emission_.row(i), "emission row " + std::to_string(i));
  }
  check_distribution(initial_, "initial distribution");
}

HmmModel init_model(int n_states, int n_symbols, std::uint64_t seed) {
  if (n_states < 1) throw InputError("n_states must be at least 1");
  if (n_symbols < 2) throw InputError("n_symbols must be at least 2");
  const auto n = static_cast<std::size_t>(n_states);
  const auto m = static_cast<std::size_t>(n_symbols);
  RandomStream rng(seed, "hmm.init");
  auto fill = [&rng](std::span<double> row) {
    for (double& v : row) v = rng.uniform(0.5, 1.5);
    normalize(row);
  };
  Matrix a(n, n);
  Matrix b(n, m);
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) fill(a.row(i));
  for (std::size_t i = 0; i < n; ++i) fill(b.row(i));
  fill(p);
  return HmmModel(std::move(a), std::move(b), std::move(p));
}

void check_observations(const HmmModel& model, std::span<const Symbol> obs) {
  if (obs.empty()) throw InputError("observation sequence is empty");
  const auto m = static_cast<Symbol>(model.n_symbols());
  for (std::size_t t = 0; t < obs.size(); ++t) {
    if (obs[t] < 0 || obs[t] >= m) {
      throw InputError("symbol " + std::to_string(obs[t]) + " at position " + std::to_string(t) +
                       " is outside [0," + std::to_string(m) + ")");
    }
  }
}

ForwardResult forward(const HmmModel& model, std::span<const Symbol> obs) {
  check_observations(model, obs);
  const std::size_t n = model.n_states();
  const auto& a = model.transition();
  const auto& b = model.emission();

  ForwardResult out{Matrix(obs.size(), n), 0.0};
  for (std::size_t t = 0; t < obs.size(); ++t) {
    double c = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      if (t == 0) {
        s = model.initial()[j];
      } else {
        for (std::size_t i = 0; i < n; ++i) s += out.scaled_alphas(t - 1, i) * a(i, j);
      }
      out.scaled_alphas(t, j) = s * b(j, obs[t]);
      c += out.scaled_alphas(t, j);
    }
    if (c <= 0.0) {
      for (std::size_t j = 0; j < n; ++j) out.scaled_alphas(t, j) = 0.0;
      out.log_likelihood = kNegInf;
      return out;
    }
    for (std::size_t j = 0; j < n; ++j) out.scaled_alphas(t, j) /= c;
    out.log_likelihood += std::log(c);
  }
  return out;
}

StatePath viterbi(const HmmModel& model, std::span<const Symbol> obs) {
  check_observations(model, obs);
  const std::size_t n = model.n_states();
  const std::size_t len = obs.size();
  auto ln = [](double p) { return p > 0.0 ? std::log(p) : kNegInf; };

  Matrix delta(len, n, kNegInf);
  std::vector<int> back(len * n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    delta(0, j) = ln(model.initial()[j]) + ln(model.emission()(j, obs[0]));
  }
  for (std::size_t t = 1; t < len; ++t) {
    for (std::size_t j = 0; j < n; ++j) {
      double best = kNegInf;
      int arg = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double v = delta(t - 1, i) + ln(model.transition()(i, j));
        if (v > best) {
          best = v;
          arg = static_cast<int>(i);
        }
      }
      delta(t, j) = best + ln(model.emission()(j, obs[t]));
      back[t * n + j] = arg;
    }
  }

  StatePath path;
  path.states.assign(len, 0);
  int last = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (delta(len - 1, j) > path.log_probability) {
      path.log_probability = delta(len - 1, j);
      last = static_cast<int>(j);
    }
  }
  path.states[len - 1] = last;
  for (std::size_t t = len - 1; t > 0; --t) {
    path.states[t - 1] = back[t * n + static_cast<std::size_t>(path.states[t])];
  }
  return path;
}

TrainingResult baum_welch(const HmmModel& model,
                          std::span<const ObservationSequence> sequences,
                          int max_iters,
                          double tol,
                          const TrainingObserver& observer) {
  if (sequences.empty()) throw InputError("baum_welch needs at least one sequence");
  if (max_iters < 1) throw InputError("max_iters must be at least 1");
  if (!(tol > 0.0)) throw InputError("tol must be positive");
  bool any_long = false;
  for (const auto& seq : sequences) {
    check_observations(model, seq);
    any_long = any_long || seq.size() >= 2;
  }
  if (!any_long) throw InputError("baum_welch needs a sequence of length at least 2");

  TrainingResult result{model, {}};
  ExpectedCounts counts = expectation(model, sequences);
  result.log_likelihood_trace.push_back(counts.log_likelihood);
  if (observer) observer(0, result.model, counts.log_likelihood);
  // Sequences the model cannot produce leave nothing to re-estimate from.
  if (!std::isfinite(counts.log_likelihood)) return result;

  for (int iter = 1; iter <= max_iters; ++iter) {
    HmmModel candidate = maximization(result.model, counts);
    ExpectedCounts next = expectation(candidate, sequences);
    const double previous = result.log_likelihood_trace.back();
    if (!(next.log_likelihood >= previous)) break;
    result.model = std::move(candidate);
    result.log_likelihood_trace.push_back(next.log_likelihood);
    if (observer) observer(static_cast<std::size_t>(iter), result.model, next.log_likelihood);
    if (next.log_likelihood - previous < tol) break;
    counts = std::move(next);
  }
  return result;
}

Prediction predict_next_symbol(const HmmModel& model, std::span<const Symbol> obs) {
  const ForwardResult fwd = forward(model, obs);
  const std::size_t n = model.n_states();
  const std::size_t m = model.n_symbols();
  std::span<const double> filtered = std::isfinite(fwd.log_likelihood)
                                         ? fwd.scaled_alphas.row(obs.size() - 1)
                                         : std::span<const double>(model.initial());

  std::vector<double> next_state(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) next_state[j] += filtered[i] * model.transition()(i, j);
  }
  Prediction out;
  out.distribution.assign(m, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < m; ++k) out.distribution[k] += next_state[j] * model.emission()(j, k);
  }
  normalize(out.distribution);
  for (std::size_t k = 1; k < m; ++k) {
    if (out.distribution[k] > out.distribution[static_cast<std::size_t>(out.symbol)]) {
      out.symbol = static_cast<Symbol>(k);
    }
  }
  return out;
}

}  // namespace cogroute::hmm
