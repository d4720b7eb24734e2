#pragma once

// Discrete-observation, first-order hidden Markov models: evaluation (scaled
// forward), decoding (Viterbi), training (multi-sequence Baum-Welch) and
// one-step-ahead observation prediction.
//
// Everything here is a pure function of its inputs. Models for different
// (neighbor, channel) pairs can be trained concurrently.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace cogroute::hmm {

/// Raised for malformed models or observations (out-of-range symbols,
/// non-stochastic rows, empty training sets).
class InputError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Dense row-major matrix of doubles.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  bool operator==(const Matrix&) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Tolerance on row sums used by HmmModel validation.
inline constexpr double kStochasticTolerance = 1e-9;

/// Additive floor applied to every re-estimated row during Baum-Welch.
inline constexpr double kSmoothingFloor = 1e-6;

/// H = {A, B, P}: transition, emission and initial distributions.
///
/// Construction validates shapes and the row-stochastic invariants, so a
/// live HmmModel is always usable by the algorithms below.
class HmmModel {
public:
  HmmModel(Matrix transition, Matrix emission, std::vector<double> initial);

  std::size_t n_states() const { return transition_.rows(); }
  std::size_t n_symbols() const { return emission_.cols(); }

  const Matrix& transition() const { return transition_; }
  const Matrix& emission() const { return emission_; }
  const std::vector<double>& initial() const { return initial_; }

  bool operator==(const HmmModel&) const = default;

private:
  Matrix transition_;
  Matrix emission_;
  std::vector<double> initial_;
};

using Symbol = int;
using ObservationSequence = std::vector<Symbol>;

struct StatePath {
  std::vector<int> states;
  double log_probability = kNegInf;
};

struct ForwardResult {
  /// T x N; row t is the filtered state distribution P(q_t | O_1..O_t).
  /// Rows after the first zero-probability step are left at zero.
  Matrix scaled_alphas;
  /// log P(O | H), or kNegInf when the sequence has probability zero.
  double log_likelihood = kNegInf;
};

struct Prediction {
  Symbol symbol = 0;
  std::vector<double> distribution;
};

struct TrainingResult {
  HmmModel model;
  /// Log-likelihood of the training set under each accepted model, starting
  /// with the input model.
  std::vector<double> log_likelihood_trace;
};

/// Called once per accepted model during training, including the initial one.
using TrainingObserver =
    std::function<void(std::size_t iteration, const HmmModel& model, double log_likelihood)>;

/// Rows drawn uniform in [0.5, 1.5] and normalized. Deterministic in `seed`.
HmmModel init_model(int n_states, int n_symbols, std::uint64_t seed);

/// Throws InputError if the sequence is empty or any symbol is out of range.
void check_observations(const HmmModel& model, std::span<const Symbol> obs);

ForwardResult forward(const HmmModel& model, std::span<const Symbol> obs);

/// Log-space Viterbi. Ties go to the lowest state index.
StatePath viterbi(const HmmModel& model, std::span<const Symbol> obs);

/// Multi-sequence Baum-Welch with an additive smoothing floor on every
/// re-estimated row.
///
/// Iteration stops when the log-likelihood gain drops below `tol` or after
/// `max_iters` re-estimations. A re-estimate that lowers the likelihood is
/// discarded, so the returned trace never decreases. States with zero
/// expected occupancy keep their previous rows.
TrainingResult baum_welch(const HmmModel& model,
                          std::span<const ObservationSequence> sequences,
                          int max_iters,
                          double tol,
                          const TrainingObserver& observer = {});

/// distribution = B^T (A^T alpha_T). When the history has probability zero
/// the initial distribution is propagated one step instead.
Prediction predict_next_symbol(const HmmModel& model, std::span<const Symbol> obs);

}  // namespace cogroute::hmm
