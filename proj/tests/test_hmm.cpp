#include <cmath>

#include "cogroute/hmm.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cogroute;
using hmm::HmmModel;
using hmm::Matrix;

namespace {

HmmModel deterministic_identity() {
  return HmmModel(Matrix{{1, 0}, {0, 1}}, Matrix{{1, 0}, {0, 1}}, {1, 0});
}

double relative_error(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_SUITE("hmm") {

TEST_CASE("model validation") {
  CHECK_THROWS_AS(HmmModel(Matrix{{0.5, 0.4}, {0, 1}}, Matrix{{1, 0}, {0, 1}}, {1, 0}), hmm::InputError);
  CHECK_THROWS_AS(HmmModel(Matrix{{1, 0}, {0, 1}}, Matrix{{1, 0}, {0, 1}}, {0.5, 0.6}), hmm::InputError);
  CHECK_THROWS_AS(HmmModel(Matrix{{1.5, -0.5}, {0, 1}}, Matrix{{1, 0}, {0, 1}}, {1, 0}), hmm::InputError);
  CHECK_THROWS_AS(HmmModel(Matrix{{1, 0}, {0, 1}}, Matrix{{1, 0}}, {1, 0}), hmm::InputError);
  CHECK_NOTHROW(deterministic_identity());
}

TEST_CASE("init_model") {
  const HmmModel single = hmm::init_model(1, 2, 99);
  CHECK(single.transition()(0, 0) == 1.0);
  CHECK(single.initial()[0] == 1.0);
  CHECK(std::abs(single.emission()(0, 0) + single.emission()(0, 1) - 1.0) < 1e-12);

  CHECK(hmm::init_model(3, 2, 7) == hmm::init_model(3, 2, 7));
  CHECK_FALSE(hmm::init_model(3, 2, 7) == hmm::init_model(3, 2, 8));

  const HmmModel m = hmm::init_model(2, 4, 1);
  CHECK(testing::row_stochastic(m, 1e-12));
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t k = 0; k < 4; ++k) {
      // Perturbation of uniform: each entry within [0.5, 1.5] / (sum of M such entries).
      CHECK(m.emission()(i, k) >= 0.5 / 6.0 - 1e-12);
      CHECK(m.emission()(i, k) <= 1.5 / 2.0 + 1e-12);
    }
  }

  CHECK_THROWS_AS(hmm::init_model(0, 2, 1), hmm::InputError);
  CHECK_THROWS_AS(hmm::init_model(2, 1, 1), hmm::InputError);
}

TEST_CASE("forward: trivial cases") {
  const HmmModel m = deterministic_identity();
  const std::vector<int> zeros{0, 0, 0};
  CHECK(hmm::forward(m, zeros).log_likelihood == 0.0);
  const std::vector<int> one{1};
  CHECK(hmm::forward(m, one).log_likelihood == hmm::kNegInf);

  const std::vector<int> bad{0, 2};
  CHECK_THROWS_AS(hmm::forward(m, bad), hmm::InputError);
  const std::vector<int> empty;
  CHECK_THROWS_AS(hmm::forward(m, empty), hmm::InputError);
}

TEST_CASE("forward: two-path example matches enumeration") {
  const HmmModel m(Matrix{{0.7, 0.3}, {0.4, 0.6}}, Matrix{{0.9, 0.1}, {0.2, 0.8}}, {0.5, 0.5});
  const std::vector<int> obs{0, 1};
  // Paths 00, 01, 10, 11 summed by hand.
  const double manual = 0.5 * 0.9 * 0.7 * 0.1 + 0.5 * 0.9 * 0.3 * 0.8 + 0.5 * 0.2 * 0.4 * 0.1 + 0.5 * 0.2 * 0.6 * 0.8;
  CHECK(relative_error(testing::enumerated_likelihood(m, obs), manual) < 1e-14);
  CHECK(relative_error(std::exp(hmm::forward(m, obs).log_likelihood), manual) < 1e-12);
}

TEST_CASE("forward: scaled alpha rows are normalized") {
  RandomStream rng(3);
  const HmmModel m = testing::random_model(rng, 3, 3);
  const auto obs = testing::random_observations(rng, 3, 300);
  const auto fr = hmm::forward(m, obs);
  CHECK(std::isfinite(fr.log_likelihood));
  for (std::size_t t = 0; t < obs.size(); ++t) {
    double sum = 0.0;
    for (double v : fr.scaled_alphas.row(t)) sum += v;
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("forward and viterbi against path enumeration") {
  RandomStream rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const std::size_t m = 2 + trial % 3;
    const std::size_t len = 1 + trial % 7;
    const HmmModel model = testing::random_model(rng, n, m);
    const auto obs = testing::random_observations(rng, m, len);

    const double oracle = testing::enumerated_likelihood(model, obs);
    CHECK(relative_error(hmm::forward(model, obs).log_likelihood, std::log(oracle)) < 1e-10);

    const auto best = testing::enumerated_best_path(model, obs);
    const auto path = hmm::viterbi(model, obs);
    CHECK(std::abs(path.log_probability - std::log(best.probability)) < 1e-10);
    if (!best.tied) CHECK(path.states == best.states);
  }
}

TEST_CASE("viterbi: forced and base cases") {
  const HmmModel m(Matrix{{0.5, 0.5}, {0.5, 0.5}}, Matrix{{1, 0}, {0, 1}}, {0.5, 0.5});
  const std::vector<int> obs{0, 1, 0};
  CHECK(hmm::viterbi(m, obs).states == std::vector<int>{0, 1, 0});

  const HmmModel t1(Matrix{{0.2, 0.8}, {0.6, 0.4}}, Matrix{{0.3, 0.7}, {0.9, 0.1}}, {0.6, 0.4});
  const std::vector<int> one{1};
  CHECK(hmm::viterbi(t1, one).states == std::vector<int>{0});  // 0.6*0.7 > 0.4*0.1

  // All-tied uniform model: lowest index everywhere.
  const HmmModel uniform(Matrix{{0.5, 0.5}, {0.5, 0.5}}, Matrix{{0.5, 0.5}, {0.5, 0.5}}, {0.5, 0.5});
  const std::vector<int> four{0, 1, 1, 0};
  CHECK(hmm::viterbi(uniform, four).states == std::vector<int>{0, 0, 0, 0});

  const std::vector<int> impossible{1};
  const auto none = hmm::viterbi(deterministic_identity(), impossible);
  CHECK(none.log_probability == hmm::kNegInf);
  CHECK(none.states.size() == 1);
}

TEST_CASE("predict_next_symbol") {
  const HmmModel id = deterministic_identity();
  const HmmModel persist(Matrix{{1, 0}, {0, 1}}, Matrix{{1, 0}, {0, 1}}, {0.5, 0.5});
  const std::vector<int> ones{1, 1, 1};
  const auto p = hmm::predict_next_symbol(persist, ones);
  CHECK(p.symbol == 1);
  CHECK(p.distribution[0] == doctest::Approx(0.0));
  CHECK(p.distribution[1] == doctest::Approx(1.0));

  const HmmModel uniform(Matrix{{0.5, 0.5}, {0.5, 0.5}}, Matrix{{0.5, 0.5}, {0.5, 0.5}}, {0.5, 0.5});
  const auto u = hmm::predict_next_symbol(uniform, ones);
  CHECK(u.symbol == 0);
  CHECK(u.distribution[0] == doctest::Approx(0.5));

  // Zero-likelihood history falls back to the initial distribution moved one step.
  const auto fallback = hmm::predict_next_symbol(id, ones);
  CHECK(fallback.symbol == 0);
  CHECK(fallback.distribution[0] == doctest::Approx(1.0));

  RandomStream rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const HmmModel m = testing::random_model(rng, 2, 2);
    const auto obs = testing::random_observations(rng, 2, 5);
    const auto oracle = testing::enumerated_predictive(m, obs);
    const auto got = hmm::predict_next_symbol(m, obs);
    double sum = 0.0;
    for (std::size_t k = 0; k < 2; ++k) {
      CHECK(relative_error(got.distribution[k], oracle[k]) < 1e-12);
      sum += got.distribution[k];
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("predict_next_symbol is permutation-equivariant in symbols") {
  RandomStream rng(8);
  const HmmModel m = testing::random_model(rng, 3, 3);
  const std::vector<int> perm{2, 0, 1};
  Matrix b(3, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t k = 0; k < 3; ++k) b(i, perm[k]) = m.emission()(i, k);
  }
  const HmmModel relabeled(m.transition(), b, m.initial());
  const auto obs = testing::random_observations(rng, 3, 10);
  std::vector<int> mapped;
  for (int o : obs) mapped.push_back(perm[o]);
  const auto a = hmm::predict_next_symbol(m, obs);
  const auto c = hmm::predict_next_symbol(relabeled, mapped);
  for (std::size_t k = 0; k < 3; ++k) CHECK(c.distribution[perm[k]] == doctest::Approx(a.distribution[k]).epsilon(1e-12));
}

TEST_CASE("baum_welch: monotone, stochastic, improves on held-out data") {
  const HmmModel truth(Matrix{{0.9, 0.1}, {0.2, 0.8}}, Matrix{{0.85, 0.15}, {0.1, 0.9}}, {0.6, 0.4});
  RandomStream rng(21);
  const std::vector<hmm::ObservationSequence> train{testing::sample_sequence(rng, truth, 500)};
  const auto held_out = testing::sample_sequence(rng, truth, 500);

  std::vector<double> seen;
  bool stochastic = true;
  const auto result = hmm::baum_welch(hmm::init_model(2, 2, 4), train, 50, 1e-8,
                                      [&](std::size_t, const HmmModel& m, double ll) {
                                        seen.push_back(ll);
                                        stochastic = stochastic && testing::row_stochastic(m, 1e-9);
                                      });
  CHECK(stochastic);
  CHECK(seen == result.log_likelihood_trace);
  for (std::size_t i = 1; i < result.log_likelihood_trace.size(); ++i) {
    CHECK(result.log_likelihood_trace[i] >= result.log_likelihood_trace[i - 1] - 1e-9);
  }
  const HmmModel uniform(Matrix{{0.5, 0.5}, {0.5, 0.5}}, Matrix{{0.5, 0.5}, {0.5, 0.5}}, {0.5, 0.5});
  CHECK(hmm::forward(result.model, held_out).log_likelihood >= hmm::forward(uniform, held_out).log_likelihood);
}

TEST_CASE("baum_welch: fixed point and errors") {
  const HmmModel m = deterministic_identity();
  const std::vector<hmm::ObservationSequence> data{{0, 0, 0, 0, 0}};
  const auto result = hmm::baum_welch(m, data, 20, 1e-6);
  CHECK(result.log_likelihood_trace.size() <= 2);
  CHECK(std::abs(result.log_likelihood_trace.back() - result.log_likelihood_trace.front()) < 1e-6);
  CHECK(testing::row_stochastic(result.model, 1e-9));

  const std::vector<hmm::ObservationSequence> none;
  CHECK_THROWS_AS(hmm::baum_welch(m, none, 5, 1e-4), hmm::InputError);
}

TEST_CASE("baum_welch: smoothing keeps every entry positive") {
  const std::vector<hmm::ObservationSequence> ones{std::vector<int>(50, 1)};
  const auto result = hmm::baum_welch(hmm::init_model(3, 2, 2), ones, 30, 1e-9);
  for (std::size_t i = 0; i < 3; ++i) CHECK(result.model.emission()(i, 0) > 0.0);
  CHECK(hmm::predict_next_symbol(result.model, ones[0]).distribution[1] >= 0.99);
}

TEST_CASE("algorithms are pure") {
  RandomStream rng(2);
  const HmmModel m = testing::random_model(rng, 3, 2);
  const std::vector<hmm::ObservationSequence> data{testing::random_observations(rng, 2, 100)};
  const auto a = hmm::baum_welch(m, data, 10, 1e-6);
  const auto b = hmm::baum_welch(m, data, 10, 1e-6);
  CHECK(a.model == b.model);
  CHECK(a.log_likelihood_trace == b.log_likelihood_trace);
}

}
