#include <map>

#include "hopjam/dataset.hpp"
#include "hopjam/error.hpp"

namespace hopjam::dataset {

std::vector<MatchingPair> sample_pairs(const Manifest& m, std::size_t n_pairs, std::uint64_t seed, double balance) {
  if (!(balance >= 0.0 && balance <= 1.0)) throw ConfigError("pairs: balance must lie in [0, 1]");
  const auto train = m.indices(Split::Train);
  if (train.empty()) throw SamplingError("pairs: the train split is empty");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i : train) by_class[m.records[i].class_id].push_back(i);
  std::vector<const std::vector<std::size_t>*> classes;
  for (const auto& [cls, members] : by_class) classes.push_back(&members);

  if (balance > 0.0) {
    for (const auto& [cls, members] : by_class) {
      if (members.size() < 2) {
        throw SamplingError("pairs: class " + std::to_string(cls) + " has fewer than two train samples");
      }
    }
  }
  if (balance < 1.0 && classes.size() < 2) throw SamplingError("pairs: need two classes for different-class pairs");

  Rng rng = make_rng(seed);
  std::bernoulli_distribution same_coin(balance);
  std::uniform_int_distribution<std::size_t> pick_class(0, classes.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_train(0, train.size() - 1);
  std::vector<MatchingPair> pairs;
  pairs.reserve(n_pairs);
  for (std::size_t k = 0; k < n_pairs; ++k) {
    MatchingPair p;
    p.same = same_coin(rng);
    if (p.same) {
      const auto& members = *classes[pick_class(rng)];
      std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
      const std::size_t i = pick(rng);
      std::size_t j = std::uniform_int_distribution<std::size_t>(0, members.size() - 2)(rng);
      if (j >= i) ++j;
      p.a = members[i];
      p.b = members[j];
    } else {
      p.a = train[pick_train(rng)];
      do {
        p.b = train[pick_train(rng)];
      } while (m.records[p.b].class_id == m.records[p.a].class_id);
    }
    pairs.push_back(p);
  }
  return pairs;
}

}  // namespace hopjam::dataset
