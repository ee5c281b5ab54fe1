// Copyright 2026 The Geoloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "geoloc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace geoloc {

namespace {

constexpr double kKmPerDegree = kEarthRadiusKm * std::numbers::pi / 180.0;

// Distribution helpers over mt19937_64, whose output sequence is fixed by
// the standard; the std:: distributions are not, so they are avoided to
// keep corpora identical across standard libraries.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

  bool bernoulli(double p) { return uniform() < p; }

  double normal() {
    // Box-Muller; 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::size_t binomial(std::size_t n, double p) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) k += bernoulli(p) ? 1 : 0;
    return k;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

GeoPoint jitter(Sampler& rng, const GeoPoint& centre, double sigma_km) {
  if (sigma_km <= 0.0) return centre;
  const double north = rng.normal() * sigma_km;
  const double east = rng.normal() * sigma_km;
  const double lat = std::clamp(centre.lat + north / kKmPerDegree, -89.0, 89.0);
  const double cos_lat = std::max(std::cos(lat * std::numbers::pi / 180.0), 1e-3);
  const double lon = std::clamp(centre.lon + east / (kKmPerDegree * cos_lat), -180.0, 180.0);
  return {lat, lon};
}

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
  }
}

std::string pad(std::size_t value, std::size_t width) {
  std::string s = std::to_string(value);
  return s.size() >= width ? s : std::string(width - s.size(), '0') + s;
}

}  // namespace

SyntheticCorpus synthesize(const SynthConfig& config) {
  if (config.num_regions == 0 || config.users_per_region == 0 || config.vocab_per_region == 0 ||
      config.communities_per_region == 0 || config.noise_vocab == 0) {
    throw std::invalid_argument("synthetic corpus counts must be positive");
  }
  check_probability(config.mention_density, "mention_density");
  check_probability(config.dev_fraction, "dev_fraction");
  check_probability(config.test_fraction, "test_fraction");
  check_probability(config.isolated_test_fraction, "isolated_test_fraction");
  check_probability(config.within_region_prob, "within_region_prob");
  check_probability(config.external_prob, "external_prob");
  check_probability(config.community_prob, "community_prob");
  check_probability(config.region_word_prob, "region_word_prob");
  check_probability(config.community_word_prob, "community_word_prob");
  if (config.dev_fraction + config.test_fraction > 1.0) {
    throw std::invalid_argument("dev_fraction + test_fraction exceeds 1");
  }
  if (config.region_word_prob + config.community_word_prob > 1.0) {
    throw std::invalid_argument("region_word_prob + community_word_prob exceeds 1");
  }

  Sampler rng(config.seed);
  SyntheticCorpus out;
  out.config = config;
  out.dataset.name = "synthetic";

  // Region centres inside a contiguous-USA-like box, kept apart so regions
  // are distinguishable; the separation relaxes if the box gets crowded.
  double separation = config.min_separation_km;
  while (out.region_centres.size() < config.num_regions) {
    bool placed = false;
    for (int attempt = 0; attempt < 2000 && !placed; ++attempt) {
      const GeoPoint candidate{28.0 + 20.0 * rng.uniform(), -122.0 + 50.0 * rng.uniform()};
      placed = std::all_of(out.region_centres.begin(), out.region_centres.end(),
                           [&](const GeoPoint& c) { return haversine_km(c, candidate) >= separation; });
      if (placed) out.region_centres.push_back(candidate);
    }
    if (!placed) separation /= 2.0;
  }
  for (std::size_t r = 0; r < config.num_regions; ++r) {
    for (std::size_t c = 0; c < config.communities_per_region; ++c) {
      out.community_centres.push_back(config.communities_per_region == 1
                                          ? out.region_centres[r]
                                          : jitter(rng, out.region_centres[r], config.community_spread_km));
    }
  }

  const std::size_t n_users = config.num_regions * config.users_per_region;
  const std::size_t width = std::to_string(n_users).size();
  out.dataset.records.resize(n_users);
  out.user_region.resize(n_users);
  out.user_community.resize(n_users);
  out.isolated.assign(n_users, false);
  for (std::size_t i = 0; i < n_users; ++i) {
    const std::size_t region = i / config.users_per_region;
    const std::size_t community =
        region * config.communities_per_region + (i % config.users_per_region) % config.communities_per_region;
    auto& rec = out.dataset.records[i];
    rec.user_id = "user" + pad(i, width);
    rec.location = jitter(rng, out.community_centres[community], config.user_spread_km);
    out.user_region[i] = region;
    out.user_community[i] = community;
    out.handle_region.emplace(rec.user_id, region);
  }

  // Split assignment over a seeded permutation of all users.
  std::vector<std::size_t> order(n_users);
  for (std::size_t i = 0; i < n_users; ++i) order[i] = i;
  rng.shuffle(order);
  const auto n_test = static_cast<std::size_t>(std::llround(config.test_fraction * n_users));
  const auto n_dev = static_cast<std::size_t>(std::llround(config.dev_fraction * n_users));
  const auto n_isolated = static_cast<std::size_t>(std::llround(config.isolated_test_fraction * n_test));
  for (std::size_t k = 0; k < n_users; ++k) {
    auto& rec = out.dataset.records[order[k]];
    rec.split = k < n_test ? Split::kTest : (k < n_test + n_dev ? Split::kDev : Split::kTrain);
    if (k < n_isolated) out.isolated[order[k]] = true;
  }

  std::vector<std::vector<std::size_t>> region_members(config.num_regions);
  std::vector<std::vector<std::size_t>> community_members(out.community_centres.size());
  for (std::size_t i = 0; i < n_users; ++i) {
    if (out.isolated[i]) continue;
    region_members[out.user_region[i]].push_back(i);
    community_members[out.user_community[i]].push_back(i);
  }
  auto external_handle = [&](std::size_t region) {
    std::string handle = "ext" + std::to_string(region) + "_" + std::to_string(rng.below(config.externals_per_region));
    out.handle_region.emplace(handle, region);
    return handle;
  };

  for (std::size_t i = 0; i < n_users; ++i) {
    std::vector<std::string> tokens;
    tokens.reserve(config.words_per_user);
    const std::size_t region = out.user_region[i];
    const std::size_t community = out.user_community[i];
    for (std::size_t w = 0; w < config.words_per_user; ++w) {
      const double u = rng.uniform();
      if (u < config.region_word_prob) {
        tokens.push_back("r" + std::to_string(region) + "w" + std::to_string(rng.below(config.vocab_per_region)));
      } else if (u < config.region_word_prob + config.community_word_prob) {
        tokens.push_back("c" + std::to_string(community) + "w" + std::to_string(rng.below(config.vocab_per_region)));
      } else {
        tokens.push_back("n" + std::to_string(rng.below(config.noise_vocab)));
      }
    }

    if (!out.isolated[i] && config.mention_density > 0.0) {
      const std::size_t count = 1 + rng.binomial(config.users_per_region - 1, config.mention_density);
      for (std::size_t m = 0; m < count; ++m) {
        MentionEvent event;
        event.source = i;
        event.within_region = config.num_regions == 1 || rng.bernoulli(config.within_region_prob);
        std::size_t target_region = region;
        if (!event.within_region) {
          target_region = rng.below(config.num_regions - 1);
          if (target_region >= region) ++target_region;
        }
        event.external = config.externals_per_region > 0 && rng.bernoulli(config.external_prob);
        if (!event.external) {
          const bool stay_local = event.within_region && rng.bernoulli(config.community_prob);
          const auto& pool = stay_local ? community_members[community] : region_members[target_region];
          std::vector<std::size_t> candidates;
          candidates.reserve(pool.size());
          for (std::size_t j : pool) {
            if (j != i) candidates.push_back(j);
          }
          if (candidates.empty()) {
            event.external = config.externals_per_region > 0;
            if (!event.external) continue;
          } else {
            event.target = out.dataset.records[candidates[rng.below(candidates.size())]].user_id;
          }
        }
        if (event.external) event.target = external_handle(target_region);
        tokens.push_back("@" + event.target);
        out.mentions.push_back(std::move(event));
      }
    }
    rng.shuffle(tokens);
    std::string text;
    for (const auto& t : tokens) {
      if (!text.empty()) text += ' ';
      text += t;
    }
    out.dataset.records[i].text = std::move(text);
  }
  return out;
}

}  // namespace geoloc
