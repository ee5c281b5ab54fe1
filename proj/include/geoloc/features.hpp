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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace geoloc {

// Lowercased whitespace tokens with surrounding punctuation stripped.
// "@handle" survives as a single mention token (handle = [a-z0-9_]+);
// a leading '#' is kept, so hashtags are ordinary tokens.
std::vector<std::string> tokenize(std::string_view text);

inline bool is_mention(std::string_view token) {
  return token.size() > 1 && token.front() == '@';
}

// Sorted (index, value) pairs; values are finite and nonzero.
struct SparseVector {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
  std::size_t dimension = 0;

  std::size_t nnz() const noexcept { return indices.size(); }
  bool empty() const noexcept { return indices.empty(); }
  double norm() const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

class VocabularyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unigram vocabulary over training documents. Tokens occurring in fewer
// than min_df documents are dropped; indices follow lexicographic order.
class Vocabulary {
 public:
  static Vocabulary fit(std::span<const std::string> train_docs, std::size_t min_df = 10);

  std::size_t size() const noexcept { return tokens_.size(); }
  std::size_t num_documents() const noexcept { return num_documents_; }
  std::size_t min_df() const noexcept { return min_df_; }

  std::optional<std::uint32_t> index_of(std::string_view token) const;
  const std::string& token(std::uint32_t index) const { return tokens_.at(index); }
  std::size_t document_frequency(std::uint32_t index) const { return df_.at(index); }
  // ln(N / df), no smoothing.
  double idf(std::uint32_t index) const;

  const std::string& source_hash() const noexcept { return source_hash_; }
  void set_source_hash(std::string hash) { source_hash_ = std::move(hash); }

  // Line-oriented: a '#' header carrying num_documents/min_df/source, then
  // one `token \t index \t df` line per entry.
  std::string serialize() const;
  static Vocabulary deserialize(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);
  std::string hash() const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_ && a.df_ == b.df_ && a.num_documents_ == b.num_documents_ &&
           a.min_df_ == b.min_df_;
  }

 private:
  std::vector<std::string> tokens_;
  std::vector<std::size_t> df_;
  std::map<std::string, std::uint32_t, std::less<>> index_;
  std::size_t num_documents_ = 0;
  std::size_t min_df_ = 1;
  std::string source_hash_;
};

// tf-idf (raw counts times ln(N/df)) scaled to unit Euclidean norm.
// Out-of-vocabulary tokens are dropped; no surviving token gives the zero
// vector.
SparseVector transform(std::string_view doc, const Vocabulary& vocab);

}  // namespace geoloc
