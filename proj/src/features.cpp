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

#include "geoloc/features.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "geoloc/text_io.hpp"

namespace geoloc {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }
bool is_handle_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

std::optional<std::string> normalise(std::string_view raw) {
  std::size_t begin = 0;
  while (begin < raw.size() && is_punct(raw[begin]) && raw[begin] != '@' && raw[begin] != '#') {
    ++begin;
  }
  if (begin < raw.size() && raw[begin] == '@') {
    std::size_t end = begin + 1;
    while (end < raw.size() && is_handle_char(raw[end])) ++end;
    if (end > begin + 1) {
      std::string token = "@";
      for (std::size_t i = begin + 1; i < end; ++i) token += lower(raw[i]);
      return token;
    }
  }
  // Not a mention: strip every surrounding punctuation character,
  // keeping only a '#' sigil directly in front of a word.
  std::size_t end = raw.size();
  while (end > begin && is_punct(raw[end - 1])) --end;
  while (begin < end && is_punct(raw[begin])) {
    if (raw[begin] == '#' && begin + 1 < end && !is_punct(raw[begin + 1])) break;
    ++begin;
  }
  if (begin >= end) return std::nullopt;
  std::string token;
  token.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) token += lower(raw[i]);
  return token;
}

constexpr std::string_view kVocabHeader = "# geoloc-vocab v1";

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) {
      if (auto token = normalise(text.substr(start, i - start))) {
        tokens.push_back(std::move(*token));
      }
    }
  }
  return tokens;
}

double SparseVector::norm() const {
  double sum = 0.0;
  for (double v : values) sum += v * v;
  return std::sqrt(sum);
}

Vocabulary Vocabulary::fit(std::span<const std::string> train_docs, std::size_t min_df) {
  if (train_docs.empty()) throw VocabularyError("cannot fit a vocabulary on zero documents");
  if (min_df == 0) min_df = 1;
  std::map<std::string, std::size_t, std::less<>> df;
  for (const auto& doc : train_docs) {
    const auto tokens = tokenize(doc);
    const std::set<std::string_view> unique(tokens.begin(), tokens.end());
    for (auto token : unique) {
      auto it = df.find(token);
      if (it == df.end()) {
        df.emplace(std::string(token), 1);
      } else {
        ++it->second;
      }
    }
  }
  Vocabulary vocab;
  vocab.num_documents_ = train_docs.size();
  vocab.min_df_ = min_df;
  for (const auto& [token, count] : df) {
    if (count < min_df) continue;
    const auto index = static_cast<std::uint32_t>(vocab.tokens_.size());
    vocab.tokens_.push_back(token);
    vocab.df_.push_back(count);
    vocab.index_.emplace(token, index);
  }
  return vocab;
}

std::optional<std::uint32_t> Vocabulary::index_of(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double Vocabulary::idf(std::uint32_t index) const {
  return std::log(static_cast<double>(num_documents_) / static_cast<double>(df_.at(index)));
}

std::string Vocabulary::serialize() const {
  std::ostringstream out;
  out << kVocabHeader << " num_documents=" << num_documents_ << " min_df=" << min_df_
      << " size=" << tokens_.size() << " source=" << (source_hash_.empty() ? "-" : source_hash_)
      << '\n';
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    out << tokens_[i] << '\t' << i << '\t' << df_[i] << '\n';
  }
  return out.str();
}

Vocabulary Vocabulary::deserialize(std::string_view text) {
  Vocabulary vocab;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || !line.starts_with(kVocabHeader)) {
    throw VocabularyError("not a vocabulary artifact (bad header)");
  }
  std::size_t declared_size = 0;
  std::istringstream header(line.substr(kVocabHeader.size()));
  std::string kv;
  while (header >> kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    if (key == "source") {
      vocab.source_hash_ = value == "-" ? std::string{} : value;
      continue;
    }
    const auto number = parse_int(value);
    if (!number || *number < 0) throw VocabularyError("bad header field '" + kv + "'");
    if (key == "num_documents") vocab.num_documents_ = static_cast<std::size_t>(*number);
    if (key == "min_df") vocab.min_df_ = static_cast<std::size_t>(*number);
    if (key == "size") declared_size = static_cast<std::size_t>(*number);
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    const auto index = fields.size() == 3 ? parse_int(fields[1]) : std::nullopt;
    const auto df = fields.size() == 3 ? parse_int(fields[2]) : std::nullopt;
    if (!index || !df || *index != static_cast<long long>(vocab.tokens_.size()) || *df <= 0) {
      throw VocabularyError("vocabulary line " + std::to_string(lineno) + " is malformed");
    }
    const std::string token(fields[0]);
    if (!vocab.tokens_.empty() && !(vocab.tokens_.back() < token)) {
      throw VocabularyError("vocabulary tokens are not strictly sorted at line " +
                            std::to_string(lineno));
    }
    vocab.index_.emplace(token, static_cast<std::uint32_t>(vocab.tokens_.size()));
    vocab.tokens_.push_back(token);
    vocab.df_.push_back(static_cast<std::size_t>(*df));
  }
  if (vocab.tokens_.size() != declared_size) {
    throw VocabularyError("vocabulary size mismatch: header says " +
                          std::to_string(declared_size) + ", found " +
                          std::to_string(vocab.tokens_.size()));
  }
  return vocab;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw VocabularyError("cannot write vocabulary '" + path.string() + "'");
  out << serialize();
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw VocabularyError("cannot open vocabulary '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

std::string Vocabulary::hash() const { return sha256_hex(serialize()); }

SparseVector transform(std::string_view doc, const Vocabulary& vocab) {
  std::map<std::uint32_t, double> counts;
  for (const auto& token : tokenize(doc)) {
    if (auto index = vocab.index_of(token)) counts[*index] += 1.0;
  }
  SparseVector vec;
  vec.dimension = vocab.size();
  double sum_sq = 0.0;
  for (const auto& [index, tf] : counts) {
    const double value = tf * vocab.idf(index);
    if (value == 0.0) continue;  // token present in every training document
    vec.indices.push_back(index);
    vec.values.push_back(value);
    sum_sq += value * value;
  }
  if (vec.empty()) return vec;
  const double norm = std::sqrt(sum_sq);
  for (double& v : vec.values) v /= norm;
  return vec;
}

}  // namespace geoloc
