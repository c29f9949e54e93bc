#pragma once

// Exact trace of words and polynomials in freely independent variables.
//
// For a word w with letters from free variables, phi(w) is the sum over
// non-crossing partitions pi refining the kernel of w of the product over
// blocks of kappa_{|V|} of the block's law. The evaluator below never lists
// partitions: it recurses on the block containing the leftmost open position,
// whose members must carry the same letter, and memoizes intervals.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "freeinv/errors.hpp"
#include "freeinv/laws.hpp"
#include "freeinv/nc_core.hpp"

namespace freeinv {

using Word = std::vector<int>;

/// Variable identifier -> law. Laws are shared, so copies are cheap.
class Assignment {
 public:
  Assignment() = default;

  /// Variables 1..n all distributed as `law`.
  static Assignment iid(int n, const Law& law) {
    Assignment a;
    auto shared = std::make_shared<const Law>(law);
    for (int i = 1; i <= n; ++i) a.laws_[i] = shared;
    return a;
  }

  void assign(int var, const Law& law) { laws_[var] = std::make_shared<const Law>(law); }
  void assign(int var, std::shared_ptr<const Law> law) {
    if (!law) throw ArgumentError("Assignment: null law");
    laws_[var] = std::move(law);
  }

  bool contains(int var) const { return laws_.count(var) != 0; }

  const Law& law(int var) const { return *shared(var); }

  const std::shared_ptr<const Law>& shared(int var) const {
    auto it = laws_.find(var);
    if (it == laws_.end()) throw ArgumentError("Assignment: variable " + std::to_string(var) + " has no law");
    return it->second;
  }

  std::size_t size() const noexcept { return laws_.size(); }
  const std::map<int, std::shared_ptr<const Law>>& entries() const noexcept { return laws_; }

 private:
  std::map<int, std::shared_ptr<const Law>> laws_;
};

/// Finite real combination of words. The empty word is the scalar part.
class NCPolynomial {
 public:
  NCPolynomial() = default;

  static NCPolynomial constant(double c) {
    NCPolynomial p;
    p.add_term({}, c);
    return p;
  }

  static NCPolynomial variable(int v) {
    NCPolynomial p;
    p.add_term({v}, 1.0);
    return p;
  }

  void add_term(Word w, double coeff) {
    if (coeff == 0.0) return;
    auto [it, inserted] = terms_.try_emplace(std::move(w), coeff);
    if (!inserted) {
      it->second += coeff;
      if (it->second == 0.0) terms_.erase(it);
    }
  }

  const std::map<Word, double>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }

  std::size_t max_degree() const {
    std::size_t d = 0;
    for (const auto& [w, c] : terms_) d = std::max(d, w.size());
    return d;
  }

  /// Reverses every word; the adjoint for self-adjoint letters and real coefficients.
  NCPolynomial adjoint() const {
    NCPolynomial p;
    for (const auto& [w, c] : terms_) p.add_term(Word(w.rbegin(), w.rend()), c);
    return p;
  }

  NCPolynomial scaled(double s) const {
    NCPolynomial p;
    for (const auto& [w, c] : terms_) p.add_term(w, c * s);
    return p;
  }

  friend NCPolynomial operator+(const NCPolynomial& a, const NCPolynomial& b) {
    NCPolynomial p = a;
    for (const auto& [w, c] : b.terms_) p.add_term(w, c);
    return p;
  }

  friend NCPolynomial operator*(const NCPolynomial& a, const NCPolynomial& b) {
    NCPolynomial p;
    for (const auto& [wa, ca] : a.terms_)
      for (const auto& [wb, cb] : b.terms_) {
        Word w = wa;
        w.insert(w.end(), wb.begin(), wb.end());
        p.add_term(std::move(w), ca * cb);
      }
    return p;
  }

 private:
  std::map<Word, double> terms_;
};

namespace detail {

// Evaluates one kernel pattern. `pattern[pos]` is the class of position pos
// (classes numbered by first occurrence); `laws[c]` is the law of class c.
class PatternEvaluator {
 public:
  PatternEvaluator(std::span<const std::uint8_t> pattern, std::span<const Law* const> laws)
      : n_(pattern.size()), cls_(pattern.begin(), pattern.end()) {
    const std::size_t classes = laws.size();
    std::vector<std::size_t> occ(classes, 0);
    for (auto c : cls_) {
      if (c >= classes) throw ArgumentError("PatternEvaluator: class without law");
      ++occ[c];
    }
    kappa_.resize(classes);
    centered_.resize(classes);
    for (std::size_t c = 0; c < classes; ++c) {
      const Law& law = *laws[c];
      if (occ[c] > law.max_order())
        throw CapacityError("word_moment: law '" + law.name() + "' cumulant", occ[c], law.max_order());
      kappa_[c].assign(occ[c] + 1, 0.0);
      for (std::size_t k = 1; k <= occ[c]; ++k) kappa_[c][k] = law.cumulant(k);
      centered_[c] = law.cumulant(1) == 0.0;
    }
    next_same_.assign(n_, n_);
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = a + 1; b < n_; ++b)
        if (cls_[b] == cls_[a]) {
          next_same_[a] = b;
          break;
        }
    const auto nan = std::numeric_limits<double>::quiet_NaN();
    interval_memo_.assign((n_ + 1) * (n_ + 1), nan);
    block_memo_.assign(n_ * (n_ + 1) * (n_ + 2), nan);
  }

  double evaluate() { return interval(0, n_); }

 private:
  // Sum over NC partitions of positions [lo, hi) refining the kernel.
  double interval(std::size_t lo, std::size_t hi) {
    if (lo >= hi) return 1.0;
    double& slot = interval_memo_[lo * (n_ + 1) + hi];
    if (!std::isnan(slot)) return slot;
    if (has_centered_singleton(lo, hi)) return slot = 0.0;
    return slot = block(lo, hi, 1);
  }

  // The open block has k members, the last at position a. Either it closes
  // at a, or it continues to the next position b with the same class and the
  // positions strictly between form an independent interval.
  double block(std::size_t a, std::size_t hi, std::size_t k) {
    double& slot = block_memo_[(a * (n_ + 1) + hi) * (n_ + 2) + k];
    if (!std::isnan(slot)) return slot;
    const auto c = cls_[a];
    double total = 0.0;
    if (const double kap = kappa_[c][k]; kap != 0.0) total += kap * interval(a + 1, hi);
    for (std::size_t b = next_same_[a]; b < hi; b = next_same_[b]) {
      const double inner = interval(a + 1, b);
      if (inner != 0.0) total += inner * block(b, hi, k + 1);
    }
    return slot = total;
  }

  // A centered letter occurring once inside an independent interval forces a
  // singleton block, whose cumulant kappa_1 vanishes.
  bool has_centered_singleton(std::size_t lo, std::size_t hi) {
    count_.assign(kappa_.size(), 0);
    for (std::size_t p = lo; p < hi; ++p) ++count_[cls_[p]];
    for (std::size_t p = lo; p < hi; ++p)
      if (count_[cls_[p]] == 1 && centered_[cls_[p]]) return true;
    return false;
  }

  std::size_t n_;
  std::vector<std::uint8_t> cls_;
  std::vector<std::vector<double>> kappa_;
  std::vector<char> centered_;
  std::vector<std::size_t> next_same_;
  std::vector<double> interval_memo_;
  std::vector<double> block_memo_;
  std::vector<std::size_t> count_;
};

inline double pattern_moment(std::span<const std::uint8_t> pattern, std::span<const Law* const> laws) {
  if (pattern.empty()) return 1.0;
  return PatternEvaluator(pattern, laws).evaluate();
}

}  // namespace detail

/// Memo table for word moments keyed by kernel pattern plus the law of each
/// kernel class. Laws are interned by their stored moments, so the table can
/// be reused across assignments that share laws.
class MomentCache {
 public:
  using Tag = std::uint16_t;

  Tag intern(const std::shared_ptr<const Law>& law) {
    const auto vals = law->moments().values();
    std::string key(reinterpret_cast<const char*>(vals.data()), vals.size() * sizeof(double));
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    if (laws_.size() >= std::numeric_limits<Tag>::max()) throw SizeLimitError("MomentCache: too many laws", 65535.0, 65535.0);
    const auto tag = static_cast<Tag>(laws_.size());
    laws_.push_back(law);
    index_.emplace(std::move(key), tag);
    return tag;
  }

  const Law& law(Tag tag) const { return *laws_.at(tag); }
  std::size_t law_count() const noexcept { return laws_.size(); }

  const double* find(const std::string& key) const {
    auto it = table_.find(key);
    return it == table_.end() ? nullptr : &it->second;
  }

  void insert(const std::string& key, double value) { table_.emplace(key, value); }

  /// Adopts entries from a cache that was copied from this one before any
  /// new law was interned in either.
  void merge_from(const MomentCache& other) {
    if (other.laws_.size() != laws_.size()) return;
    for (const auto& [k, v] : other.table_) table_.emplace(k, v);
  }

  std::size_t size() const noexcept { return table_.size(); }

 private:
  std::vector<std::shared_ptr<const Law>> laws_;
  std::unordered_map<std::string, Tag> index_;
  std::unordered_map<std::string, double> table_;
};

/// phi(word) for freely independent letters with the assigned laws. The empty
/// word evaluates to 1.
inline double word_moment(std::span<const int> word, const Assignment& a) {
  if (word.empty()) return 1.0;
  std::vector<int> class_var;
  std::vector<std::uint8_t> pattern;
  pattern.reserve(word.size());
  for (int v : word) {
    auto it = std::find(class_var.begin(), class_var.end(), v);
    if (it == class_var.end()) {
      if (class_var.size() == 255) throw SizeLimitError("word_moment: too many distinct letters", 256, 255);
      class_var.push_back(v);
      pattern.push_back(static_cast<std::uint8_t>(class_var.size() - 1));
    } else {
      pattern.push_back(static_cast<std::uint8_t>(it - class_var.begin()));
    }
  }
  std::vector<const Law*> laws;
  laws.reserve(class_var.size());
  for (int v : class_var) laws.push_back(&a.law(v));
  return detail::pattern_moment(pattern, laws);
}

struct ExpansionOptions {
  std::uint64_t tuple_cap = 50'000'000;
  unsigned threads = 1;
};

namespace detail {

inline double saturating_power(double base, unsigned m) {
  double r = 1.0;
  for (unsigned j = 0; j < m; ++j) r *= base;
  return r;
}

// Depth-first walk over m-fold products of polynomial terms.
class ExpansionWalker {
 public:
  struct Term {
    std::vector<int> letters;  // dense variable ids
    double coeff;
  };

  ExpansionWalker(const std::vector<Term>& terms, const std::vector<std::vector<std::size_t>>& var_terms,
                  const std::vector<MomentCache::Tag>& tags, std::size_t max_len, unsigned m, bool prune,
                  MomentCache cache)
      : terms_(terms),
        var_terms_(var_terms),
        tags_(tags),
        max_len_(max_len),
        m_(m),
        prune_(prune),
        cache_(std::move(cache)),
        occ_(tags.size(), 0),
        cls_(tags.size(), -1) {}

  double run_from(std::size_t first_term) {
    return place(first_term, 0);
  }

  MomentCache& cache() { return cache_; }

 private:
  double place(std::size_t t, unsigned depth) {
    push(t);
    double r = 0.0;
    if (!prune_ || singles_ <= (m_ - depth - 1) * max_len_) r = terms_[t].coeff * descend(depth + 1);
    pop(t);
    return r;
  }

  double descend(unsigned depth) {
    if (depth == m_) return leaf();
    if (prune_ && singles_ > 0 && depth + 1 == m_) {
      // The last factor must contain every singleton letter.
      int forced = -1;
      for (std::size_t c = 0; c < class_var_.size(); ++c)
        if (occ_[static_cast<std::size_t>(class_var_[c])] == 1) {
          forced = class_var_[c];
          break;
        }
      double acc = 0.0;
      for (std::size_t t : var_terms_[static_cast<std::size_t>(forced)]) acc += place(t, depth);
      return acc;
    }
    double acc = 0.0;
    for (std::size_t t = 0; t < terms_.size(); ++t) acc += place(t, depth);
    return acc;
  }

  void push(std::size_t t) {
    for (int v : terms_[t].letters) {
      const auto uv = static_cast<std::size_t>(v);
      if (occ_[uv] == 0) {
        cls_[uv] = static_cast<int>(class_var_.size());
        class_var_.push_back(v);
      }
      ++occ_[uv];
      if (occ_[uv] == 1) ++singles_;
      if (occ_[uv] == 2) --singles_;
      buffer_.push_back(v);
    }
  }

  void pop(std::size_t t) {
    const auto& letters = terms_[t].letters;
    for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
      const auto uv = static_cast<std::size_t>(*it);
      if (occ_[uv] == 1) --singles_;
      if (occ_[uv] == 2) ++singles_;
      --occ_[uv];
      if (occ_[uv] == 0) {
        cls_[uv] = -1;
        class_var_.pop_back();
      }
      buffer_.pop_back();
    }
  }

  double leaf() {
    if (buffer_.empty()) return 1.0;
    if (prune_ && singles_ > 0) return 0.0;
    if (class_var_.size() > 255) throw SizeLimitError("polynomial_moment: too many distinct letters", 256, 255);
    key_.clear();
    for (int v : buffer_) key_.push_back(static_cast<char>(cls_[static_cast<std::size_t>(v)]));
    key_.push_back('\xff');
    for (int v : class_var_) {
      const auto tag = tags_[static_cast<std::size_t>(v)];
      key_.push_back(static_cast<char>(tag & 0xff));
      key_.push_back(static_cast<char>(tag >> 8));
    }
    if (const double* hit = cache_.find(key_)) return *hit;
    pattern_.assign(key_.begin(), key_.begin() + static_cast<std::ptrdiff_t>(buffer_.size()));
    laws_.clear();
    for (int v : class_var_) laws_.push_back(&cache_.law(tags_[static_cast<std::size_t>(v)]));
    const double value = pattern_moment(pattern_, laws_);
    cache_.insert(key_, value);
    return value;
  }

  const std::vector<Term>& terms_;
  const std::vector<std::vector<std::size_t>>& var_terms_;
  const std::vector<MomentCache::Tag>& tags_;
  std::size_t max_len_;
  unsigned m_;
  bool prune_;
  MomentCache cache_;

  std::vector<int> occ_;
  std::vector<int> cls_;
  std::vector<int> class_var_;
  std::vector<int> buffer_;
  std::size_t singles_ = 0;
  std::string key_;
  std::vector<std::uint8_t> pattern_;
  std::vector<const Law*> laws_;
};

}  // namespace detail

/// phi(P^m). The m-fold product is expanded over support words, and word
/// moments are memoized by kernel pattern and law pattern in `cache` (a fresh
/// one when null). With `threads` > 1 the first factor is split across
/// workers with private caches merged afterwards.
inline double polynomial_moment(const NCPolynomial& P, const Assignment& a, unsigned m,
                                const ExpansionOptions& opt = {}, MomentCache* cache = nullptr) {
  if (m == 0) throw ArgumentError("polynomial_moment: m must be positive");
  if (P.empty()) return 0.0;
  const double nominal = detail::saturating_power(static_cast<double>(P.size()), m);
  if (nominal > static_cast<double>(opt.tuple_cap))
    throw SizeLimitError("polynomial_moment: support expansion above cap", nominal, static_cast<double>(opt.tuple_cap));

  MomentCache local;
  MomentCache& shared = cache ? *cache : local;

  std::map<int, int> dense;
  for (const auto& [w, c] : P.terms())
    for (int v : w) dense.try_emplace(v, 0);
  std::vector<MomentCache::Tag> tags;
  bool prune = true;
  int next = 0;
  for (auto& [v, id] : dense) {
    id = next++;
    const auto& law = a.shared(v);
    tags.push_back(shared.intern(law));
    if (law->cumulant(1) != 0.0) prune = false;
  }

  std::vector<detail::ExpansionWalker::Term> terms;
  std::vector<std::vector<std::size_t>> var_terms(dense.size());
  std::size_t max_len = 0;
  for (const auto& [w, c] : P.terms()) {
    detail::ExpansionWalker::Term t{{}, c};
    for (int v : w) t.letters.push_back(dense.at(v));
    for (int v : t.letters) {
      auto& list = var_terms[static_cast<std::size_t>(v)];
      if (list.empty() || list.back() != terms.size()) list.push_back(terms.size());
    }
    max_len = std::max(max_len, w.size());
    terms.push_back(std::move(t));
  }

  const unsigned workers = std::max(1U, std::min<unsigned>(opt.threads, static_cast<unsigned>(terms.size())));
  if (workers == 1) {
    detail::ExpansionWalker walker(terms, var_terms, tags, max_len, m, prune, std::move(shared));
    double total = 0.0;
    std::exception_ptr err;
    try {
      for (std::size_t t = 0; t < terms.size(); ++t) total += walker.run_from(t);
    } catch (...) {
      err = std::current_exception();
    }
    shared = std::move(walker.cache());
    if (err) std::rethrow_exception(err);
    return total;
  }

  // Subtotals are kept per first term and summed in term order, so the
  // result does not depend on the worker count.
  std::vector<double> partial(terms.size(), 0.0);
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::unique_ptr<detail::ExpansionWalker>> walkers;
  for (unsigned w = 0; w < workers; ++w)
    walkers.push_back(std::make_unique<detail::ExpansionWalker>(terms, var_terms, tags, max_len, m, prune, shared));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (std::size_t t = w; t < terms.size(); t += workers) partial[t] = walkers[w]->run_from(t);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (unsigned w = 0; w < workers; ++w) shared.merge_from(walkers[w]->cache());
  double total = 0.0;
  for (double x : partial) total += x;
  return total;
}

/// The two traces compared by the insertion identities: the word `w` with a
/// fresh variable distributed as `y` (resp. `z`) inserted at the given
/// positions. One position: both values vanish for centered y, z. Two
/// positions: the values agree for centered unit-variance y, z.
struct InsertionValues {
  double with_y = 0.0;
  double with_z = 0.0;
};

inline InsertionValues centered_insertion_check(const Word& w, const Assignment& a, const Law& y, const Law& z,
                                                std::span<const std::size_t> positions) {
  if (positions.empty() || positions.size() > 2)
    throw ArgumentError("centered_insertion_check: one or two insertion positions expected");
  for (std::size_t p : positions)
    if (p > w.size()) throw ArgumentError("centered_insertion_check: insertion position out of range");
  if (positions.size() == 2 && positions[0] > positions[1])
    throw ArgumentError("centered_insertion_check: positions must be non-decreasing");
  if (!y.centered() || !z.centered()) throw ArgumentError("centered_insertion_check: inserted laws must be centered");
  if (positions.size() == 2 && (!y.unit_variance() || !z.unit_variance()))
    throw ArgumentError("centered_insertion_check: inserted laws must have unit variance");

  int fresh = 0;
  for (int v : w) fresh = std::max(fresh, v);
  for (const auto& [v, law] : a.entries()) fresh = std::max(fresh, v);
  ++fresh;

  Word inserted;
  std::size_t next = 0;
  for (std::size_t pos = 0; pos <= w.size(); ++pos) {
    while (next < positions.size() && positions[next] == pos) {
      inserted.push_back(fresh);
      ++next;
    }
    if (pos < w.size()) inserted.push_back(w[pos]);
  }

  Assignment ay = a;
  ay.assign(fresh, y);
  Assignment az = a;
  az.assign(fresh, z);
  return {word_moment(inserted, ay), word_moment(inserted, az)};
}

}  // namespace freeinv
