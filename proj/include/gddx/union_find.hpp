#pragma once
#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

namespace gddx {

/// Union-find over keys of type `Key` that remembers why classes were merged.
///
/// Next to the usual find structure it keeps a proof forest: every successful
/// merge adds one labelled edge between the two merged keys, so for any two
/// keys in one class the unique forest path between them lists exactly the
/// merges that connect them. Path extraction walks only that path.
template <class Key, class Label, class Hash = std::hash<Key>>
class ExplainedClasses {
public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  /// Merges the classes of `a` and `b`. Returns every pair (u, v) that became
  /// related by this merge, u from a's old class and v from b's, including
  /// (a, b) itself. Empty when they were already related.
  std::vector<std::pair<Key, Key>> merge(const Key &a, const Key &b,
                                         Label why) {
    const auto na = intern(a), nb = intern(b);
    auto ra = find(na), rb = find(nb);
    if (ra == rb)
      return {};

    std::vector<std::pair<Key, Key>> fresh;
    fresh.reserve(members_[ra].size() * members_[rb].size());
    for (auto u : members_[ra])
      for (auto v : members_[rb])
        fresh.emplace_back(keys_[u], keys_[v]);

    reroot(na);
    proof_parent_[na] = nb;
    proof_label_[na] = std::move(why);

    if (members_[ra].size() < members_[rb].size())
      std::swap(ra, rb);
    parent_[rb] = ra;
    members_[ra].insert(members_[ra].end(), members_[rb].begin(),
                        members_[rb].end());
    members_[rb].clear();
    members_[rb].shrink_to_fit();
    return fresh;
  }

  bool contains(const Key &k) const { return index_.count(k) != 0; }

  bool same(const Key &a, const Key &b) const {
    auto ia = index_.find(a), ib = index_.find(b);
    if (ia == index_.end() || ib == index_.end())
      return a == b;
    return find(ia->second) == find(ib->second);
  }

  /// Labels on the forest path from `a` to `b`, in path order. Empty when
  /// a == b; throws std::out_of_range when they are not related.
  std::vector<Label> explain(const Key &a, const Key &b) const {
    if (a == b)
      return {};
    if (!same(a, b))
      throw std::out_of_range("keys are not in one class");
    const auto na = index_.at(a), nb = index_.at(b);

    std::unordered_map<std::size_t, std::size_t> depth_from_a;
    std::size_t d = 0;
    for (auto n = na; n != npos; n = proof_parent_[n])
      depth_from_a.emplace(n, d++);

    std::vector<Label> from_b;
    auto n = nb;
    while (!depth_from_a.count(n)) {
      from_b.push_back(proof_label_[n]);
      n = proof_parent_[n];
    }
    const auto meet = n;
    std::vector<Label> path;
    for (auto m = na; m != meet; m = proof_parent_[m])
      path.push_back(proof_label_[m]);
    path.insert(path.end(), from_b.rbegin(), from_b.rend());
    return path;
  }

  /// Members of the class containing `k` (just `k` if unseen).
  std::vector<Key> members(const Key &k) const {
    auto it = index_.find(k);
    if (it == index_.end())
      return {k};
    std::vector<Key> out;
    for (auto n : members_[find(it->second)])
      out.push_back(keys_[n]);
    return out;
  }

  /// All classes with at least two members.
  std::vector<std::vector<Key>> classes() const {
    std::vector<std::vector<Key>> out;
    for (std::size_t n = 0; n < keys_.size(); ++n) {
      if (parent_[n] != n || members_[n].size() < 2)
        continue;
      std::vector<Key> cls;
      for (auto m : members_[n])
        cls.push_back(keys_[m]);
      out.push_back(std::move(cls));
    }
    return out;
  }

  std::size_t size() const { return keys_.size(); }

private:
  std::vector<Key> keys_;
  std::unordered_map<Key, std::size_t, Hash> index_;
  mutable std::vector<std::size_t> parent_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<std::size_t> proof_parent_;
  std::vector<Label> proof_label_;

  std::size_t intern(const Key &k) {
    auto [it, inserted] = index_.try_emplace(k, keys_.size());
    if (inserted) {
      keys_.push_back(k);
      parent_.push_back(it->second);
      members_.push_back({it->second});
      proof_parent_.push_back(npos);
      proof_label_.emplace_back();
    }
    return it->second;
  }

  std::size_t find(std::size_t n) const {
    while (parent_[n] != n) {
      parent_[n] = parent_[parent_[n]];
      n = parent_[n];
    }
    return n;
  }

  // Reverses the forest edges on the path from n to its tree root so that n
  // becomes the root.
  void reroot(std::size_t n) {
    std::size_t prev = npos;
    Label prev_label{};
    while (n != npos) {
      const auto next = proof_parent_[n];
      Label label = std::move(proof_label_[n]);
      proof_parent_[n] = prev;
      proof_label_[n] = std::move(prev_label);
      prev = n;
      prev_label = std::move(label);
      n = next;
    }
  }
};

} // namespace gddx
