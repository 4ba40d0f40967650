#include "linear.hpp"

#include <algorithm>
#include <set>

namespace keel::prover {

void Lin::add(const Lin& other, const Rational& scale) {
  for (const auto& [atom, c] : other.coef) {
    auto& slot = coef[atom];
    slot += c * scale;
    if (slot == 0) coef.erase(atom);
  }
  constant += other.constant * scale;
}

Lin LinearSystem::reduce(Lin f) const {
  // Rows are fully reduced, so one substitution per pivot suffices.
  std::vector<std::pair<std::size_t, Rational>> hits;
  for (const auto& [atom, c] : f.coef)
    if (auto it = pivot_.find(atom); it != pivot_.end()) hits.emplace_back(it->second, c);
  for (const auto& [row, c] : hits) f.add(rows_[row], -c);
  return f;
}

bool LinearSystem::add_equation(Lin row) {
  row = reduce(std::move(row));
  if (row.is_constant()) return row.constant == 0;
  const auto [pivot, lead] = *row.coef.rbegin();
  const Rational inv = 1 / lead;
  Lin scaled;
  scaled.add(row, inv);
  for (auto& r : rows_) {
    auto it = r.coef.find(pivot);
    if (it == r.coef.end()) continue;
    const Rational c = it->second;
    r.add(scaled, -c);
  }
  pivot_[pivot] = rows_.size();
  rows_.push_back(std::move(scaled));
  return true;
}

namespace {

struct Search {
  const std::vector<Lin>& facts;
  int depth;
  const std::function<void()>& tick;
  std::set<std::vector<std::size_t>> seen;

  bool run(const Lin& residual, std::vector<std::size_t>& chosen) {
    tick();
    if (residual.is_constant()) return residual.constant <= 0;
    if (static_cast<int>(chosen.size()) >= depth) return false;
    const auto& [atom, c] = *residual.coef.begin();
    for (std::size_t i = 0; i < facts.size(); ++i) {
      if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
      auto it = facts[i].coef.find(atom);
      if (it == facts[i].coef.end() || (it->second > 0) != (c > 0)) continue;
      auto key = chosen;
      key.push_back(i);
      std::sort(key.begin(), key.end());
      if (!seen.insert(key).second) continue;
      Lin next = residual;
      next.add(facts[i], -1);
      chosen.push_back(i);
      if (run(next, chosen)) return true;
      chosen.pop_back();
    }
    return false;
  }
};

}  // namespace

bool entails_nonpositive(const Lin& goal, const std::vector<Lin>& facts, int depth,
                         const std::function<void()>& tick) {
  Search s{facts, depth, tick, {}};
  std::vector<std::size_t> chosen;
  return s.run(goal, chosen);
}

}  // namespace keel::prover
