/*
 * Copyright (c) 2026, The lwgnn Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "lwgnn/splitter.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "lwgnn/error.hpp"

namespace lwgnn {

namespace {

constexpr int kUndecided = -1;

class Partitioner {
 public:
  explicit Partitioner(const ModelGraph& m)
      : m_(m), last_(std::max(m.depth(), 1)), block_of_(m.size(), kUndecided), topo_pos_(m.size()) {
    for (std::size_t k = 0; k < m.topo_order().size(); ++k) topo_pos_[m.topo_order()[k]] = k;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const OpKind kind = m.op(i).kind;
      if (kind == OpKind::kInput) block_of_[i] = 0;
      if (is_conv(kind)) block_of_[i] = m.layer_of(i);
      if (kind == OpKind::kOutput) block_of_[i] = last_;
    }
  }

  int last_block() const { return last_; }
  const std::vector<int>& block_of() const { return block_of_; }
  bool undecided(std::size_t i) const { return block_of_[i] == kUndecided; }

  /// Pulls every undecided ancestor of the block's Convs into block l; the
  /// last block also absorbs whatever is still unplaced.
  void open_block(int l) {
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < m_.size(); ++i) {
      if (is_conv(m_.op(i).kind) && m_.layer_of(i) == l) stack.push_back(i);
    }
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      for (const auto p : m_.producers(v)) {
        if (undecided(p)) {
          block_of_[p] = l;
          stack.push_back(p);
        }
      }
    }
    if (l == last_) {
      for (auto& b : block_of_) {
        if (b == kUndecided) b = l;
      }
    }
  }

  /// Operators outside block l whose outputs block l reads.
  std::set<std::size_t> inputs_of(int l) const {
    std::set<std::size_t> in;
    for (std::size_t i = 0; i < m_.size(); ++i) {
      if (block_of_[i] != l) continue;
      for (const auto p : m_.producers(i)) {
        if (block_of_[p] != l) in.insert(p);
      }
    }
    return in;
  }

  /// Undecided operators in topological order.
  std::vector<std::size_t> candidates() const {
    std::vector<std::size_t> out;
    for (const auto i : m_.topo_order()) {
      if (undecided(i)) out.push_back(i);
    }
    return out;
  }

  std::size_t crossing(int l, const std::vector<char>& up) const {
    std::size_t count = 0;
    for (std::size_t p = 0; p < m_.size(); ++p) {
      const bool before = up[p] || (block_of_[p] != kUndecided && block_of_[p] <= l);
      if (!before) continue;
      for (const auto c : m_.consumers(p)) {
        if ((undecided(c) && !up[c]) || block_of_[c] > l) {
          ++count;
          break;
        }
      }
    }
    return count;
  }

  /// Chooses and applies the cut after block l; returns its crossing count.
  std::size_t resolve_boundary(int l) {
    const auto inputs = inputs_of(l);
    std::vector<std::size_t> cands;
    {
      // Only operators whose operands could all be available in block l.
      std::vector<char> possible(m_.size(), 0);
      for (const auto c : candidates()) {
        bool ok = true;
        for (const auto p : m_.producers(c)) ok = ok && (block_of_[p] == l || inputs.contains(p) || possible[p]);
        if (ok) {
          possible[c] = 1;
          cands.push_back(c);
        }
      }
    }

    std::vector<char> up(m_.size(), 0);
    std::vector<char> best_up = up;
    std::size_t best_cross = crossing(l, up);
    std::size_t best_count = 0;
    std::vector<std::string> best_down = ids_of(cands, up, false);

    std::function<void(std::size_t, std::size_t)> search = [&](std::size_t k, std::size_t count) {
      if (k == cands.size()) {
        const std::size_t cross = crossing(l, up);
        if (cross > best_cross || (cross == best_cross && count < best_count)) return;
        auto down = ids_of(cands, up, false);
        if (cross == best_cross && count == best_count && !(down < best_down)) return;
        best_cross = cross;
        best_count = count;
        best_down = std::move(down);
        best_up = up;
        return;
      }
      search(k + 1, count);
      const auto c = cands[k];
      const bool available = std::all_of(m_.producers(c).begin(), m_.producers(c).end(), [&](std::size_t p) {
        return block_of_[p] == l || inputs.contains(p) || up[p];
      });
      if (available) {
        up[c] = 1;
        search(k + 1, count + 1);
        up[c] = 0;
      }
    };
    search(0, 0);

    for (const auto c : cands) {
      if (best_up[c]) block_of_[c] = l;
    }
    return best_cross;
  }

  std::vector<std::string> ids_of(const std::vector<std::size_t>& ops, const std::vector<char>& up, bool want_up) const {
    std::vector<std::string> out;
    for (const auto i : ops) {
      if (static_cast<bool>(up[i]) == want_up) out.push_back(m_.op(i).id);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::size_t topo_pos(std::size_t i) const { return topo_pos_[i]; }

 private:
  const ModelGraph& m_;
  int last_;
  std::vector<int> block_of_;
  std::vector<std::size_t> topo_pos_;
};

/// Replays split's decisions up to and including the opening of block l.
Partitioner partition_until(const ModelGraph& m, int l) {
  Partitioner p(m);
  for (int b = 1; b < l; ++b) {
    p.open_block(b);
    p.resolve_boundary(b);
  }
  p.open_block(l);
  return p;
}

}  // namespace

BlockSchedule split(const ModelGraph& m) {
  Partitioner part(m);
  BlockSchedule s;
  const int last = part.last_block();
  for (int l = 1; l <= last; ++l) {
    part.open_block(l);
    if (l < last) s.boundary_crossings.push_back(part.resolve_boundary(l));
  }
  s.block_of = part.block_of();

  const auto ref_of = [&](std::size_t p) { return TensorRef{m.op(p).id, s.block_of[p]}; };
  const auto by_topo = [&](std::size_t a, std::size_t b) { return part.topo_pos(a) < part.topo_pos(b); };

  for (int l = 1; l <= last; ++l) {
    ConvBlock block;
    block.id = l;
    block.layer = m.depth() == 0 ? 0 : l;
    for (const auto i : m.topo_order()) {
      if (s.block_of[i] == l) block.members.push_back(i);
    }

    std::vector<char> feeds_conv(m.size(), 0);
    for (const auto i : block.members) {
      if (!is_conv(m.op(i).kind)) continue;
      std::vector<std::size_t> stack{i};
      while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (const auto p : m.producers(v)) {
          if (s.block_of[p] == l && !feeds_conv[p]) {
            feeds_conv[p] = 1;
            stack.push_back(p);
          }
        }
      }
    }
    for (const auto i : block.members) block.domains.push_back(feeds_conv[i] ? Domain::kInputNodes : Domain::kTargetNodes);

    std::vector<std::size_t> in;
    std::vector<std::size_t> out;
    for (const auto i : block.members) {
      for (const auto p : m.producers(i)) {
        if (s.block_of[p] != l && std::find(in.begin(), in.end(), p) == in.end()) in.push_back(p);
      }
      const bool read_later = std::any_of(m.consumers(i).begin(), m.consumers(i).end(),
                                          [&](std::size_t c) { return s.block_of[c] > l; });
      if (read_later || i == m.output_index()) out.push_back(i);
    }
    std::sort(in.begin(), in.end(), by_topo);
    for (const auto p : in) block.inputs.push_back(ref_of(p));
    for (const auto p : out) block.outputs.push_back(ref_of(p));
    s.schema[block.id] = block.inputs;
    s.blocks.push_back(std::move(block));
  }

  auto lifetimes = plan_lifetimes(s.blocks, m.output_id());
  s.drop_after = std::move(lifetimes.drop_after);
  s.warnings = std::move(lifetimes.warnings);
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m.consumers(i).empty() && m.op(i).kind != OpKind::kOutput) {
      s.warnings.push_back("operator '" + m.op(i).id + "' has no consumer; its value is discarded in block " +
                           std::to_string(s.block_of[i]));
    }
  }
  return s;
}

std::vector<Cut> enumerate_cuts(const ModelGraph& m, int l) {
  if (l < 1 || l >= m.depth()) {
    fail(ErrorKind::kConfig, "no boundary after layer " + std::to_string(l) + " in a depth-" + std::to_string(m.depth()) + " model");
  }
  const Partitioner part = partition_until(m, l);
  const auto& block_of = part.block_of();
  const auto inputs = part.inputs_of(l);
  const auto cands = part.candidates();
  if (cands.size() > 24) fail(ErrorKind::kConfig, "too many candidate operators to enumerate");

  std::vector<Cut> cuts;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << cands.size()); ++mask) {
    std::vector<char> up(m.size(), 0);
    for (std::size_t k = 0; k < cands.size(); ++k) up[cands[k]] = (mask >> k) & 1;

    bool valid = true;
    for (std::size_t k = 0; k < cands.size() && valid; ++k) {
      if (!up[cands[k]]) continue;
      for (const auto p : m.producers(cands[k])) {
        if (!(block_of[p] == l || inputs.contains(p) || up[p])) valid = false;
      }
    }
    if (!valid) continue;

    // Distinct producers on the upstream side of an edge that crosses the cut.
    std::set<std::size_t> crossing;
    for (std::size_t c = 0; c < m.size(); ++c) {
      const bool after = (block_of[c] == -1 && !up[c]) || block_of[c] > l;
      if (!after) continue;
      for (const auto p : m.producers(c)) {
        if (up[p] || (block_of[p] >= 0 && block_of[p] <= l)) crossing.insert(p);
      }
    }
    Cut cut;
    cut.upstream = part.ids_of(cands, up, true);
    cut.downstream = part.ids_of(cands, up, false);
    cut.crossing = crossing.size();
    cut.upstream_ops = cut.upstream.size();
    cuts.push_back(std::move(cut));
  }
  return cuts;
}

Lifetimes plan_lifetimes(std::span<const ConvBlock> blocks, std::string_view result) {
  Lifetimes out;
  for (const auto& producer : blocks) {
    for (const auto& ref : producer.outputs) {
      if (ref.tensor == result) continue;
      int last = 0;
      for (const auto& consumer : blocks) {
        if (std::find(consumer.inputs.begin(), consumer.inputs.end(), ref) != consumer.inputs.end()) {
          last = std::max(last, consumer.id);
        }
      }
      if (last == 0) {
        out.warnings.push_back("tensor '" + ref.tensor + "' from block " + std::to_string(producer.id) +
                               " has no consumer; released after production");
        last = producer.id;
      }
      out.drop_after[ref.tensor] = last;
    }
  }
  return out;
}

std::string format_schedule(const ModelGraph& m, const BlockSchedule& s) {
  std::ostringstream os;
  const auto refs = [&](const std::vector<TensorRef>& list) {
    std::string text;
    for (const auto& r : list) text += (text.empty() ? "" : ",") + r.tensor + "@" + std::to_string(r.block);
    return "[" + text + "]";
  };
  for (const auto& b : s.blocks) {
    os << "block " << b.id << " layer=" << b.layer << " ops=[";
    for (std::size_t k = 0; k < b.members.size(); ++k) {
      os << (k ? "," : "") << m.op(b.members[k]).id << (b.domains[k] == Domain::kInputNodes ? ":in" : ":tgt");
    }
    os << "] in=" << refs(b.inputs) << " out=" << refs(b.outputs) << " drop=[";
    bool first = true;
    for (const auto& [tensor, after] : s.drop_after) {
      if (after != b.id) continue;
      os << (first ? "" : ",") << tensor;
      first = false;
    }
    os << "]\n";
  }
  return os.str();
}

}  // namespace lwgnn
