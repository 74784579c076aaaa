#include "pxv/probeval.hpp"

#include <deque>
#include <unordered_map>

#include "json.hpp"

namespace pxv {

namespace {

using Mask = std::uint64_t;
using Dist = std::vector<std::pair<Mask, Rational>>;
using Acc = std::unordered_map<Mask, Rational>;

Dist to_dist(Acc&& acc) {
  Dist d;
  d.reserve(acc.size());
  for (auto& [m, q] : acc)
    if (q != 0) d.emplace_back(m, std::move(q));
  return d;
}

Dist or_convolve(const Dist& a, const Dist& b) {
  if (a.size() == 1 && a[0].first == 0 && a[0].second == 1) return b;
  if (b.size() == 1 && b[0].first == 0 && b[0].second == 1) return a;
  Acc acc;
  for (const auto& [ma, pa] : a)
    for (const auto& [mb, pb] : b) acc[ma | mb] += pa * pb;
  return to_dist(std::move(acc));
}

const Dist& unit() {
  static const Dist u{{Mask(0), Rational(1)}};
  return u;
}

// Subset-state DP. Bit x of a state at document node y:
//  - x the root of a member, or entered by a /-edge: x embeds with x -> y
//  - x entered by a //-edge: x embeds at y or at some node below y
class JointEval {
 public:
  JointEval(const std::vector<const TreePattern*>& members, const PDocument& p) : p_(p) {
    for (const TreePattern* m : members) {
      std::size_t base = labels_.size();
      roots_ |= Mask(1) << base;
      for (std::size_t x = 0; x < m->size(); ++x) {
        labels_.push_back(m->label(x));
        desc_.push_back(x != 0 && m->node(x).axis == Axis::Descendant);
        Mask ch = 0;
        for (std::size_t c : m->node(x).children) ch |= Mask(1) << (base + c);
        children_.push_back(ch);
        out_.push_back(x == m->out());
      }
    }
    nbits_ = labels_.size();
    free_.resize(p.size());
    free_done_.assign(p.size(), 0);
    label_mask_.assign(p.size(), 0);
    out_mask_ = 0;
    for (std::size_t x = 0; x < nbits_; ++x)
      if (out_[x]) out_mask_ |= Mask(1) << x;
    for (std::size_t y = 0; y < p.size(); ++y) {
      if (!p.is_ordinary(y)) continue;
      Mask m = 0;
      for (std::size_t x = 0; x < nbits_; ++x)
        if (labels_[x] == p.node(y).label) m |= Mask(1) << x;
      label_mask_[y] = m;
    }
  }

  static constexpr std::size_t kMaxBits = 64;
  std::size_t bits() const { return nbits_; }

  Rational at(std::size_t target) {
    scratch_.clear();
    on_path_.assign(p_.size(), 0);
    for (std::size_t i = target; i != kNoNode; i = p_.node(i).parent) on_path_[i] = 1;
    target_ = target;
    Dist d = dist(p_.root());
    Rational r = 0;
    for (const auto& [m, q] : d)
      if ((m & roots_) == roots_) r += q;
    return r;
  }

 private:
  Mask step(Mask C, std::size_t y) const {
    Mask cand = label_mask_[y];
    if (y != target_) cand &= ~out_mask_;
    Mask S = 0;
    for (std::size_t x = 0; x < nbits_; ++x) {
      Mask bit = Mask(1) << x;
      bool m = (cand & bit) && (children_[x] & C) == children_[x];
      if (m || (desc_[x] && (C & bit))) S |= bit;
    }
    return S;
  }

  const Dist& dist(std::size_t i) {
    if (!on_path_[i]) {
      if (!free_done_[i]) {
        std::size_t saved = target_;
        target_ = kNoNode;
        free_[i] = compute(i);
        target_ = saved;
        free_done_[i] = 1;
      }
      return free_[i];
    }
    scratch_.push_back(compute(i));
    return scratch_.back();
  }

  Dist compute(std::size_t i) {
    const PNode& n = p_.node(i);
    if (n.kind == NodeKind::Ordinary) {
      Dist C = unit();
      for (std::size_t c : n.children) C = or_convolve(C, dist(c));
      Acc acc;
      for (const auto& [m, q] : C) acc[step(m, i)] += q;
      return to_dist(std::move(acc));
    }
    if (n.kind == NodeKind::Mux) {
      Acc acc;
      Rational rest = 1;
      for (std::size_t k = 0; k < n.children.size(); ++k) {
        rest -= n.probs[k];
        for (const auto& [m, q] : dist(n.children[k])) acc[m] += n.probs[k] * q;
      }
      if (rest != 0) acc[0] += rest;
      return to_dist(std::move(acc));
    }
    Dist R = unit();
    for (std::size_t k = 0; k < n.children.size(); ++k) {
      Acc acc;
      for (const auto& [m, q] : dist(n.children[k])) acc[m] += n.probs[k] * q;
      if (n.probs[k] != 1) acc[0] += 1 - n.probs[k];
      R = or_convolve(R, to_dist(std::move(acc)));
    }
    return R;
  }

  const PDocument& p_;
  std::vector<std::string> labels_;
  std::vector<char> desc_;
  std::vector<Mask> children_;
  std::vector<char> out_;
  Mask roots_ = 0;
  Mask out_mask_ = 0;
  std::size_t nbits_ = 0;
  std::vector<Mask> label_mask_;
  std::vector<Dist> free_;
  std::vector<char> free_done_;
  std::vector<char> on_path_;
  std::size_t target_ = kNoNode;
  std::deque<Dist> scratch_;
};

ProbAnswer joint_answer(const std::vector<const TreePattern*>& members, const PDocument& p) {
  ProbAnswer out;
  if (members.empty() || p.size() == 0) return out;
  const std::string& out_label = members[0]->label(members[0]->out());
  for (const TreePattern* m : members) {
    if (m->label(m->out()) != out_label) return out;
    if (m->label(0) != p.node(0).label) return out;
  }
  std::size_t bits = 0;
  for (const TreePattern* m : members) bits += m->size();
  if (bits > JointEval::kMaxBits) {
    IntersectionPattern Q;
    for (const TreePattern* m : members) Q.members.push_back(*m);
    return oracle_peval(AnyPattern(Q), p);
  }
  JointEval ev(members, p);
  for (std::size_t y = 0; y < p.size(); ++y) {
    if (!p.is_ordinary(y) || p.node(y).label != out_label) continue;
    Rational r = ev.at(y);
    if (r != 0) out.emplace(p.node(y).id, r);
  }
  return out;
}

}  // namespace

Rational peval_at(const std::vector<const TreePattern*>& members, const PDocument& p,
                  std::size_t target) {
  std::size_t bits = 0;
  for (const TreePattern* m : members) bits += m->size();
  if (bits > JointEval::kMaxBits) {
    IntersectionPattern Q;
    for (const TreePattern* m : members) Q.members.push_back(*m);
    ProbAnswer a = oracle_peval(AnyPattern(Q), p);
    auto it = a.find(p.node(target).id);
    return it == a.end() ? Rational(0) : it->second;
  }
  if (!p.is_ordinary(target)) return 0;
  for (const TreePattern* m : members)
    if (m->label(m->out()) != p.node(target).label || m->label(0) != p.node(0).label) return 0;
  JointEval ev(members, p);
  return ev.at(target);
}

ProbAnswer peval(const TreePattern& q, const PDocument& p) { return joint_answer({&q}, p); }

ProbAnswer peval_cap(const IntersectionPattern& Q, const PDocument& p) {
  std::vector<const TreePattern*> ms;
  for (const auto& m : Q.members) ms.push_back(&m);
  return joint_answer(ms, p);
}

ProbAnswer peval(const AnyPattern& q, const PDocument& p) {
  if (const auto* t = std::get_if<TreePattern>(&q)) return peval(*t, p);
  return peval_cap(std::get<IntersectionPattern>(q), p);
}

ProbAnswer oracle_peval(const AnyPattern& q, const PDocument& p, std::size_t max_dist) {
  ProbAnswer out;
  for (const World& w : enumerate_worlds(p, max_dist)) {
    std::set<std::string> sel = std::visit([&](const auto& x) { return eval_doc(x, w.document); }, q);
    for (const auto& id : sel) out[id] += w.probability;
  }
  for (auto it = out.begin(); it != out.end();) {
    if (it->second == 0) it = out.erase(it);
    else ++it;
  }
  return out;
}

std::string answer_to_json(const ProbAnswer& a) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& [id, q] : a) j.push_back({{"node", id}, {"p", to_string(q)}});
  return j.dump();
}

ProbAnswer answer_from_json(const std::string& text) {
  ProbAnswer a;
  auto j = nlohmann::json::parse(text);
  for (const auto& e : j) a[e.at("node").get<std::string>()] = parse_rational(e.at("p").get<std::string>());
  return a;
}

}  // namespace pxv
