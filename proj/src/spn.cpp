#include "spnjd/spn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "spnjd/error.hpp"

namespace spnjd {

namespace {

std::string indexed(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

}  // namespace

std::optional<std::size_t> SpnModel::place_index(std::string_view name) const {
  auto it = std::find(places_.begin(), places_.end(), name);
  if (it == places_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - places_.begin());
}

std::optional<std::size_t> SpnModel::transition_index(std::string_view name) const {
  auto it = std::find(transitions_.begin(), transitions_.end(), name);
  if (it == transitions_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - transitions_.begin());
}

void SpnModel::index_arcs() {
  const std::size_t np = num_places(), nt = num_transitions();
  inputs_.assign(nt, {});
  changes_.assign(nt, {});
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t p = 0; p < np; ++p) {
      if (input(p, t) > 0) inputs_[t].push_back({p, input(p, t)});
      if (incidence(p, t) != 0) changes_[t].push_back({p, incidence(p, t)});
    }
  }
}

SpnModel SpnModel::with_initial_marking(Marking m0) const {
  if (m0.size() != num_places()) throw ModelError("initial_marking", "length mismatch");
  for (std::size_t p = 0; p < m0.size(); ++p)
    if (m0[p] < 0) throw ModelError("initial_marking." + places_[p], "negative token count");
  SpnModel copy = *this;
  copy.initial_ = std::move(m0);
  return copy;
}

SpnModel SpnModel::with_scaled_rates(double factor) const {
  if (!(factor > 0.0)) throw ModelError("rates", "non-positive rate scale");
  SpnModel copy = *this;
  for (double& r : copy.rates_) r *= factor;
  return copy;
}

ModelDocument SpnModel::to_document() const {
  ModelDocument doc;
  doc.places = places_;
  for (std::size_t t = 0; t < num_transitions(); ++t) {
    TransitionDoc td;
    td.name = transitions_[t];
    td.rate = rates_[t];
    for (std::size_t p = 0; p < num_places(); ++p) {
      if (input(p, t) > 0) td.input.emplace_back(places_[p], input(p, t));
      if (output(p, t) > 0) td.output.emplace_back(places_[p], output(p, t));
    }
    doc.transitions.push_back(std::move(td));
  }
  for (std::size_t p = 0; p < num_places(); ++p)
    if (initial_[p] != 0) doc.initial_marking.emplace_back(places_[p], initial_[p]);
  if (alpha_) {
    doc.alpha.emplace();
    for (std::size_t p = 0; p < num_places(); ++p)
      if ((*alpha_)[p] != 0) doc.alpha->emplace_back(places_[p], (*alpha_)[p]);
  }
  return doc;
}

SpnModel validate_model(const ModelDocument& doc) {
  if (doc.places.empty()) throw ModelError("places", "no places");
  if (doc.transitions.empty()) throw ModelError("transitions", "no transitions");

  SpnModel m;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < doc.places.size(); ++i) {
    const auto& name = doc.places[i];
    if (name.empty()) throw ModelError(indexed("places", i), "empty name");
    if (!seen.insert(name).second) throw ModelError(indexed("places", i), "duplicate name '" + name + "'");
  }
  m.places_ = doc.places;

  std::set<std::string> seen_t;
  for (std::size_t t = 0; t < doc.transitions.size(); ++t) {
    const auto& td = doc.transitions[t];
    const std::string path = indexed("transitions", t);
    if (td.name.empty()) throw ModelError(path + ".name", "empty name");
    if (!seen_t.insert(td.name).second) throw ModelError(path + ".name", "duplicate name '" + td.name + "'");
    if (seen.count(td.name)) throw ModelError(path + ".name", "name '" + td.name + "' already used by a place");
    m.transitions_.push_back(td.name);
  }

  const std::size_t np = m.places_.size(), nt = m.transitions_.size();
  m.input_.assign(np * nt, 0);
  m.output_.assign(np * nt, 0);
  m.rates_.resize(nt);

  auto fill = [&](const std::vector<std::pair<std::string, Count>>& arcs, std::vector<Count>& mat, std::size_t t,
                  const std::string& path) {
    for (const auto& [place, w] : arcs) {
      auto p = m.place_index(place);
      if (!p) throw ModelError(path + "." + place, "arc references unknown place '" + place + "'");
      if (w < 0) throw ModelError(path + "." + place, "negative multiplicity");
      mat[*p * nt + t] += w;
    }
  };

  for (std::size_t t = 0; t < nt; ++t) {
    const auto& td = doc.transitions[t];
    const std::string path = indexed("transitions", t);
    if (!(td.rate > 0.0) || !std::isfinite(td.rate)) throw ModelError(path + ".rate", "non-positive rate");
    m.rates_[t] = td.rate;
    fill(td.input, m.input_, t, path + ".input");
    fill(td.output, m.output_, t, path + ".output");
  }

  for (std::size_t t = 0; t < nt; ++t) {
    bool has_input = false, moves = false;
    for (std::size_t p = 0; p < np; ++p) {
      has_input |= m.input(p, t) > 0;
      moves |= m.incidence(p, t) != 0;
    }
    const std::string path = indexed("transitions", t);
    if (!has_input) throw ModelError(path + ".input", "source transition '" + m.transitions_[t] + "' has no input places");
    if (!moves) throw ModelError(path, "transition '" + m.transitions_[t] + "' has a zero incidence column");
  }

  auto to_marking = [&](const std::vector<std::pair<std::string, Count>>& entries, const std::string& path) {
    Marking mk{std::vector<Count>(np, 0)};
    for (const auto& [place, c] : entries) {
      auto p = m.place_index(place);
      if (!p) throw ModelError(path + "." + place, "unknown place '" + place + "'");
      if (c < 0) throw ModelError(path + "." + place, "negative token count");
      mk[*p] = c;
    }
    return mk;
  };
  m.initial_ = to_marking(doc.initial_marking, "initial_marking");
  if (doc.alpha) m.alpha_ = to_marking(*doc.alpha, "alpha");

  m.index_arcs();
  return m;
}

Count enabling_degree(const SpnModel& model, const Marking& m, std::size_t t) {
  Count degree = std::numeric_limits<Count>::max();
  for (const Arc& a : model.inputs_of(t)) degree = std::min(degree, m[a.place] / a.weight);
  return degree;
}

double transition_intensity(const SpnModel& model, const Marking& m, std::size_t t) {
  return model.rate(t) * static_cast<double>(enabling_degree(model, m, t));
}

double state_rate(const SpnModel& model, const Marking& m, const Marking& m2) {
  if (m == m2) return 0.0;
  const std::size_t np = model.num_places();
  double total = 0.0;
  for (std::size_t t = 0; t < model.num_transitions(); ++t) {
    bool match = true;
    for (std::size_t p = 0; p < np && match; ++p) match = model.incidence(p, t) == m2[p] - m[p];
    if (match) total += transition_intensity(model, m, t);
  }
  return total;
}

Marking fire(const SpnModel& model, const Marking& m, std::size_t t) {
  if (enabling_degree(model, m, t) < 1)
    throw EngineError("transition '" + model.transition_names()[t] + "' is disabled");
  Marking next = m;
  for (const Arc& c : model.changes_of(t)) next[c.place] += c.weight;
  return next;
}

SpnModel instantiate(const ScalingFamily& family) {
  if (family.n < 1) throw ModelError("N", "scaling index must be >= 1");
  Marking m0 = family.alpha;
  for (auto& c : m0.counts) c *= family.n;
  return family.base.with_initial_marking(std::move(m0));
}

}  // namespace spnjd
