#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spnjd {

using Count = std::int64_t;

/// Integer token counts, one per place.
struct Marking {
  std::vector<Count> counts;

  std::size_t size() const noexcept { return counts.size(); }
  Count operator[](std::size_t i) const { return counts[i]; }
  Count& operator[](std::size_t i) { return counts[i]; }
  friend bool operator==(const Marking&, const Marking&) = default;
  friend auto operator<=>(const Marking&, const Marking&) = default;
};

/// Real-valued token levels, one per place.
struct FluidState {
  std::vector<double> values;

  FluidState() = default;
  explicit FluidState(std::vector<double> v) : values(std::move(v)) {}
  static FluidState from(const Marking& m) {
    return FluidState(std::vector<double>(m.counts.begin(), m.counts.end()));
  }

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  friend bool operator==(const FluidState&, const FluidState&) = default;
};

/// Raw description of a net before validation. Arcs are keyed by place
/// name; names are resolved and checked by validate_model.
struct TransitionDoc {
  std::string name;
  double rate = 0.0;
  std::vector<std::pair<std::string, Count>> input;
  std::vector<std::pair<std::string, Count>> output;
};

struct ModelDocument {
  std::vector<std::string> places;
  std::vector<TransitionDoc> transitions;
  std::vector<std::pair<std::string, Count>> initial_marking;
  std::optional<std::vector<std::pair<std::string, Count>>> alpha;
};

struct Arc {
  std::size_t place;
  Count weight;
};

/// Validated stochastic Petri net. Immutable; copies are cheap enough for
/// the small nets this toolkit targets (dense n_p x n_t matrices).
class SpnModel {
 public:
  std::size_t num_places() const noexcept { return places_.size(); }
  std::size_t num_transitions() const noexcept { return transitions_.size(); }

  const std::vector<std::string>& place_names() const noexcept { return places_; }
  const std::vector<std::string>& transition_names() const noexcept { return transitions_; }
  std::optional<std::size_t> place_index(std::string_view name) const;
  std::optional<std::size_t> transition_index(std::string_view name) const;

  Count input(std::size_t p, std::size_t t) const { return input_[p * num_transitions() + t]; }
  Count output(std::size_t p, std::size_t t) const { return output_[p * num_transitions() + t]; }
  Count incidence(std::size_t p, std::size_t t) const { return output(p, t) - input(p, t); }
  double rate(std::size_t t) const { return rates_[t]; }
  std::span<const double> rates() const noexcept { return rates_; }

  const Marking& initial_marking() const noexcept { return initial_; }
  /// Scaling direction for Prop.-1 style families; empty when not declared.
  const std::optional<Marking>& alpha() const noexcept { return alpha_; }

  /// Input arcs of t (places with I(p,t) > 0), in place order.
  std::span<const Arc> inputs_of(std::size_t t) const { return inputs_[t]; }
  /// Nonzero entries of incidence column t, in place order.
  std::span<const Arc> changes_of(std::size_t t) const { return changes_[t]; }

  /// Copy with a different initial marking.
  SpnModel with_initial_marking(Marking m0) const;
  /// Copy with every rate multiplied by `factor` (> 0).
  SpnModel with_scaled_rates(double factor) const;

  ModelDocument to_document() const;

 private:
  friend SpnModel validate_model(const ModelDocument& doc);
  void index_arcs();

  std::vector<std::string> places_;
  std::vector<std::string> transitions_;
  std::vector<Count> input_;
  std::vector<Count> output_;
  std::vector<double> rates_;
  Marking initial_;
  std::optional<Marking> alpha_;
  std::vector<std::vector<Arc>> inputs_;
  std::vector<std::vector<Arc>> changes_;
};

/// Checks names, multiplicities, rates and arc targets, and assembles the
/// dense matrices in declaration order. Throws ModelError.
///
/// Transitions without input places are rejected: the infinite-server
/// intensity is undefined for them and they break semiflow coverage.
/// Transitions whose incidence column is zero (pure self-loops) are
/// rejected as well since they can never change the state.
SpnModel validate_model(const ModelDocument& doc);

/// min over input places of floor(m(p) / I(p,t)).
Count enabling_degree(const SpnModel& model, const Marking& m, std::size_t t);

/// Infinite-server intensity lambda(t) * enabling_degree.
double transition_intensity(const SpnModel& model, const Marking& m, std::size_t t);

/// CTMC rate from m to m2: total intensity of transitions whose incidence
/// column equals m2 - m. Zero when m2 == m.
double state_rate(const SpnModel& model, const Marking& m, const Marking& m2);

/// m + L(t). Throws EngineError if t is not enabled in m.
Marking fire(const SpnModel& model, const Marking& m, std::size_t t);

/// N-indexed family with initial marking N * alpha.
struct ScalingFamily {
  SpnModel base;
  Marking alpha;
  Count n = 1;
};

SpnModel instantiate(const ScalingFamily& family);

}  // namespace spnjd
