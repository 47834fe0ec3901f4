#include "spnjd/catalog.hpp"

#include <cmath>
#include <string>

#include "spnjd/error.hpp"

namespace spnjd {

namespace {

TransitionDoc move_one(std::string name, double rate, std::vector<std::string> from, std::vector<std::string> to) {
  TransitionDoc t;
  t.name = std::move(name);
  t.rate = rate;
  for (auto& p : from) t.input.emplace_back(std::move(p), 1);
  for (auto& p : to) t.output.emplace_back(std::move(p), 1);
  return t;
}

}  // namespace

SpnModel sir(SirExperiment which) {
  const bool first = which == SirExperiment::exp1;
  ModelDocument doc;
  doc.places = {"Outside", "S", "I", "R"};
  doc.transitions = {
      move_one("ArriveS", first ? 0.5 : 1.0, {"Outside"}, {"S"}),
      move_one("ArriveI", first ? 0.5 : 0.01, {"Outside"}, {"I"}),
      move_one("BecomeI", 1.0, {"S", "I"}, {"I", "I"}),
      move_one("BecomeR", 0.5, {"I"}, {"R"}),
      move_one("LeaveS", 0.02, {"S"}, {"Outside"}),
      move_one("LeaveI", 0.1, {"I"}, {"Outside"}),
      move_one("LeaveR", 0.02, {"R"}, {"Outside"}),
  };
  if (first) {
    doc.initial_marking = {{"Outside", 50}, {"S", 50}, {"I", 50}, {"R", 50}};
    doc.alpha = std::vector<std::pair<std::string, Count>>{{"Outside", 1}, {"S", 1}, {"I", 1}, {"R", 1}};
  } else {
    doc.initial_marking = {{"Outside", 200}};
    doc.alpha = std::vector<std::pair<std::string, Count>>{{"Outside", 1}};
  }
  return validate_model(doc);
}

SpnModel client_server() {
  ModelDocument doc;
  doc.places = {"Sidle", "Slog", "Sbroken", "Clocal", "Cwaiting", "Cbroken"};
  doc.transitions = {
      move_one("request", 1.0, {"Sidle", "Clocal"}, {"Slog", "Cwaiting"}),
      move_one("endLocCl", 0.2, {"Cwaiting"}, {"Clocal"}),
      move_one("log", 12.0, {"Slog"}, {"Sidle"}),
      move_one("breakS", 0.0007, {"Sidle"}, {"Sbroken"}),
      move_one("breakC", 0.00002, {"Clocal"}, {"Cbroken"}),
      move_one("breakDS", 0.8, {"Sidle", "Sbroken"}, {"Sbroken", "Sbroken"}),
      move_one("breakDC", 1.4, {"Clocal", "Cbroken"}, {"Cbroken", "Cbroken"}),
      move_one("fixS", 0.001, {"Sbroken"}, {"Sidle"}),
      move_one("fixC", 0.001, {"Cbroken"}, {"Clocal"}),
  };
  doc.initial_marking = {{"Sidle", 120}, {"Clocal", 10000}};
  return validate_model(doc);
}

SpnModel closed_queue_network(std::span<const double> mu, const std::vector<std::vector<double>>& routing, Count n) {
  const std::size_t r = mu.size();
  if (r < 2) throw ModelError("routing", "need at least two queues");
  if (routing.size() != r) throw ModelError("routing", "matrix size does not match the number of queues");
  ModelDocument doc;
  for (std::size_t i = 0; i < r; ++i) doc.places.push_back("Q" + std::to_string(i + 1));
  for (std::size_t i = 0; i < r; ++i) {
    const std::string row = "routing[" + std::to_string(i) + "]";
    if (routing[i].size() != r) throw ModelError(row, "row length does not match the number of queues");
    if (routing[i][i] != 0.0) throw ModelError(row, "non-zero diagonal entry");
    double total = 0.0;
    for (double p : routing[i]) {
      if (p < 0.0) throw ModelError(row, "negative routing probability");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ModelError(row, "routing row does not sum to 1");
    for (std::size_t j = 0; j < r; ++j) {
      if (routing[i][j] == 0.0) continue;
      doc.transitions.push_back(move_one(doc.places[i] + "_to_" + doc.places[j], mu[i] * routing[i][j],
                                         {doc.places[i]}, {doc.places[j]}));
    }
  }
  doc.initial_marking = {{"Q1", n}};
  doc.alpha = std::vector<std::pair<std::string, Count>>{{"Q1", 1}};
  return validate_model(doc);
}

SpnModel cycle(Count tokens, double rate_ab, double rate_ba) {
  ModelDocument doc;
  doc.places = {"A", "B"};
  doc.transitions = {move_one("t1", rate_ab, {"A"}, {"B"}), move_one("t2", rate_ba, {"B"}, {"A"})};
  doc.initial_marking = {{"A", tokens}};
  doc.alpha = std::vector<std::pair<std::string, Count>>{{"A", 1}};
  return validate_model(doc);
}

std::vector<CatalogEntry> catalog() {
  const std::vector<std::string> sir_notes = {
      "BecomeI is S + I -> 2 I with unit arcs: infection depends on the number of infected members and "
      "conserves the population.",
      "Reference results labelled S, I, R refer to places S, R and Outside of this net "
      "(the ODE values match those places exactly).",
  };
  const std::vector<std::string> cs_notes = {
      "request synchronizes an idle server with a client in local computation: Sidle + Clocal -> Slog + Cwaiting.",
      "log returns the server: Slog -> Sidle. endLocCl returns the client: Cwaiting -> Clocal (rate 0.2).",
      "breakDS / breakDC are contagion transitions: healthy + broken -> 2 broken, unit arcs.",
      "breakS / breakC act on Sidle / Clocal; fixS / fixC return broken machines to Sidle / Clocal.",
      "Arc structure is a reconstruction; results on this net are qualitative (multi-modality).",
  };
  std::vector<CatalogEntry> out;
  out.push_back({"sir_exp1", "SIR epidemic, 200 members spread evenly, first rate set", sir_notes,
                 sir(SirExperiment::exp1)});
  out.push_back({"sir_exp2", "SIR epidemic, 200 members all Outside, second rate set", sir_notes,
                 sir(SirExperiment::exp2)});
  out.push_back({"client_server", "Client-server system with virus infections", cs_notes, client_server()});
  out.push_back({"cycle", "Two-place cycle, 100 tokens, rates 1 and 2", {}, cycle(100, 1.0, 2.0)});
  out.push_back({"cycle_n1", "Two-place cycle, single token, rates 1 and 2", {}, cycle(1, 1.0, 2.0)});
  const std::vector<double> mu{1.0, 1.0, 1.0};
  const std::vector<std::vector<double>> ring{{0, 1, 0}, {0, 0, 1}, {1, 0, 0}};
  out.push_back({"queue3", "Closed ring of three infinite-server queues, 30 customers", {},
                 closed_queue_network(mu, ring, 30)});
  return out;
}

std::optional<CatalogEntry> find_model(std::string_view name) {
  for (auto& e : catalog())
    if (e.name == name) return e;
  return std::nullopt;
}

}  // namespace spnjd
