#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spnjd/spn.hpp"

namespace spnjd {

enum class SirExperiment { exp1, exp2 };

/// Epidemic net over {Outside, S, I, R}:
///   ArriveS  Outside -> S        ArriveI  Outside -> I
///   BecomeI  S + I -> 2 I        BecomeR  I -> R
///   LeaveS   S -> Outside        LeaveI   I -> Outside     LeaveR  R -> Outside
/// exp1: rates (0.5, 0.5, 1, 0.5, 0.02, 0.1, 0.02), m0 = 50 everywhere, alpha = (1,1,1,1).
/// exp2: rates (1, 0.01, 1, 0.5, 0.02, 0.1, 0.02), m0 = (200,0,0,0), alpha = (1,0,0,0).
SpnModel sir(SirExperiment which);

/// Servers {Sidle, Slog, Sbroken} and clients {Clocal, Cwaiting, Cbroken}
/// with 120 idle servers and 10000 clients in local computation. See
/// catalog() notes for the arc reconstruction.
SpnModel client_server();

/// r infinite-server queues Q1..Qr; one transition per routed pair (i,j)
/// with rate mu_i * routing[i][j]; N tokens start in Q1. Routing rows must
/// sum to 1 with a zero diagonal. Throws ModelError otherwise.
SpnModel closed_queue_network(std::span<const double> mu, const std::vector<std::vector<double>>& routing, Count n);

/// Two places A, B; t1: A -> B (rate_ab), t2: B -> A (rate_ba); `tokens` in A.
SpnModel cycle(Count tokens, double rate_ab = 1.0, double rate_ba = 2.0);

struct CatalogEntry {
  std::string name;
  std::string description;
  std::vector<std::string> notes;
  SpnModel model;
};

/// Bundled models: sir_exp1, sir_exp2, client_server, cycle, cycle_n1, queue3.
std::vector<CatalogEntry> catalog();
std::optional<CatalogEntry> find_model(std::string_view name);

}  // namespace spnjd
