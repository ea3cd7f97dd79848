#include "dagmarl/prey_env.hpp"

#include <algorithm>
#include <cstdlib>

#include "env_util.hpp"

namespace dagmarl {

namespace {

DagTopology prey_topology() {
  DagSpec spec;
  spec.node_count = 4;
  spec.arcs = {{0, 1}, {1, 2}, {1, 3}};
  spec.names = {"root", "mid", "sink_left", "sink_right"};
  return DagTopology(std::move(spec));
}

constexpr int kParent[4] = {-1, 0, 1, 1};

int manhattan(Cell a, Cell b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

bool is_sink(NodeId node) { return node >= 2; }

}  // namespace

Cell PreyEnv::move_delta(int action) {
  static constexpr Cell kMoves[9] = {{0, 0},  {0, 1},   {1, 1},  {1, 0}, {1, -1},
                                     {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}};
  return kMoves[action];
}

PreyEnv::PreyEnv(PreyConfig config) : config_(config), topology_(prey_topology()) {
  if (config_.grid_size < 4 || config_.predators < 1 || config_.leash < 1 ||
      config_.max_steps < 1 || config_.goal_period_length < 1 || config_.wander_steps < 0) {
    fail(ErrorCode::kConfigError, "prey: grid >= 4, predators/leash/steps/period >= 1, wander >= 0");
  }
  reset(0);
}

uint64_t PreyEnv::fingerprint() const {
  return detail::FingerprintBuilder("prey")
      .add(config_.grid_size)
      .add(config_.predators)
      .add(config_.leash)
      .add(config_.max_steps)
      .add(config_.goal_period_length)
      .add(config_.wander_steps)
      .value();
}

void PreyEnv::reset(uint64_t seed) {
  const int n = config_.grid_size;
  const int c = n / 2;
  state_ = PreyState{};
  state_.rng = Rng(seed);
  state_.prey = {Cell{c, c}, Cell{c, c + 1}, Cell{c - 1, c + 2}, Cell{c + 1, c + 2}};
  const Cell corners[4] = {{0, 0}, {n - 1, n - 1}, {0, n - 1}, {n - 1, 0}};
  for (int p = 0; p < config_.predators; ++p) {
    state_.predator.push_back(corners[p % 4]);
    state_.heading.push_back(1 + static_cast<int>(uniform_index(state_.rng, 8)));
  }
}

bool PreyEnv::done() const {
  return state_.step >= config_.max_steps || living_sinks() == 0;
}

int PreyEnv::living_sinks() const {
  return static_cast<int>(state_.alive[2]) + static_cast<int>(state_.alive[3]);
}

Cell PreyEnv::clamp_prey(NodeId node, Cell c) const {
  const int hi = config_.grid_size - 1;
  c.x = std::clamp(c.x, 0, hi);
  c.y = std::clamp(c.y, 0, hi);
  if (kParent[node] >= 0) {
    const Cell parent = state_.prey[kParent[node]];
    c.x = std::clamp(c.x, parent.x - config_.leash, parent.x + config_.leash);
    c.y = std::clamp(c.y, parent.y - config_.leash, parent.y + config_.leash);
  }
  return c;
}

void PreyEnv::catch_preys() {
  for (NodeId k = 2; k < kPreys; ++k) {
    if (!state_.alive[k]) continue;
    for (const Cell& p : state_.predator) {
      if (p == state_.prey[k]) state_.alive[k] = false;
    }
  }
}

void PreyEnv::move_predators() {
  const int hi = config_.grid_size - 1;
  for (size_t p = 0; p < state_.predator.size(); ++p) {
    Cell& me = state_.predator[p];
    if (state_.step < config_.wander_steps) {
      const Cell d = move_delta(state_.heading[p]);
      me = {std::clamp(me.x + d.x, 0, hi), std::clamp(me.y + d.y, 0, hi)};
      continue;
    }
    std::vector<NodeId> targets;
    int best = 0;
    for (NodeId k = 2; k < kPreys; ++k) {
      if (!state_.alive[k]) continue;
      const int dist = manhattan(me, state_.prey[k]);
      if (targets.empty() || dist < best) {
        targets = {k};
        best = dist;
      } else if (dist == best) {
        targets.push_back(k);
      }
    }
    if (targets.empty()) return;
    const Cell goal = state_.prey[targets[uniform_index(state_.rng, targets.size())]];
    std::vector<Cell> moves;
    for (int a = 1; a <= 8; ++a) {
      const Cell d = move_delta(a);
      const Cell next{std::clamp(me.x + d.x, 0, hi), std::clamp(me.y + d.y, 0, hi)};
      const int dist = manhattan(next, goal);
      if (moves.empty() || dist < best) {
        moves = {next};
        best = dist;
      } else if (dist == best && std::find(moves.begin(), moves.end(), next) == moves.end()) {
        moves.push_back(next);
      }
    }
    me = moves[uniform_index(state_.rng, moves.size())];
  }
}

StepResult PreyEnv::step(std::span<const int> actions) {
  check_actions(actions);
  if (done()) fail(ErrorCode::kInvalidArgument, "prey: episode already finished");
  // Parents move first so every child clamps against its parent's new cell.
  for (NodeId node : topology_.order()) {
    Cell c = state_.prey[node];
    if (state_.alive[node]) {
      const Cell d = move_delta(actions[node]);
      c = {c.x + d.x, c.y + d.y};
    }
    state_.prey[node] = clamp_prey(node, c);
  }
  catch_preys();
  move_predators();
  catch_preys();
  ++state_.step;
  return {static_cast<double>(living_sinks()), done()};
}

std::vector<double> PreyEnv::observe(NodeId node) const {
  if (node < 0 || node >= kPreys) fail(ErrorCode::kInvalidNode, "prey: no node " + std::to_string(node));
  const double n = config_.grid_size;
  const Cell me = state_.prey[node];
  double px = 0.0;
  double py = 0.0;
  if (kParent[node] >= 0) {
    const Cell parent = state_.prey[kParent[node]];
    px = static_cast<double>(me.x - parent.x) / config_.leash;
    py = static_cast<double>(me.y - parent.y) / config_.leash;
  }
  const Cell* nearest = &state_.predator.front();
  for (const Cell& p : state_.predator) {
    if (manhattan(me, p) < manhattan(me, *nearest)) nearest = &p;
  }
  return {me.x / n,
          me.y / n,
          px,
          py,
          (nearest->x - me.x) / n,
          (nearest->y - me.y) / n,
          state_.alive[node] ? 1.0 : 0.0,
          static_cast<double>(state_.step) / config_.max_steps};
}

std::vector<std::string> PreyEnv::invariant_violations() const {
  std::vector<std::string> out;
  const int hi = config_.grid_size - 1;
  auto on_grid = [&](Cell c) { return c.x >= 0 && c.y >= 0 && c.x <= hi && c.y <= hi; };
  for (NodeId node = 0; node < kPreys; ++node) {
    const Cell c = state_.prey[node];
    if (!on_grid(c)) out.push_back("prey off the grid");
    if (kParent[node] >= 0) {
      const Cell parent = state_.prey[kParent[node]];
      if (std::max(std::abs(c.x - parent.x), std::abs(c.y - parent.y)) > config_.leash) {
        out.push_back("prey " + std::to_string(node) + " beyond its parent's boundary");
      }
    }
    if (!is_sink(node) && !state_.alive[node]) out.push_back("non-sink prey marked dead");
  }
  for (const Cell& p : state_.predator) {
    if (!on_grid(p)) out.push_back("predator off the grid");
  }
  return out;
}

}  // namespace dagmarl
