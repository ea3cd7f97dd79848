#include <algorithm>

#include "dagmarl/dag.hpp"
#include "test_support.hpp"

namespace dagmarl {
namespace {

using testing::random_dag;
using testing::reachability;

DagTopology make(int n, std::vector<Arc> arcs) {
  DagSpec spec;
  spec.node_count = n;
  spec.arcs = std::move(arcs);
  return DagTopology(std::move(spec));
}

DagTopology chain() { return make(3, {{0, 1}, {1, 2}}); }
DagTopology diamond() { return make(4, {{0, 2}, {1, 2}, {2, 3}}); }

TEST(DagValidate, ChainOrder) { EXPECT_EQ(chain().order(), (TopologicalOrder{0, 1, 2})); }

TEST(DagValidate, DiamondBreaksTiesByIndex) {
  EXPECT_EQ(diamond().order(), (TopologicalOrder{0, 1, 2, 3}));
}

TEST(DagValidate, TieBreakIsAscendingEvenWhenArcsAreListedBackwards) {
  EXPECT_EQ(make(4, {{3, 0}, {2, 0}}).order(), (TopologicalOrder{1, 2, 3, 0}));
}

TEST(DagValidate, TwoCycleIsRejected) {
  DagSpec spec{2, {{0, 1}, {1, 0}}, {}};
  EXPECT_DAGMARL_ERROR(validate(spec), ErrorCode::kCycleDetected);
}

TEST(DagValidate, CycleMessageListsTheCycle) {
  DagSpec spec{4, {{0, 1}, {1, 2}, {2, 3}, {3, 1}}, {}};
  try {
    validate(spec);
    FAIL() << "cycle not detected";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCycleDetected);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("1"), std::string::npos);
    EXPECT_NE(msg.find("3"), std::string::npos);
  }
}

TEST(DagValidate, StructuralErrors) {
  EXPECT_DAGMARL_ERROR(validate(DagSpec{0, {}, {}}), ErrorCode::kEmptyGraph);
  EXPECT_DAGMARL_ERROR(validate(DagSpec{2, {{0, 2}}, {}}), ErrorCode::kInvalidNode);
  EXPECT_DAGMARL_ERROR(validate(DagSpec{2, {{0, 0}}, {}}), ErrorCode::kCycleDetected);
  EXPECT_DAGMARL_ERROR(validate(DagSpec{2, {{0, 1}, {0, 1}}, {}}), ErrorCode::kInvalidArc);
}

TEST(DagValidate, IdempotentAndDeterministic) {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const DagTopology dag = random_dag(rng, 2 + t % 10);
    EXPECT_EQ(validate(dag.spec()), dag.order());
    EXPECT_EQ(validate(dag.spec()), validate(dag.spec()));
  }
}

TEST(DagClosures, ChainAncestors) {
  EXPECT_EQ(chain().ancestors(1), (NodeSet{0, 1}));
  EXPECT_EQ(chain().ancestors(0), (NodeSet{0}));
}

TEST(DagClosures, DiamondAncestors) { EXPECT_EQ(diamond().ancestors(3), (NodeSet{0, 1, 2, 3})); }

TEST(DagClosures, Descendants) {
  EXPECT_EQ(chain().descendants(1), (NodeSet{1, 2}));
  EXPECT_EQ(chain().descendants(2), (NodeSet{2}));
  EXPECT_EQ(diamond().descendants(0), (NodeSet{0, 2, 3}));
}

TEST(DagClosures, Influence) {
  EXPECT_EQ(chain().influence(1), (NodeSet{0, 1, 2}));
  EXPECT_EQ(make(1, {}).influence(0), (NodeSet{0}));
  EXPECT_EQ(diamond().influence(1), (NodeSet{1, 2, 3}));
}

TEST(DagClosures, InvalidNode) {
  EXPECT_DAGMARL_ERROR(chain().ancestors(3), ErrorCode::kInvalidNode);
  EXPECT_DAGMARL_ERROR(chain().descendants(-1), ErrorCode::kInvalidNode);
  EXPECT_DAGMARL_ERROR(chain().reward_flow_neighbors(7), ErrorCode::kInvalidNode);
}

TEST(DagClosures, MatchBruteForceReachability) {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + static_cast<int>(uniform_index(rng, 12));
    const DagTopology dag = random_dag(rng, n);
    const auto reach = reachability(n, dag.arcs());
    for (int i = 0; i < n; ++i) {
      NodeSet anc, desc, omega;
      for (int u = 0; u < n; ++u) {
        if (reach[u][i]) anc.push_back(u);
        if (reach[i][u]) desc.push_back(u);
        if (reach[u][i] || reach[i][u]) omega.push_back(u);
      }
      ASSERT_EQ(dag.ancestors(i), anc);
      ASSERT_EQ(dag.descendants(i), desc);
      ASSERT_EQ(dag.influence(i), omega);
      for (int u = 0; u < n; ++u) ASSERT_EQ(dag.is_ancestor(u, i), reach[u][i]);
    }
  }
}

TEST(DagClosures, SinkDuality) {
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    const DagTopology dag = random_dag(rng, 2 + t % 11);
    ASSERT_FALSE(dag.sinks().empty());
    ASSERT_FALSE(dag.sources().empty());
    for (NodeId k : dag.sinks()) {
      EXPECT_TRUE(dag.successors(k).empty());
      for (NodeId i : dag.ancestors(k)) {
        const NodeSet& d = dag.descendants(i);
        EXPECT_TRUE(std::binary_search(d.begin(), d.end(), k));
      }
    }
  }
}

TEST(DagRewardFlow, ChainMiddle) {
  const auto rf = chain().reward_flow_neighbors(1);
  EXPECT_EQ(rf.recipients, (NodeSet{0}));
  EXPECT_EQ(rf.senders, (NodeSet{2}));
}

TEST(DagRewardFlow, SourceHasNoRecipients) {
  EXPECT_TRUE(chain().reward_flow_neighbors(0).recipients.empty());
}

TEST(DagRewardFlow, DiamondJoin) {
  const auto rf = diamond().reward_flow_neighbors(2);
  EXPECT_EQ(rf.recipients, (NodeSet{0, 1}));
  EXPECT_EQ(rf.senders, (NodeSet{3}));
}

TEST(DagRewardFlow, MatchesArcReversal) {
  Rng rng(8);
  for (int t = 0; t < 100; ++t) {
    const DagTopology dag = random_dag(rng, 2 + t % 11);
    for (int i = 0; i < dag.node_count(); ++i) {
      NodeSet recipients, senders;
      for (const Arc& a : dag.arcs()) {
        if (a.to == i) recipients.push_back(a.from);
        if (a.from == i) senders.push_back(a.to);
      }
      std::sort(recipients.begin(), recipients.end());
      std::sort(senders.begin(), senders.end());
      const auto rf = dag.reward_flow_neighbors(i);
      EXPECT_EQ(rf.recipients, recipients);
      EXPECT_EQ(rf.senders, senders);
      for (int k : dag.incoming_arcs(i)) EXPECT_EQ(dag.arc(k).to, i);
    }
  }
}

TEST(DagNames, FromNamesResolvesLabels) {
  const DagTopology dag = DagTopology::from_names({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}});
  EXPECT_EQ(dag.order(), (TopologicalOrder{0, 1, 2}));
  EXPECT_EQ(dag.name(2), "c");
  EXPECT_EQ(dag.find_arc(0, 1), 0);
  EXPECT_EQ(dag.find_arc(1, 0), -1);
  EXPECT_DAGMARL_ERROR(DagTopology::from_names({"a"}, {{"a", "z"}}), ErrorCode::kInvalidNode);
}

}  // namespace
}  // namespace dagmarl
