#include "prime/edge_list.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <set>
#include <sstream>

#include "test_support.hpp"

namespace prime {
namespace {

EdgeListGraph Parse(const std::string& text) {
  std::istringstream in(text);
  return ParseEdgeList(in);
}

TEST(ParseEdgeListTest, DuplicateInBothDirectionsCollapses) {
  const EdgeListGraph g = Parse("a b\nb a\n");
  EXPECT_EQ(g.n(), 2);
  EXPECT_EQ(g.edges, 1);
  EXPECT_EQ(g.duplicates_collapsed, 1);
  EXPECT_EQ(g.adjacency.EdgeCount(), 1);
}

TEST(ParseEdgeListTest, SelfLoopDroppedButNodeKept) {
  const EdgeListGraph g = Parse("x x\n");
  EXPECT_EQ(g.n(), 1);
  EXPECT_EQ(g.edges, 0);
  EXPECT_EQ(g.self_loops_dropped, 1);
}

TEST(ParseEdgeListTest, CommentsBlankLinesAndFirstSeenOrder) {
  const EdgeListGraph g = Parse("# header\n\n  # indented comment\nzeta alpha\n\talpha\t mid \n");
  EXPECT_EQ(g.labels, (std::vector<std::string>{"zeta", "alpha", "mid"}));
  EXPECT_EQ(g.index.at("mid"), 2);
  EXPECT_EQ(g.edges, 2);
  EXPECT_EQ(g.adjacency.a(0, 1), 1);
  EXPECT_EQ(g.adjacency.a(1, 2), 1);
  EXPECT_EQ(g.adjacency.a(0, 2), 0);
  EXPECT_EQ(g.adjacency.a, g.adjacency.a.transpose());
}

TEST(ParseEdgeListTest, WrongTokenCountReportsLineNumber) {
  for (const std::string bad : {"a b\nc\n", "a b\n# ok\nc d e\n"}) {
    try {
      Parse(bad);
      FAIL() << "expected parse error";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kParseError);
      const std::string what = e.what();
      EXPECT_TRUE(what.find(":2:") != std::string::npos || what.find(":3:") != std::string::npos)
          << what;
    }
  }
}

TEST(ParseEdgeListTest, KnownLabelsKeepIsolatedNodes) {
  std::istringstream in("b c\n");
  const EdgeListGraph g = ParseEdgeList(in, "<test>", {"a", "b", "c", "d"});
  EXPECT_EQ(g.n(), 4);
  EXPECT_EQ(g.index.at("c"), 2);
  EXPECT_EQ(g.adjacency.a(1, 2), 1);
}

TEST(LoadEdgeListTest, MissingFileIsIoError) {
  EXPECT_PRIME_ERROR(LoadEdgeList("/nonexistent/graph.txt"), ErrorCode::kIoError);
}

TEST(EdgeListRoundTripTest, PreservesEdgeSetExactly) {
  RandomStream rng(12);
  const int n = 80;
  const AdjacencyMatrix a = SampleGraph(EdgeProbabilityMatrix{Matrix::Constant(n, n, 0.1)}, rng);
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) labels.push_back("v" + std::to_string(i * 13 % 97));
  std::ostringstream out;
  WriteEdgeList(out, labels, a.a);
  std::istringstream in(out.str());
  const EdgeListGraph g = ParseEdgeList(in, "<roundtrip>", labels);
  ASSERT_EQ(g.n(), n);
  EXPECT_EQ(g.edges, a.EdgeCount());
  std::set<std::pair<std::string, std::string>> before, after;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (a.a(i, j)) before.emplace(std::min(labels[i], labels[j]), std::max(labels[i], labels[j]));
      if (g.adjacency.a(i, j)) {
        after.emplace(std::min(g.labels[i], g.labels[j]), std::max(g.labels[i], g.labels[j]));
      }
    }
  }
  EXPECT_EQ(before, after);
}

TEST(EdgeListRoundTripTest, FileRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "prime_edge_list_test";
  std::filesystem::create_directories(dir);
  BitMatrix a = BitMatrix::Zero(3, 3);
  a(0, 2) = a(2, 0) = 1;
  SaveEdgeList(dir / "g.txt", {"p", "q", "r"}, a);
  SaveLabels(dir / "nodes.txt", {"p", "q", "r"});
  const EdgeListGraph g = LoadEdgeList(dir / "g.txt", LoadLabels(dir / "nodes.txt"));
  EXPECT_EQ(g.adjacency.a, a);
  std::filesystem::remove_all(dir);
}

TEST(MembershipCsvTest, RoundTripIsBitExact) {
  RandomStream rng(3);
  Matrix pi(5, 3);
  for (int i = 0; i < 5; ++i) {
    for (int k = 0; k < 3; ++k) pi(i, k) = rng.Exponential();
    pi.row(i) /= pi.row(i).sum();
  }
  const std::vector<std::string> labels{"a", "b", "c", "d", "e"};
  std::ostringstream out;
  WriteMembershipCsv(out, labels, pi);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "node,pi_1,pi_2,pi_3");
  std::istringstream in(out.str());
  const MembershipTable table = ParseMembershipCsv(in);
  EXPECT_EQ(table.labels, labels);
  EXPECT_EQ(table.pi, pi);
}

TEST(MembershipCsvTest, MalformedInputs) {
  for (const std::string bad : {"id,pi_1\na,1\n", "node,pi_1,pi_3\na,1,0\n",
                                "node,pi_1,pi_2\na,0.5\n", "node,pi_1,pi_2\na,0.5,x\n"}) {
    std::istringstream in(bad);
    EXPECT_PRIME_ERROR(ParseMembershipCsv(in), ErrorCode::kParseError);
  }
}

TEST(AlignMembershipTest, ReordersByLabel) {
  MembershipTable t;
  t.labels = {"b", "a"};
  t.pi.resize(2, 2);
  t.pi << 0.1, 0.9, 0.7, 0.3;
  const Matrix aligned = AlignMembership(t, {"a", "b"});
  EXPECT_EQ(aligned(0, 0), 0.7);
  EXPECT_EQ(aligned(1, 0), 0.1);
  EXPECT_PRIME_ERROR(AlignMembership(t, {"a", "c"}), ErrorCode::kShapeMismatch);
  EXPECT_PRIME_ERROR(AlignMembership(t, {"a"}), ErrorCode::kShapeMismatch);
}

}  // namespace
}  // namespace prime
