#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "prime/dcmm_model.hpp"

namespace prime {

// Undirected simple graph read from a whitespace-separated edge list.
struct EdgeListGraph {
  std::vector<std::string> labels;  // dense index -> external label, first-seen order
  std::unordered_map<std::string, int> index;
  AdjacencyMatrix adjacency;
  std::int64_t edges = 0;
  std::int64_t self_loops_dropped = 0;
  std::int64_t duplicates_collapsed = 0;

  int n() const { return static_cast<int>(labels.size()); }
};

// Lines hold exactly two tokens "u v"; blank lines and lines whose first
// non-blank character is '#' are skipped. `known_labels`, if given, are
// registered first (in order) so isolated vertices keep their index.
// Throws kParseError with the 1-based line number on malformed lines.
EdgeListGraph ParseEdgeList(std::istream& in, std::string_view source = "<stream>",
                            const std::vector<std::string>& known_labels = {});
EdgeListGraph LoadEdgeList(const std::filesystem::path& path,
                           const std::vector<std::string>& known_labels = {});

// One "u v" line per edge with u < v by index, in row-major order.
void WriteEdgeList(std::ostream& out, const std::vector<std::string>& labels,
                   const BitMatrix& adjacency);
void SaveEdgeList(const std::filesystem::path& path, const std::vector<std::string>& labels,
                  const BitMatrix& adjacency);

// One label per line; '#' comments and blank lines are skipped.
std::vector<std::string> LoadLabels(const std::filesystem::path& path);
void SaveLabels(const std::filesystem::path& path, const std::vector<std::string>& labels);

// Membership CSV: header "node,pi_1,...,pi_K", one row per node, values
// printed with 17 significant digits.
struct MembershipTable {
  std::vector<std::string> labels;
  Matrix pi;
};

void WriteMembershipCsv(std::ostream& out, const std::vector<std::string>& labels,
                        const Matrix& pi);
void SaveMembershipCsv(const std::filesystem::path& path,
                       const std::vector<std::string>& labels, const Matrix& pi);
MembershipTable ParseMembershipCsv(std::istream& in, std::string_view source = "<stream>");
MembershipTable LoadMembershipCsv(const std::filesystem::path& path);

// Reorders `table` rows to follow `labels`. Throws kShapeMismatch when the
// label sets differ.
Matrix AlignMembership(const MembershipTable& table, const std::vector<std::string>& labels);

}  // namespace prime
