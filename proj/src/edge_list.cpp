#include "prime/edge_list.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>

#include "prime/error.hpp"

namespace prime {
namespace {

std::vector<std::string_view> Tokenize(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  if (sep == ' ') {
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      if (pos == line.size()) break;
      std::size_t end = pos;
      while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
      out.push_back(line.substr(pos, end - pos));
      pos = end;
    }
    return out;
  }
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(sep, start);
    std::string_view field = line.substr(start, comma == std::string_view::npos
                                                    ? std::string_view::npos
                                                    : comma - start);
    while (!field.empty() && std::isspace(static_cast<unsigned char>(field.front()))) {
      field.remove_prefix(1);
    }
    while (!field.empty() && std::isspace(static_cast<unsigned char>(field.back()))) {
      field.remove_suffix(1);
    }
    out.push_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool IsSkippable(std::string_view line) {
  for (char ch : line) {
    if (std::isspace(static_cast<unsigned char>(ch))) continue;
    return ch == '#';
  }
  return true;
}

[[noreturn]] void ParseFailure(std::string_view source, std::size_t line_no,
                               const std::string& what) {
  std::ostringstream msg;
  msg << source << ":" << line_no << ": " << what;
  throw Error(ErrorCode::kParseError, msg.str());
}

std::ifstream OpenInput(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream OpenOutput(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string() + " for writing");
  return out;
}

void FinishOutput(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

}  // namespace

EdgeListGraph ParseEdgeList(std::istream& in, std::string_view source,
                            const std::vector<std::string>& known_labels) {
  EdgeListGraph g;
  auto intern = [&g](std::string_view label) {
    auto [it, inserted] = g.index.try_emplace(std::string(label), g.n());
    if (inserted) g.labels.emplace_back(label);
    return it->second;
  };
  for (const std::string& label : known_labels) intern(label);

  std::vector<std::pair<int, int>> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (IsSkippable(line)) continue;
    const auto tokens = Tokenize(line, ' ');
    if (tokens.size() != 2) {
      ParseFailure(source, line_no,
                   "expected 2 tokens, found " + std::to_string(tokens.size()));
    }
    const int u = intern(tokens[0]);
    const int v = intern(tokens[1]);
    if (u == v) {
      ++g.self_loops_dropped;
      continue;
    }
    pairs.emplace_back(u, v);
  }
  if (in.bad()) throw Error(ErrorCode::kIoError, std::string("read error on ") + std::string(source));

  const int n = g.n();
  g.adjacency.a = BitMatrix::Zero(n, n);
  for (const auto& [u, v] : pairs) {
    if (g.adjacency.a(u, v)) {
      ++g.duplicates_collapsed;
      continue;
    }
    g.adjacency.a(u, v) = 1;
    g.adjacency.a(v, u) = 1;
    ++g.edges;
  }
  return g;
}

EdgeListGraph LoadEdgeList(const std::filesystem::path& path,
                           const std::vector<std::string>& known_labels) {
  std::ifstream in = OpenInput(path);
  return ParseEdgeList(in, path.string(), known_labels);
}

void WriteEdgeList(std::ostream& out, const std::vector<std::string>& labels,
                   const BitMatrix& adjacency) {
  const Eigen::Index n = adjacency.rows();
  if (adjacency.cols() != n || static_cast<Eigen::Index>(labels.size()) != n) {
    throw Error(ErrorCode::kShapeMismatch, "label count does not match the adjacency matrix");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (adjacency(i, j)) out << labels[i] << ' ' << labels[j] << '\n';
    }
  }
}

void SaveEdgeList(const std::filesystem::path& path, const std::vector<std::string>& labels,
                  const BitMatrix& adjacency) {
  std::ofstream out = OpenOutput(path);
  WriteEdgeList(out, labels, adjacency);
  FinishOutput(out, path);
}

std::vector<std::string> LoadLabels(const std::filesystem::path& path) {
  std::ifstream in = OpenInput(path);
  std::vector<std::string> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (IsSkippable(line)) continue;
    const auto tokens = Tokenize(line, ' ');
    if (tokens.size() != 1) ParseFailure(path.string(), line_no, "expected one label per line");
    labels.emplace_back(tokens[0]);
  }
  return labels;
}

void SaveLabels(const std::filesystem::path& path, const std::vector<std::string>& labels) {
  std::ofstream out = OpenOutput(path);
  for (const std::string& label : labels) out << label << '\n';
  FinishOutput(out, path);
}

void WriteMembershipCsv(std::ostream& out, const std::vector<std::string>& labels,
                        const Matrix& pi) {
  if (static_cast<Eigen::Index>(labels.size()) != pi.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "label count does not match membership rows");
  }
  out << "node";
  for (Eigen::Index k = 0; k < pi.cols(); ++k) out << ",pi_" << (k + 1);
  out << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < pi.rows(); ++i) {
    out << labels[i];
    for (Eigen::Index k = 0; k < pi.cols(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", pi(i, k));
      out << ',' << buf;
    }
    out << '\n';
  }
}

void SaveMembershipCsv(const std::filesystem::path& path,
                       const std::vector<std::string>& labels, const Matrix& pi) {
  std::ofstream out = OpenOutput(path);
  WriteMembershipCsv(out, labels, pi);
  FinishOutput(out, path);
}

MembershipTable ParseMembershipCsv(std::istream& in, std::string_view source) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> header;
  std::string header_line;
  while (std::getline(in, line)) {
    ++line_no;
    if (IsSkippable(line)) continue;
    header_line = line;
    header = Tokenize(header_line, ',');
    break;
  }
  if (header.size() < 2 || header[0] != "node") {
    ParseFailure(source, line_no, "header must be node,pi_1,...,pi_K");
  }
  const int K = static_cast<int>(header.size()) - 1;
  for (int k = 0; k < K; ++k) {
    if (header[k + 1] != "pi_" + std::to_string(k + 1)) {
      ParseFailure(source, line_no, "unexpected column '" + std::string(header[k + 1]) + "'");
    }
  }
  MembershipTable table;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (IsSkippable(line)) continue;
    const auto fields = Tokenize(line, ',');
    if (static_cast<int>(fields.size()) != K + 1) {
      ParseFailure(source, line_no,
                   "expected " + std::to_string(K + 1) + " fields, found " +
                       std::to_string(fields.size()));
    }
    table.labels.emplace_back(fields[0]);
    for (int k = 0; k < K; ++k) {
      const std::string_view f = fields[k + 1];
      double x = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), x);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        ParseFailure(source, line_no, "not a number: '" + std::string(f) + "'");
      }
      values.push_back(x);
    }
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(table.labels.size());
  table.pi = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                            Eigen::RowMajor>>(values.data(), rows, K);
  return table;
}

MembershipTable LoadMembershipCsv(const std::filesystem::path& path) {
  std::ifstream in = OpenInput(path);
  return ParseMembershipCsv(in, path.string());
}

Matrix AlignMembership(const MembershipTable& table, const std::vector<std::string>& labels) {
  if (table.labels.size() != labels.size()) {
    throw Error(ErrorCode::kShapeMismatch, "membership tables cover different node counts");
  }
  std::unordered_map<std::string, Eigen::Index> row_of;
  for (std::size_t r = 0; r < table.labels.size(); ++r) {
    if (!row_of.emplace(table.labels[r], static_cast<Eigen::Index>(r)).second) {
      throw Error(ErrorCode::kShapeMismatch, "duplicate node '" + table.labels[r] + "'");
    }
  }
  Matrix out(table.pi.rows(), table.pi.cols());
  for (std::size_t r = 0; r < labels.size(); ++r) {
    const auto it = row_of.find(labels[r]);
    if (it == row_of.end()) {
      throw Error(ErrorCode::kShapeMismatch, "node '" + labels[r] + "' missing from table");
    }
    out.row(static_cast<Eigen::Index>(r)) = table.pi.row(it->second);
  }
  return out;
}

}  // namespace prime
