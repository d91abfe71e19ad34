#pragma once

#include <filesystem>

#include "deanon/graph_core.hpp"

namespace deanon {

// Edge list: one "u v" pair per line, 1-based node ids, undirected.
// Duplicate edges are ignored; lines starting with '#' are comments.
AdjacencyMatrix read_edge_list(const std::filesystem::path& path, Index n);
void write_edge_list(const std::filesystem::path& path, const AdjacencyMatrix& a);

// Community file: one "node q1 q2 ... qk" line per node, 1-based ids.
// Nodes absent from the file get an empty row; allow_empty=false rejects them.
CommunityMatrix read_communities(const std::filesystem::path& path, Index n, Index q, bool allow_empty = true);
void write_communities(const std::filesystem::path& path, const CommunityMatrix& m);

}  // namespace deanon
