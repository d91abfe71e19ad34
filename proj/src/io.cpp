#include "deanon/io.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace deanon {

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

bool is_blank_or_comment(const std::string& line) {
    const auto pos = line.find_first_not_of(" \t\r");
    return pos == std::string::npos || line[pos] == '#';
}

// Parses whitespace-separated integers; throws ParseError on any other token.
std::vector<long long> parse_ints(const std::string& line, std::size_t line_no) {
    std::istringstream ss(line);
    std::vector<long long> values;
    std::string token;
    while (ss >> token) {
        std::size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(token, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != token.size()) throw ParseError("not an integer: '" + token + "'", line_no);
        values.push_back(v);
    }
    return values;
}

Index to_index(long long id, Index bound, const char* what, std::size_t line_no) {
    if (id < 1 || id > bound) {
        throw RangeError(std::string(what) + " id " + std::to_string(id) + " outside 1.." + std::to_string(bound) +
                         " (line " + std::to_string(line_no) + ")");
    }
    return static_cast<Index>(id - 1);
}

}  // namespace

AdjacencyMatrix read_edge_list(const std::filesystem::path& path, Index n) {
    auto in = open_in(path);
    AdjacencyMatrix a(n);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank_or_comment(line)) continue;
        const auto ids = parse_ints(line, line_no);
        if (ids.size() != 2) throw ParseError("expected 'u v'", line_no);
        const Index u = to_index(ids[0], n, "node", line_no);
        const Index v = to_index(ids[1], n, "node", line_no);
        if (u == v) throw ParseError("self-loop", line_no);
        a.add_edge(u, v);
    }
    return a;
}

void write_edge_list(const std::filesystem::path& path, const AdjacencyMatrix& a) {
    auto out = open_out(path);
    out << "# undirected edge list, 1-based node ids, n=" << a.n() << '\n';
    for (Index i = 0; i < a.n(); ++i) {
        for (Index j = i + 1; j < a.n(); ++j) {
            if (a.has_edge(i, j)) out << i + 1 << ' ' << j + 1 << '\n';
        }
    }
}

CommunityMatrix read_communities(const std::filesystem::path& path, Index n, Index q, bool allow_empty) {
    if (q < 1) throw ParameterError("community count must be positive");
    auto in = open_in(path);
    CommunityMatrix m(n, q);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank_or_comment(line)) continue;
        const auto ids = parse_ints(line, line_no);
        const Index node = to_index(ids.front(), n, "node", line_no);
        for (std::size_t k = 1; k < ids.size(); ++k) m.set(node, to_index(ids[k], q, "community", line_no), true);
    }
    if (!allow_empty) {
        for (Index i = 0; i < n; ++i) {
            if (m.row_size(i) == 0) throw RangeError("node " + std::to_string(i + 1) + " has no community");
        }
    }
    return m;
}

void write_communities(const std::filesystem::path& path, const CommunityMatrix& m) {
    auto out = open_out(path);
    out << "# node community-ids..., 1-based, Q=" << m.communities() << '\n';
    for (Index i = 0; i < m.n(); ++i) {
        out << i + 1;
        for (Index c = 0; c < m.communities(); ++c) {
            if (m.member(i, c)) out << ' ' << c + 1;
        }
        out << '\n';
    }
}

}  // namespace deanon
