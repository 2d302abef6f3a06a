#include "keyact/sdpa.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "keyact/error.hpp"

namespace keyact::sdpa {
namespace {

constexpr const char* kOffsetTag = "\"objective offset:";

std::string format(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// SDPA lets punctuation separate numbers in the header lines.
std::string strip_punctuation(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '{' || c == '}' || c == '(' || c == ')') c = ' ';
    return s;
}

}  // namespace

void write(const sdp::Problem& problem, std::ostream& out, const std::string& comment) {
    std::istringstream lines(comment);
    for (std::string line; std::getline(lines, line);) out << "\"" << line << "\n";
    out << kOffsetTag << " " << format(problem.offset) << "\n";
    out << problem.num_vars() << " = mDIM\n";
    out << problem.block_sizes.size() << " = nBLOCK\n";
    for (std::size_t k = 0; k < problem.block_sizes.size(); ++k) out << (k ? " " : "") << problem.block_sizes[k];
    out << " = bLOCKsTRUCT\n";
    for (int i = 0; i < problem.num_vars(); ++i) out << (i ? " " : "") << format(problem.c[i]);
    out << "\n";
    for (std::size_t mat = 0; mat < problem.matrices.size(); ++mat)
        for (const sdp::Entry& e : problem.matrices[mat])
            if (e.value != 0.0)
                out << mat << " " << e.block + 1 << " " << e.row + 1 << " " << e.col + 1 << " " << format(e.value)
                    << "\n";
}

void write_file(const sdp::Problem& problem, const std::string& path, const std::string& comment) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    write(problem, out, comment);
    if (!out) throw IoError("failed writing " + path);
}

sdp::Problem read(std::istream& in) {
    sdp::Problem p;
    std::string line;
    int lineno = 0;
    auto next_content = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos) continue;
            if (line[first] == '"' || line[first] == '*') {
                if (line.compare(first, std::char_traits<char>::length(kOffsetTag), kOffsetTag) == 0) {
                    std::istringstream ss(line.substr(first + std::char_traits<char>::length(kOffsetTag)));
                    ss >> p.offset;
                }
                continue;
            }
            return true;
        }
        return false;
    };
    auto fail = [&](const std::string& what) -> ParseError { return ParseError(what, lineno, 1); };

    if (!next_content()) throw fail("missing mDIM");
    int m = 0;
    if (!(std::istringstream(strip_punctuation(line)) >> m) || m < 0) throw fail("bad mDIM");
    if (!next_content()) throw fail("missing nBLOCK");
    int nblock = 0;
    if (!(std::istringstream(strip_punctuation(line)) >> nblock) || nblock < 1) throw fail("bad nBLOCK");
    if (!next_content()) throw fail("missing block structure");
    {
        std::istringstream ss(strip_punctuation(line));
        for (int k = 0; k < nblock; ++k) {
            int b = 0;
            if (!(ss >> b) || b == 0) throw fail("bad block structure");
            p.block_sizes.push_back(b);
        }
    }
    p.c.reserve(m);
    while (static_cast<int>(p.c.size()) < m) {
        if (!next_content()) throw fail("objective vector too short");
        std::istringstream ss(strip_punctuation(line));
        double v;
        while (static_cast<int>(p.c.size()) < m && ss >> v) p.c.push_back(v);
    }
    p.matrices.assign(m + 1, {});
    while (next_content()) {
        std::istringstream ss(line);
        int mat, blk, i, j;
        double v;
        if (!(ss >> mat >> blk >> i >> j >> v)) throw fail("expected `matno blkno i j value`");
        if (mat < 0 || mat > m || blk < 1 || blk > nblock) throw fail("matrix or block index out of range");
        const int n = std::abs(p.block_sizes[blk - 1]);
        if (i < 1 || j < 1 || i > n || j > n) throw fail("entry index out of range");
        if (i > j) std::swap(i, j);
        p.matrices[mat].push_back({blk - 1, i - 1, j - 1, v});
    }
    return p;
}

sdp::Problem read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return read(in);
}

}  // namespace keyact::sdpa
