#include "keyact/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "keyact/error.hpp"

namespace keyact::io {
namespace {

using nlohmann::json;

// Line and column (1-based) of a byte offset.
std::pair<int, int> locate(const std::string& text, std::size_t offset) {
    int line = 1, column = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

int read_dim(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number_integer()) throw ParseError(std::string("missing integer field '") + key + "'", 1, 1);
    const int v = j[key].get<int>();
    if (v < 1) throw ParseError(std::string("field '") + key + "' must be positive", 1, 1);
    return v;
}

std::vector<int> parse_ints(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    for (std::string tok; std::getline(ss, tok, ',');) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != tok.size()) throw ParseError("bad wiring parameter '" + tok + "'", 1, 1);
        out.push_back(v);
    }
    return out;
}

}  // namespace

std::string box_to_json(const Box& b) {
    const Scenario& s = b.scenario();
    json table = json::array();
    for (int x = 0; x < s.nx; ++x) {
        json jx = json::array();
        for (int y = 0; y < s.ny; ++y) {
            json jy = json::array();
            for (int a = 0; a < s.na; ++a) {
                json ja = json::array();
                for (int bb = 0; bb < s.nb; ++bb) ja.push_back(b(x, y, a, bb));
                jy.push_back(ja);
            }
            jx.push_back(jy);
        }
        table.push_back(jx);
    }
    json j{{"nx", s.nx}, {"ny", s.ny}, {"na", s.na}, {"nb", s.nb}, {"table", table}};
    return j.dump(1) + "\n";
}

Box box_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, column] = locate(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ParseError(e.what(), line, column);
    }
    if (!j.is_object()) throw ParseError("box must be a JSON object", 1, 1);
    const Scenario s{read_dim(j, "nx"), read_dim(j, "ny"), read_dim(j, "na"), read_dim(j, "nb")};
    if (!j.contains("table")) throw ParseError("missing field 'table'", 1, 1);
    std::vector<double> table;
    table.reserve(s.size());
    const json& t = j["table"];
    auto expect = [](const json& node, int n, const char* what) {
        if (!node.is_array() || static_cast<int>(node.size()) != n)
            throw ParseError(std::string("table dimension '") + what + "' has the wrong length", 1, 1);
    };
    expect(t, s.nx, "x");
    for (int x = 0; x < s.nx; ++x) {
        expect(t[x], s.ny, "y");
        for (int y = 0; y < s.ny; ++y) {
            expect(t[x][y], s.na, "a");
            for (int a = 0; a < s.na; ++a) {
                expect(t[x][y][a], s.nb, "b");
                for (int b = 0; b < s.nb; ++b) {
                    const json& v = t[x][y][a][b];
                    if (!v.is_number()) throw ParseError("table entries must be numbers", 1, 1);
                    table.push_back(v.get<double>());
                }
            }
        }
    }
    return make_box(s, std::move(table));
}

void write_box(const Box& b, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << box_to_json(b);
    if (!out) throw IoError("failed writing " + path);
}

Box read_box(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return box_from_json(ss.str());
}

Wiring parse_wiring(const std::string& spec, int inputs) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw ParseError("wiring spec must look like 'class:params'", 1, 1);
    const std::string kind = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);
    const auto arity = [&](const std::vector<int>& p, std::size_t lo, std::size_t hi) {
        if (p.size() < lo || p.size() > hi)
            throw ParseError("wrong number of parameters for '" + kind + "'", 1, static_cast<int>(colon) + 2);
    };
    try {
        if (kind == "table") {
            std::vector<std::uint8_t> table;
            for (char c : rest) {
                if (c != '0' && c != '1') throw ParseError("table specs hold only 0 and 1", 1, 1);
                table.push_back(static_cast<std::uint8_t>(c - '0'));
            }
            // The length 2 (2 inputs)^k fixes the number of boxes k.
            for (int k = 1; k <= 8; ++k) {
                std::size_t n = 2;
                for (int i = 0; i < k; ++i) n *= 2 * static_cast<std::size_t>(inputs);
                if (n == table.size()) return Wiring(std::vector<int>(k, inputs), std::move(table));
            }
            throw ParseError("table length does not match any number of boxes", 1, static_cast<int>(colon) + 2);
        }
        const std::vector<int> p = parse_ints(rest);
        if (kind == "label") {
            arity(p, 1, 1);
            if (inputs != 2) throw ParseError("labels address the 2-input catalog", 1, 1);
            for (const Wiring& w : catalog_2in_all())
                if (w.label() == p[0]) return w;
            throw ParseError("no wiring with label " + rest, 1, static_cast<int>(colon) + 2);
        }
        switch (wiring_class_from_string(kind)) {
            case WiringClass::Constant: arity(p, 2, 2); return constant_wiring(inputs, p[0], p[1]);
            case WiringClass::OneSided: arity(p, 3, 3); return one_sided_wiring(inputs, p[0], p[1], p[2]);
            case WiringClass::Xor: arity(p, 3, 3); return xor_wiring(inputs, p[0], p[1], p[2]);
            case WiringClass::And: arity(p, 5, 5); return and_wiring(inputs, p[0], p[1], p[2], p[3], p[4]);
            case WiringClass::Sequential:
                arity(p, 5, 6);
                return sequential_wiring(inputs, p[0], p[1], p[2], p[3], p[4], p.size() > 5 ? p[5] : 0);
            case WiringClass::Custom: break;
        }
    } catch (const DomainError& e) {
        throw ParseError(e.what(), 1, 1);
    } catch (const ShapeMismatch& e) {
        throw ParseError(e.what(), 1, 1);
    }
    throw ParseError("unknown wiring kind '" + kind + "'", 1, 1);
}

std::string format_wiring(const Wiring& w) {
    const WiringParams& p = w.params();
    std::ostringstream s;
    switch (w.wiring_class()) {
        case WiringClass::Constant: s << "constant:" << p[0] << "," << p[1]; break;
        case WiringClass::OneSided: s << "one-sided:" << p[0] << "," << p[1] << "," << p[3]; break;
        case WiringClass::Xor: s << "xor:" << p[0] << "," << p[1] << "," << p[3]; break;
        case WiringClass::And: s << "and:" << p[0] << "," << p[1] << "," << p[3] << "," << p[4] << "," << p[5]; break;
        case WiringClass::Sequential:
            if (w.side_inputs()[0] == 2)
                s << "sequential:" << p[0] << "," << p[1] << "," << p[3] << "," << p[4] << "," << p[5];
            else
                s << "sequential:" << p[2] << "," << p[1] << "," << p[3] << "," << p[4] << "," << p[5] << "," << p[0];
            break;
        case WiringClass::Custom: break;
    }
    // Parameters only name the wiring when they regenerate the same table.
    const std::string named = s.str();
    if (!named.empty() && w.copies() == 2 && w.side_inputs()[0] == w.side_inputs()[1]) {
        try {
            if (parse_wiring(named, w.side_inputs()[0]) == w) return named;
        } catch (const Error&) {
        }
    }
    std::string table = "table:";
    for (auto v : w.table()) table += static_cast<char>('0' + v);
    return table;
}

}  // namespace keyact::io
