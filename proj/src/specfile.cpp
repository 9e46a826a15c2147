#include "bvres/specfile.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace bvres {

namespace {

struct Piece {
    double a, b;
    std::vector<double> coeffs;
    int line;
};

struct Section {
    std::vector<Piece> pieces;
    std::vector<Atom> atoms;
    std::optional<double> constant;
    int line = 0;
};

class LineReader {
public:
    LineReader(std::string text, int line) : s_(std::move(text)), line_(line) {}

    [[noreturn]] void fail(const std::string& what) const {
        throw SpecError("line " + std::to_string(line_) + ", column " + std::to_string(pos_ + 1) + ": " + what);
    }
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool done() {
        skip_ws();
        return pos_ >= s_.size();
    }
    bool accept(const std::string& tok) {
        skip_ws();
        if (s_.compare(pos_, tok.size(), tok) != 0) return false;
        std::size_t end = pos_ + tok.size();
        if (std::isalpha(static_cast<unsigned char>(tok.back())) && end < s_.size() &&
            (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_'))
            return false;
        pos_ = end;
        return true;
    }
    void expect(const std::string& tok) {
        if (!accept(tok)) fail("expected '" + tok + "'");
    }
    std::string word() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        if (start == pos_) fail("expected a name");
        return s_.substr(start, pos_ - start);
    }
    // strtod: decimal, hexadecimal and inf
    double number() {
        skip_ws();
        const char* begin = s_.c_str() + pos_;
        char* end = nullptr;
        errno = 0;
        double v = std::strtod(begin, &end);
        if (end == begin) fail("expected a number");
        if (errno == ERANGE && std::isfinite(v) && v != 0.0) fail("number out of range");
        if (std::isnan(v)) fail("nan is not allowed");
        pos_ += static_cast<std::size_t>(end - begin);
        return v;
    }
    bool at_number() {
        skip_ws();
        if (pos_ >= s_.size()) return false;
        char c = s_[pos_];
        return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.' ||
               s_.compare(pos_, 3, "inf") == 0;
    }
    int line() const { return line_; }

private:
    std::string s_;
    std::size_t pos_ = 0;
    int line_;
};

const std::vector<std::string> kCoefficients = {"alpha", "beta", "b0", "b1", "V1", "V0"};

bool is_coefficient(const std::string& w) {
    return std::find(kCoefficients.begin(), kCoefficients.end(), w) != kCoefficients.end();
}

// split at commas outside parentheses
std::vector<std::pair<std::string, std::size_t>> split_top(const std::string& s) {
    std::vector<std::pair<std::string, std::size_t>> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '(' || s[i] == '[') ++depth;
        if (s[i] == ')' || s[i] == ']') --depth;
        if (s[i] == ',' && depth == 0) {
            out.push_back({s.substr(start, i - start), start});
            start = i + 1;
        }
    }
    out.push_back({s.substr(start), start});
    return out;
}

void parse_piece(LineReader& r, Section& sec) {
    // "on" already consumed
    r.expect("(");
    double a = r.number();
    r.expect(",");
    double b = r.number();
    r.expect(")");
    r.expect(":");
    r.expect("poly");
    std::vector<double> c;
    while (r.at_number()) {
        double v = r.number();
        if (!std::isfinite(v)) r.fail("polynomial coefficients must be finite");
        c.push_back(v);
    }
    if (c.empty()) r.fail("poly needs at least one coefficient");
    if (c.size() > 4) r.fail("at most 4 coefficients (cubic pieces)");
    if (!r.done()) r.fail("unexpected text after the coefficients");
    if (!(a < b)) r.fail("empty interval");
    sec.pieces.push_back({a, b, c, r.line()});
}

void parse_atom(LineReader& r, Section& sec, const std::string& name) {
    // "atom" already consumed
    if (name != "V0") r.fail("atoms are only allowed in V0");
    r.expect("at");
    double x = r.number();
    r.expect("mass");
    double m = r.number();
    if (!std::isfinite(x) || !std::isfinite(m)) r.fail("atom location and mass must be finite");
    if (!r.done()) r.fail("unexpected text after the atom");
    sec.atoms.push_back({x, m});
}

PiecewiseBV assemble(const std::string& name, Section& sec) {
    if (sec.constant) {
        if (!sec.pieces.empty()) throw SpecError("line " + std::to_string(sec.line) + ": " + name + " given both as a constant and by pieces");
        return PiecewiseBV::constant(*sec.constant);
    }
    std::sort(sec.pieces.begin(), sec.pieces.end(), [](const Piece& p, const Piece& q) { return p.a < q.a; });
    for (std::size_t i = 1; i < sec.pieces.size(); ++i)
        if (sec.pieces[i].a < sec.pieces[i - 1].b)
            throw SpecError("line " + std::to_string(sec.pieces[i].line) + ": piece overlaps the one from line " +
                            std::to_string(sec.pieces[i - 1].line));
    std::vector<double> bp;
    std::vector<Poly> polys;
    double cursor = -std::numeric_limits<double>::infinity();
    for (const Piece& p : sec.pieces) {
        if (p.a > cursor) {
            polys.push_back(Poly()); // uncovered stretch is zero
            bp.push_back(p.a);
        }
        polys.push_back(Poly(p.coeffs));
        cursor = p.b;
        if (std::isfinite(p.b)) bp.push_back(p.b);
    }
    if (std::isfinite(cursor) || polys.empty()) polys.push_back(Poly());
    return PiecewiseBV(bp, polys).simplified();
}

} // namespace

CoefficientSpec parse_spec(std::istream& in) {
    std::map<std::string, Section> sections;
    std::optional<double> h, R0;
    std::string current;
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string text = raw.substr(0, raw.find('#'));
        for (auto& [part, offset] : split_top(text)) {
            LineReader r(std::string(offset, ' ') + part, lineno);
            if (r.done()) continue;
            std::string name;
            if (r.accept("on")) {
                if (current.empty()) r.fail("piece outside a coefficient section");
                parse_piece(r, sections[current]);
                continue;
            }
            if (r.accept("atom")) {
                if (current.empty()) r.fail("atom outside a coefficient section");
                parse_atom(r, sections[current], current);
                continue;
            }
            name = r.word();
            if (name == "h" || name == "R0") {
                r.expect("=");
                double v = r.number();
                if (!r.done()) r.fail("unexpected text after the value");
                (name == "h" ? h : R0) = v;
                current.clear();
                continue;
            }
            if (!is_coefficient(name)) r.fail("unknown coefficient '" + name + "'");
            Section& sec = sections[name];
            if (sec.line == 0) sec.line = lineno;
            if (r.accept("=")) {
                double v = r.number();
                if (!std::isfinite(v)) r.fail("constant must be finite");
                if (!r.done()) r.fail("unexpected text after the value");
                if (name == "V0") r.fail("V0 is a measure; give pieces or atoms");
                sec.constant = v;
                current.clear();
            } else if (r.accept(":")) {
                current = name;
                if (!r.done()) r.fail("section header takes no value");
            } else if (r.accept("on")) {
                parse_piece(r, sec);
            } else if (r.accept("atom")) {
                parse_atom(r, sec, name);
            } else {
                r.fail("expected '=', ':', 'on' or 'atom'");
            }
        }
    }
    CoefficientSpec spec;
    if (h) spec.h = *h;
    spec.R0 = R0;
    for (auto& [name, sec] : sections) {
        if (name == "V0") {
            std::vector<Atom> atoms = sec.atoms;
            std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
            for (std::size_t i = 1; i < atoms.size(); ++i)
                if (atoms[i].x == atoms[i - 1].x)
                    throw SpecError("line " + std::to_string(sec.line) + ": two V0 atoms at the same point");
            spec.V0 = SignedMeasure(assemble(name, sec), normalize_atoms(atoms));
            continue;
        }
        PiecewiseBV f = assemble(name, sec);
        if (name == "alpha") spec.alpha = f;
        else if (name == "beta") spec.beta = f;
        else if (name == "b0") spec.b0 = f;
        else if (name == "b1") spec.b1 = f;
        else if (name == "V1") spec.V1 = f;
    }
    spec.validate();
    return spec;
}

CoefficientSpec parse_spec_text(const std::string& text) {
    std::istringstream in(text);
    return parse_spec(in);
}

CoefficientSpec parse_spec_file(const std::string& path, std::string* contents) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SpecError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (contents) *contents = ss.str();
    return parse_spec_text(ss.str());
}

namespace {

std::string hex(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

void format_bv(std::ostringstream& out, const std::string& name, const PiecewiseBV& f) {
    if (f.is_constant()) {
        out << name << " = " << hex(f.pieces()[0](0.0)) << "\n";
        return;
    }
    out << name << ":\n";
    const auto& bp = f.breakpoints();
    for (std::size_t i = 0; i < f.pieces().size(); ++i) {
        double a = i == 0 ? -INFINITY : bp[i - 1];
        double b = i == bp.size() ? INFINITY : bp[i];
        const Poly& p = f.pieces()[i];
        out << "  on (" << hex(a) << ", " << hex(b) << "): poly";
        if (p.coeffs().empty()) out << " " << hex(0.0);
        for (double c : p.coeffs()) out << " " << hex(c);
        out << "\n";
    }
}

} // namespace

std::string format_spec(const CoefficientSpec& spec) {
    std::ostringstream out;
    out << "h = " << hex(spec.h) << "\n";
    if (spec.R0) out << "R0 = " << hex(*spec.R0) << "\n";
    format_bv(out, "alpha", spec.alpha);
    format_bv(out, "beta", spec.beta);
    format_bv(out, "b0", spec.b0);
    format_bv(out, "b1", spec.b1);
    format_bv(out, "V1", spec.V1);
    if (!spec.V0.density.is_constant() || spec.V0.density.pieces()[0](0.0) != 0.0) {
        format_bv(out, "V0", spec.V0.density);
        for (const Atom& a : spec.V0.atoms) out << "  atom at " << hex(a.x) << " mass " << hex(a.mass) << "\n";
    } else {
        for (const Atom& a : spec.V0.atoms) out << "V0 atom at " << hex(a.x) << " mass " << hex(a.mass) << "\n";
    }
    return out.str();
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace bvres
