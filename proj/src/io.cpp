#include "tatrec/io.hpp"
#include "tatrec/errors.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace tatrec {

namespace {

void ensure_writable(const std::ofstream& out, const std::string& path) {
    if (!out) throw ConfigError("cannot write file: " + path);
}

std::ifstream open_reader(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file: " + path);
    return in;
}

bool is_content(const std::string& line) {
    for (char ch : line) {
        if (std::isspace(static_cast<unsigned char>(ch))) continue;
        return ch != '#';
    }
    return false;
}

/// Next line that is neither blank nor a comment; false at end of file.
bool next_content_line(std::istream& in, std::string& line) {
    while (std::getline(in, line))
        if (is_content(line)) return true;
    return false;
}

double parse_double(const std::string& tok, const std::string& path) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw ConfigError(path + ": expected a number, found '" + tok + "'");
    return v;
}

long parse_long(const std::string& tok, const std::string& path) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    long v = std::strtol(begin, &end, 10);
    if (end == begin || *end != '\0')
        throw ConfigError(path + ": expected an integer, found '" + tok + "'");
    return v;
}

/// Reads exactly `count` whitespace-separated numbers from the remaining
/// content lines and demands that nothing else follows.
std::vector<double> read_values(std::istream& in, std::size_t count,
                                const std::string& path) {
    std::vector<double> out;
    out.reserve(count);
    std::string line;
    while (next_content_line(in, line)) {
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) {
            if (out.size() == count)
                throw ConfigError(path + ": more values than the header declares");
            out.push_back(parse_double(tok, path));
        }
    }
    if (out.size() != count) {
        std::ostringstream msg;
        msg << path << ": expected " << count << " values, found " << out.size();
        throw ConfigError(msg.str());
    }
    return out;
}

void write_provenance(std::ofstream& out, const std::vector<std::string>& provenance) {
    for (const auto& line : provenance) out << "# " << line << "\n";
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_fgrid(const std::string& path, const ScalarField& f,
                 const std::vector<std::string>& provenance) {
    std::ofstream out(path);
    ensure_writable(out, path);
    const Grid2D& g = f.grid;
    out << "FGRID " << g.nx << ' ' << g.ny << ' ' << format_double(g.dx) << ' '
        << format_double(g.origin_x) << ' ' << format_double(g.origin_y) << "\n";
    write_provenance(out, provenance);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            if (i) out << ' ';
            out << format_double(f.at(i, j));
        }
        out << "\n";
    }
    out.flush();
    ensure_writable(out, path);
}

ScalarField read_fgrid(const std::string& path) {
    std::ifstream in = open_reader(path);
    std::string line;
    if (!next_content_line(in, line)) throw ConfigError(path + ": empty field file");
    std::istringstream hs(line);
    std::string tag, snx, sny, sdx, sox, soy;
    hs >> tag >> snx >> sny >> sdx >> sox >> soy;
    if (tag != "FGRID" || soy.empty())
        throw ConfigError(path + ": malformed FGRID header line");
    long nx = parse_long(snx, path), ny = parse_long(sny, path);
    double dx = parse_double(sdx, path);
    double ox = parse_double(sox, path), oy = parse_double(soy, path);
    std::string extra;
    if (hs >> extra) throw ConfigError(path + ": trailing tokens on the FGRID header");
    if (nx < 1 || ny < 1 || !(dx > 0.0))
        throw ConfigError(path + ": FGRID header values out of range");

    Grid2D grid(static_cast<int>(nx), static_cast<int>(ny), dx, ox, oy);
    ScalarField f(grid);
    f.values = read_values(in, grid.size(), path);
    return f;
}

void write_btrace(const std::string& path, const BoundaryTrace& trace,
                  const std::vector<std::string>& provenance) {
    std::ofstream out(path);
    ensure_writable(out, path);
    out << "BTRACE " << trace.nt << ' ' << trace.nb << ' ' << format_double(trace.dt)
        << ' ' << hash_string(trace.geometry_hash) << "\n";
    write_provenance(out, provenance);
    for (int n = 0; n < trace.nt; ++n) {
        for (std::size_t s = 0; s < trace.nb; ++s) {
            if (s) out << ' ';
            out << format_double(trace.at(n, s));
        }
        out << "\n";
    }
    out.flush();
    ensure_writable(out, path);
}

BoundaryTrace read_btrace(const std::string& path) {
    std::ifstream in = open_reader(path);
    std::string line;
    if (!next_content_line(in, line)) throw ConfigError(path + ": empty trace file");
    std::istringstream hs(line);
    std::string tag, snt, snb, sdt, shash;
    hs >> tag >> snt >> snb >> sdt >> shash;
    if (tag != "BTRACE" || shash.empty())
        throw ConfigError(path + ": malformed BTRACE header line");
    std::string extra;
    if (hs >> extra) throw ConfigError(path + ": trailing tokens on the BTRACE header");
    long nt = parse_long(snt, path), nb = parse_long(snb, path);
    double dt = parse_double(sdt, path);
    if (nt < 1 || nb < 1 || !(dt > 0.0))
        throw ConfigError(path + ": BTRACE header values out of range");
    if (shash.size() != 16 || shash.find_first_not_of("0123456789abcdef") != std::string::npos)
        throw ConfigError(path + ": malformed geometry hash");

    BoundaryTrace tr;
    tr.nt = static_cast<int>(nt);
    tr.nb = static_cast<std::size_t>(nb);
    tr.dt = dt;
    tr.geometry_hash = std::strtoull(shash.c_str(), nullptr, 16);
    tr.samples = read_values(in, static_cast<std::size_t>(nt) * tr.nb, path);
    return tr;
}

void write_csv(const std::string& path, const CsvTable& table) {
    if (table.columns.empty()) throw ConfigError("refusing to write a table with no columns");
    std::ofstream out(path);
    ensure_writable(out, path);
    write_provenance(out, table.provenance);
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out << ',';
        out << table.columns[c];
    }
    out << "\n";
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
            throw ConfigError("table row width does not match its column count");
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            out << format_double(row[c]);
        }
        out << "\n";
    }
    out.flush();
    ensure_writable(out, path);
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    for (auto& tok : out) {
        while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.front())))
            tok.erase(tok.begin());
        while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.back())))
            tok.pop_back();
    }
    return out;
}

} // namespace

CsvTable read_csv(const std::string& path) {
    std::ifstream in = open_reader(path);
    CsvTable table;
    std::string line;
    if (!next_content_line(in, line)) throw ConfigError(path + ": empty table file");
    table.columns = split_commas(line);
    while (next_content_line(in, line)) {
        std::vector<std::string> toks = split_commas(line);
        if (toks.size() != table.columns.size())
            throw ConfigError(path + ": row width does not match the header");
        std::vector<double> row;
        row.reserve(toks.size());
        for (const auto& tok : toks) row.push_back(parse_double(tok, path));
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace tatrec
