#include "tatrec/config.hpp"
#include "tatrec/errors.hpp"
#include "tatrec/io.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace tatrec {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

struct RawEntry {
    std::string value;
    int line = 0;
    bool consumed = false;
};

/// Tokenized INI text plus the strict typed accessors. Every lookup marks
/// its key consumed; anything left over afterwards is an unknown key.
class Reader {
public:
    explicit Reader(const std::string& text) {
        std::istringstream in(text);
        std::string line;
        std::string section;
        int ln = 0;
        while (std::getline(in, line)) {
            ++ln;
            std::size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    fail(ln, "unterminated section header");
                section = trim(line.substr(1, line.size() - 2));
                if (section.empty()) fail(ln, "empty section name");
                continue;
            }
            std::size_t eq = line.find('=');
            if (eq == std::string::npos) fail(ln, "expected 'key = value'");
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (key.empty()) fail(ln, "empty key");
            if (section.empty()) fail(ln, "key '" + key + "' appears outside any section");
            std::string full = section + "." + key;
            if (entries_.count(full)) fail(ln, "duplicate key '" + key + "'");
            entries_[full] = {value, ln, false};
        }
    }

    bool has(const std::string& sec, const std::string& key) {
        return entries_.count(sec + "." + key) != 0;
    }

    int line_of(const std::string& sec, const std::string& key) const {
        auto it = entries_.find(sec + "." + key);
        return it == entries_.end() ? 0 : it->second.line;
    }

    std::string get_string(const std::string& sec, const std::string& key,
                           const std::string& def) {
        RawEntry* e = take(sec, key);
        return e ? e->value : def;
    }

    double get_double(const std::string& sec, const std::string& key, double def) {
        RawEntry* e = take(sec, key);
        if (!e) return def;
        return parse_double(e->value, e->line, key);
    }

    int get_int(const std::string& sec, const std::string& key, int def) {
        RawEntry* e = take(sec, key);
        if (!e) return def;
        const char* begin = e->value.c_str();
        char* end = nullptr;
        long v = std::strtol(begin, &end, 10);
        if (end == begin || *end != '\0')
            fail(e->line, "value of '" + key + "' is not an integer");
        return static_cast<int>(v);
    }

    std::uint64_t get_seed(const std::string& sec, const std::string& key,
                           std::uint64_t def) {
        RawEntry* e = take(sec, key);
        if (!e) return def;
        const char* begin = e->value.c_str();
        char* end = nullptr;
        unsigned long long v = std::strtoull(begin, &end, 10);
        if (end == begin || *end != '\0')
            fail(e->line, "value of '" + key + "' is not an unsigned integer");
        return v;
    }

    std::vector<double> get_double_list(const std::string& sec, const std::string& key,
                                        std::vector<double> def) {
        RawEntry* e = take(sec, key);
        if (!e) return def;
        std::vector<double> out;
        for (const std::string& tok : split_list(e->value))
            out.push_back(parse_double(tok, e->line, key));
        return out;
    }

    std::vector<int> get_int_list(const std::string& sec, const std::string& key,
                                  std::vector<int> def) {
        RawEntry* e = take(sec, key);
        if (!e) return def;
        std::vector<int> out;
        for (const std::string& tok : split_list(e->value)) {
            const char* begin = tok.c_str();
            char* end = nullptr;
            long v = std::strtol(begin, &end, 10);
            if (end == begin || *end != '\0')
                fail(e->line, "list entry of '" + key + "' is not an integer");
            out.push_back(static_cast<int>(v));
        }
        return out;
    }

    /// Matches the value against the allowed words and returns its index.
    std::size_t get_choice(const std::string& sec, const std::string& key,
                           const std::vector<std::string>& words, std::size_t def) {
        RawEntry* e = take(sec, key);
        if (!e) return def;
        for (std::size_t k = 0; k < words.size(); ++k)
            if (e->value == words[k]) return k;
        std::string allowed;
        for (const auto& w : words) allowed += (allowed.empty() ? "" : ", ") + w;
        fail(e->line, "value of '" + key + "' must be one of: " + allowed);
        return def;
    }

    void finish() const {
        for (const auto& [full, e] : entries_)
            if (!e.consumed) {
                std::size_t dot = full.find('.');
                fail(e.line, "unknown key '" + full.substr(dot + 1) + "' in section [" +
                                 full.substr(0, dot) + "]");
            }
    }

    [[noreturn]] static void fail(int line, const std::string& what) {
        throw ConfigError("config line " + std::to_string(line) + ": " + what);
    }

private:
    RawEntry* take(const std::string& sec, const std::string& key) {
        auto it = entries_.find(sec + "." + key);
        if (it == entries_.end()) return nullptr;
        it->second.consumed = true;
        return &it->second;
    }

    static double parse_double(const std::string& tok, int line, const std::string& key) {
        const char* begin = tok.c_str();
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin || *end != '\0')
            fail(line, "value of '" + key + "' is not a number");
        return v;
    }

    static std::vector<std::string> split_list(const std::string& value) {
        std::vector<std::string> out;
        std::string cur;
        for (char ch : value) {
            if (ch == ',') {
                out.push_back(trim(cur));
                cur.clear();
            } else {
                cur += ch;
            }
        }
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
        return out;
    }

    std::map<std::string, RawEntry> entries_;
};

void check(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

} // namespace

ExperimentConfig parse_config(const std::string& text) {
    Reader r(text);
    ExperimentConfig c;

    c.shape = r.get_choice("domain", "shape", {"disk", "square"},
                           c.shape == ShapeKind::Disk ? 0 : 1) == 0
                  ? ShapeKind::Disk
                  : ShapeKind::Square;
    c.half = r.get_double("domain", "half", c.half);
    c.buffer = r.get_double("domain", "buffer", c.buffer);
    c.n = r.get_int("domain", "n", c.n);

    std::size_t sk = r.get_choice("medium", "speed", {"constant", "bump", "inclusion"}, 0);
    c.speed.kind = sk == 0   ? SoundSpeedSpec::Kind::Constant
                   : sk == 1 ? SoundSpeedSpec::Kind::Bump
                             : SoundSpeedSpec::Kind::Inclusion;
    c.speed.bump.amplitude = r.get_double("medium", "speed_amplitude", 0.3);
    c.speed.bump.width = r.get_double("medium", "speed_width", 0.3);
    c.speed.bump.cx = r.get_double("medium", "speed_cx", 0.0);
    c.speed.bump.cy = r.get_double("medium", "speed_cy", 0.0);
    c.speed.inclusion.amplitude = c.speed.bump.amplitude;
    c.speed.inclusion.cx = c.speed.bump.cx;
    c.speed.inclusion.cy = c.speed.bump.cy;
    c.speed.inclusion.radius = r.get_double("medium", "speed_radius", 0.3);
    c.speed.inclusion.mollifier_width = r.get_double("medium", "speed_mollifier", 0.15);

    std::size_t ak = r.get_choice("medium", "attenuation", {"zero", "constant", "bump"}, 0);
    c.attenuation.kind = ak == 0   ? AttenuationSpec::Kind::Zero
                         : ak == 1 ? AttenuationSpec::Kind::Constant
                                   : AttenuationSpec::Kind::Bump;
    c.attenuation.constant = r.get_double("medium", "attenuation_value", 0.5);
    c.attenuation.bump.amplitude = r.get_double("medium", "attenuation_amplitude", 0.5);
    c.attenuation.bump.width = r.get_double("medium", "attenuation_width", 0.3);
    c.attenuation.bump.cx = r.get_double("medium", "attenuation_cx", 0.0);
    c.attenuation.bump.cy = r.get_double("medium", "attenuation_cy", 0.0);
    c.attenuation.scale = r.get_double("medium", "attenuation_scale", 1.0);

    std::size_t pk = r.get_choice(
        "phantom", "kind", {"gaussian", "smooth_disk", "checkerboard", "random"}, 0);
    c.phantom_random = pk == 3;
    c.phantom.kind = pk == 1   ? PhantomSpec::Kind::SmoothDisk
                     : pk == 2 ? PhantomSpec::Kind::Checkerboard
                               : PhantomSpec::Kind::Gaussian;
    BlobComponent blob;
    blob.kind = pk == 1 ? BlobComponent::Kind::SmoothDisk : BlobComponent::Kind::Gaussian;
    blob.cx = r.get_double("phantom", "cx", 0.0);
    blob.cy = r.get_double("phantom", "cy", 0.0);
    blob.width = r.get_double("phantom", "width", 0.12);
    blob.amplitude = r.get_double("phantom", "amplitude", 1.0);
    blob.edge_width = r.get_double("phantom", "edge_width", 0.08);
    c.phantom.components = {blob};
    c.phantom.amplitude = blob.amplitude;
    c.phantom.block_cells = r.get_int("phantom", "block_cells", 4);
    c.phantom.half_extent = r.get_double("phantom", "half_extent", 0.3);
    c.phantom.mollify_passes = r.get_int("phantom", "mollify_passes", 2);
    c.phantom_margin = r.get_double("phantom", "margin", -1.0);

    c.T = r.get_double("time", "T", c.T);
    c.cfl_safety = r.get_double("time", "cfl_safety", c.cfl_safety);
    c.dt = r.get_double("time", "dt", c.dt);

    std::size_t ck =
        r.get_choice("cutoff", "kind", {"identity", "complete", "partial"}, 0);
    c.cutoff = ck == 0   ? ExperimentConfig::CutoffKind::Identity
               : ck == 1 ? ExperimentConfig::CutoffKind::Complete
                         : ExperimentConfig::CutoffKind::Partial;
    c.t_flat = r.get_double("cutoff", "t_flat", 0.0);
    c.taper_frac = r.get_double("cutoff", "taper_frac", 0.1);
    c.s0 = r.get_double("cutoff", "s0", 0.75);
    c.s1 = r.get_double("cutoff", "s1", 0.25);
    c.space_edge_frac = r.get_double("cutoff", "space_edge_frac", 0.1);
    c.time_edge_frac = r.get_double("cutoff", "time_edge_frac", 0.1);

    c.tol_elliptic = r.get_double("solver", "tol_elliptic", 1e-9);
    c.noise_level = r.get_double("solver", "noise_level", 0.0);

    c.max_iters = r.get_int("neumann", "max_iters", 20);
    c.tol = r.get_double("neumann", "tol", 1e-3);

    c.attenuation_scales =
        r.get_double_list("sweep", "attenuation_scales", c.attenuation_scales);
    c.grid_sizes = r.get_int_list("sweep", "grid_sizes", c.grid_sizes);

    c.output_dir = r.get_string("output", "dir", c.output_dir);
    c.seed = r.get_seed("output", "seed", c.seed);

    // Range checks; the buffer contract names its lines when they exist.
    check(c.half > 0.0, "domain half extent must be positive");
    check(c.buffer > 0.0, "buffer width must be positive");
    check(c.n >= 9, "domain sample count must be at least 9");
    check(c.T > 0.0, "final time must be positive");
    check(c.cfl_safety > 0.0 && c.cfl_safety <= 1.0,
          "cfl_safety must lie in (0, 1]");
    check(c.dt >= 0.0, "dt must be nonnegative");
    check(c.taper_frac > 0.0 && c.taper_frac <= 0.5, "taper_frac must lie in (0, 0.5]");
    check(c.s0 >= 0.0 && c.s0 < 1.0 && c.s1 >= 0.0 && c.s1 < 1.0,
          "arc positions must lie in [0, 1)");
    check(c.s0 != c.s1, "observed arc must be nonempty");
    check(c.space_edge_frac > 0.0 && c.space_edge_frac <= 0.5,
          "space_edge_frac must lie in (0, 0.5]");
    check(c.time_edge_frac > 0.0 && c.time_edge_frac <= 0.5,
          "time_edge_frac must lie in (0, 0.5]");
    check(c.tol_elliptic > 0.0, "tol_elliptic must be positive");
    check(c.noise_level >= 0.0, "noise_level must be nonnegative");
    check(c.max_iters >= 1, "max_iters must be at least 1");
    check(c.tol > 0.0, "tol must be positive");
    check(c.t_flat >= 0.0, "t_flat must be nonnegative");
    for (double s : c.attenuation_scales)
        check(s >= 0.0, "attenuation scales must be nonnegative");
    for (int nsz : c.grid_sizes) check(nsz >= 9, "grid sizes must be at least 9");

    if (!(c.buffer > 0.5 * c.T)) {
        std::ostringstream msg;
        msg << "buffer width " << c.buffer << " does not exceed half the final time ("
            << 0.5 * c.T << " needed)";
        int bl = r.line_of("domain", "buffer");
        int tl = r.line_of("time", "T");
        if (bl) msg << "; buffer set on line " << bl;
        if (tl) msg << "; T set on line " << tl;
        throw ConfigError(msg.str());
    }

    r.finish();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream out;
    auto fd = [](double v) { return format_double(v); };

    out << "[domain]\n";
    out << "shape = " << (c.shape == ShapeKind::Disk ? "disk" : "square") << "\n";
    out << "half = " << fd(c.half) << "\n";
    out << "buffer = " << fd(c.buffer) << "\n";
    out << "n = " << c.n << "\n";

    out << "\n[medium]\n";
    out << "speed = "
        << (c.speed.kind == SoundSpeedSpec::Kind::Constant  ? "constant"
            : c.speed.kind == SoundSpeedSpec::Kind::Bump ? "bump"
                                                            : "inclusion")
        << "\n";
    out << "speed_amplitude = " << fd(c.speed.bump.amplitude) << "\n";
    out << "speed_width = " << fd(c.speed.bump.width) << "\n";
    out << "speed_cx = " << fd(c.speed.bump.cx) << "\n";
    out << "speed_cy = " << fd(c.speed.bump.cy) << "\n";
    out << "speed_radius = " << fd(c.speed.inclusion.radius) << "\n";
    out << "speed_mollifier = " << fd(c.speed.inclusion.mollifier_width) << "\n";
    out << "attenuation = "
        << (c.attenuation.kind == AttenuationSpec::Kind::Zero       ? "zero"
            : c.attenuation.kind == AttenuationSpec::Kind::Constant ? "constant"
                                                                    : "bump")
        << "\n";
    out << "attenuation_value = " << fd(c.attenuation.constant) << "\n";
    out << "attenuation_amplitude = " << fd(c.attenuation.bump.amplitude) << "\n";
    out << "attenuation_width = " << fd(c.attenuation.bump.width) << "\n";
    out << "attenuation_cx = " << fd(c.attenuation.bump.cx) << "\n";
    out << "attenuation_cy = " << fd(c.attenuation.bump.cy) << "\n";
    out << "attenuation_scale = " << fd(c.attenuation.scale) << "\n";

    out << "\n[phantom]\n";
    BlobComponent blob;
    if (!c.phantom.components.empty()) blob = c.phantom.components.front();
    out << "kind = "
        << (c.phantom_random                                        ? "random"
            : c.phantom.kind == PhantomSpec::Kind::SmoothDisk       ? "smooth_disk"
            : c.phantom.kind == PhantomSpec::Kind::Checkerboard     ? "checkerboard"
                                                                    : "gaussian")
        << "\n";
    out << "cx = " << fd(blob.cx) << "\n";
    out << "cy = " << fd(blob.cy) << "\n";
    out << "width = " << fd(blob.width) << "\n";
    out << "amplitude = " << fd(blob.amplitude) << "\n";
    out << "edge_width = " << fd(blob.edge_width) << "\n";
    out << "block_cells = " << c.phantom.block_cells << "\n";
    out << "half_extent = " << fd(c.phantom.half_extent) << "\n";
    out << "mollify_passes = " << c.phantom.mollify_passes << "\n";
    out << "margin = " << fd(c.phantom_margin) << "\n";

    out << "\n[time]\n";
    out << "T = " << fd(c.T) << "\n";
    out << "cfl_safety = " << fd(c.cfl_safety) << "\n";
    out << "dt = " << fd(c.dt) << "\n";

    out << "\n[cutoff]\n";
    out << "kind = "
        << (c.cutoff == ExperimentConfig::CutoffKind::Identity   ? "identity"
            : c.cutoff == ExperimentConfig::CutoffKind::Complete ? "complete"
                                                                 : "partial")
        << "\n";
    out << "t_flat = " << fd(c.t_flat) << "\n";
    out << "taper_frac = " << fd(c.taper_frac) << "\n";
    out << "s0 = " << fd(c.s0) << "\n";
    out << "s1 = " << fd(c.s1) << "\n";
    out << "space_edge_frac = " << fd(c.space_edge_frac) << "\n";
    out << "time_edge_frac = " << fd(c.time_edge_frac) << "\n";

    out << "\n[solver]\n";
    out << "tol_elliptic = " << fd(c.tol_elliptic) << "\n";
    out << "noise_level = " << fd(c.noise_level) << "\n";

    out << "\n[neumann]\n";
    out << "max_iters = " << c.max_iters << "\n";
    out << "tol = " << fd(c.tol) << "\n";

    out << "\n[sweep]\n";
    out << "attenuation_scales = ";
    for (std::size_t k = 0; k < c.attenuation_scales.size(); ++k)
        out << (k ? ", " : "") << fd(c.attenuation_scales[k]);
    out << "\n";
    out << "grid_sizes = ";
    for (std::size_t k = 0; k < c.grid_sizes.size(); ++k)
        out << (k ? ", " : "") << c.grid_sizes[k];
    out << "\n";

    out << "\n[output]\n";
    out << "dir = " << c.output_dir << "\n";
    out << "seed = " << c.seed << "\n";
    return out.str();
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    std::string text = serialize_config(cfg);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return serialize_config(a) == serialize_config(b);
}

AssembledExperiment assemble(const ExperimentConfig& cfg) {
    const double box_half = cfg.half + cfg.buffer;
    const double dx = 2.0 * box_half / (cfg.n - 1);
    Grid2D grid(cfg.n, cfg.n, dx, -box_half, -box_half);

    std::optional<std::pair<double, double>> arc;
    if (cfg.cutoff == ExperimentConfig::CutoffKind::Partial)
        arc = std::make_pair(cfg.s0, cfg.s1);

    AssembledExperiment ax;
    ax.geometry = build_geometry(grid, cfg.shape, cfg.half, arc);
    ax.medium = build_medium(ax.geometry, cfg.speed, cfg.attenuation);

    if (cfg.phantom_random) {
        ax.phantom = random_phantom(ax.geometry, cfg.seed);
    } else {
        PhantomSpec spec = cfg.phantom;
        spec.seed = cfg.seed;
        ax.phantom = build_phantom(ax.geometry, spec, cfg.phantom_margin);
    }

    switch (cfg.cutoff) {
    case ExperimentConfig::CutoffKind::Identity:
        ax.cutoff = make_identity_cutoff(ax.geometry, cfg.T);
        break;
    case ExperimentConfig::CutoffKind::Complete: {
        double t_flat = cfg.t_flat > 0.0 ? cfg.t_flat
                                         : cfg.T * (1.0 - 1.5 * cfg.taper_frac);
        ax.cutoff = make_complete_cutoff(ax.geometry, cfg.T, t_flat, cfg.taper_frac);
        break;
    }
    case ExperimentConfig::CutoffKind::Partial:
        ax.cutoff = make_partial_cutoff(ax.geometry, cfg.T, cfg.space_edge_frac,
                                        cfg.time_edge_frac);
        break;
    }
    return ax;
}

} // namespace tatrec
