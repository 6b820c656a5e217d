#ifndef TATREC_CONFIG_HPP
#define TATREC_CONFIG_HPP

#include "tatrec/geometry.hpp"
#include "tatrec/medium.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tatrec {

/// Centered unit-amplitude gaussian, the out-of-the-box phantom.
inline PhantomSpec default_phantom_spec() {
    PhantomSpec p;
    BlobComponent b;
    b.width = 0.12;
    b.edge_width = 0.08;
    p.components = {b};
    return p;
}

/// Full description of one experiment, as read from an INI config file.
/// Parsing is strict: unknown sections or keys, malformed values, and
/// contract violations are all fatal and name the offending line.
struct ExperimentConfig {
    // [domain]
    ShapeKind shape = ShapeKind::Disk;
    double half = 1.0;    // domain half side or radius
    double buffer = 1.3;  // clearance between the boundary ring and the box edge
    int n = 129;          // samples per box side

    // [medium]
    SoundSpeedSpec speed;
    AttenuationSpec attenuation;

    // [phantom]
    PhantomSpec phantom = default_phantom_spec();
    bool phantom_random = false; // draw the phantom from the seeded generator
    double phantom_margin = -1.0; // required boundary clearance; <0 = default

    // [time]
    double T = 2.2;
    double cfl_safety = 0.9;
    double dt = 0.0; // > 0 pins the time step instead of the safety fraction

    // [cutoff]
    enum class CutoffKind { Identity, Complete, Partial };
    CutoffKind cutoff = CutoffKind::Identity;
    double t_flat = 0.0; // complete: latest fully weighted time; 0 = as late as fits
    double taper_frac = 0.1;
    double s0 = 0.75, s1 = 0.25; // partial: observed arc [s0, s1), may wrap
    double space_edge_frac = 0.1;
    double time_edge_frac = 0.1;

    // [solver]
    double tol_elliptic = 1e-9;
    double noise_level = 0.0; // relative trace perturbation; 0 = clean data

    // [neumann]
    int max_iters = 20;
    double tol = 1e-3;

    // [sweep]
    std::vector<double> attenuation_scales{0.0, 0.05, 0.1, 0.2, 0.4};
    std::vector<int> grid_sizes;

    // [output]
    std::string output_dir = "out";
    std::uint64_t seed = 1;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical INI rendering: every key in a fixed order, numbers with 17
/// significant digits. Reparsing the result yields an equal config, and the
/// config hash is taken over this text.
std::string serialize_config(const ExperimentConfig& cfg);

std::uint64_t config_hash(const ExperimentConfig& cfg);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

/// Concrete objects built from a config: the rasterized geometry (carrying
/// the observed arc when the cutoff is partial), the medium, the phantom,
/// and the data window.
struct AssembledExperiment {
    DomainGeometry geometry;
    Medium medium;
    Phantom phantom;
    Cutoff cutoff;
};

AssembledExperiment assemble(const ExperimentConfig& cfg);

} // namespace tatrec

#endif
