#ifndef TATREC_MEDIUM_HPP
#define TATREC_MEDIUM_HPP

#include "tatrec/geometry.hpp"
#include "tatrec/grid.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tatrec {

/// Radially symmetric exponential profile  amplitude * exp(-r^2/width^2).
struct BumpSpec {
    double amplitude = 0.0;
    double width = 0.1;
    double cx = 0.0;
    double cy = 0.0;
};

/// Disk of raised value with a quintic-smoothstep skirt of the given width.
struct InclusionSpec {
    double amplitude = 0.0;
    double radius = 0.1;
    double cx = 0.0;
    double cy = 0.0;
    double mollifier_width = 0.05;
};

struct SoundSpeedSpec {
    enum class Kind { Constant, Bump, Inclusion };
    Kind kind = Kind::Constant;
    BumpSpec bump;
    InclusionSpec inclusion;
};

struct AttenuationSpec {
    enum class Kind { Zero, Constant, Bump };
    Kind kind = Kind::Zero;
    double constant = 0.0;
    BumpSpec bump;
    double scale = 1.0; // multiplies the whole profile
};

/// Acoustic medium sampled on the grid. The sound speed is exactly 1 and the
/// attenuation exactly 0 at every sample outside the domain; both are kept
/// alongside their generator parameters so ray tracing can evaluate the
/// speed analytically instead of interpolating samples.
struct Medium {
    DomainGeometry geometry;
    ScalarField c;
    ScalarField a;
    ScalarField inv_c2; // cached 1/c^2
    SoundSpeedSpec c_spec;
    AttenuationSpec a_spec;

    double attenuation_sup() const;
    double max_speed() const;
    double min_speed() const;

    double speed_at(double x, double y) const;
    void grad_c2_at(double x, double y, double& gx, double& gy) const;

    /// max |discrete laplacian of c| * dx^2, the roughness measure that the
    /// construction budget limits.
    double smoothness_proxy() const;
};

Medium build_medium(const DomainGeometry& geo, const SoundSpeedSpec& cs,
                    const AttenuationSpec& as, double smoothness_budget = 0.5);

/// Re-run the construction-time checks on a medium whose fields may have
/// been replaced (for example after a file round trip).
void validate_medium(const Medium& m, double smoothness_budget = 0.5);

struct BlobComponent {
    enum class Kind { Gaussian, SmoothDisk };
    Kind kind = Kind::Gaussian;
    double cx = 0.0;
    double cy = 0.0;
    double width = 0.1;  // gaussian width, or disk radius
    double amplitude = 1.0;
    double edge_width = 0.05; // smoothstep skirt of the disk kind
};

struct PhantomSpec {
    enum class Kind { Gaussian, SmoothDisk, Blobs, Checkerboard };
    Kind kind = Kind::Gaussian;
    std::vector<BlobComponent> components; // first entry used for the single kinds
    // checkerboard parameters
    int block_cells = 4;
    double half_extent = 0.3;
    double amplitude = 1.0;
    int mollify_passes = 2;
    std::uint64_t seed = 1;
};

/// Initial pressure with compact support inside the domain.
struct Phantom {
    ScalarField f;
    double support_margin = 0.0; // distance from supp f to the domain boundary
    PhantomSpec spec;
};

/// Builds and validates a phantom. Gaussians are truncated at 1e-12 of their
/// amplitude so supports are genuinely compact. `min_margin < 0` selects the
/// default clearance of a tenth of the domain diameter.
Phantom build_phantom(const DomainGeometry& geo, const PhantomSpec& spec,
                      double min_margin = -1.0);

/// Smooth multi-blob phantom drawn from a seeded generator; used by the
/// statistical probes. Deterministic for a given geometry and seed.
Phantom random_phantom(const DomainGeometry& geo, std::uint64_t seed);

/// Space-time data window chi(t, arc) with values in [0,1], the product of a
/// time profile and a boundary-arc profile. Identity passes everything
/// through; Complete is flat in time until a taper that vanishes before the
/// final measurement time; Partial is supported on the observed arc and on
/// (0, T) only.
struct Cutoff {
    enum class Mode { Identity, Complete, Partial };
    Mode mode = Mode::Identity;
    double T = 0.0;
    double taper_width = 0.0;           // complete: width of the terminal taper
    double s0 = 0.0, s1 = 0.0;          // partial: observed arc
    double space_edge = 0.0;            // partial: smoothstep width inside the arc
    double time_edge = 0.0;             // partial: rise/fall width at t=0 and t=T
    std::vector<double> gamma_arcs;     // arc position per boundary sample

    double time_profile(double t) const;
    double space_profile(double arc) const;
    double eval(double t, double arc) const;
    double eval_index(double t, std::size_t boundary_index) const;
};

Cutoff make_identity_cutoff(const DomainGeometry& geo, double T);

/// `t_flat` is the latest time that must still see an unattenuated window
/// (all of the domain's ray content has exited by then); the taper must fit
/// between it and T.
Cutoff make_complete_cutoff(const DomainGeometry& geo, double T, double t_flat,
                            double taper_frac = 0.1);

Cutoff make_partial_cutoff(const DomainGeometry& geo, double T,
                           double space_edge_frac = 0.1, double time_edge_frac = 0.1);

/// Quintic smoothstep: 0 for t<=0, 1 for t>=1, C^2 across both ends.
double smoothstep5(double t);

} // namespace tatrec

#endif
