#pragma once

#include <string>
#include <vector>

namespace mlht {

/// One homogeneous material slab segment.
struct Region {
    double x_lo = 0.0;
    double x_hi = 0.0;
    double sigma_t = 0.0; ///< total cross section [1/cm]
    double sigma_s = 0.0; ///< scattering cross section [1/cm]
    double q = 0.0;       ///< isotropic volumetric source [1/(cm^3 s)]

    double width() const { return x_hi - x_lo; }
    double scattering_ratio() const { return sigma_t > 0.0 ? sigma_s / sigma_t : 0.0; }
};

/// Isotropic incident boundary data; zeros mean vacuum.
struct BoundarySource {
    double phi_in = 0.0; ///< incoming partial flux
    double j_in = 0.0;   ///< incoming partial current (particle entry rate)
};

struct MaterialSample {
    double sigma_t;
    double sigma_s;
    double q;
};

/// Fixed-source 1-D slab transport problem with piecewise-constant
/// materials. Regions tile [0, length]; positions exactly on an interior
/// interface belong to the right-hand region, x == length to the last one.
struct SlabProblem {
    double length = 0.0;
    std::vector<Region> regions;
    BoundarySource left;
    BoundarySource right;

    /// Throws ConfigError on gaps/overlaps, sigma_s outside [0, sigma_t],
    /// or negative sources.
    void validate() const;

    int region_index_at(double x) const;
    const Region& region_at(double x) const { return regions[static_cast<std::size_t>(region_index_at(x))]; }

    /// Integral of q over the domain.
    double volumetric_source() const;
    /// Volumetric source plus incident partial currents on both faces.
    double total_source() const;
    double max_scattering_ratio() const;
};

/// Material properties at x (right-side interface tie-break). Throws on
/// x outside [0, length].
MaterialSample material_at(const SlabProblem& problem, double x);

/// Hierarchy request bundled with problem configs.
struct HierarchySpec {
    int coarse_cells = 1; ///< I_0
    int refinement = 2;   ///< a
    int levels = 0;       ///< L (number of correction levels)
};

struct ProblemConfig {
    SlabProblem problem;
    HierarchySpec hierarchy;
};

/// Reads the JSON problem schema:
///   {"length":.., "regions":[{"x_lo","x_hi","sigma_t","scattering_ratio","q"}],
///    "bc":{"left":{"type":"vacuum"|"isotropic","phi_in","J_in"},"right":{...}},
///    "hierarchy":{"I0","a","L"}}
ProblemConfig load_problem_config(const std::string& path);
ProblemConfig parse_problem_config(const std::string& json_text);

} // namespace mlht
