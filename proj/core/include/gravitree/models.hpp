#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gravitree/particle_system.hpp"

namespace gravitree {

// Code units throughout: length in kpc, mass in 1e10 Msun, G = 1.

enum class ComponentKind { plummer, hernquist, nfw, exponential_disk };

struct ComponentSpec {
    ComponentKind kind = ComponentKind::plummer;
    double mass = 1.0;          // total mass within r_cut
    double scale_length = 1.0;  // a, r_s, or R_d
    double sersic_index = 0.0;  // recorded only
    double scale_height = 0.0;  // disk z_d
    double r_cut = 0.0;         // 0: 20 * scale_length
    double q_floor = 0.0;       // disk Toomre Q floor

    double cutoff() const { return r_cut > 0.0 ? r_cut : 20.0 * scale_length; }
    void validate() const;
};

struct ModelCatalog {
    std::vector<ComponentSpec> components;
    double total_mass() const;
};

// The built-in Andromeda-like composite: NFW halo, Sersic stellar halo
// (approximated here by a Hernquist sphere of the quoted scale), Hernquist
// bulge, and an exponential disk.
ModelCatalog m31_catalog();

// Midplane circular velocity and enclosed mass from all model components;
// the disk contributes through its spherically-enclosed cumulative mass.
class CircularVelocityProvider {
public:
    virtual ~CircularVelocityProvider() = default;
    virtual double circular_velocity(double R) const = 0;
    virtual double enclosed_mass(double r) const = 0;
};

class CatalogProvider final : public CircularVelocityProvider {
public:
    explicit CatalogProvider(ModelCatalog catalog, double G = 1.0);
    double circular_velocity(double R) const override;
    double enclosed_mass(double r) const override;

private:
    ModelCatalog catalog_;
    double G_;
};

// All samplers produce equal-mass particles (mass / n each), are pure
// functions of their arguments, and draw from counter-based streams, so the
// output is bit-identical for a given seed and safe to generate concurrently.

// Positions by closed-form inverse CDF, velocities from the exact isotropic
// distribution function (rejection sampled).
ParticleSystem sample_plummer(std::size_t n, double mass, double a, std::uint64_t seed, double r_cut = 0.0);

// Positions by closed-form inverse CDF, velocities isotropic Gaussian with
// the spherical-Jeans radial dispersion.
ParticleSystem sample_hernquist(std::size_t n, double mass, double a, std::uint64_t seed, double r_cut = 0.0);

// Positions by numerical inversion of M(r) ~ ln(1 + x) - x / (1 + x),
// truncated at r_cut; Jeans-based isotropic velocities.
ParticleSystem sample_nfw(std::size_t n, double mass, double r_s, double r_cut, std::uint64_t seed);

// Exponential surface density, sech^2 vertical profile, azimuthal velocity
// equal to the provider's circular velocity plus Gaussian dispersions sized
// so Toomre's Q stays at the configured floor.
ParticleSystem sample_exponential_disk(std::size_t n, double mass, double r_d, double z_d,
                                       std::uint64_t seed, const CircularVelocityProvider& provider,
                                       double q_floor = 1.0, double r_cut = 0.0, double z_cut = 0.0);

// Particle counts per catalog component, proportional to component masses
// by largest remainder (each within one particle of the exact share).
std::vector<std::size_t> apportion_counts(const ModelCatalog& catalog, std::size_t n_total);

// The M31-like composite with particle counts proportional to component
// masses under a single shared particle mass. Throws data_error when
// n_total cannot give every component at least one particle.
ParticleSystem build_m31(std::size_t n_total, std::uint64_t seed);

// Named-model convenience dispatcher used by the command-line driver.
ParticleSystem sample_model(const std::string& name, std::size_t n, std::uint64_t seed);

// Analytic helpers shared with the tests.
double plummer_enclosed_fraction(double r, double a);
double hernquist_enclosed_fraction(double r, double a);
double nfw_mu(double x);  // ln(1 + x) - x / (1 + x)

}  // namespace gravitree
