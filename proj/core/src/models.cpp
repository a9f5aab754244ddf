#include "gravitree/models.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "gravitree/errors.hpp"
#include "gravitree/rng.hpp"

namespace gravitree {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

Vec3 isotropic_direction(RandomStream& rng) {
    const double cos_t = rng.uniform(-1.0, 1.0);
    const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
    const double phi = rng.uniform(0.0, kTwoPi);
    return {sin_t * std::cos(phi), sin_t * std::sin(phi), cos_t};
}

// Tabulated isotropic Jeans dispersion:
//   sigma_r^2(r) = (1 / rho(r)) Int_r^{r_cut} rho(s) G M_tot(s) / s^2 ds.
// The component density may be unnormalized (the normalization cancels).
class JeansDispersion {
public:
    JeansDispersion(const std::function<double(double)>& rho, const std::function<double(double)>& m_tot,
                    double r_min, double r_cut, double g, int grid = 1024)
        : ln_min_(std::log(r_min)), ln_max_(std::log(r_cut)), inv_step_(0.0) {
        sigma2_.assign(grid, 0.0);
        std::vector<double> r(grid), f(grid);
        const double step = (ln_max_ - ln_min_) / (grid - 1);
        inv_step_ = 1.0 / step;
        for (int i = 0; i < grid; ++i) {
            r[i] = std::exp(ln_min_ + step * i);
            f[i] = rho(r[i]) * g * m_tot(r[i]) / (r[i] * r[i]);
        }
        // tail integral, outside in, trapezoid in ln r (dr = r dln r)
        double tail = 0.0;
        sigma2_[grid - 1] = 0.0;
        for (int i = grid - 2; i >= 0; --i) {
            tail += 0.5 * (f[i] * r[i] + f[i + 1] * r[i + 1]) * step;
            const double rho_i = rho(r[i]);
            sigma2_[i] = rho_i > 0.0 ? tail / rho_i : 0.0;
        }
    }

    double sigma(double radius) const {
        const double lr = std::log(std::max(radius, 1e-300));
        if (lr <= ln_min_) return std::sqrt(sigma2_.front());
        if (lr >= ln_max_) return 0.0;
        const double t = (lr - ln_min_) * inv_step_;
        const auto i = static_cast<std::size_t>(t);
        const double w = t - static_cast<double>(i);
        const double s2 = sigma2_[i] * (1.0 - w) + sigma2_[i + 1] * w;
        return std::sqrt(std::max(0.0, s2));
    }

private:
    double ln_min_, ln_max_, inv_step_;
    std::vector<double> sigma2_;
};

double bisect_increasing(const std::function<double(double)>& fn, double target, double lo, double hi) {
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (fn(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct SphericalDraw {
    Vec3 pos;
    double radius;
};

SphericalDraw draw_radius(RandomStream& rng, const std::function<double(double)>& inverse_cdf) {
    const double r = inverse_cdf(rng.uniform());
    SphericalDraw d;
    d.radius = r;
    d.pos = r * isotropic_direction(rng);
    return d;
}

}  // namespace

void ComponentSpec::validate() const {
    if (!(mass > 0.0)) throw data_error("component: mass must be positive");
    if (!(scale_length > 0.0)) throw data_error("component: scale length must be positive");
    if (cutoff() < 5.0 * scale_length) throw data_error("component: r_cut must be >= 5 scale lengths");
    if (kind == ComponentKind::exponential_disk && !(scale_height > 0.0))
        throw data_error("component: disk needs a scale height");
}

double ModelCatalog::total_mass() const {
    double m = 0.0;
    for (const auto& c : components) m += c.mass;
    return m;
}

ModelCatalog m31_catalog() {
    ModelCatalog cat;
    ComponentSpec halo;
    halo.kind = ComponentKind::nfw;
    halo.mass = 81.1;  // 8.11e11 Msun
    halo.scale_length = 7.63;
    cat.components.push_back(halo);

    ComponentSpec stellar_halo;
    stellar_halo.kind = ComponentKind::hernquist;  // stands in for the Sersic profile
    stellar_halo.mass = 0.8;                       // 8e9 Msun
    stellar_halo.scale_length = 9.0;
    stellar_halo.sersic_index = 2.2;
    cat.components.push_back(stellar_halo);

    ComponentSpec bulge;
    bulge.kind = ComponentKind::hernquist;
    bulge.mass = 3.24;  // 3.24e10 Msun
    bulge.scale_length = 0.61;
    cat.components.push_back(bulge);

    ComponentSpec disk;
    disk.kind = ComponentKind::exponential_disk;
    disk.mass = 3.66;  // 3.66e10 Msun
    disk.scale_length = 5.4;
    disk.scale_height = 0.6;
    disk.q_floor = 1.8;
    cat.components.push_back(disk);
    return cat;
}

double plummer_enclosed_fraction(double r, double a) {
    const double r2 = r * r;
    return r2 * r / std::pow(r2 + a * a, 1.5);
}

double hernquist_enclosed_fraction(double r, double a) {
    const double q = r / (r + a);
    return q * q;
}

double nfw_mu(double x) { return std::log1p(x) - x / (1.0 + x); }

namespace {

// Spherically-enclosed cumulative mass of one component (disk included via
// its cylindrical cumulative mass, adequate for the composite potential).
double component_enclosed_mass(const ComponentSpec& c, double r) {
    const double rc = c.cutoff();
    const double rr = std::min(r, rc);
    switch (c.kind) {
        case ComponentKind::plummer:
            return c.mass * plummer_enclosed_fraction(rr, c.scale_length) /
                   plummer_enclosed_fraction(rc, c.scale_length);
        case ComponentKind::hernquist:
            return c.mass * hernquist_enclosed_fraction(rr, c.scale_length) /
                   hernquist_enclosed_fraction(rc, c.scale_length);
        case ComponentKind::nfw:
            return c.mass * nfw_mu(rr / c.scale_length) / nfw_mu(rc / c.scale_length);
        case ComponentKind::exponential_disk: {
            const double x = rr / c.scale_length;
            const double xc = rc / c.scale_length;
            const double f = 1.0 - (1.0 + x) * std::exp(-x);
            const double fc = 1.0 - (1.0 + xc) * std::exp(-xc);
            return c.mass * f / fc;
        }
    }
    return 0.0;
}

ParticleSystem make_equal_mass(std::size_t n, double mass) {
    if (n < 1) throw data_error("sampler: need at least one particle");
    if (!(mass > 0.0)) throw data_error("sampler: mass must be positive");
    ParticleSystem sys(n);
    std::fill(sys.mass.begin(), sys.mass.end(), mass / static_cast<double>(n));
    return sys;
}

// Removes the bulk velocity so samples carry zero net momentum. Positions
// stay as drawn: every particle remains inside its truncation radius.
void recentre(ParticleSystem& sys) {
    Vec3 v{};
    for (std::size_t i = 0; i < sys.n(); ++i) v += sys.vel[i];
    v *= 1.0 / static_cast<double>(sys.n());
    for (std::size_t i = 0; i < sys.n(); ++i) sys.vel[i] -= v;
}

using MassFn = std::function<double(double)>;

// inverse_fraction maps a target enclosed fraction in [0, f_cut] to a
// radius; when absent the enclosed-fraction curve is inverted by bisection.
ParticleSystem sample_jeans_sphere(std::size_t n, double mass, double scale, double r_cut,
                                   std::uint64_t seed, std::uint64_t stream,
                                   const std::function<double(double)>& rho_shape,
                                   const std::function<double(double)>& enclosed_fraction,
                                   const MassFn& total_mass_fn,
                                   const std::function<double(double)>& inverse_fraction = nullptr) {
    ParticleSystem sys = make_equal_mass(n, mass);
    RandomStream rng(seed, stream);
    const double f_cut = enclosed_fraction(r_cut);
    auto inverse = [&](double u) {
        const double target = u * f_cut;
        if (inverse_fraction) return inverse_fraction(target);
        return bisect_increasing(enclosed_fraction, target, 0.0, r_cut);
    };
    const MassFn m_tot = total_mass_fn ? total_mass_fn : MassFn{[&](double r) {
        return mass * enclosed_fraction(std::min(r, r_cut)) / f_cut;
    }};
    JeansDispersion jeans(rho_shape, m_tot, scale * 1e-4, r_cut, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const SphericalDraw d = draw_radius(rng, inverse);
        sys.pos[i] = d.pos;
        const double s = jeans.sigma(d.radius);
        sys.vel[i] = {s * rng.normal(), s * rng.normal(), s * rng.normal()};
    }
    recentre(sys);
    return sys;
}

ParticleSystem sample_plummer_impl(std::size_t n, double mass, double a, std::uint64_t seed,
                                   std::uint64_t stream, double r_cut) {
    ParticleSystem sys = make_equal_mass(n, mass);
    RandomStream rng(seed, stream);
    const double f_cut = plummer_enclosed_fraction(r_cut, a);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform() * f_cut;
        const double u23 = std::cbrt(u) * std::cbrt(u);
        const double r = a * std::sqrt(u23 / (1.0 - u23));
        sys.pos[i] = r * isotropic_direction(rng);
        // exact isotropic distribution function: f(q) ~ q^2 (1 - q^2)^{7/2},
        // v = q v_esc with v_esc = sqrt(2) (GM)^{1/2} (r^2 + a^2)^{-1/4}
        double q = 0.0;
        for (;;) {
            const double qt = rng.uniform();
            const double y = rng.uniform(0.0, 0.1);
            const double one_q2 = 1.0 - qt * qt;
            if (y < qt * qt * one_q2 * one_q2 * one_q2 * std::sqrt(one_q2)) {
                q = qt;
                break;
            }
        }
        const double v_esc = std::sqrt(2.0 * mass) / std::pow(r * r + a * a, 0.25);
        sys.vel[i] = (q * v_esc) * isotropic_direction(rng);
    }
    recentre(sys);
    return sys;
}

ParticleSystem sample_hernquist_impl(std::size_t n, double mass, double a, std::uint64_t seed,
                                     std::uint64_t stream, double r_cut, const MassFn& total_mass_fn) {
    auto rho = [a](double r) {
        const double x = std::max(r, 1e-12 * a) / a;
        return 1.0 / (x * std::pow(1.0 + x, 3.0));
    };
    auto frac = [a](double r) { return hernquist_enclosed_fraction(r, a); };
    auto inverse = [a](double target) {
        const double q = std::sqrt(target);  // M(<r)/M = (r / (r + a))^2
        return a * q / (1.0 - q);
    };
    return sample_jeans_sphere(n, mass, a, r_cut, seed, stream, rho, frac, total_mass_fn, inverse);
}

}  // namespace

ParticleSystem sample_plummer(std::size_t n, double mass, double a, std::uint64_t seed, double r_cut) {
    if (!(a > 0.0)) throw data_error("sample_plummer: scale must be positive");
    if (r_cut <= 0.0) r_cut = 20.0 * a;
    return sample_plummer_impl(n, mass, a, seed, 0, r_cut);
}

ParticleSystem sample_hernquist(std::size_t n, double mass, double a, std::uint64_t seed, double r_cut) {
    if (!(a > 0.0)) throw data_error("sample_hernquist: scale must be positive");
    if (r_cut <= 0.0) r_cut = 20.0 * a;
    return sample_hernquist_impl(n, mass, a, seed, 0, r_cut, nullptr);
}

ParticleSystem sample_nfw(std::size_t n, double mass, double r_s, double r_cut, std::uint64_t seed) {
    if (!(r_s > 0.0)) throw data_error("sample_nfw: scale must be positive");
    if (!(r_cut >= 5.0 * r_s)) throw data_error("sample_nfw: r_cut must be >= 5 r_s");
    auto rho = [r_s](double r) {
        const double x = std::max(r, 1e-12 * r_s) / r_s;
        return 1.0 / (x * (1.0 + x) * (1.0 + x));
    };
    auto frac = [r_s](double r) { return nfw_mu(r / r_s); };
    return sample_jeans_sphere(n, mass, r_s, r_cut, seed, 0, rho, frac, nullptr);
}

CatalogProvider::CatalogProvider(ModelCatalog catalog, double g) : catalog_(std::move(catalog)), G_(g) {}

double CatalogProvider::enclosed_mass(double r) const {
    double m = 0.0;
    for (const auto& c : catalog_.components) m += component_enclosed_mass(c, r);
    return m;
}

double CatalogProvider::circular_velocity(double R) const {
    if (R <= 0.0) return 0.0;
    return std::sqrt(G_ * enclosed_mass(R) / R);
}

ParticleSystem sample_exponential_disk(std::size_t n, double mass, double r_d, double z_d,
                                       std::uint64_t seed, const CircularVelocityProvider& provider,
                                       double q_floor, double r_cut, double z_cut) {
    if (!(r_d > 0.0) || !(z_d > 0.0)) throw data_error("sample_exponential_disk: bad scales");
    if (r_cut <= 0.0) r_cut = 20.0 * r_d;
    if (z_cut <= 0.0) z_cut = 10.0 * z_d;
    if (!(q_floor > 0.0)) q_floor = 1.0;

    ParticleSystem sys = make_equal_mass(n, mass);
    RandomStream rng(seed, 0);

    const double xc = r_cut / r_d;
    const double f_cut = 1.0 - (1.0 + xc) * std::exp(-xc);
    auto radial_frac = [](double x) { return 1.0 - (1.0 + x) * std::exp(-x); };

    // dispersion grids over log R
    const int grid = 512;
    const double ln_min = std::log(r_d * 1e-3), ln_max = std::log(r_cut);
    const double step = (ln_max - ln_min) / (grid - 1);
    std::vector<double> radius(grid), omega2(grid), sig_r(grid), sig_p(grid), sig_z(grid);
    const double sigma0 = mass / (kTwoPi * r_d * r_d * f_cut);
    for (int i = 0; i < grid; ++i) {
        radius[i] = std::exp(ln_min + step * i);
        const double vc = provider.circular_velocity(radius[i]);
        omega2[i] = vc * vc / (radius[i] * radius[i]);
    }
    for (int i = 0; i < grid; ++i) {
        const int lo = std::max(0, i - 1), hi = std::min(grid - 1, i + 1);
        const double dln = step * (hi - lo);
        const double dw2 = (omega2[hi] - omega2[lo]) / dln;  // d(Omega^2)/d ln R
        const double kappa2 = std::max(omega2[i], 4.0 * omega2[i] + dw2);
        const double kappa = std::sqrt(kappa2);
        const double surface = sigma0 * std::exp(-radius[i] / r_d);
        sig_r[i] = 3.36 * surface * q_floor / kappa;  // G = 1; Q pinned at the floor
        sig_p[i] = sig_r[i] * kappa / (2.0 * std::sqrt(omega2[i]));
        sig_z[i] = std::sqrt(kPi * surface * z_d);
    }
    auto lookup = [&](const std::vector<double>& tab, double R) {
        const double lr = std::log(std::max(R, radius.front()));
        if (lr >= ln_max) return tab.back();
        const double t = (lr - ln_min) / step;
        const auto i = static_cast<std::size_t>(t);
        const double w = t - static_cast<double>(i);
        return tab[i] * (1.0 - w) + tab[i + 1] * w;
    };

    const double z_range = std::tanh(z_cut / z_d);  // CDF span of the sech^2 profile
    for (std::size_t i = 0; i < n; ++i) {
        const double x = bisect_increasing(radial_frac, rng.uniform() * f_cut, 0.0, xc);
        const double R = x * r_d;
        const double phi = rng.uniform(0.0, kTwoPi);
        const double z = z_d * std::atanh(z_range * rng.uniform(-1.0, 1.0));
        sys.pos[i] = {R * std::cos(phi), R * std::sin(phi), z};

        const double v_r = lookup(sig_r, R) * rng.normal();
        const double v_phi = provider.circular_velocity(R) + lookup(sig_p, R) * rng.normal();
        const double v_z = lookup(sig_z, R) * rng.normal();
        sys.vel[i] = {v_r * std::cos(phi) - v_phi * std::sin(phi),
                      v_r * std::sin(phi) + v_phi * std::cos(phi), v_z};
    }
    recentre(sys);
    return sys;
}

std::vector<std::size_t> apportion_counts(const ModelCatalog& catalog, std::size_t n_total) {
    const std::size_t k = catalog.components.size();
    const double total = catalog.total_mass();
    std::vector<std::size_t> counts(k);
    std::vector<std::pair<double, std::size_t>> remainders(k);
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < k; ++c) {
        const double share = static_cast<double>(n_total) * catalog.components[c].mass / total;
        counts[c] = static_cast<std::size_t>(share);
        remainders[c] = {share - static_cast<double>(counts[c]), c};
        assigned += counts[c];
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t i = 0; assigned < n_total; ++i, ++assigned) ++counts[remainders[i % k].second];
    return counts;
}

ParticleSystem build_m31(std::size_t n_total, std::uint64_t seed) {
    const ModelCatalog cat = m31_catalog();
    const std::size_t k = cat.components.size();
    if (n_total < k) throw data_error("build_m31: not enough particles for every component");
    const double total = cat.total_mass();

    const std::vector<std::size_t> counts = apportion_counts(cat, n_total);
    for (std::size_t c = 0; c < k; ++c)
        if (counts[c] == 0) throw data_error("build_m31: n_total too small to populate every component");

    const double particle_mass = total / static_cast<double>(n_total);
    const CatalogProvider provider(cat);
    MassFn m_tot = [&provider](double r) { return provider.enclosed_mass(r); };

    ParticleSystem sys;
    for (std::size_t c = 0; c < k; ++c) {
        const ComponentSpec& spec = cat.components[c];
        const double comp_mass = particle_mass * static_cast<double>(counts[c]);
        const std::uint64_t stream = 100 + c;
        ParticleSystem part;
        switch (spec.kind) {
            case ComponentKind::nfw: {
                auto rho = [&spec](double r) {
                    const double x = std::max(r, 1e-12 * spec.scale_length) / spec.scale_length;
                    return 1.0 / (x * (1.0 + x) * (1.0 + x));
                };
                auto frac = [&spec](double r) { return nfw_mu(r / spec.scale_length); };
                part = sample_jeans_sphere(counts[c], comp_mass, spec.scale_length, spec.cutoff(), seed,
                                           stream, rho, frac, m_tot);
                break;
            }
            case ComponentKind::hernquist:
                part = sample_hernquist_impl(counts[c], comp_mass, spec.scale_length, seed, stream,
                                             spec.cutoff(), m_tot);
                break;
            case ComponentKind::plummer:
                part = sample_plummer_impl(counts[c], comp_mass, spec.scale_length, seed, stream,
                                           spec.cutoff());
                break;
            case ComponentKind::exponential_disk:
                part = sample_exponential_disk(counts[c], comp_mass, spec.scale_length, spec.scale_height,
                                               RandomStream::mix(seed, stream, 0), provider, spec.q_floor,
                                               spec.cutoff(), 10.0 * spec.scale_height);
                break;
        }
        sys.append(part);
    }
    sys.time = 0.0;
    return sys;
}

ParticleSystem sample_model(const std::string& name, std::size_t n, std::uint64_t seed) {
    if (name == "plummer") return sample_plummer(n, 1.0, 1.0, seed);
    if (name == "hernquist") return sample_hernquist(n, 1.0, 1.0, seed);
    if (name == "nfw") return sample_nfw(n, 1.0, 1.0, 20.0, seed);
    if (name == "disk") {
        ModelCatalog cat;
        ComponentSpec d;
        d.kind = ComponentKind::exponential_disk;
        d.mass = 1.0;
        d.scale_length = 1.0;
        d.scale_height = 0.1;
        d.q_floor = 1.5;
        cat.components.push_back(d);
        const CatalogProvider provider(cat);
        return sample_exponential_disk(n, 1.0, 1.0, 0.1, seed, provider, 1.5);
    }
    if (name == "m31") return build_m31(n, seed);
    throw data_error("unknown model: " + name);
}

}  // namespace gravitree
