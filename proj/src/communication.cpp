// SPDX-License-Identifier: Apache-2.0
#include "isac/communication.hpp"

#include <numbers>

#include "isac/polarization.hpp"

namespace isac {

double doppler_comm(const Ray& ray, const Velocity3& rx_velocity, double wavelength) {
    if (!(wavelength > 0.0))
        throw InvalidCarrier("doppler_comm: wavelength must be positive");
    return rx_velocity.dot(spherical_unit_vector(ray.arrival())) / wavelength;
}

void apply_comm_doppler(ClusterSet& set, const Velocity3& rx_velocity, double wavelength) {
    for (auto& cluster : set.clusters)
        for (auto& ray : cluster.rays)
            ray.doppler_hz = doppler_comm(ray, rx_velocity, wavelength);
}

CommCir assemble_comm_cir(const CommLink& link, double wavelength, std::span<const double> time_samples,
                          const std::vector<bool>& shared_flags) {
    if (!(wavelength > 0.0))
        throw InvalidCarrier("assemble_comm_cir: wavelength must be positive");
    const auto& clusters = link.clusters.clusters;
    if (shared_flags.size() != clusters.size())
        throw ConfigError("assemble_comm_cir: one shared flag per cluster is required");
    const ArrayGeometry& tx_array = link.tx.array;
    const ArrayGeometry& rx_array = link.rx.array;
    if (tx_array.count() == 0 || rx_array.count() == 0)
        throw ConfigError("assemble_comm_cir: empty antenna array");

    CommCir out;
    out.total = CirTensor(rx_array.count(), tx_array.count(), link.clusters.ray_count(), time_samples.size());
    out.total.kind = LinkKind::communication;
    out.shared = out.total;
    out.shared.component = Component::shared;
    out.non_shared = out.total;
    out.non_shared.component = Component::non_shared;

    std::size_t path = 0;
    for (std::size_t n = 0; n < clusters.size(); ++n) {
        CirTensor& part = shared_flags[n] ? out.shared : out.non_shared;
        for (const Ray& ray : clusters[n].rays) {
            out.total.path_delays()[path] = ray.delay;
            out.shared.path_delays()[path] = ray.delay;
            out.non_shared.path_delays()[path] = ray.delay;
            const SphericalAngles arrival = ray.arrival();
            const SphericalAngles departure = ray.departure();
            const PolarizationMatrix pol = polarization_matrix(ray.phases, ray.xpr_linear);
            const FieldVector f_rx = field_response(rx_array.pattern, arrival);
            const FieldVector f_tx = field_response(tx_array.pattern, departure);
            const std::complex<double> gain =
                link.large_scale_gain * ray.amplitude * polarimetric_gain(f_rx, pol, f_tx);
            for (std::size_t q = 0; q < rx_array.count(); ++q) {
                const auto rx_phase = array_phase(rx_array.element_positions[q], arrival, wavelength);
                for (std::size_t p = 0; p < tx_array.count(); ++p) {
                    const auto tx_phase = array_phase(tx_array.element_positions[p], departure, wavelength);
                    const std::complex<double> base = gain * rx_phase * tx_phase;
                    for (std::size_t s = 0; s < time_samples.size(); ++s) {
                        const auto h = base * std::polar(1.0, 2.0 * std::numbers::pi * ray.doppler_hz * time_samples[s]);
                        out.total(q, p, path, s) = h;
                        part(q, p, path, s) = h;
                    }
                }
            }
            ++path;
        }
    }
    return out;
}

} // namespace isac
