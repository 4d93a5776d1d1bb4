#pragma once

#include <string>

#include "sshyb/noise_fields.hpp"
#include "sshyb/spatial.hpp"

namespace sshyb {

// ATF container, little-endian:
//   magic "ATF1", u32 Q, u32 n_phi, u32 n_theta, u32 F, f64 sample_rate,
//   F x f64 frequencies, then gains as f64 (re, im) pairs in
//   direction-major, then frequency, then mic order.
void write_atf(const std::string& path, const AtfSet& atf);
AtfSet read_atf(const std::string& path);  // validates counts and finiteness

// Dictionary cache, same conventions:
//   magic "WDC1", u32 M, u32 F, u32 Q, f64 target_azimuth, f64 target_inclination,
//   u32 target_node, then M descriptors (u32 kind, f64 peak_azimuth, f64 dr_db,
//   u32 direction_index), then weights as f64 (re, im) in model-major, then
//   band, then mic order.
void write_dictionary(const std::string& path, const WeightDictionary& dict);
WeightDictionary read_dictionary(const std::string& path);

}  // namespace sshyb
