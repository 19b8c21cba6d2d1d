#pragma once

namespace sideband {

// Exact SI values (2019 redefinition).
inline constexpr double hbar = 1.054571817e-34;  // J s
inline constexpr double k_boltzmann = 1.380649e-23;  // J/K

inline constexpr const char* version_string = "0.1.0";

}  // namespace sideband
