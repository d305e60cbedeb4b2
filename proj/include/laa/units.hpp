#pragma once

namespace laa {

/// dBm <-> watts. Powers are stored in watts everywhere inside the library;
/// dBm only appears at the config/CLI boundary.
double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

}  // namespace laa
