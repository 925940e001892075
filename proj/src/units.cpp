#include "uavnet/units.hpp"

#include <cmath>

namespace uavnet {

double dbm_to_watt(double level_dbm) { return std::pow(10.0, (level_dbm - 30.0) / 10.0); }

double watt_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

double db_to_linear(double level_db) { return std::pow(10.0, level_db / 10.0); }

double linear_to_db(double ratio) { return 10.0 * std::log10(ratio); }

}  // namespace uavnet
