#pragma once

namespace uavnet {

/// Converts a power level in dBm to watts.
double dbm_to_watt(double level_dbm);
double watt_to_dbm(double watts);

/// Converts a dimensionless ratio in dB to linear scale.
double db_to_linear(double level_db);
double linear_to_db(double ratio);

}  // namespace uavnet
