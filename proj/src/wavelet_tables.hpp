#pragma once

// Static orthogonal scaling-filter tables; see scripts/make_wavelet_tables.py.

namespace rird::tables {

extern const double kHaar[2];
extern const double kDb2[4];
extern const double kDb3[6];
extern const double kDb4[8];
extern const double kDb5[10];
extern const double kDb6[12];
extern const double kDb7[14];
extern const double kDb8[16];
extern const double kDb9[18];
extern const double kDb10[20];
extern const double kDmey[62];

}  // namespace rird::tables
